#include "gentwist/curvature.hpp"

#include <cmath>

#include "gentwist/gc_linalg.hpp"

namespace gentwist {

std::vector<Mat> riemann(const MetricJets& mj, ConnKind kind) {
  const int n = mj.n;
  ConnJet cj = (kind == ConnKind::LeviCivita) ? leviCivitaJet(mj)
                                              : torsionConnectionJet(mj, +1.0);
  // G_i(l, k) = Gamma^l_{ik}; dG[m][i](l, k) = d_m Gamma^l_{ik}.
  std::vector<Mat> gdir(n, Mat::Zero(n, n));
  std::vector<std::vector<Mat>> dgdir(n, std::vector<Mat>(n, Mat::Zero(n, n)));
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k) {
        gdir[i](l, k) = cj.gamma[l](i, k);
        for (int m = 0; m < n; ++m) dgdir[m][i](l, k) = cj.dgamma[m][l](i, k);
      }
  std::vector<Mat> rm(static_cast<size_t>(n) * n, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat r = -(dgdir[i][j] - dgdir[j][i] + gdir[i] * gdir[j] - gdir[j] * gdir[i]);
      rm[static_cast<size_t>(i) * n + j] = r;
    }
  return rm;
}

Mat curvEndo(const std::vector<Mat>& rm, const Vec& x, const Vec& y) {
  const int n = x.size();
  Mat out = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (x[i] == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      if (y[j] == 0.0) continue;
      out.noalias() += x[i] * y[j] * rm[static_cast<size_t>(i) * n + j];
    }
  }
  return out;
}

double bianchiResidual(const std::vector<Mat>& rm) {
  const int n = static_cast<int>(std::sqrt(static_cast<double>(rm.size())) + 0.5);
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = rm[static_cast<size_t>(i) * n + j](l, k) +
                     rm[static_cast<size_t>(j) * n + k](l, i) +
                     rm[static_cast<size_t>(k) * n + i](l, j);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

double pairSymmetryResidual(const std::vector<Mat>& rm, const Mat& g) {
  const int n = g.rows();
  // Lowered tensor R_{ijkl} = g(R(e_i,e_j) e_k, e_l).
  auto low = [&](int i, int j, int k, int l) {
    return (g * rm[static_cast<size_t>(i) * n + j]).coeff(l, k);
  };
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          worst = std::max(worst, std::abs(low(i, j, k, l) - low(k, l, i, j)));
  return worst;
}

int CurvOp::pairIndex(int a, int b) const {
  for (size_t t = 0; t < pairs.size(); ++t)
    if ((pairs[t].first == a && pairs[t].second == b) ||
        (pairs[t].first == b && pairs[t].second == a))
      return static_cast<int>(t);
  throw DimensionError("pair index out of range");
}

Vec CurvOp::wedgeCoords(const Vec& x, const Vec& y) const {
  Vec out = Vec::Zero(static_cast<int>(pairs.size()));
  for (size_t t = 0; t < pairs.size(); ++t) {
    int a = pairs[t].first, b = pairs[t].second;
    out[static_cast<int>(t)] = x[a] * y[b] - x[b] * y[a];
  }
  return out;
}

CurvOp curvatureOperator(const MetricJets& mj, ConnKind kind, int orientation) {
  const int n = mj.n;
  CurvOp cop;
  cop.n = n;
  const Mat g = mj.gVal();
  cop.frame = gOrthonormalFrame(g, orientation);
  std::vector<Mat> rm = riemann(mj, kind);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) cop.pairs.emplace_back(a, b);
  const int np = static_cast<int>(cop.pairs.size());
  // Cache R(q_a, q_b) once per pair; frame components are
  // R^hat_{abcd} = g(R(q_a, q_b) q_c, q_d).
  std::vector<Mat> rpair(static_cast<size_t>(np));
  for (int t = 0; t < np; ++t)
    rpair[static_cast<size_t>(t)] =
        curvEndo(rm, cop.frame.col(cop.pairs[static_cast<size_t>(t)].first),
                 cop.frame.col(cop.pairs[static_cast<size_t>(t)].second));
  cop.c = Mat::Zero(np, np);
  for (int s = 0; s < np; ++s) {
    for (int t = 0; t < np; ++t) {
      int c = cop.pairs[static_cast<size_t>(t)].first;
      int d = cop.pairs[static_cast<size_t>(t)].second;
      cop.c(s, t) =
          cop.frame.col(d).dot(g * (rpair[static_cast<size_t>(s)] * cop.frame.col(c)));
    }
  }
  // Frame Ricci: Ric_{bc} = -sum_a R^hat_{abca}; scalar = trace.
  cop.ricci = Mat::Zero(n, n);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      double s = 0.0;
      for (int a = 0; a < n; ++a) {
        if (a == b) continue;
        Mat r = (a < b) ? rpair[static_cast<size_t>(cop.pairIndex(a, b))]
                        : Mat(-rpair[static_cast<size_t>(cop.pairIndex(b, a))]);
        s -= cop.frame.col(a).dot(g * (r * cop.frame.col(c)));
      }
      cop.ricci(b, c) = s;
    }
  cop.scalar = cop.ricci.trace();
  return cop;
}

CurvDecomp decompose(const CurvOp& cop) {
  const int n = cop.n;
  const int np = static_cast<int>(cop.pairs.size());
  CurvDecomp d;
  d.s = 2.0 * cop.c.trace();
  d.idPart = (d.s / (n * (n - 1.0))) * Mat::Identity(np, np);
  // Traceless-Ricci block in the pair basis.
  Mat rho = cop.ricci;
  d.bop = Mat::Zero(np, np);
  if (n > 2) {
    auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
    for (int s = 0; s < np; ++s) {
      int a = cop.pairs[static_cast<size_t>(s)].first;
      int b = cop.pairs[static_cast<size_t>(s)].second;
      for (int t = 0; t < np; ++t) {
        int c = cop.pairs[static_cast<size_t>(t)].first;
        int e = cop.pairs[static_cast<size_t>(t)].second;
        double v = (rho(a, c) * delta(b, e) - rho(a, e) * delta(b, c) +
                    delta(a, c) * rho(b, e) - delta(a, e) * rho(b, c)) /
                   (n - 2.0);
        if (s == t) v -= 2.0 * d.s / (n * (n - 2.0));
        d.bop(s, t) = v;
      }
    }
  }
  d.wop = cop.c - d.idPart - d.bop;
  if (n == 4) {
    // Hodge star on lexicographic pairs [01,02,03,12,13,23].
    d.star = Mat::Zero(6, 6);
    d.star(0, 5) = d.star(5, 0) = 1.0;
    d.star(1, 4) = d.star(4, 1) = -1.0;
    d.star(2, 3) = d.star(3, 2) = 1.0;
    Mat pp = 0.5 * (Mat::Identity(6, 6) + d.star);
    Mat pm = 0.5 * (Mat::Identity(6, 6) - d.star);
    d.wplus = pp * d.wop * pp;
    d.wminus = pm * d.wop * pm;
  }
  return d;
}

double reassemblyResidual(const CurvOp& cop, const CurvDecomp& d) {
  Mat sum = d.idPart + d.bop + d.wop;
  double r = (cop.c - sum).cwiseAbs().maxCoeff();
  if (cop.n == 4) {
    Mat wsum = d.wplus + d.wminus;
    r = std::max(r, (d.wop - wsum).cwiseAbs().maxCoeff());
  }
  return r;
}

std::pair<Mat, Mat> connCurvatureAction(const MetricJets& mj, const Vec& x, const Vec& y,
                                        const Mat& j1, const Mat& j2) {
  std::vector<Mat> rm = riemann(mj, ConnKind::SkewTorsion);
  Mat r = curvEndo(rm, x, y);
  return {Mat(r * j1 - j1 * r), Mat(r * j2 - j2 * r)};
}

}  // namespace gentwist
