#include "gentwist/connections.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace gentwist {

Mat ConnCoeffs::dirMatrix(const Vec& z) const {
  const int n = dim();
  Mat out = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += z[i] * gamma[k](i, j);
      out(k, j) = s;
    }
  return out;
}

Vec ConnCoeffs::apply(const Vec& z, const CompJet& x) const {
  return Vec(x.jac * z + dirMatrix(z) * x.val);
}

Vec ConnCoeffs::applyForm(const Vec& z, const CompJet& alpha) const {
  // (D_z a)_j = z^i (d_i a_j - Gamma^k_{ij} a_k)
  Vec out = alpha.jac * z;
  out -= dirMatrix(z).transpose() * alpha.val;
  return out;
}

Vec ConnCoeffs::torsion(const Vec& x, const Vec& y) const {
  const int n = dim();
  Vec out = Vec::Zero(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += (gamma[k](i, j) - gamma[k](j, i)) * x[i] * y[j];
    out[k] = s;
  }
  return out;
}

double ConnCoeffs::metricDefect(const MetricJets& mj) const {
  const int n = dim();
  double worst = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = mj.dgVal(k, i, j);
        for (int m = 0; m < n; ++m)
          s -= gamma[m](k, i) * mj.gVal(m, j) + gamma[m](k, j) * mj.gVal(i, m);
        worst = std::max(worst, std::abs(s));
      }
  return worst;
}

ConnCoeffs leviCivita(const MetricJets& mj) {
  const int n = mj.n;
  Mat g = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = mj.gVal(i, j);
  Mat ginv = g.inverse();
  ConnCoeffs out;
  out.gamma.assign(n, Mat::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += ginv(k, l) * (mj.dgVal(i, j, l) + mj.dgVal(j, i, l) - mj.dgVal(l, i, j));
        out.gamma[k](i, j) = 0.5 * s;
      }
  return out;
}

ConnCoeffs torsionConnection(const MetricJets& mj, double sign) {
  const int n = mj.n;
  ConnCoeffs out = leviCivita(mj);
  Mat g = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = mj.gVal(i, j);
  Mat ginv = g.inverse();
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += ginv(k, l) * mj.dTheta(i, j, l);
        out.gamma[k](i, j) += sign * 0.5 * s;
      }
  return out;
}

namespace {

// Values and first derivatives of g and its inverse at the point.
struct MetricVals {
  Mat g, ginv;
  std::vector<Mat> dg, dginv;  // dg[k](i,j) = d_k g_{ij}
  std::vector<Mat> ddg;        // ddg[k*n+m](i,j) = d_k d_m g_{ij}
};

MetricVals metricVals(const MetricJets& mj) {
  const int n = mj.n;
  MetricVals mv;
  mv.g = Mat::Zero(n, n);
  mv.dg.assign(n, Mat::Zero(n, n));
  mv.ddg.assign(n * n, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Jet2& e = mj.g(i, j);
      mv.g(i, j) = e.v;
      for (int k = 0; k < n; ++k) {
        mv.dg[k](i, j) = e.g[k];
        for (int m = 0; m < n; ++m) mv.ddg[k * n + m](i, j) = e.h(k, m);
      }
    }
  mv.ginv = mv.g.inverse();
  mv.dginv.assign(n, Mat());
  for (int k = 0; k < n; ++k) mv.dginv[k] = -mv.ginv * mv.dg[k] * mv.ginv;
  return mv;
}

}  // namespace

ConnJet leviCivitaJet(const MetricJets& mj) { return torsionConnectionJet(mj, 0.0); }

ConnJet torsionConnectionJet(const MetricJets& mj, double sign) {
  const int n = mj.n;
  MetricVals mv = metricVals(mj);
  ConnJet out;
  out.gamma.assign(n, Mat::Zero(n, n));
  out.dgamma.assign(n, std::vector<Mat>(n, Mat::Zero(n, n)));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) {
          double lc = mv.dg[i](j, l) + mv.dg[j](i, l) - mv.dg[l](i, j);
          s += mv.ginv(k, l) * (0.5 * lc + sign * 0.5 * mj.dTheta(i, j, l));
        }
        out.gamma[k](i, j) = s;
        for (int m = 0; m < n; ++m) {
          double t = 0.0;
          for (int l = 0; l < n; ++l) {
            double lc = mv.dg[i](j, l) + mv.dg[j](i, l) - mv.dg[l](i, j);
            double dlc =
                mv.ddg[m * n + i](j, l) + mv.ddg[m * n + j](i, l) - mv.ddg[m * n + l](i, j);
            t += mv.dginv[m](k, l) * (0.5 * lc + sign * 0.5 * mj.dTheta(i, j, l));
            t += mv.ginv(k, l) * (0.5 * dlc + sign * 0.5 * mj.dDTheta(m, i, j, l));
          }
          out.dgamma[m][k](i, j) = t;
        }
      }
  return out;
}

GenElement connectionD(const MetricJets& mj, const Vec& z, const CompJet& a) {
  const int n = mj.n;
  if (a.val.size() != 2 * n || z.size() != n)
    throw DimensionError("connectionD: section/direction dimensions do not match the metric");
  MetricVals mv = metricVals(mj);
  Mat th = Mat::Zero(n, n);
  std::vector<Mat> dth(n, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Jet2& e = mj.th(i, j);
      th(i, j) = e.v;
      for (int k = 0; k < n; ++k) dth[k](i, j) = e.g[k];
    }

  // W = g^{-1} (alpha - Theta-map X) as a first-order jet.
  CompJet x{a.val.head(n), a.jac.topRows(n)};
  CompJet al{a.val.tail(n), a.jac.bottomRows(n)};
  CompJet w;
  Vec inner = al.val - th.transpose() * x.val;
  w.val = mv.ginv * inner;
  w.jac = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    Vec dinner = al.jac.col(k) - dth[k].transpose() * x.val - th.transpose() * x.jac.col(k);
    w.jac.col(k) = mv.dginv[k] * inner + mv.ginv * dinner;
  }

  CompJet xp{0.5 * (x.val + w.val), 0.5 * (x.jac + w.jac)};
  CompJet xm{0.5 * (x.val - w.val), 0.5 * (x.jac - w.jac)};
  ConnCoeffs conn = torsionConnection(mj, +1.0);
  Vec dp = conn.apply(z, xp);
  Vec dm = conn.apply(z, xm);

  GenMetric gm(mv.g, th);
  return gm.liftP(dp) + gm.liftM(dm);
}

Vec connectionDForm(const MetricJets& mj, const Vec& z, const CompJet& alpha) {
  ConnCoeffs conn = torsionConnection(mj, +1.0);
  return conn.applyForm(z, alpha);
}

GenElement connectionDVector(const MetricJets& mj, const Vec& z, const CompJet& x) {
  const int n = mj.n;
  ConnCoeffs conn = torsionConnection(mj, +1.0);
  Vec dx = conn.apply(z, x);
  // (grad_z Theta)(X): covector with components z^i (grad_i Theta)_{jk} X^j.
  Mat dirg = conn.dirMatrix(z);
  Mat nabTh = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += z[i] * mj.th(j, k).g[i];
      nabTh(j, k) = s;
    }
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int m = 0; m < n; ++m) s += dirg(m, j) * mj.thetaVal(m, k) + dirg(m, k) * mj.thetaVal(j, m);
      nabTh(j, k) -= s;
    }
  GenElement out = GenElement::zero(n);
  out.vec() = dx;
  out.cov() = -nabTh.transpose() * x.val;
  return out;
}

SectionField tangentField(const Chart& chart, const std::vector<Expr>& comps) {
  const int n = chart.dim();
  if (static_cast<int>(comps.size()) != n)
    throw DimensionError("tangentField: one expression per coordinate required");
  return SectionField([comps, n](const Vec& p) {
    CompJet out;
    out.val = Vec::Zero(n);
    out.jac = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      Jet2 e = comps[i].jet(p);
      out.val[i] = e.v;
      out.jac.row(i) = e.g.transpose();
    }
    return out;
  });
}

namespace {

SectionField liftField(const FieldGenMetric& fm, const SectionField& xfield, double sgn) {
  return SectionField([fm, xfield, sgn](const Vec& p) {
    MetricJets mj = fm.jets(p);
    const int n = mj.n;
    CompJet x = xfield(p);
    if (x.val.size() != n) throw DimensionError("liftField: tangent field has wrong dimension");
    CompJet out;
    out.val = Vec::Zero(2 * n);
    out.jac = Mat::Zero(2 * n, n);
    Mat g = Mat::Zero(n, n), th = Mat::Zero(n, n);
    std::vector<Mat> dg(n, Mat::Zero(n, n)), dth(n, Mat::Zero(n, n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        g(i, j) = mj.gVal(i, j);
        th(i, j) = mj.thetaVal(i, j);
        for (int k = 0; k < n; ++k) {
          dg[k](i, j) = mj.g(i, j).g[k];
          dth[k](i, j) = mj.th(i, j).g[k];
        }
      }
    out.val.head(n) = x.val;
    out.val.tail(n) = sgn * g * x.val + th.transpose() * x.val;
    out.jac.topRows(n) = x.jac;
    for (int k = 0; k < n; ++k)
      out.jac.col(k).tail(n) = sgn * (dg[k] * x.val + g * x.jac.col(k)) +
                               dth[k].transpose() * x.val + th.transpose() * x.jac.col(k);
    return out;
  });
}

}  // namespace

SectionField liftFieldP(const FieldGenMetric& fm, const SectionField& xfield) {
  return liftField(fm, xfield, +1.0);
}
SectionField liftFieldM(const FieldGenMetric& fm, const SectionField& xfield) {
  return liftField(fm, xfield, -1.0);
}

double courantConnectionCheck(const FieldGenMetric& fm, const SectionField& xfield,
                              const SectionField& vfield, const Vec& p) {
  MetricJets mj = fm.jets(p);
  SectionField xpp = liftFieldM(fm, xfield);  // X'' = X - g(X) + Theta(X)
  SectionField s = liftFieldP(fm, vfield);    // S = V + g(V) + Theta(V)
  GenElement br = courantBracket(xpp(p), s(p));

  // E-component: decompose br = liftP(b') + liftM(b'').
  GenMetric gm = fm.eval(p);
  Vec inner = br.cov() - gm.thetaMap() * br.vec();
  Vec bp = 0.5 * (br.vec() + gm.g.llt().solve(inner));
  GenElement lhs = gm.liftP(bp);

  Vec z = xfield(p).val;
  ConnCoeffs conn = torsionConnection(mj, +1.0);
  Vec dv = conn.apply(z, vfield(p));
  GenElement rhs = gm.liftP(dv);
  return (lhs.c - rhs.c).cwiseAbs().maxCoeff();
}

Mat retractToCompatible(const Mat& g, const Mat& s) {
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success)
    throw DomainError("retractToCompatible: metric not positive definite");
  Mat lt = Mat(llt.matrixL()).transpose();
  Mat ltInv = lt.inverse();
  // Frame coordinates (frame columns L^{-T}): A = L^T S L^{-T}; skew part,
  // then the polar factor, which is orthogonal and skew, hence squares to -Id.
  Mat a = lt * s * ltInv;
  Mat abar = 0.5 * (a - a.transpose());
  Mat p = -abar * abar;  // = Abar^T Abar, positive definite if Abar invertible
  Eigen::SelfAdjointEigenSolver<Mat> es(p);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 1e-12)
    throw DomainError("retractToCompatible: retraction degenerate (too far from a structure)");
  Mat pinvhalf = es.eigenvectors() *
                 es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                 es.eigenvectors().transpose();
  Mat u = abar * pinvhalf;
  return ltInv * u * lt;
}

ParallelExtension::ParallelExtension(const FieldGenMetric& fm, const Mat& j1, const Mat& j2,
                                     const Vec& p)
    : fm_(fm), j1_(j1), j2_(j2), p_(p) {
  MetricJets mj = fm_.jets(p_);
  conn_ = torsionConnection(mj, +1.0);
  GenMetric gm = fm_.eval(p_);
  (void)assemble(gm, j1_, j2_);  // validates compatibility at the center
}

Mat ParallelExtension::extendOne(const Mat& j, const Vec& h, const Mat& gq) const {
  const int n = static_cast<int>(j.rows());
  Mat s = j;
  for (int k = 0; k < n; ++k) {
    Mat gk = Mat::Zero(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) gk(a, b) = conn_.gamma[a](k, b);
    s -= h[k] * (gk * j - j * gk);
  }
  return retractToCompatible(gq, s);
}

std::pair<Mat, Mat> ParallelExtension::pair(const Vec& q) const {
  Vec h = q - p_;
  Mat gq = fm_.eval(q).g;
  return {extendOne(j1_, h, gq), extendOne(j2_, h, gq)};
}

Mat ParallelExtension::structure(const Vec& q) const {
  auto [s1, s2] = pair(q);
  return assemble(fm_.eval(q), s1, s2).m;
}

}  // namespace gentwist
