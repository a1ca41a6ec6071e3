#include "gentwist/calculus.hpp"

#include <cmath>

namespace gentwist {

Vec lieBracket(const CompJet& x, const CompJet& y) {
  const int n = static_cast<int>(x.val.size());
  if (y.val.size() != n) throw DimensionError("lieBracket: mismatched dimensions");
  Vec out = Vec::Zero(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += x.val[i] * y.jac(k, i) - y.val[i] * x.jac(k, i);
    out[k] = s;
  }
  return out;
}

GenElement courantBracket(const CompJet& a, const CompJet& b) {
  const int m = static_cast<int>(a.val.size());
  if (b.val.size() != m || m % 2 != 0) throw DimensionError("courantBracket: bad section jets");
  const int n = m / 2;
  CompJet xa{a.val.head(n), a.jac.topRows(n)};
  CompJet xb{b.val.head(n), b.jac.topRows(n)};
  Vec al = a.val.tail(n), be = b.val.tail(n);
  Mat dal = a.jac.bottomRows(n), dbe = b.jac.bottomRows(n);

  GenElement out = GenElement::zero(n);
  out.vec() = lieBracket(xa, xb);
  // L_X beta - L_Y alpha - 1/2 d(i_X beta - i_Y alpha), component j:
  //   X^i d_i beta_j + beta_i d_j X^i - Y^i d_i alpha_j - alpha_i d_j Y^i
  //   - 1/2 d_j (X^i beta_i - Y^i alpha_i)
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      s += xa.val[i] * dbe(j, i) + be[i] * xa.jac(i, j);
      s -= xb.val[i] * dal(j, i) + al[i] * xb.jac(i, j);
      s -= 0.5 * (xa.jac(i, j) * be[i] + xa.val[i] * dbe(i, j) - xb.jac(i, j) * al[i] -
                  xb.val[i] * dal(i, j));
    }
    out.cov()[j] = s;
  }
  return out;
}

CompJet endoApplyJet(const EndoJet& j, const CompJet& a) {
  const int m = static_cast<int>(a.val.size());
  const int n = static_cast<int>(a.jac.cols());
  if (j.val.rows() != m) throw DimensionError("endoApplyJet: mismatched sizes");
  CompJet out;
  out.val = j.val * a.val;
  out.jac = Mat::Zero(m, n);
  for (int k = 0; k < n; ++k) out.jac.col(k) = j.d[k] * a.val + j.val * a.jac.col(k);
  return out;
}

GenElement nijenhuisField(const EndoJet& j, const CompJet& a, const CompJet& b) {
  CompJet ja = endoApplyJet(j, a);
  CompJet jb = endoApplyJet(j, b);
  GenElement t1 = courantBracket(a, b);
  GenElement t2 = courantBracket(ja, jb);
  GenElement t3 = courantBracket(ja, b);
  GenElement t4 = courantBracket(a, jb);
  GenElement out = GenElement::zero(static_cast<int>(a.val.size()) / 2);
  out.c = -t1.c + t2.c - j.val * t3.c - j.val * t4.c;
  return out;
}

Jet2 pairingJet(const CompJet& a, const CompJet& b) {
  const int m = static_cast<int>(a.val.size());
  const int n = static_cast<int>(a.jac.cols());
  const int h = m / 2;
  Jet2 out = Jet2::constant(0.0, n);
  for (int i = 0; i < h; ++i) {
    out.v += 0.5 * (a.val[h + i] * b.val[i] + b.val[h + i] * a.val[i]);
    for (int k = 0; k < n; ++k)
      out.g[k] += 0.5 * (a.jac(h + i, k) * b.val[i] + a.val[h + i] * b.jac(i, k) +
                         b.jac(h + i, k) * a.val[i] + b.val[h + i] * a.jac(i, k));
  }
  return out;
}

double bracketFunctionRuleResidual(const SectionField& a, const SectionField& b, const Expr& f, const Vec& p) {
  const int n = static_cast<int>(p.size());
  CompJet aj = a(p), bj = b(p);
  Jet2 fj = f.jet(p);

  // f B as a section jet.
  CompJet fb;
  fb.val = fj.v * bj.val;
  fb.jac = fj.v * bj.jac + bj.val * fj.g.transpose();

  GenElement lhs = courantBracket(aj, fb);
  GenElement rhs = GenElement::zero(n);
  rhs.c = fj.v * courantBracket(aj, bj).c;
  double xf = aj.val.head(n).dot(fj.g);
  rhs.c += xf * bj.val;
  Jet2 pj = pairingJet(aj, bj);
  rhs.cov() -= pj.v * fj.g;
  return (lhs.c - rhs.c).cwiseAbs().maxCoeff();
}

Vec contract2(const std::function<double(int, int, int)>& w3, const Vec& x, const Vec& y, int n) {
  Vec out = Vec::Zero(n);
  for (int z = 0; z < n; ++z) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += y[i] * x[j] * w3(i, j, z);
    out[z] = s;
  }
  return out;
}

double bracketBTransformResidual(const Chart& chart, const SectionField& a, const SectionField& b,
                     const std::vector<Expr>& thetaEntries, const Vec& p) {
  const int n = chart.dim();
  if (static_cast<int>(thetaEntries.size()) != n * n)
    throw DimensionError("bracketBTransformResidual: theta entries must form an n x n grid");

  // Coefficient matrix T and its exterior derivative at p.
  Mat tval = Mat::Zero(n, n);
  std::vector<Mat> dt(n, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet2 e = thetaEntries[i * n + j].jet(p);
      tval(i, j) = e.v;
      for (int k = 0; k < n; ++k) dt[k](i, j) += e.g[k];
    }
  auto d3 = [&](int i, int j, int k) { return dt[i](j, k) - dt[j](i, k) + dt[k](i, j); };

  CompJet aj = a(p), bj = b(p);

  auto pushT = [&](const CompJet& s) {
    CompJet out = s;
    // e^T (X + alpha) = X + alpha + T(X); the induced map is T^t.
    out.val.tail(n) += tval.transpose() * s.val.head(n);
    for (int k = 0; k < n; ++k)
      out.jac.col(k).tail(n) +=
          dt[k].transpose() * s.val.head(n) + tval.transpose() * s.jac.col(k).head(n);
    return out;
  };

  GenElement lhs = courantBracket(pushT(aj), pushT(bj));
  GenElement base = courantBracket(aj, bj);
  GenElement rhs = GenElement::zero(n);
  rhs.vec() = base.vec();
  rhs.cov() = base.cov() + tval.transpose() * base.vec();
  rhs.cov() -= contract2(d3, aj.val.head(n), bj.val.head(n), n);
  return (lhs.c - rhs.c).cwiseAbs().maxCoeff();
}

double bracketDiffeoResidual(const SectionField& a, const SectionField& b, const Mat& l, const Vec& c,
                     const Vec& p) {
  const int n = static_cast<int>(p.size());
  if (l.rows() != n || l.cols() != n || c.size() != n)
    throw DimensionError("bracketDiffeoResidual: affine map has wrong shape");
  Mat linv = l.inverse();

  // F(X + alpha) at f(x): vector part L X(x), covector part L^-t alpha(x).
  auto push = [&](const SectionField& s) {
    return SectionField([=](const Vec& q) {
      Vec x = linv * (q - c);
      CompJet sj = s(x);
      CompJet out;
      const int m = static_cast<int>(sj.val.size());
      out.val = Vec::Zero(m);
      out.val.head(n) = l * sj.val.head(n);
      out.val.tail(n) = linv.transpose() * sj.val.tail(n);
      Mat j = Mat::Zero(m, n);
      j.topRows(n) = l * sj.jac.topRows(n) * linv;
      j.bottomRows(n) = linv.transpose() * sj.jac.bottomRows(n) * linv;
      out.jac = j;
      return out;
    });
  };

  SectionField fa = push(a), fb = push(b);
  Vec q = l * p + c;
  GenElement lhs = courantBracket(fa(q), fb(q));

  GenElement br = courantBracket(a(p), b(p));
  GenElement rhs = GenElement::zero(n);
  rhs.vec() = l * br.vec();
  rhs.cov() = linv.transpose() * br.cov();
  return (lhs.c - rhs.c).cwiseAbs().maxCoeff();
}

double bracketPairingDerivationResidual(const SectionField& a, const SectionField& b, const SectionField& cc,
                     const Vec& p) {
  const int n = static_cast<int>(p.size());
  CompJet aj = a(p), bj = b(p), cj = cc(p);

  Jet2 bc = pairingJet(bj, cj);
  double lhs = aj.val.head(n).dot(bc.g);

  // [A,B] + d<A,B> and its pairing with C (values only needed).
  auto adjusted = [&](const CompJet& u, const CompJet& v) {
    GenElement e = courantBracket(u, v);
    Jet2 uv = pairingJet(u, v);
    e.cov() += uv.g;
    return e;
  };
  GenElement ab = adjusted(aj, bj);
  GenElement ac = adjusted(aj, cj);

  auto pairVal = [&](const GenElement& e, const CompJet& w) {
    return 0.5 * (e.cov().dot(w.val.head(n)) + Vec(w.val.tail(n)).dot(e.vec()));
  };
  double rhs = pairVal(ab, cj) + pairVal(ac, bj);
  return std::abs(lhs - rhs);
}

}  // namespace gentwist
