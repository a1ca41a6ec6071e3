#include "gentwist/twistor_fiber.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gentwist {

// The fiber metric is positive semidefinite on vertical vectors, but rounding
// can push the square of a near-zero vector slightly negative; clamp before
// the square root so norms of numerical residuals stay finite.
double VertVec::norm() const { return std::sqrt(std::max(0.0, fiberMetric(*this, *this))); }

double TwistorTangent::norm() const {
  const double sq = h.c.squaredNorm() + fiberMetric(v, v) + fiberMetric(vstar, vstar);
  return std::sqrt(std::max(0.0, sq));
}

TwistorTangent operator+(const TwistorTangent& a, const TwistorTangent& b) {
  return {a.h + b.h, a.v + b.v, a.vstar + b.vstar};
}
TwistorTangent operator-(const TwistorTangent& a, const TwistorTangent& b) {
  return {a.h - b.h, a.v - b.v, a.vstar - b.vstar};
}
TwistorTangent operator*(double s, const TwistorTangent& a) {
  return {s * a.h, s * a.v, s * a.vstar};
}

FiberPoint makeFiberPoint(const GenMetric& gm, const Mat& j1, const Mat& j2, double tol) {
  const int n = gm.n();
  if (j1.rows() != n || j1.cols() != n || j2.rows() != n || j2.cols() != n)
    throw DimensionError("fiber point: structure size does not match the metric");
  const Mat id = Mat::Identity(n, n);
  auto check = [&](const Mat& j, const char* name) {
    const double sq = (j * j + id).cwiseAbs().maxCoeff();
    const double orth = (j.transpose() * gm.g * j - gm.g).cwiseAbs().maxCoeff();
    if (sq > tol)
      throw ValidationError(std::string("fiber point: ") + name +
                            " is not a complex structure (|J^2+I| = " + std::to_string(sq) + ")");
    if (orth > tol)
      throw ValidationError(std::string("fiber point: ") + name +
                            " is not g-orthogonal (residual " + std::to_string(orth) + ")");
  };
  check(j1, "first slot");
  check(j2, "second slot");
  return {gm, j1, j2};
}

double residualVertical(const FiberPoint& fp, const VertVec& v) {
  double r = (v.v1 * fp.j1 + fp.j1 * v.v1).cwiseAbs().maxCoeff();
  r = std::max(r, (v.v2 * fp.j2 + fp.j2 * v.v2).cwiseAbs().maxCoeff());
  const Mat s1 = fp.gm.g * v.v1, s2 = fp.gm.g * v.v2;
  r = std::max(r, (s1 + s1.transpose()).cwiseAbs().maxCoeff());
  r = std::max(r, (s2 + s2.transpose()).cwiseAbs().maxCoeff());
  return r;
}

double fiberMetric(const VertVec& v, const VertVec& w) {
  return -0.5 * ((v.v1 * w.v1).trace() + (v.v2 * w.v2).trace());
}

std::pair<int, int> epsSigns(int eps) {
  switch (eps) {
    case 1: return {+1, +1};
    case 2: return {+1, -1};
    case 3: return {-1, +1};
    case 4: return {-1, -1};
    default: throw DomainError("eps must be 1, 2, 3 or 4");
  }
}

VertVec kEps(const FiberPoint& fp, int eps, const VertVec& v) {
  auto [s1, s2] = epsSigns(eps);
  return {Mat(s1 * fp.j1 * v.v1), Mat(s2 * fp.j2 * v.v2)};
}

Mat vertToEndo(const FiberPoint& fp, const VertVec& v) {
  const int n = fp.n();
  Mat liftP(2 * n, n), liftM(2 * n, n);
  liftP << Mat::Identity(n, n), Mat(fp.gm.g + fp.gm.thetaMap());
  liftM << Mat::Identity(n, n), Mat(-fp.gm.g + fp.gm.thetaMap());
  Mat pr(n, 2 * n);
  pr << Mat::Identity(n, n), Mat::Zero(n, n);
  return liftP * v.v1 * pr * projectorP(fp.gm) + liftM * v.v2 * pr * projectorM(fp.gm);
}

TwistorTangent jepsAction(const FiberPoint& fp, int eps, const TwistorTangent& t) {
  auto [s1, s2] = epsSigns(eps);
  const GenComplex jh = assemble(fp.gm, Mat(s1 * fp.j1), Mat(s2 * fp.j2));
  return {jh.apply(t.h), kEps(fp, eps, t.v), kEps(fp, eps, t.vstar)};
}

Mat antiCommutant(const Mat& j, const Mat& a) { return 0.5 * (a + j * a * j); }

std::vector<VertVec> vertBasis(const FiberPoint& fp) {
  const int n = fp.n();
  const int m = n / 2;
  const int perSlot = m * m - m;
  const Mat q = gOrthonormalFrame(fp.gm.g, +1);
  const Mat qinvg = q.transpose() * fp.gm.g;  // q^{-1} for a g-orthonormal frame

  std::vector<VertVec> basis;
  for (int slot = 0; slot < 2; ++slot) {
    const Mat& j = (slot == 0) ? fp.j1 : fp.j2;
    std::vector<Mat> kept;
    for (int a = 0; a < n && static_cast<int>(kept.size()) < perSlot; ++a)
      for (int b = a + 1; b < n && static_cast<int>(kept.size()) < perSlot; ++b) {
        Mat gen = q.col(a) * qinvg.row(b) - q.col(b) * qinvg.row(a);
        Mat cand = antiCommutant(j, gen);
        for (const Mat& u : kept) cand -= (-0.5 * (u * cand).trace()) * u;
        const double nn = -0.5 * (cand * cand).trace();
        if (nn > 1e-12) kept.push_back(Mat(cand / std::sqrt(nn)));
      }
    if (static_cast<int>(kept.size()) != perSlot)
      throw ValidationError("vertical basis: expected " + std::to_string(perSlot) +
                            " directions, found " + std::to_string(kept.size()));
    for (const Mat& u : kept) {
      if (slot == 0)
        basis.emplace_back(u, Mat::Zero(n, n));
      else
        basis.emplace_back(Mat::Zero(n, n), u);
    }
  }
  return basis;
}

VertVec omegaEps(const FiberPoint& fp, int eps, const GenElement& a, const GenElement& b) {
  return omegaEps(fp, eps, a, b, vertBasis(fp));
}

VertVec omegaEps(const FiberPoint& fp, int eps, const GenElement& a, const GenElement& b,
                 const std::vector<VertVec>& basis) {
  const int n = fp.n();
  VertVec out = VertVec::zero(n);
  if (eps == 1) return out;
  for (const VertVec& u : basis) {
    const VertVec d = kEps(fp, 1, u) - kEps(fp, eps, u);
    const Mat e = vertToEndo(fp, d);
    const GenElement ea{Vec(e * a.c)}, eb{Vec(e * b.c)};
    const double val = pairing(ea, b) - pairing(eb, a);
    out = out + val * u;
  }
  return out;
}

FiberPoint fiberInvolution(const FiberPoint& fp) { return {fp.gm, fp.j1, Mat(-fp.j2)}; }

FiberPoint fiberSwap(const FiberPoint& fp) { return {fp.gm, fp.j2, fp.j1}; }

std::pair<int, int> componentSigns(Component c) {
  switch (c) {
    case Component::PP: return {+1, +1};
    case Component::PM: return {+1, -1};
    case Component::MP: return {-1, +1};
    case Component::MM: return {-1, -1};
  }
  throw DomainError("unknown component");
}

FiberPoint randomFiberPoint(const GenMetric& gm, Component comp, Rng& rng, int orientation) {
  auto [s1, s2] = componentSigns(comp);
  const Mat j1 = randomOrthogonalComplex(gm.g, s1, rng, orientation);
  const Mat j2 = randomOrthogonalComplex(gm.g, s2, rng, orientation);
  return makeFiberPoint(gm, j1, j2);
}

}  // namespace gentwist
