#pragma once

#include <vector>

#include "gentwist/gc_linalg.hpp"
#include "gentwist/rng.hpp"
#include "gentwist/types.hpp"

namespace gentwist {

// Vertical tangent direction at a fiber point: one endomorphism per slot,
// each g-skew and anticommuting with the corresponding complex structure.
struct VertVec {
  Mat v1, v2;

  VertVec() = default;
  VertVec(Mat a, Mat b) : v1(std::move(a)), v2(std::move(b)) {}
  static VertVec zero(int n) { return {Mat::Zero(n, n), Mat::Zero(n, n)}; }
  double norm() const;
};

inline VertVec operator+(const VertVec& a, const VertVec& b) {
  return {Mat(a.v1 + b.v1), Mat(a.v2 + b.v2)};
}
inline VertVec operator-(const VertVec& a, const VertVec& b) {
  return {Mat(a.v1 - b.v1), Mat(a.v2 - b.v2)};
}
inline VertVec operator*(double s, const VertVec& a) { return {Mat(s * a.v1), Mat(s * a.v2)}; }

// Point of the structure fiber: a generalized metric together with a
// compatible pair of g-orthogonal complex structures on the tangent space.
struct FiberPoint {
  GenMetric gm;
  Mat j1, j2;

  int n() const { return gm.n(); }
  GenComplex structure() const { return assemble(gm, j1, j2); }
};

FiberPoint makeFiberPoint(const GenMetric& gm, const Mat& j1, const Mat& j2,
                          double tol = kStructTol);

// Residual of the vertical-slot conditions for v at fp (anticommutation and
// g-skewness, max-norm).
double residualVertical(const FiberPoint& fp, const VertVec& v);

// Fiber metric G(V, W) = -1/2 [ tr(V1 W1) + tr(V2 W2) ].
double fiberMetric(const VertVec& v, const VertVec& w);

// Sign pattern (s1, s2) of the fiber structure K_eps, eps in 1..4:
// K_1 = (+J1, +J2), K_2 = (+J1, -J2), K_3 = -K_2, K_4 = -K_1.
std::pair<int, int> epsSigns(int eps);

// K_eps acting on a vertical vector: slot-wise left multiplication by
// (s1 J1, s2 J2).
VertVec kEps(const FiberPoint& fp, int eps, const VertVec& v);

// Endomorphism of T + T* induced by a vertical vector: V1 on the E' part and
// V2 on the E'' part, through the tangent projections and lifts.  Equals the
// derivative of the assembled structure along the fiber direction.
Mat vertToEndo(const FiberPoint& fp, const VertVec& v);

// Tangent vector to the generalized twistor space at a fiber point, split as
// horizontal (an element of T + T* at the base), vertical, and vertical
// covector (stored by its G-dual vertical vector).
struct TwistorTangent {
  GenElement h;
  VertVec v;
  VertVec vstar;

  static TwistorTangent zero(int n) {
    return {GenElement::zero(n), VertVec::zero(n), VertVec::zero(n)};
  }
  double norm() const;
};

TwistorTangent operator+(const TwistorTangent& a, const TwistorTangent& b);
TwistorTangent operator-(const TwistorTangent& a, const TwistorTangent& b);
TwistorTangent operator*(double s, const TwistorTangent& a);

// The almost complex structure J_eps on twistor tangents: the structure
// assembled from (s1 J1, s2 J2) on the horizontal slot, K_eps on the vertical
// slot, and +K_eps on G-duals of vertical covectors.
TwistorTangent jepsAction(const FiberPoint& fp, int eps, const TwistorTangent& t);

// Projection of a g-skew endomorphism onto the part anticommuting with j.
Mat antiCommutant(const Mat& j, const Mat& a);

// G-orthonormal basis of the vertical space at fp, slot-1 directions first.
// Each slot contributes m^2 - m directions in dimension n = 2m.
std::vector<VertVec> vertBasis(const FiberPoint& fp);

// G-dual of the vertical 2-form
//   w^eps(A, B)(W) = <(K_1 W - K_eps W) A, B> - <(K_1 W - K_eps W) B, A>
// (identically zero at eps = 1).  The second form reuses a precomputed
// vertical basis for hot loops.
VertVec omegaEps(const FiberPoint& fp, int eps, const GenElement& a, const GenElement& b);
VertVec omegaEps(const FiberPoint& fp, int eps, const GenElement& a, const GenElement& b,
                 const std::vector<VertVec>& basis);

// Fiber involution (j2 -> -j2) and slot swap (j1 <-> j2).
FiberPoint fiberInvolution(const FiberPoint& fp);
FiberPoint fiberSwap(const FiberPoint& fp);

// Deterministic random fiber point in a prescribed connected component.
FiberPoint randomFiberPoint(const GenMetric& gm, Component comp, Rng& rng,
                            int orientation = +1);

std::pair<int, int> componentSigns(Component c);

}  // namespace gentwist
