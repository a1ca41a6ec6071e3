#pragma once

#include <utility>
#include <vector>

#include "gentwist/connections.hpp"

namespace gentwist {

enum class ConnKind { LeviCivita, SkewTorsion };

// Endomorphism-valued curvature with the sign convention
// R(X,Y) = D_{[X,Y]} - [D_X, D_Y]:
// rm[i*n+j](l, k) is the e_l-component of R(e_i, e_j) e_k.
std::vector<Mat> riemann(const MetricJets& mj, ConnKind kind);

// R(x, y) as a matrix acting on tangent components (constant x, y).
Mat curvEndo(const std::vector<Mat>& rm, const Vec& x, const Vec& y);

// Max-norm of the first Bianchi cyclic sum (vanishes for Levi-Civita).
double bianchiResidual(const std::vector<Mat>& rm);
// Max-norm of the pair-symmetry defect R_{ijkl} - R_{klij} (lowered indices).
double pairSymmetryResidual(const std::vector<Mat>& rm, const Mat& g);

// Curvature operator of Lambda^2 in an oriented g-orthonormal frame; the
// Lambda^2 inner product is the Gram determinant
// g(X1^X2, X3^X4) = g(X1,X3)g(X2,X4) - g(X1,X4)g(X2,X3),
// so the frame bivectors q_a ^ q_b (a < b, lexicographic) are orthonormal.
struct CurvOp {
  int n = 0;                              // base dimension
  Mat frame;                              // oriented g-orthonormal frame (columns)
  std::vector<std::pair<int, int>> pairs; // index pairs (a < b)
  Mat c;                                  // operator matrix in the pair basis
  Mat ricci;                              // frame Ricci components
  double scalar = 0.0;
  int pairIndex(int a, int b) const;      // signless lookup helper
  // Pair-basis coordinates of x ^ y for frame-component vectors x, y.
  Vec wedgeCoords(const Vec& x, const Vec& y) const;
};

CurvOp curvatureOperator(const MetricJets& mj, ConnKind kind, int orientation = +1);

// Scalar / traceless-Ricci / Weyl split, plus the dim-4 (anti-)self-dual
// refinement of the Weyl part.
struct CurvDecomp {
  double s = 0.0;
  Mat idPart, bop, wop;
  Mat wplus, wminus;  // dim 4 only (empty otherwise)
  Mat star;           // Hodge star on the pair basis (dim 4 only)
};

CurvDecomp decompose(const CurvOp& cop);

double reassemblyResidual(const CurvOp& cop, const CurvDecomp& d);

// Commutator action of the skew-torsion-connection curvature on a compatible
// pair: ([R(x,y), j1], [R(x,y), j2]).  Valid vertical directions at (j1, j2).
std::pair<Mat, Mat> connCurvatureAction(const MetricJets& mj, const Vec& x, const Vec& y,
                                        const Mat& j1, const Mat& j2);

}  // namespace gentwist
