#pragma once

#include <utility>

#include "gentwist/rng.hpp"
#include "gentwist/types.hpp"

namespace gentwist {

// Neutral pairing of signature (n, n):  <X+a, Y+b> = 1/2 (a(Y) + b(X)).
double pairing(const GenElement& a, const GenElement& b);
Mat pairingMatrix(int n);

// Projections onto E' and E'' of a generalized metric, via the closed block
// formulas; the two parts sum back to the input.
std::pair<GenElement, GenElement> project(const GenMetric& gm, const GenElement& a);
Mat projectorP(const GenMetric& gm);   // onto E'
Mat projectorM(const GenMetric& gm);   // onto E''

// Operator with +1 eigenspace E' and -1 eigenspace E''.
GOperator gOperator(const GenMetric& gm);

// b(X+a) = X + a + B(X) for a 2-form B (coefficient matrix).
GenElement bTransform(const Mat& bform, const GenElement& a);
Mat bTransformMatrix(const Mat& bform);
GenComplex conjugateByB(const Mat& bform, const GenComplex& j);
GenMetric bTransformMetric(const Mat& bform, const GenMetric& gm);

// Canonical generalized complex structures.
GenComplex fromComplex(const Mat& j);
GenComplex fromSymplectic(const Mat& wform);
GenComplex fromComplexBivector(const Mat& j, const CMat& pi);
GenComplex directSum(const GenComplex& a, const GenComplex& b);

// Structures compatible with a generalized metric, from a pair of complex
// structures on the tangent space orthogonal w.r.t. g.
GenComplex assemble(const GenMetric& gm, const Mat& j1, const Mat& j2);
std::pair<Mat, Mat> extractPair(const GenMetric& gm, const GenComplex& j);
bool isCompatible(const GenMetric& gm, const GenComplex& j, double tol = kStructTol);
GenComplex secondStructure(const GenMetric& gm, const GenComplex& j);

// Connected-component classification of a compatible structure by the
// orientations the tangent pair (J1, J2) induces.
enum class Component { PP, PM, MP, MM };
const char* componentName(Component c);
Component componentFromSigns(int s1, int s2);
int orientationSign(const Mat& g, const Mat& j, int orientation = +1);
Component classifyPair(const Mat& g, const Mat& j1, const Mat& j2, int orientation = +1);
Component classifyComponent(const GenMetric& gm, const GenComplex& j, int orientation = +1);

// Pfaffian of an antisymmetric matrix by recursive first-row expansion.
double pfaffian(const Mat& a);

// Oriented frame, orthonormal w.r.t. g (columns), with sign(det) = orientation.
Mat gOrthonormalFrame(const Mat& g, int orientation = +1);
Mat gramSchmidt(const Mat& g, const Mat& seed, int orientation = 0);

// Random g-orthogonal complex structure in the prescribed orientation class.
Mat randomOrthogonalComplex(const Mat& g, int sign, Rng& rng, int orientation = +1);

// Validation helpers (max-norm residuals of the defining identities).
double residualSquare(const GenComplex& j);          // || J^2 + Id ||
double residualSkew(const GenComplex& j);            // pairing skewness
double residualCompatible(const GenMetric& gm, const GenComplex& j);

}  // namespace gentwist
