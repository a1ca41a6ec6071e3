#pragma once

#include "gentwist/chart.hpp"
#include "gentwist/gc_linalg.hpp"

namespace gentwist {

// [X, Y] from first-order jets of two vector fields (n components each).
Vec lieBracket(const CompJet& x, const CompJet& y);

// Courant bracket of two generalized sections at a point:
//   [X+a, Y+b] = [X,Y] + L_X b - L_Y a - 1/2 d(i_X b - i_Y a).
GenElement courantBracket(const CompJet& a, const CompJet& b);

// N(A,B) = -[A,B] + [JA,JB] - J[JA,B] - J[A,JB] for an endomorphism field J.
GenElement nijenhuisField(const EndoJet& j, const CompJet& a, const CompJet& b);

// Jet of the product section q -> J(q) A(q).
CompJet endoApplyJet(const EndoJet& j, const CompJet& a);

// Pairing scalar field <A, B> with its gradient.
Jet2 pairingJet(const CompJet& a, const CompJet& b);

// Leibniz-type identity residuals (max-norm of the defect element).
// [A, fB] = f[A,B] + (Xf) B - <A,B> df
double bracketFunctionRuleResidual(const SectionField& a, const SectionField& b, const Expr& f,
                                   const Vec& p);
// [e^T A, e^T B] = e^T [A,B] - i_X i_Y dT  for a 2-form field T
double bracketBTransformResidual(const Chart& chart, const SectionField& a, const SectionField& b,
                                 const std::vector<Expr>& thetaEntries, const Vec& p);
// invariance under F = f_* (+) (f^-1)^* for the affine diffeo f(x) = L x + c
double bracketDiffeoResidual(const SectionField& a, const SectionField& b, const Mat& l,
                             const Vec& c, const Vec& p);
// X<B,C> = <[A,B] + d<A,B>, C> + <B, [A,C] + d<A,C>>
double bracketPairingDerivationResidual(const SectionField& a, const SectionField& b,
                                        const SectionField& cc, const Vec& p);

// 1-form with components (i_X i_Y w3)(Z) = w3(Y, X, Z) for a 3-tensor given by
// an evaluator.
Vec contract2(const std::function<double(int, int, int)>& w3, const Vec& x, const Vec& y, int n);

}  // namespace gentwist
