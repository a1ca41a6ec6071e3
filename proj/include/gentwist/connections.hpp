#pragma once

#include <utility>
#include <vector>

#include "gentwist/calculus.hpp"
#include "gentwist/chart.hpp"
#include "gentwist/gc_linalg.hpp"

namespace gentwist {

// Christoffel-like coefficients at a point: gamma[k](i,j) is the coefficient
// of e_k in the covariant derivative of e_j along e_i.
struct ConnCoeffs {
  std::vector<Mat> gamma;
  int dim() const { return static_cast<int>(gamma.size()); }
  // Matrix of the derivation along z acting on vector components:
  // out(k, j) = z^i gamma[k](i, j).
  Mat dirMatrix(const Vec& z) const;
  // (covariant derivative of X along z)^k from the first-order jet of X.
  Vec apply(const Vec& z, const CompJet& x) const;
  // Covariant derivative of a 1-form along z.
  Vec applyForm(const Vec& z, const CompJet& alpha) const;
  // T(x, y) for constant vectors.
  Vec torsion(const Vec& x, const Vec& y) const;
  // max |(grad g)_{kij}| of the metric-compatibility defect.
  double metricDefect(const MetricJets& mj) const;
};

// Coefficients together with their first derivatives (for curvature).
struct ConnJet {
  std::vector<Mat> gamma;                // gamma[k](i,j)
  std::vector<std::vector<Mat>> dgamma;  // dgamma[m][k](i,j) = d_m gamma[k](i,j)
  ConnCoeffs coeffs() const { return ConnCoeffs{gamma}; }
  int dim() const { return static_cast<int>(gamma.size()); }
};

// Levi-Civita connection of g.
ConnCoeffs leviCivita(const MetricJets& mj);
ConnJet leviCivitaJet(const MetricJets& mj);

// The metric connection with skew torsion: coefficients of the Levi-Civita
// connection plus sign * (1/2) g^{kl} dTheta_{ijl}.  sign=+1 gives the
// connection transported from E', sign=-1 the one transported from E''.
ConnCoeffs torsionConnection(const MetricJets& mj, double sign = +1.0);
ConnJet torsionConnectionJet(const MetricJets& mj, double sign = +1.0);

// D on TM + T*M determined by the generalized metric: split the section into
// its E' and E'' vector parts, differentiate both with the skew-torsion
// connection, and re-lift at the point.
GenElement connectionD(const MetricJets& mj, const Vec& z, const CompJet& a);

// Closed forms used as cross-checks: D of a pure 1-form is its covariant
// derivative; D of a pure vector picks up a -(grad Theta)(X) covector term.
Vec connectionDForm(const MetricJets& mj, const Vec& z, const CompJet& alpha);
GenElement connectionDVector(const MetricJets& mj, const Vec& z, const CompJet& x);

// Lifts of a tangent vector field into E' / E'' as section fields with jets.
SectionField liftFieldP(const FieldGenMetric& fm, const SectionField& xfield);
SectionField liftFieldM(const FieldGenMetric& fm, const SectionField& xfield);
SectionField tangentField(const Chart& chart, const std::vector<Expr>& comps);

// Residual of the bracket characterization of D: the E-component of
// [X'', S] at p against D_X S, for S the E'-lift of a vector field.
double courantConnectionCheck(const FieldGenMetric& fm, const SectionField& xfield,
                              const SectionField& vfield, const Vec& p);

// First-order parallel extension of a compatible pair at p, re-projected
// pointwise onto the bundle of g(q)-orthogonal complex structures.
class ParallelExtension {
 public:
  ParallelExtension(const FieldGenMetric& fm, const Mat& j1, const Mat& j2, const Vec& p);
  std::pair<Mat, Mat> pair(const Vec& q) const;
  // Structure matrix at q assembled from the extended pair and (g, Theta)(q).
  Mat structure(const Vec& q) const;
  const Vec& center() const { return p_; }

 private:
  Mat extendOne(const Mat& j, const Vec& h, const Mat& gq) const;
  FieldGenMetric fm_;
  Mat j1_, j2_;
  Vec p_;
  ConnCoeffs conn_;
};

// Polar retraction onto g-orthogonal complex structures (helper, exposed for
// tests): nearest structure to an approximately compatible endomorphism.
Mat retractToCompatible(const Mat& g, const Mat& s);

}  // namespace gentwist
