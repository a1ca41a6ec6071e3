#include "gentwist/suites.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <utility>

#include "gentwist/calculus.hpp"
#include "gentwist/connections.hpp"
#include "gentwist/curvature.hpp"
#include "gentwist/gc_linalg.hpp"
#include "gentwist/integrability.hpp"
#include "gentwist/rng.hpp"
#include "gentwist/twistor_fiber.hpp"

namespace gentwist {
namespace {

constexpr Component kComps[4] = {Component::PP, Component::PM, Component::MP, Component::MM};

double mx(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
double mx(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Verdict notApplicable(const std::string& predicate, double tol, const std::string& why) {
  Verdict v;
  v.predicate = predicate;
  v.tolerance = tol;
  v.reason = "not applicable: " + why;
  return v;
}

// Random degree-2 polynomial in the chart coordinates, emitted as text and
// re-parsed so suite draws exercise the same front end as spec files.
Expr randomPoly(Rng& rng, const std::vector<std::string>& coords) {
  const int n = static_cast<int>(coords.size());
  std::ostringstream oss;
  oss << std::setprecision(17);
  oss << rng.gaussian();
  for (int i = 0; i < n; i++) oss << " + " << rng.gaussian() << "*" << coords[i];
  for (int i = 0; i < n; i++)
    for (int j = i; j < n; j++)
      oss << " + " << rng.gaussian() << "*" << coords[i] << "*" << coords[j];
  return parseExpr(oss.str(), coords);
}

std::vector<Expr> randomPolys(Rng& rng, const std::vector<std::string>& coords, int count) {
  std::vector<Expr> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; i++) out.push_back(randomPoly(rng, coords));
  return out;
}

// Antisymmetric n x n expression matrix with random strict-upper entries.
std::vector<Expr> randomFormEntries(Rng& rng, const std::vector<std::string>& coords) {
  const int n = static_cast<int>(coords.size());
  std::vector<Expr> entries(static_cast<size_t>(n) * n, Expr::number(0.0));
  for (int i = 0; i < n; i++)
    for (int j = i + 1; j < n; j++) {
      const Expr e = randomPoly(rng, coords);
      entries[static_cast<size_t>(i) * n + j] = e;
      entries[static_cast<size_t>(j) * n + i] = Expr::negate(e);
    }
  return entries;
}

VertVec randomVertical(Rng& rng, const std::vector<VertVec>& basis, int n) {
  VertVec v = VertVec::zero(n);
  for (const VertVec& b : basis) v = v + rng.gaussian() * b;
  return v;
}

// ---------------------------------------------------------------------------
// linalg: pointwise structure algebra on T + T*.
// ---------------------------------------------------------------------------

std::vector<Verdict> linalgSuite(const ManifoldSpec& spec, const SampleConfig& cfg) {
  const FieldGenMetric fm = normalizedField(spec.field, cfg);
  const int n = fm.n();
  const std::vector<Vec> pts = samplePoints(fm.chart, cfg.points);

  struct Draw {
    GenMetric gm;
    Component comp = Component::PP;
    Mat j1, j2, b;
    std::vector<GenElement> probes;
  };
  const int count = cfg.points * cfg.fibers;
  std::vector<Draw> draws;
  draws.reserve(static_cast<size_t>(count));
  Rng root(cfg.seed);
  for (int ip = 0; ip < cfg.points; ip++) {
    const GenMetric gm = fm.eval(pts[static_cast<size_t>(ip)]);
    for (int fb = 0; fb < cfg.fibers; fb++) {
      Rng rng = root.fork(static_cast<uint64_t>(ip) * 8191 + static_cast<uint64_t>(fb) + 1);
      Draw d;
      d.gm = gm;
      d.comp = kComps[fb % 4];
      const FiberPoint fp = randomFiberPoint(gm, d.comp, rng, fm.chart.orientation);
      d.j1 = fp.j1;
      d.j2 = fp.j2;
      const Mat b0 = rng.gaussianMat(n, n);
      d.b = 0.5 * (b0 - b0.transpose());
      d.probes.reserve(static_cast<size_t>(cfg.probes));
      for (int pr = 0; pr < cfg.probes; pr++) d.probes.emplace_back(rng.gaussianVec(2 * n));
      draws.push_back(std::move(d));
    }
  }
  const auto locate = [&](Witness& w, int i) {
    w.point = i / cfg.fibers;
    w.fiber = i % cfg.fibers;
  };

  std::vector<Verdict> out;
  out.push_back(sampledVerdict(
      "structure_involution", "", cfg.tol, count,
      [&](int i) {
        const Draw& d = draws[static_cast<size_t>(i)];
        return TaskResult{residualSquare(assemble(d.gm, d.j1, d.j2)), ""};
      },
      locate));
  out.push_back(sampledVerdict(
      "structure_skewness", "", cfg.tol, count,
      [&](int i) {
        const Draw& d = draws[static_cast<size_t>(i)];
        return TaskResult{residualSkew(assemble(d.gm, d.j1, d.j2)), ""};
      },
      locate));
  out.push_back(sampledVerdict(
      "metric_compatibility", "", cfg.tol, count,
      [&](int i) {
        const Draw& d = draws[static_cast<size_t>(i)];
        return TaskResult{residualCompatible(d.gm, assemble(d.gm, d.j1, d.j2)), ""};
      },
      locate));
  out.push_back(sampledVerdict(
      "projection_identities", "", cfg.tol, count,
      [&](int i) {
        const Draw& d = draws[static_cast<size_t>(i)];
        const GOperator gop = gOperator(d.gm);
        double r = 0.0;
        for (const GenElement& a : d.probes) {
          const auto [p1, p2] = project(d.gm, a);
          r = std::max(r, mx(Vec(p1.c + p2.c - a.c)));
          r = std::max(r, mx(Vec(gop.apply(p1).c - p1.c)));
          r = std::max(r, mx(Vec(gop.apply(p2).c + p2.c)));
        }
        return TaskResult{r, ""};
      },
      locate));
  out.push_back(sampledVerdict(
      "extract_assemble_roundtrip", "", cfg.tol, count,
      [&](int i) {
        const Draw& d = draws[static_cast<size_t>(i)];
        const GenComplex j = assemble(d.gm, d.j1, d.j2);
        const auto [k1, k2] = extractPair(d.gm, j);
        double r = std::max(mx(Mat(k1 - d.j1)), mx(Mat(k2 - d.j2)));
        r = std::max(r, mx(Mat(assemble(d.gm, k1, k2).m - j.m)));
        return TaskResult{r, ""};
      },
      locate));
  out.push_back(sampledVerdict(
      "component_classification", "", cfg.tol, count,
      [&](int i) {
        const Draw& d = draws[static_cast<size_t>(i)];
        const Component got =
            classifyComponent(d.gm, assemble(d.gm, d.j1, d.j2), fm.chart.orientation);
        if (got == d.comp) return TaskResult{0.0, ""};
        return TaskResult{1.0, std::string("classified as ") + componentName(got) +
                                   " but drawn in " + componentName(d.comp)};
      },
      locate));
  out.push_back(sampledVerdict(
      "b_transform_conjugation", "", cfg.tol, count,
      [&](int i) {
        const Draw& d = draws[static_cast<size_t>(i)];
        const GenComplex lhs = conjugateByB(d.b, assemble(d.gm, d.j1, d.j2));
        const GenComplex rhs = assemble(bTransformMetric(d.b, d.gm), d.j1, d.j2);
        return TaskResult{mx(Mat(lhs.m - rhs.m)), ""};
      },
      locate));
  return out;
}

// ---------------------------------------------------------------------------
// courant: bracket identities on randomized polynomial section fields.
// ---------------------------------------------------------------------------

std::vector<Verdict> courantSuite(const ManifoldSpec& spec, const SampleConfig& cfg) {
  const FieldGenMetric fm = normalizedField(spec.field, cfg);
  const int n = fm.n();
  const std::vector<Vec> pts = samplePoints(fm.chart, cfg.points);

  struct Draw {
    SectionField a, b, c;
    Expr f;
    std::vector<Expr> theta;
    Mat l;
    Vec trans;
  };
  std::vector<Draw> draws;
  draws.reserve(static_cast<size_t>(cfg.probes));
  Rng root(cfg.seed);
  for (int pr = 0; pr < cfg.probes; pr++) {
    Rng rng = root.fork(static_cast<uint64_t>(pr) + 1);
    Draw d;
    d.a = exprSection(randomPolys(rng, fm.chart.coords, 2 * n));
    d.b = exprSection(randomPolys(rng, fm.chart.coords, 2 * n));
    d.c = exprSection(randomPolys(rng, fm.chart.coords, 2 * n));
    d.f = randomPoly(rng, fm.chart.coords);
    d.theta = randomFormEntries(rng, fm.chart.coords);
    d.l = Mat::Identity(n, n) + 0.3 * rng.gaussianMat(n, n);
    while (std::abs(d.l.determinant()) < 0.1)
      d.l = Mat::Identity(n, n) + 0.3 * rng.gaussianMat(n, n);
    d.trans = rng.gaussianVec(n);
    draws.push_back(std::move(d));
  }
  const int count = cfg.points * cfg.probes;
  const auto locate = [&](Witness& w, int i) {
    w.point = i / cfg.probes;
    w.probe = i % cfg.probes;
  };
  const auto at = [&](int i) -> std::pair<const Draw&, const Vec&> {
    return {draws[static_cast<size_t>(i % cfg.probes)], pts[static_cast<size_t>(i / cfg.probes)]};
  };

  Mat j0 = Mat::Zero(n, n);
  for (int k = 0; k + 1 < n; k += 2) {
    j0(k + 1, k) = 1.0;
    j0(k, k + 1) = -1.0;
  }
  const EndoJet constStructure{fromComplex(j0).m,
                               std::vector<Mat>(static_cast<size_t>(n), Mat::Zero(2 * n, 2 * n))};

  std::vector<Verdict> out;
  out.push_back(sampledVerdict(
      "bracket_function_linearity", "", cfg.tol, count,
      [&](int i) {
        const auto [d, p] = at(i);
        return TaskResult{bracketFunctionRuleResidual(d.a, d.b, d.f, p), ""};
      },
      locate));
  out.push_back(sampledVerdict(
      "bracket_b_transform", "", cfg.tol, count,
      [&](int i) {
        const auto [d, p] = at(i);
        return TaskResult{bracketBTransformResidual(fm.chart, d.a, d.b, d.theta, p), ""};
      },
      locate));
  out.push_back(sampledVerdict(
      "bracket_diffeo_invariance", "", cfg.tol, count,
      [&](int i) {
        const auto [d, p] = at(i);
        return TaskResult{bracketDiffeoResidual(d.a, d.b, d.l, d.trans, p), ""};
      },
      locate));
  out.push_back(sampledVerdict(
      "bracket_pairing_derivation", "", cfg.tol, count,
      [&](int i) {
        const auto [d, p] = at(i);
        return TaskResult{bracketPairingDerivationResidual(d.a, d.b, d.c, p), ""};
      },
      locate));
  out.push_back(sampledVerdict(
      "nijenhuis_constant_vanishes", "", cfg.tol, count,
      [&](int i) {
        const auto [d, p] = at(i);
        return TaskResult{mx(nijenhuisField(constStructure, d.a(p), d.b(p)).c), ""};
      },
      locate));
  return out;
}

// ---------------------------------------------------------------------------
// connection: the metric connections with skew torsion and the T + T*
// derivative they induce.
// ---------------------------------------------------------------------------

std::vector<Verdict> connectionSuite(const ManifoldSpec& spec, const SampleConfig& cfg) {
  const FieldGenMetric fm = normalizedField(spec.field, cfg);
  const int n = fm.n();
  const std::vector<Vec> pts = samplePoints(fm.chart, cfg.points);

  struct PointData {
    MetricJets mj;
    ConnCoeffs lc, cp, cm;
    Mat ginv;
  };
  std::vector<PointData> pd;
  pd.reserve(static_cast<size_t>(cfg.points));
  for (int ip = 0; ip < cfg.points; ip++) {
    const MetricJets mj = fm.jets(pts[static_cast<size_t>(ip)]);
    pd.push_back(PointData{mj, leviCivita(mj), torsionConnection(mj, +1.0),
                           torsionConnection(mj, -1.0), mj.gVal().inverse()});
  }

  struct Draw {
    Vec x, y, h;
    SectionField xfield, vfield;
    Mat j1, j2;
  };
  const int count = cfg.points * cfg.probes;
  std::vector<Draw> draws;
  draws.reserve(static_cast<size_t>(count));
  Rng root(cfg.seed);
  for (int ip = 0; ip < cfg.points; ip++)
    for (int pr = 0; pr < cfg.probes; pr++) {
      Rng rng = root.fork(static_cast<uint64_t>(ip) * 8191 + static_cast<uint64_t>(pr) + 1);
      Draw d;
      d.x = rng.gaussianVec(n);
      d.y = rng.gaussianVec(n);
      Vec h = rng.gaussianVec(n);
      while (h.norm() <= 1e-3) h = rng.gaussianVec(n);
      d.h = h / h.norm();
      d.xfield = exprSection(randomPolys(rng, fm.chart.coords, n));
      d.vfield = exprSection(randomPolys(rng, fm.chart.coords, n));
      const Component comp = kComps[pr % 4];
      const auto [s1, s2] = componentSigns(comp);
      const Mat& g = pd[static_cast<size_t>(ip)].mj.gVal();
      d.j1 = randomOrthogonalComplex(g, s1, rng, fm.chart.orientation);
      d.j2 = randomOrthogonalComplex(g, s2, rng, fm.chart.orientation);
      draws.push_back(std::move(d));
    }
  const auto locate = [&](Witness& w, int i) {
    w.point = i / cfg.probes;
    w.probe = i % cfg.probes;
  };
  const auto locatePoint = [](Witness& w, int i) { w.point = i; };

  std::vector<Verdict> out;
  out.push_back(sampledVerdict(
      "torsion_matches_dtheta", "", cfg.tol, count,
      [&](int i) {
        const PointData& q = pd[static_cast<size_t>(i / cfg.probes)];
        const Draw& d = draws[static_cast<size_t>(i)];
        Vec w(n);
        for (int l = 0; l < n; l++) {
          double s = 0.0;
          for (int a = 0; a < n; a++)
            for (int b = 0; b < n; b++) s += d.x(a) * d.y(b) * q.mj.dTheta(a, b, l);
          w(l) = s;
        }
        const Vec expectP = q.ginv * w;
        const double rp = mx(Vec(q.cp.torsion(d.x, d.y) - expectP));
        const double rm = mx(Vec(q.cm.torsion(d.x, d.y) + expectP));
        return TaskResult{std::max(rp, rm), ""};
      },
      locate));
  out.push_back(sampledVerdict(
      "mean_connection_levi_civita", "", cfg.tol, cfg.points,
      [&](int i) {
        const PointData& q = pd[static_cast<size_t>(i)];
        double r = 0.0;
        for (int k = 0; k < n; k++)
          r = std::max(r, mx(Mat(0.5 * (q.cp.gamma[static_cast<size_t>(k)] +
                                        q.cm.gamma[static_cast<size_t>(k)]) -
                                 q.lc.gamma[static_cast<size_t>(k)])));
        return TaskResult{r, ""};
      },
      locatePoint));
  out.push_back(sampledVerdict(
      "connection_metricity", "", cfg.tol, cfg.points,
      [&](int i) {
        const PointData& q = pd[static_cast<size_t>(i)];
        const double r = std::max(q.lc.metricDefect(q.mj),
                                  std::max(q.cp.metricDefect(q.mj), q.cm.metricDefect(q.mj)));
        return TaskResult{r, ""};
      },
      locatePoint));
  out.push_back(sampledVerdict(
      "courant_transport_match", "", cfg.tol, count,
      [&](int i) {
        const Draw& d = draws[static_cast<size_t>(i)];
        const Vec& p = pts[static_cast<size_t>(i / cfg.probes)];
        return TaskResult{courantConnectionCheck(fm, d.xfield, d.vfield, p), ""};
      },
      locate));
  out.push_back(sampledVerdict(
      "parallel_extension_compatibility", "", cfg.tol, count,
      [&](int i) {
        const Draw& d = draws[static_cast<size_t>(i)];
        const Vec& p = pts[static_cast<size_t>(i / cfg.probes)];
        const GenMetric gm = fm.eval(p);
        const ParallelExtension pe(fm, d.j1, d.j2, p);
        double r = mx(Mat(pe.structure(p) - assemble(gm, d.j1, d.j2).m));
        const Vec q = p + 0.05 * d.h;
        r = std::max(r, residualCompatible(fm.eval(q), GenComplex(pe.structure(q))));
        return TaskResult{r, ""};
      },
      locate));
  return out;
}

// ---------------------------------------------------------------------------
// curvature: classical identities and the operator decomposition.
// ---------------------------------------------------------------------------

std::vector<Verdict> curvatureSuite(const ManifoldSpec& spec, const SampleConfig& cfg) {
  const FieldGenMetric fm = normalizedField(spec.field, cfg);
  const int n = fm.n();
  const std::vector<Vec> pts = samplePoints(fm.chart, cfg.points);

  struct PointData {
    std::vector<Mat> rm;
    Mat g;
    CurvOp cop;
    CurvDecomp dec;
  };
  std::vector<PointData> pd;
  pd.reserve(static_cast<size_t>(cfg.points));
  for (int ip = 0; ip < cfg.points; ip++) {
    const MetricJets mj = fm.jets(pts[static_cast<size_t>(ip)]);
    PointData q;
    q.rm = riemann(mj, ConnKind::LeviCivita);
    q.g = mj.gVal();
    q.cop = curvatureOperator(mj, ConnKind::LeviCivita, fm.chart.orientation);
    q.dec = decompose(q.cop);
    pd.push_back(std::move(q));
  }
  const auto locatePoint = [](Witness& w, int i) { w.point = i; };
  const auto frob = [](const Mat& a, const Mat& b) {
    return std::abs(a.cwiseProduct(b).sum());
  };

  std::vector<Verdict> out;
  out.push_back(sampledVerdict(
      "bianchi_first_identity", "", cfg.tol, cfg.points,
      [&](int i) { return TaskResult{bianchiResidual(pd[static_cast<size_t>(i)].rm), ""}; },
      locatePoint));
  out.push_back(sampledVerdict(
      "curvature_pair_symmetry", "", cfg.tol, cfg.points,
      [&](int i) {
        const PointData& q = pd[static_cast<size_t>(i)];
        return TaskResult{pairSymmetryResidual(q.rm, q.g), ""};
      },
      locatePoint));
  out.push_back(sampledVerdict(
      "decomposition_reassembly", "", cfg.tol, cfg.points,
      [&](int i) {
        const PointData& q = pd[static_cast<size_t>(i)];
        return TaskResult{reassemblyResidual(q.cop, q.dec), ""};
      },
      locatePoint));
  out.push_back(sampledVerdict(
      "decomposition_orthogonality", "", cfg.tol, cfg.points,
      [&](int i) {
        const PointData& q = pd[static_cast<size_t>(i)];
        const double r = std::max(frob(q.dec.idPart, q.dec.bop),
                                  std::max(frob(q.dec.idPart, q.dec.wop),
                                           frob(q.dec.bop, q.dec.wop)));
        return TaskResult{r, ""};
      },
      locatePoint));
  if (n == 4) {
    out.push_back(sampledVerdict(
        "weyl_duality_split", "", cfg.tol, cfg.points,
        [&](int i) {
          const PointData& q = pd[static_cast<size_t>(i)];
          const Mat& st = q.dec.star;
          const Mat id = Mat::Identity(st.rows(), st.cols());
          double r = mx(Mat(st * st - id));
          r = std::max(r, mx(Mat(st * q.dec.wop - q.dec.wop * st)));
          r = std::max(r, mx(Mat(st * q.dec.bop + q.dec.bop * st)));
          r = std::max(r, mx(Mat(q.dec.wop - q.dec.wplus - q.dec.wminus)));
          return TaskResult{r, ""};
        },
        locatePoint));
  } else {
    out.push_back(
        notApplicable("weyl_duality_split", cfg.tol, "the duality split needs dimension 4"));
  }
  return out;
}

// ---------------------------------------------------------------------------
// twistor: fiber algebra and the Nijenhuis slot structure.
// ---------------------------------------------------------------------------

std::vector<Verdict> twistorSuite(const ManifoldSpec& spec, const SampleConfig& cfg) {
  const FieldGenMetric fm = normalizedField(spec.field, cfg);
  const int n = fm.n();
  const std::vector<Vec> pts = samplePoints(fm.chart, cfg.points);

  struct PointData {
    MetricJets mj;
    std::vector<Mat> rm;
  };
  std::vector<PointData> pd;
  pd.reserve(static_cast<size_t>(cfg.points));
  for (int ip = 0; ip < cfg.points; ip++) {
    PointData q;
    q.mj = fm.jets(pts[static_cast<size_t>(ip)]);
    q.rm = riemann(q.mj, ConnKind::SkewTorsion);
    pd.push_back(std::move(q));
  }

  struct Draw {
    FiberPoint fp;
    std::vector<VertVec> basis;
    GenElement a, b;
    VertVec v, w;
    int eps = 1;
  };
  const int count = cfg.points * cfg.fibers;
  std::vector<Draw> draws;
  draws.reserve(static_cast<size_t>(count));
  Rng root(cfg.seed);
  for (int ip = 0; ip < cfg.points; ip++) {
    const GenMetric gm = fm.eval(pts[static_cast<size_t>(ip)]);
    for (int fb = 0; fb < cfg.fibers; fb++) {
      Rng rng = root.fork(static_cast<uint64_t>(ip) * 8191 + static_cast<uint64_t>(fb) + 1);
      Draw d{randomFiberPoint(gm, kComps[fb % 4], rng, fm.chart.orientation),
             {},
             GenElement::zero(n),
             GenElement::zero(n),
             VertVec::zero(n),
             VertVec::zero(n),
             fb % 4 + 1};
      d.basis = vertBasis(d.fp);
      d.a = GenElement(rng.gaussianVec(2 * n));
      d.b = GenElement(rng.gaussianVec(2 * n));
      d.v = randomVertical(rng, d.basis, n);
      d.w = randomVertical(rng, d.basis, n);
      draws.push_back(std::move(d));
    }
  }
  const auto locate = [&](Witness& w, int i) {
    w.point = i / cfg.fibers;
    w.fiber = i % cfg.fibers;
  };
  const auto locatePoint = [](Witness& w, int i) { w.point = i; };
  const auto pointOf = [&](int i) -> const PointData& {
    return pd[static_cast<size_t>(i / cfg.fibers)];
  };
  const bool fiberHasRoom = n >= 4;

  std::vector<Verdict> out;
  out.push_back(sampledVerdict(
      "fiber_point_validity", "", cfg.tol, count,
      [&](int i) {
        const Draw& d = draws[static_cast<size_t>(i)];
        const GenComplex s = d.fp.structure();
        const double r = std::max(residualSquare(s),
                                  std::max(residualSkew(s), residualCompatible(d.fp.gm, s)));
        return TaskResult{r, ""};
      },
      locate));

  if (!fiberHasRoom) {
    const std::string why = "the vertical space is trivial below dimension 4";
    for (const char* p :
         {"fiber_operator_isometry", "vertical_basis_orthonormality",
          "vertical_endomorphism_tangency", "mixed_normal_form", "mixed_vanishing_base_structure",
          "covector_consistency", "component_antisymmetry"})
      out.push_back(notApplicable(p, cfg.tol, why));
  } else {
    out.push_back(sampledVerdict(
        "fiber_operator_isometry", "", cfg.tol, count,
        [&](int i) {
          const Draw& d = draws[static_cast<size_t>(i)];
          double r = 0.0;
          for (int eps = 1; eps <= 4; eps++) {
            const VertVec kv = kEps(d.fp, eps, d.v);
            const VertVec kw = kEps(d.fp, eps, d.w);
            r = std::max(r, std::abs(fiberMetric(kv, kw) - fiberMetric(d.v, d.w)));
            r = std::max(r, (kEps(d.fp, eps, kv) + d.v).norm());
            r = std::max(r, residualVertical(d.fp, kv));
          }
          return TaskResult{r, ""};
        },
        locate));
    out.push_back(sampledVerdict(
        "vertical_basis_orthonormality", "", cfg.tol, count,
        [&](int i) {
          const Draw& d = draws[static_cast<size_t>(i)];
          double r = 0.0;
          const size_t m = d.basis.size();
          for (size_t a = 0; a < m; a++)
            for (size_t b = 0; b < m; b++) {
              const double want = (a == b) ? 1.0 : 0.0;
              r = std::max(r, std::abs(fiberMetric(d.basis[a], d.basis[b]) - want));
            }
          for (const VertVec& u : d.basis) r = std::max(r, residualVertical(d.fp, u));
          return TaskResult{r, ""};
        },
        locate));
    out.push_back(sampledVerdict(
        "vertical_endomorphism_tangency", "", cfg.tol, count,
        [&](int i) {
          const Draw& d = draws[static_cast<size_t>(i)];
          const Mat e = vertToEndo(d.fp, d.v);
          const Mat jm = d.fp.structure().m;
          const Mat pm = pairingMatrix(n);
          const double r = std::max(mx(Mat(e * jm + jm * e)),
                                    mx(Mat(e.transpose() * pm + pm * e)));
          return TaskResult{r, ""};
        },
        locate));
    out.push_back(sampledVerdict(
        "mixed_normal_form", "", cfg.tol, cfg.points,
        [&](int i) {
          const GenMetric gm = fm.eval(pts[static_cast<size_t>(i)]);
          const FrameFiberData fd = frameFiberData(gm);
          const Vec q1 = fd.frame.col(0);
          const Vec q4 = fd.frame.col(3);
          const GenElement am = gm.liftM(q1);
          const GenElement ap = gm.liftP(q1);
          double r = mx(Vec(mixedNijenhuis(fd.fp, 2, am, fd.slot2).c - 2.0 * gm.liftM(q4).c));
          r = std::max(
              r, mx(Vec(mixedNijenhuis(fd.fp, 4, am, fd.slot2).c - 2.0 * gm.liftM(q4).c)));
          r = std::max(
              r, mx(Vec(mixedNijenhuis(fd.fp, 3, ap, fd.slot1).c - 2.0 * gm.liftP(q4).c)));
          return TaskResult{r, ""};
        },
        locatePoint));
    out.push_back(sampledVerdict(
        "mixed_vanishing_base_structure", "", cfg.tol, count,
        [&](int i) {
          const Draw& d = draws[static_cast<size_t>(i)];
          return TaskResult{mx(mixedNijenhuis(d.fp, 1, d.a, d.v).c), ""};
        },
        locate));
    out.push_back(sampledVerdict(
        "covector_consistency", "", cfg.tol, count,
        [&](int i) {
          const Draw& d = draws[static_cast<size_t>(i)];
          const PointData& q = pointOf(i);
          double r = 0.0;
          for (int eps = 1; eps <= 4; eps++) {
            const GenElement u = mixedCovectorNijenhuis(d.fp, q.mj, eps, d.a, d.w);
            const auto [vert, vstar] = verticalNijenhuis(d.fp, q.rm, d.basis, eps, d.a, d.b);
            (void)vstar;
            r = std::max(r, std::abs(pairing(u, d.b) + 0.5 * fiberMetric(d.w, vert)));
          }
          return TaskResult{r, ""};
        },
        locate));
    out.push_back(sampledVerdict(
        "component_antisymmetry", "", cfg.tol, count,
        [&](int i) {
          const Draw& d = draws[static_cast<size_t>(i)];
          const PointData& q = pointOf(i);
          const NijComponents nab = nijenhuisComponents(d.fp, q.mj, d.eps, d.a, d.b);
          const NijComponents nba = nijenhuisComponents(d.fp, q.mj, d.eps, d.b, d.a);
          double r = mx(Vec(nab.hor.c + nba.hor.c));
          r = std::max(r, (nab.vert + nba.vert).norm());
          r = std::max(r, (nab.vertstar + nba.vertstar).norm());
          return TaskResult{r, ""};
        },
        locate));
  }

  out.push_back(sampledVerdict(
      "horizontal_vanishing", "", cfg.tol, count,
      [&](int i) {
        const Draw& d = draws[static_cast<size_t>(i)];
        const PointData& q = pointOf(i);
        const double r = std::max(mx(horizontalNijenhuis(d.fp, q.mj, d.a, d.b).c),
                                  mx(horizontalNijenhuis(d.fp, q.mj, d.a + d.b, d.b).c));
        return TaskResult{r, ""};
      },
      locate));
  return out;
}

// ---------------------------------------------------------------------------
// theorems / equivalence: the sampled verdict predicates.
// ---------------------------------------------------------------------------

std::vector<Verdict> theoremsSuite(const ManifoldSpec& spec, const SampleConfig& cfg) {
  std::vector<Verdict> out;
  out.push_back(sameOrientationIntegrability(spec.field, cfg, Component::PP));
  out.push_back(sameOrientationIntegrability(spec.field, cfg, Component::MM));
  out.push_back(mixedOrientationIntegrability(spec.field, cfg, Component::PM));
  out.push_back(mixedOrientationIntegrability(spec.field, cfg, Component::MP));
  for (const Component comp : kComps) out.push_back(jklrVerdict(spec.field, cfg, comp));
  for (const Component comp : kComps) out.push_back(psiBarCondition(spec.field, cfg, comp));
  return out;
}

std::vector<Verdict> equivalenceSuite(const ManifoldSpec& spec, const SampleConfig& cfg) {
  if (spec.equivalencePartner.empty())
    throw SpecError("suite 'equivalence' needs an [equivalence] partner in spec '" + spec.name +
                    "'");
  const ManifoldSpec partner = loadSpec(spec.equivalencePartner);
  std::vector<Verdict> out;
  out.push_back(bTransformEquivalence(partner.field, spec.field, cfg));
  return out;
}

}  // namespace

std::vector<std::string> suiteNames() {
  return {"linalg", "courant", "connection", "curvature", "twistor", "theorems", "equivalence"};
}

SuiteReport runSuite(const ManifoldSpec& spec, const std::string& suite, const SampleConfig& cfg,
                     bool timings) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport sr;
  sr.name = suite;
  if (suite == "linalg")
    sr.verdicts = linalgSuite(spec, cfg);
  else if (suite == "courant")
    sr.verdicts = courantSuite(spec, cfg);
  else if (suite == "connection")
    sr.verdicts = connectionSuite(spec, cfg);
  else if (suite == "curvature")
    sr.verdicts = curvatureSuite(spec, cfg);
  else if (suite == "twistor")
    sr.verdicts = twistorSuite(spec, cfg);
  else if (suite == "theorems")
    sr.verdicts = theoremsSuite(spec, cfg);
  else if (suite == "equivalence")
    sr.verdicts = equivalenceSuite(spec, cfg);
  else
    throw SpecError("unknown suite '" + suite + "'");
  if (timings) {
    const auto t1 = std::chrono::steady_clock::now();
    sr.elapsedMs = std::chrono::duration<double, std::milli>(t1 - t0).count();
  }
  return sr;
}

Report runSuites(const ManifoldSpec& spec, const std::vector<std::string>& suites,
                 const SampleConfig& cfg, bool timings) {
  Report r;
  r.version = kToolVersion;
  r.specHash = hashHex(spec.source);
  r.seed = cfg.seed;
  r.suites.reserve(suites.size());
  for (const std::string& s : suites) r.suites.push_back(runSuite(spec, s, cfg, timings));
  return r;
}

bool matchesExpectations(const ManifoldSpec& spec, const Report& report) {
  for (const SuiteReport& sr : report.suites)
    for (const Verdict& v : sr.verdicts) {
      bool expected = true;
      for (const ExpectEntry& e : spec.expectations)
        if (e.predicate == v.predicate && (e.component.empty() || e.component == v.component))
          expected = e.expectPass;
      if (v.pass != expected) return false;
    }
  return true;
}

}  // namespace gentwist
