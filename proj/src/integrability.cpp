#include "gentwist/integrability.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace gentwist {

namespace {

// Covector components of the torsion form contracted with two vectors:
// out(z) = sum_{i,j} x_i y_j dtheta(i, j, z).
Vec dthetaForm(const MetricJets& mj, const Vec& x, const Vec& y) {
  const int n = mj.n;
  Vec out = Vec::Zero(n);
  for (int z = 0; z < n; z++) {
    double s = 0.0;
    for (int i = 0; i < n; i++)
      for (int j = 0; j < n; j++) s += x(i) * y(j) * mj.dTheta(i, j, z);
    out(z) = s;
  }
  return out;
}

// Torsion tensor of the skew-torsion connection: tm[k](a, b) = T^k_{ab}
// = sum_l g^{kl} dtheta(a, b, l).
std::vector<Mat> torsionMats(const MetricJets& mj, const Mat& ginv) {
  const int n = mj.n;
  std::vector<Mat> tm(n, Mat::Zero(n, n));
  for (int k = 0; k < n; k++)
    for (int a = 0; a < n; a++)
      for (int b = 0; b < n; b++) {
        double s = 0.0;
        for (int l = 0; l < n; l++) s += ginv(k, l) * mj.dTheta(a, b, l);
        tm[k](a, b) = s;
      }
  return tm;
}

double maxAbsDTheta(const MetricJets& mj) {
  double m = 0.0;
  for (int i = 0; i < mj.n; i++)
    for (int j = i + 1; j < mj.n; j++)
      for (int k = j + 1; k < mj.n; k++) m = std::max(m, std::abs(mj.dTheta(i, j, k)));
  return m;
}

double maxAbs(const GenElement& a) { return a.c.cwiseAbs().maxCoeff(); }

// Unit vector with gaussian direction; redraws the (practically impossible)
// near-zero samples so the normalization stays well conditioned.
Vec unitGaussian(Rng& rng, int n) {
  while (true) {
    Vec v = rng.gaussianVec(n);
    const double s = v.norm();
    if (s > 1e-3) return Vec(v / s);
  }
}

void checkConfig(const SampleConfig& cfg) {
  if (cfg.points < 1 || cfg.fibers < 1 || cfg.probes < 1)
    throw ValidationError("sampling configuration must request at least one point, fiber, and probe");
  if (!(cfg.tol > 0.0)) throw ValidationError("sampling tolerance must be positive");
}


// Chart samples with entry jets and the closedness defect of theta.
struct SampleData {
  FieldGenMetric fm;
  std::vector<Vec> pts;
  std::vector<MetricJets> jets;
  double dthetaMax = 0.0;
  int dthetaWorst = 0;
};

SampleData sampleData(const FieldGenMetric& fm0, const SampleConfig& cfg) {
  checkConfig(cfg);
  SampleData s{normalizedField(fm0, cfg), {}, {}, 0.0, 0};
  s.fm.chart.validate();
  s.pts = samplePoints(s.fm.chart, cfg.points);
  s.jets.reserve(s.pts.size());
  for (int i = 0; i < cfg.points; i++) {
    s.jets.push_back(s.fm.jets(s.pts[i]));
    const double d = maxAbsDTheta(s.jets.back());
    if (d > s.dthetaMax) {
      s.dthetaMax = d;
      s.dthetaWorst = i;
    }
  }
  return s;
}

// Per-point curvature operators plus deterministic fiber points and probe
// quadruples.  All randomness is drawn sequentially here, before any fan-out.
struct FiberData {
  std::vector<CurvOp> ops;
  std::vector<CurvDecomp> decs;
  std::vector<std::vector<FiberPoint>> fps;            // [point][fiber]
  std::vector<std::vector<std::array<Vec, 4>>> quads;  // [point][fiber * probes + probe]
};

FiberData fiberData(const SampleData& s, const SampleConfig& cfg, Component comp,
                    bool needDecomp) {
  FiberData f;
  const int n = s.fm.chart.dim();
  const int orient = s.fm.chart.orientation;
  const Rng root(cfg.seed);
  for (int ip = 0; ip < cfg.points; ip++) {
    f.ops.push_back(curvatureOperator(s.jets[ip], ConnKind::LeviCivita, orient));
    if (needDecomp) f.decs.push_back(decompose(f.ops.back()));
    const GenMetric gm(s.jets[ip].gVal(), s.jets[ip].thetaVal());
    std::vector<FiberPoint> fpRow;
    std::vector<std::array<Vec, 4>> qRow;
    for (int fb = 0; fb < cfg.fibers; fb++) {
      Rng rng = root.fork(static_cast<uint64_t>(ip) * 8191u + static_cast<uint64_t>(fb) + 1u);
      fpRow.push_back(randomFiberPoint(gm, comp, rng, orient));
      for (int k = 0; k < cfg.probes; k++) {
        std::array<Vec, 4> q;
        for (auto& vv : q) vv = Vec(f.ops[ip].frame * unitGaussian(rng, n));
        qRow.push_back(std::move(q));
      }
    }
    f.fps.push_back(std::move(fpRow));
    f.quads.push_back(std::move(qRow));
  }
  return f;
}

// Folds task results into the verdict, keeping the lowest-index argmax as the
// witness; `locate` fills in the sample coordinates for that index.
void reduceResults(Verdict& v, const std::vector<TaskResult>& results,
                   const std::function<void(Witness&, int)>& locate) {
  for (int i = 0; i < static_cast<int>(results.size()); i++) {
    if (results[i].residual > v.maxResidual) {
      v.maxResidual = results[i].residual;
      v.witness.residual = results[i].residual;
      v.witness.detail = results[i].detail;
      v.witness.point = v.witness.fiber = v.witness.probe = -1;
      locate(v.witness, i);
    }
  }
  v.samples += static_cast<long>(results.size());
}

void finalize(Verdict& v) {
  v.pass = !(v.maxResidual > v.tolerance);
  if (v.pass)
    v.witness = Witness{};
  else
    v.witness.present = true;
}

// Short-circuit failure when theta is not closed at the sampled points.
bool gateClosed(Verdict& v, const SampleData& s, const SampleConfig& cfg) {
  if (!(s.dthetaMax > cfg.tol)) return true;
  std::ostringstream os;
  os << "torsion potential is not closed: max |d theta| = " << s.dthetaMax;
  v.reason = os.str();
  v.pass = false;
  v.maxResidual = s.dthetaMax;
  v.samples = static_cast<long>(s.pts.size());
  v.witness.present = true;
  v.witness.point = s.dthetaWorst;
  v.witness.residual = s.dthetaMax;
  v.witness.detail = "d theta component at sample point";
  return false;
}

std::vector<TaskResult> identityTasks(const SampleConfig& cfg, const FiberData& fd) {
  const int total = cfg.points * cfg.fibers * cfg.probes;
  return runTasks(total, [&](int idx) {
    const int k = idx % cfg.probes;
    const int fb = (idx / cfg.probes) % cfg.fibers;
    const int ip = idx / (cfg.probes * cfg.fibers);
    const auto& quad = fd.quads[ip][fb * cfg.probes + k];
    TaskResult tr;
    for (int j = 1; j <= 2; j++)
      for (int l = 1; l <= 2; l++)
        for (int r = 1; r <= 2; r++) {
          const double res = jklrResidual(fd.ops[ip], fd.fps[ip][fb], j, l, r, quad[0], quad[1],
                                          quad[2], quad[3]);
          if (res > tr.residual) {
            tr.residual = res;
            std::ostringstream os;
            os << "curvature-operator identity, slots (" << j << "," << l << "," << r << ")";
            tr.detail = os.str();
          }
        }
    return tr;
  });
}

std::function<void(Witness&, int)> locateByProbe(const SampleConfig& cfg) {
  return [cfg](Witness& w, int idx) {
    w.probe = idx % cfg.probes;
    w.fiber = (idx / cfg.probes) % cfg.fibers;
    w.point = idx / (cfg.probes * cfg.fibers);
  };
}

double maxResidualOf(const std::vector<TaskResult>& r) {
  double m = 0.0;
  for (const auto& t : r) m = std::max(m, t.residual);
  return m;
}

}  // namespace

GenElement horizontalNijenhuis(const FiberPoint& fp, const MetricJets& mj, const GenElement& a,
                               const GenElement& b) {
  const int n = fp.n();
  if (a.n() != n || b.n() != n || mj.n != n)
    throw DimensionError("horizontal component: argument size mismatch");
  const Mat& th = fp.gm.theta;
  const Mat ginv = fp.gm.g.inverse();

  const GenElement a0 = bTransform(Mat(-th), a);
  const GenElement b0 = bTransform(Mat(-th), b);
  const GenComplex kc = assemble(GenMetric(fp.gm.g, Mat::Zero(n, n)), fp.j1, fp.j2);
  const GenElement ka = kc.apply(a0), kb = kc.apply(b0);

  const Vec x = a0.vec(), al = a0.cov();
  const Vec y = b0.vec(), be = b0.cov();
  const Vec xh = ka.vec(), alh = ka.cov();
  const Vec yh = kb.vec(), beh = kb.cov();

  const std::vector<Mat> tm = torsionMats(mj, ginv);
  auto tvec = [&](const Vec& u, const Vec& w) {
    Vec out(n);
    for (int k = 0; k < n; k++) out(k) = u.dot(tm[k] * w);
    return out;
  };
  // z -> form(T(w, z))
  auto ait = [&](const Vec& form, const Vec& w) {
    Vec out = Vec::Zero(n);
    for (int k = 0; k < n; k++) out += form(k) * Vec(tm[k].transpose() * w);
    return out;
  };

  const GenElement nk =
      GenElement(Vec(tvec(x, y) - tvec(xh, yh)),
                 Vec(ait(al, y) - ait(be, x) - ait(alh, yh) + ait(beh, xh))) +
      kc.apply(GenElement(Vec(tvec(xh, y) + tvec(x, yh)),
                          Vec(ait(alh, y) - ait(be, xh) + ait(al, yh) - ait(beh, x))));

  const GenElement corr =
      kc.apply(GenElement::covector(Vec(dthetaForm(mj, xh, y) + dthetaForm(mj, x, yh))));
  return bTransform(th, nk) - GenElement::covector(dthetaForm(mj, x, y)) +
         GenElement::covector(dthetaForm(mj, xh, yh)) - bTransform(th, corr);
}

std::pair<VertVec, VertVec> verticalNijenhuis(const FiberPoint& fp, const std::vector<Mat>& rm,
                                              const std::vector<VertVec>& basis, int eps,
                                              const GenElement& a, const GenElement& b) {
  const auto [s1, s2] = epsSigns(eps);
  const GenComplex jeps = assemble(fp.gm, Mat(s1 * fp.j1), Mat(s2 * fp.j2));
  const Vec xa = a.vec(), xb = b.vec();
  const Vec xja = jeps.apply(a).vec(), xjb = jeps.apply(b).vec();
  auto rc = [&](const Vec& x, const Vec& y) {
    const Mat r = curvEndo(rm, x, y);
    return VertVec(Mat(r * fp.j1 - fp.j1 * r), Mat(r * fp.j2 - fp.j2 * r));
  };
  const VertVec vert = (-1.0) * rc(xa, xb) + rc(xja, xjb) - kEps(fp, eps, rc(xja, xb)) -
                       kEps(fp, eps, rc(xa, xjb));
  const VertVec vstar = (-1.0) * omegaEps(fp, eps, a, b, basis);
  return {vert, vstar};
}

std::pair<VertVec, VertVec> verticalNijenhuis(const FiberPoint& fp, const MetricJets& mj, int eps,
                                              const GenElement& a, const GenElement& b) {
  return verticalNijenhuis(fp, riemann(mj, ConnKind::SkewTorsion), vertBasis(fp), eps, a, b);
}

NijComponents nijenhuisComponents(const FiberPoint& fp, const MetricJets& mj, int eps,
                                  const GenElement& a, const GenElement& b) {
  NijComponents out;
  out.hor = horizontalNijenhuis(fp, mj, a, b);
  const auto vv = verticalNijenhuis(fp, mj, eps, a, b);
  out.vert = vv.first;
  out.vertstar = vv.second;
  return out;
}

GenElement mixedNijenhuis(const FiberPoint& fp, int eps, const GenElement& a, const VertVec& v) {
  const VertVec d = kEps(fp, 1, v) - kEps(fp, eps, v);
  return GenElement(Vec(vertToEndo(fp, d) * a.c));
}

GenElement mixedCovectorNijenhuis(const FiberPoint& fp, const MetricJets& mj, int eps,
                                  const GenElement& a, const VertVec& phiDual) {
  const int n = fp.n();
  const std::vector<Mat> rm = riemann(mj, ConnKind::SkewTorsion);
  const std::vector<VertVec> basis = vertBasis(fp);
  Vec f(2 * n);
  for (int t = 0; t < 2 * n; t++) {
    const GenElement bt{Vec(Vec::Unit(2 * n, t))};
    const auto vv = verticalNijenhuis(fp, rm, basis, eps, a, bt);
    f(t) = -0.5 * fiberMetric(phiDual, vv.first);
  }
  Vec packed(2 * n);
  packed.head(n) = 2.0 * f.tail(n);
  packed.tail(n) = 2.0 * f.head(n);
  return GenElement(packed);
}

FrameFiberData frameFiberData(const GenMetric& gm) {
  const int n = gm.n();
  if (n < 4) throw DimensionError("normal-form fiber data requires dimension >= 4");
  const Mat q = gOrthonormalFrame(gm.g, +1);
  const Mat qi = q.inverse();
  Mat j0 = Mat::Zero(n, n);
  for (int k = 0; k + 1 < n; k += 2) {
    j0(k + 1, k) = 1.0;
    j0(k, k + 1) = -1.0;
  }
  const Mat j = q * j0 * qi;
  // Frame rotation generator in the plane (i, j): e_j e_i^T - e_i e_j^T.
  auto rot = [&](int i1, int i2) {
    Mat s = Mat::Zero(n, n);
    s(i2, i1) = 1.0;
    s(i1, i2) = -1.0;
    return s;
  };
  const Mat gen = q * Mat(rot(0, 2) + rot(3, 1)) * qi;
  return {makeFiberPoint(gm, j, j), q, VertVec(gen, Mat::Zero(n, n)),
          VertVec(Mat::Zero(n, n), gen)};
}

double jklrResidual(const CurvOp& cop, const FiberPoint& fp, int j, int l, int r, const Vec& x,
                    const Vec& y, const Vec& z, const Vec& u) {
  if (j < 1 || j > 2 || l < 1 || l > 2 || r < 1 || r > 2)
    throw DomainError("slot structure selectors must be 1 or 2");
  const Mat& jj = (j == 1) ? fp.j1 : fp.j2;
  const Mat& jl = (l == 1) ? fp.j1 : fp.j2;
  const Mat& jr = (r == 1) ? fp.j1 : fp.j2;
  const Mat qi = cop.frame.inverse();
  auto wc = [&](const Vec& a, const Vec& b) { return cop.wedgeCoords(Vec(qi * a), Vec(qi * b)); };
  const Vec w1 = wc(x, y) - wc(Vec(jj * x), Vec(jl * y));
  const Vec v1 = wc(z, u) - wc(Vec(jr * z), Vec(jr * u));
  const Vec w2 = wc(Vec(jj * x), y) + wc(x, Vec(jl * y));
  const Vec v2 = wc(Vec(jr * z), u) + wc(z, Vec(jr * u));
  return std::abs((cop.c * w1).dot(v1) - (cop.c * w2).dot(v2));
}

double jklrResidual(const FieldGenMetric& fm, const Vec& p, const FiberPoint& fp, int j, int l,
                    int r, const Vec& x, const Vec& y, const Vec& z, const Vec& u) {
  const MetricJets mj = fm.jets(p);
  if (!mj.thetaClosed())
    throw DomainError(
        "curvature-operator identity requires a closed torsion potential at the sample point");
  const CurvOp cop = curvatureOperator(mj, ConnKind::LeviCivita, fm.chart.orientation);
  return jklrResidual(cop, fp, j, l, r, x, y, z, u);
}

double curvatureCommutationResidual(const CurvOp& cop, const FiberPoint& fp, int k, const Vec& x,
                                    const Vec& y, const Vec& z, const Vec& u) {
  if (k != 1 && k != 2) throw DomainError("slot structure selector must be 1 or 2");
  const Mat& jk = (k == 1) ? fp.j1 : fp.j2;
  const Mat qi = cop.frame.inverse();
  auto wc = [&](const Vec& a, const Vec& b) { return cop.wedgeCoords(Vec(qi * a), Vec(qi * b)); };
  const Vec w = wc(x, y);
  const Vec v = wc(Vec(jk * z), u) + wc(z, Vec(jk * u));
  return std::abs((cop.c * w).dot(v));
}

FieldGenMetric normalizedField(const FieldGenMetric& fm, const SampleConfig& cfg) {
  if (!cfg.rescale) return fm;
  const double c = fm.eval(fm.chart.center()).g.cwiseAbs().maxCoeff();
  if (!(c > 0.0))
    throw ValidationError("metric normalization failed: zero scale at the box center");
  return fm.rescaled(c);
}

Verdict sampledVerdict(const std::string& predicate, const std::string& component, double tol,
                       int count, const std::function<TaskResult(int)>& task,
                       const std::function<void(Witness&, int)>& locate) {
  Verdict v;
  v.predicate = predicate;
  v.component = component;
  v.tolerance = tol;
  reduceResults(v, runTasks(count, task), locate);
  finalize(v);
  return v;
}

std::vector<Vec> samplePoints(const Chart& chart, int count) {
  std::vector<Vec> pts;
  pts.reserve(static_cast<size_t>(std::max(count, 0)));
  for (int i = 0; i < count; i++)
    pts.push_back(chart.boxPoint(haltonPoint(static_cast<uint64_t>(i), chart.dim())));
  return pts;
}

int threadBudget() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 4;
  int budget = hw;
  if (const char* env = std::getenv("GENTWIST_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && end && *end == '\0' && v >= 1) budget = static_cast<int>(std::min(v, 256L));
  }
  return std::max(1, std::min(budget, 256));
}

std::vector<TaskResult> runTasks(int count, const std::function<TaskResult(int)>& task) {
  std::vector<TaskResult> out(static_cast<size_t>(std::max(count, 0)));
  if (count <= 0) return out;
  const int workers = std::min(threadBudget(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; i++) out[static_cast<size_t>(i)] = task(i);
    return out;
  }
  std::atomic<int> nextIdx{0};
  std::mutex errMu;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; w++)
    pool.emplace_back([&] {
      while (true) {
        const int i = nextIdx.fetch_add(1);
        if (i >= count) break;
        try {
          out[static_cast<size_t>(i)] = task(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lk(errMu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return out;
}

Verdict sameOrientationIntegrability(const FieldGenMetric& fm0, const SampleConfig& cfg,
                                     Component comp) {
  if (comp != Component::PP && comp != Component::MM)
    throw DomainError("same-orientation integrability requires the ++ or -- component");
  Verdict v;
  v.predicate = "same_orientation_integrability";
  v.component = componentName(comp);
  v.tolerance = cfg.tol;
  const SampleData s = sampleData(fm0, cfg);
  const int n = s.fm.chart.dim();
  if (n % 4 != 0) {
    v.reason = "not applicable: base dimension is not a multiple of 4";
    return v;
  }
  if (!gateClosed(v, s, cfg)) return v;
  const FiberData fd = fiberData(s, cfg, comp, n == 4);

  const auto branch = runTasks(cfg.points, [&](int ip) {
    TaskResult tr;
    if (n == 4) {
      const double rres = fd.ops[ip].ricci.cwiseAbs().maxCoeff();
      const Mat& w = (comp == Component::PP) ? fd.decs[ip].wplus : fd.decs[ip].wminus;
      const double wres = w.size() > 0 ? w.cwiseAbs().maxCoeff() : 0.0;
      tr.residual = std::max(rres, wres);
      tr.detail = (rres >= wres) ? "Ricci component"
                                 : ((comp == Component::PP) ? "self-dual Weyl component"
                                                            : "anti-self-dual Weyl component");
    } else {
      tr.residual = fd.ops[ip].c.cwiseAbs().maxCoeff();
      tr.detail = "curvature-operator component (flatness)";
    }
    return tr;
  });
  const auto ident = identityTasks(cfg, fd);

  const double branchMax = maxResidualOf(branch);
  const double identMax = maxResidualOf(ident);
  reduceResults(v, branch, [](Witness& w, int i) { w.point = i; });
  reduceResults(v, ident, locateByProbe(cfg));
  const bool branchPass = !(branchMax > cfg.tol);
  const bool identPass = !(identMax > cfg.tol);
  if (branchPass != identPass)
    v.reason = branchPass
                   ? "curvature-condition branch passes but direct identity sampling fails"
                   : "direct identity sampling passes but the curvature-condition branch fails";
  finalize(v);
  return v;
}

Verdict mixedOrientationIntegrability(const FieldGenMetric& fm0, const SampleConfig& cfg,
                                      Component comp) {
  if (comp != Component::PM && comp != Component::MP)
    throw DomainError("mixed-orientation integrability requires the +- or -+ component");
  Verdict v;
  v.predicate = "mixed_orientation_integrability";
  v.component = componentName(comp);
  v.tolerance = cfg.tol;
  const SampleData s = sampleData(fm0, cfg);
  const int n = s.fm.chart.dim();
  if (n % 4 != 0) {
    v.reason = "not applicable: base dimension is not a multiple of 4";
    return v;
  }
  if (!gateClosed(v, s, cfg)) return v;
  const FiberData fd = fiberData(s, cfg, comp, false);

  const double s0 = fd.ops[0].scalar;
  const auto branch = runTasks(cfg.points, [&](int ip) {
    TaskResult tr;
    const Mat& c = fd.ops[ip].c;
    const double kappa = fd.ops[ip].scalar / (static_cast<double>(n) * (n - 1.0));
    const Mat dev = c - kappa * Mat::Identity(c.rows(), c.cols());
    tr.residual = dev.cwiseAbs().maxCoeff();
    tr.detail = "sectional-curvature deviation";
    const double drift = std::abs(fd.ops[ip].scalar - s0);
    if (drift > tr.residual) {
      tr.residual = drift;
      tr.detail = "scalar-curvature drift across sample points";
    }
    return tr;
  });
  const auto ident = identityTasks(cfg, fd);

  const double branchMax = maxResidualOf(branch);
  const double identMax = maxResidualOf(ident);
  reduceResults(v, branch, [](Witness& w, int i) { w.point = i; });
  reduceResults(v, ident, locateByProbe(cfg));
  const bool branchPass = !(branchMax > cfg.tol);
  const bool identPass = !(identMax > cfg.tol);
  if (branchPass != identPass)
    v.reason = branchPass
                   ? "curvature-condition branch passes but direct identity sampling fails"
                   : "direct identity sampling passes but the curvature-condition branch fails";
  finalize(v);
  return v;
}

Verdict jklrVerdict(const FieldGenMetric& fm0, const SampleConfig& cfg, Component comp) {
  Verdict v;
  v.predicate = "curvature_operator_identity";
  v.component = componentName(comp);
  v.tolerance = cfg.tol;
  const SampleData s = sampleData(fm0, cfg);
  if (!gateClosed(v, s, cfg)) return v;
  const FiberData fd = fiberData(s, cfg, comp, false);
  reduceResults(v, identityTasks(cfg, fd), locateByProbe(cfg));
  finalize(v);
  return v;
}

Verdict psiBarCondition(const FieldGenMetric& fm0, const SampleConfig& cfg, Component comp) {
  Verdict v;
  v.predicate = "curvature_commutation";
  v.component = componentName(comp);
  v.tolerance = cfg.tol;
  const SampleData s = sampleData(fm0, cfg);
  const FiberData fd = fiberData(s, cfg, comp, false);
  const int total = cfg.points * cfg.fibers * cfg.probes;
  const auto results = runTasks(total, [&](int idx) {
    const int k = idx % cfg.probes;
    const int fb = (idx / cfg.probes) % cfg.fibers;
    const int ip = idx / (cfg.probes * cfg.fibers);
    const auto& quad = fd.quads[ip][fb * cfg.probes + k];
    TaskResult tr;
    for (int slot = 1; slot <= 2; slot++) {
      const double res = curvatureCommutationResidual(fd.ops[ip], fd.fps[ip][fb], slot, quad[0],
                                                      quad[1], quad[2], quad[3]);
      if (res > tr.residual) {
        tr.residual = res;
        tr.detail = "curvature commutation, slot structure " + std::to_string(slot);
      }
    }
    return tr;
  });
  reduceResults(v, results, locateByProbe(cfg));
  finalize(v);
  return v;
}

Verdict bTransformEquivalence(const FieldGenMetric& fmA0, const FieldGenMetric& fmB0,
                              const SampleConfig& cfg) {
  Verdict v;
  v.predicate = "b_transform_equivalence";
  v.tolerance = cfg.tol;
  checkConfig(cfg);
  if (fmA0.chart.dim() != fmB0.chart.dim())
    throw DimensionError("equivalence check requires charts of equal dimension");

  FieldGenMetric fa = fmA0, fb = fmB0;
  if (cfg.rescale) {
    const double c = fmA0.eval(fmA0.chart.center()).g.cwiseAbs().maxCoeff();
    if (!(c > 0.0))
      throw ValidationError("metric normalization failed: zero scale at the box center");
    fa = fmA0.rescaled(c);
    fb = fmB0.rescaled(c);
  }
  const int n = fa.chart.dim();
  const int orient = fa.chart.orientation;
  const std::vector<Vec> pts = samplePoints(fa.chart, cfg.points);

  std::vector<MetricJets> jA, jB;
  jA.reserve(pts.size());
  jB.reserve(pts.size());
  double gMis = 0.0, dpsiMax = 0.0;
  int dpsiWorst = 0;
  for (int ip = 0; ip < cfg.points; ip++) {
    jA.push_back(fa.jets(pts[ip]));
    jB.push_back(fb.jets(pts[ip]));
    gMis = std::max(gMis, (jA.back().gVal() - jB.back().gVal()).cwiseAbs().maxCoeff());
    for (int i = 0; i < n; i++)
      for (int j = i + 1; j < n; j++)
        for (int k = j + 1; k < n; k++) {
          const double d = std::abs(jB.back().dTheta(i, j, k) - jA.back().dTheta(i, j, k));
          if (d > dpsiMax) {
            dpsiMax = d;
            dpsiWorst = ip;
          }
        }
  }
  if (gMis > 1e-9) {
    std::ostringstream os;
    os << "equivalence check requires the same metric g on both sides (max |g_a - g_b| = " << gMis
       << ")";
    throw ValidationError(os.str());
  }
  if (dpsiMax > cfg.tol) {
    std::ostringstream os;
    os << "difference of the torsion potentials is not closed: max |d psi| = " << dpsiMax;
    v.reason = os.str();
    v.pass = false;
    v.maxResidual = dpsiMax;
    v.samples = cfg.points;
    v.witness.present = true;
    v.witness.point = dpsiWorst;
    v.witness.residual = dpsiMax;
    v.witness.detail = "d(theta_b - theta_a) component at sample point";
    return v;
  }

  struct PointData {
    GenMetric gmA, gmB;
    Mat psi;
    std::vector<Mat> rmA, rmB;
  };
  std::vector<PointData> pd;
  pd.reserve(pts.size());
  for (int ip = 0; ip < cfg.points; ip++) {
    PointData d{GenMetric(jA[ip].gVal(), jA[ip].thetaVal()),
                GenMetric(jB[ip].gVal(), jB[ip].thetaVal()), Mat(), {}, {}};
    d.psi = d.gmB.theta - d.gmA.theta;
    d.rmA = riemann(jA[ip], ConnKind::SkewTorsion);
    d.rmB = riemann(jB[ip], ConnKind::SkewTorsion);
    pd.push_back(std::move(d));
  }

  struct FiberDraw {
    FiberPoint fpA, fpB;
    std::vector<VertVec> basis;
  };
  struct ProbeDraw {
    GenElement h, a, b;
    VertVec tv, tw;
  };
  const std::array<Component, 4> comps{Component::PP, Component::PM, Component::MP,
                                       Component::MM};
  std::vector<FiberDraw> fdraws;
  std::vector<ProbeDraw> pdraws;
  fdraws.reserve(static_cast<size_t>(cfg.points) * 4 * cfg.fibers);
  pdraws.reserve(fdraws.capacity() * static_cast<size_t>(cfg.probes));
  const Rng root(cfg.seed);
  for (int ip = 0; ip < cfg.points; ip++)
    for (int c4 = 0; c4 < 4; c4++)
      for (int fb = 0; fb < cfg.fibers; fb++) {
        Rng rng = root.fork(
            (static_cast<uint64_t>(ip) * 4u + static_cast<uint64_t>(c4)) * cfg.fibers +
            static_cast<uint64_t>(fb) + 1u);
        FiberDraw fd;
        fd.fpA = randomFiberPoint(pd[ip].gmA, comps[c4], rng, orient);
        fd.fpB = makeFiberPoint(pd[ip].gmB, fd.fpA.j1, fd.fpA.j2, 1e-7);
        fd.basis = vertBasis(fd.fpA);
        const int bs = static_cast<int>(fd.basis.size());
        for (int k = 0; k < cfg.probes; k++) {
          ProbeDraw p;
          p.h = GenElement(Vec(rng.gaussianVec(2 * n)));
          const Vec vc = rng.gaussianVec(bs);
          const Vec wc = rng.gaussianVec(bs);
          VertVec tv = VertVec::zero(n), tw = VertVec::zero(n);
          for (int i = 0; i < bs; i++) {
            tv = tv + vc(i) * fd.basis[i];
            tw = tw + wc(i) * fd.basis[i];
          }
          p.tv = tv;
          p.tw = tw;
          p.a = GenElement(Vec(rng.gaussianVec(2 * n)));
          p.b = GenElement(Vec(rng.gaussianVec(2 * n)));
          pdraws.push_back(std::move(p));
        }
        fdraws.push_back(std::move(fd));
      }

  const int total = cfg.points * 4 * cfg.fibers * cfg.probes;
  const auto results = runTasks(total, [&](int idx) {
    const int k = idx % cfg.probes;
    const int fb = (idx / cfg.probes) % cfg.fibers;
    const int c4 = (idx / (cfg.probes * cfg.fibers)) % 4;
    const int ip = idx / (cfg.probes * cfg.fibers * 4);
    const FiberDraw& F = fdraws[static_cast<size_t>((ip * 4 + c4) * cfg.fibers + fb)];
    const ProbeDraw& P = pdraws[static_cast<size_t>(idx)];
    const Mat& psi = pd[ip].psi;
    TaskResult tr;
    auto upd = [&](double r, const std::string& d) {
      if (r > tr.residual) {
        tr.residual = r;
        tr.detail = d;
      }
    };

    const TwistorTangent t{P.h, P.tv, P.tw};
    for (int eps = 1; eps <= 4; eps++) {
      const TwistorTangent back{bTransform(Mat(-psi), t.h), t.v, t.vstar};
      const TwistorTangent uA = jepsAction(F.fpA, eps, back);
      const TwistorTangent lhs{bTransform(psi, uA.h), uA.v, uA.vstar};
      const TwistorTangent rhs = jepsAction(F.fpB, eps, t);
      upd((lhs - rhs).norm(), "structure intertwining, eps = " + std::to_string(eps));
    }

    const GenElement ah = bTransform(psi, P.a), bh = bTransform(psi, P.b);
    const GenElement horA = horizontalNijenhuis(F.fpA, jA[ip], P.a, P.b);
    const GenElement horB = horizontalNijenhuis(F.fpB, jB[ip], ah, bh);
    upd(maxAbs(horB - bTransform(psi, horA)), "horizontal component transport");
    for (int eps = 1; eps <= 4; eps++) {
      const auto vvA = verticalNijenhuis(F.fpA, pd[ip].rmA, F.basis, eps, P.a, P.b);
      const auto vvB = verticalNijenhuis(F.fpB, pd[ip].rmB, F.basis, eps, ah, bh);
      upd((vvB.first - vvA.first).norm(),
          "vertical component transport, eps = " + std::to_string(eps));
      upd((vvB.second - vvA.second).norm(),
          "vertical-covector component transport, eps = " + std::to_string(eps));
      const GenElement mA = mixedNijenhuis(F.fpA, eps, P.a, t.v);
      const GenElement mB = mixedNijenhuis(F.fpB, eps, ah, t.v);
      upd(maxAbs(mB - bTransform(psi, mA)), "mixed component transport, eps = " + std::to_string(eps));
    }
    if (k == 0) {
      upd((conjugateByB(psi, F.fpA.structure()).m - F.fpB.structure().m).cwiseAbs().maxCoeff(),
          "structure conjugation");
      if (classifyComponent(pd[ip].gmB, F.fpB.structure(), orient) != comps[c4])
        upd(1.0, "component classification changed under transport");
    }
    return tr;
  });

  reduceResults(v, results, [&](Witness& w, int idx) {
    w.probe = idx % cfg.probes;
    w.fiber = (idx / cfg.probes) % cfg.fibers;
    const int c4 = (idx / (cfg.probes * cfg.fibers)) % 4;
    w.point = idx / (cfg.probes * cfg.fibers * 4);
    w.detail += std::string(" on component ") + componentName(comps[static_cast<size_t>(c4)]);
  });
  finalize(v);
  return v;
}

}  // namespace gentwist
