#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gentwist/suites.hpp"

namespace {

// Exit codes: 0 when every verdict matches its expectation, 1 when any
// verdict deviates, 2 for configuration errors (bad spec, bad arguments).
constexpr int kExitMismatch = 1;
constexpr int kExitConfig = 2;

int runCheck(const std::string& specRef, std::vector<std::string> suites,
             const gentwist::SampleConfig& overrides, unsigned optionMask,
             const std::string& jsonPath, bool timings) {
  using gentwist::SampleConfig;
  const gentwist::ManifoldSpec spec = gentwist::loadSpec(specRef);

  SampleConfig cfg = spec.sampling;
  if (optionMask & 1u) cfg.seed = overrides.seed;
  if (optionMask & 2u) cfg.points = overrides.points;
  if (optionMask & 4u) cfg.fibers = overrides.fibers;
  if (optionMask & 8u) cfg.probes = overrides.probes;
  if (optionMask & 16u) cfg.tol = overrides.tol;

  const std::vector<std::string> known = gentwist::suiteNames();
  if (suites.empty()) {
    for (const std::string& s : known)
      if (s != "equivalence" || !spec.equivalencePartner.empty()) suites.push_back(s);
  } else {
    for (const std::string& s : suites)
      if (std::find(known.begin(), known.end(), s) == known.end())
        throw gentwist::SpecError("unknown suite '" + s + "'");
  }

  const gentwist::Report report = gentwist::runSuites(spec, suites, cfg, timings);
  std::cout << gentwist::reportText(report);

  if (!jsonPath.empty()) {
    std::ofstream out(jsonPath, std::ios::binary);
    out << gentwist::reportJson(report);
    if (!out) throw gentwist::SpecError("cannot write report to '" + jsonPath + "'");
  }

  const bool ok = gentwist::matchesExpectations(spec, report);
  std::cout << (ok ? "expectations: matched\n" : "expectations: MISMATCH\n");
  return ok ? 0 : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verdicts for generalized metrics and their twistor structures"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "Run verdict suites over a manifold spec");
  std::string specRef;
  std::vector<std::string> suites;
  std::string jsonPath;
  bool timings = false;
  gentwist::SampleConfig overrides;

  check->add_option("spec", specRef, "Spec file path or builtin:<name>")->required();
  check->add_option("--suite", suites,
                    "Suite to run (repeatable; default: all applicable suites)");
  auto* seedOpt = check->add_option("--seed", overrides.seed, "Random seed");
  auto* pointsOpt = check->add_option("--points", overrides.points, "Chart sample points")
                        ->check(CLI::PositiveNumber);
  auto* fibersOpt = check->add_option("--fibers", overrides.fibers, "Fiber samples per point")
                        ->check(CLI::PositiveNumber);
  auto* probesOpt = check->add_option("--probes", overrides.probes, "Probe draws per sample")
                        ->check(CLI::PositiveNumber);
  auto* tolOpt =
      check->add_option("--tol", overrides.tol, "Verdict tolerance")->check(CLI::PositiveNumber);
  check->add_option("--json", jsonPath, "Write the JSON report to this file");
  check->add_flag("--timings", timings, "Record per-suite wall time in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  unsigned mask = 0;
  if (seedOpt->count()) mask |= 1u;
  if (pointsOpt->count()) mask |= 2u;
  if (fibersOpt->count()) mask |= 4u;
  if (probesOpt->count()) mask |= 8u;
  if (tolOpt->count()) mask |= 16u;

  try {
    return runCheck(specRef, suites, overrides, mask, jsonPath, timings);
  } catch (const gentwist::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitConfig;
  }
}
