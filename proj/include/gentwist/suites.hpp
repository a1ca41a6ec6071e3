#pragma once

#include <string>
#include <vector>

#include "gentwist/manifold_spec.hpp"
#include "gentwist/report.hpp"

namespace gentwist {

// Names of the verdict suites, in canonical order.  "equivalence" requires an
// [equivalence] partner in the spec.
std::vector<std::string> suiteNames();

// Runs one named suite over the spec with the given sampling configuration.
// Throws SpecError for an unknown suite name or a missing equivalence
// partner.  elapsedMs is filled only when `timings` is set, so that report
// bytes stay reproducible by default.
SuiteReport runSuite(const ManifoldSpec& spec, const std::string& suite, const SampleConfig& cfg,
                     bool timings = false);

// Runs several suites and assembles the report (tool version, spec hash,
// seed, suites in the order requested).
Report runSuites(const ManifoldSpec& spec, const std::vector<std::string>& suites,
                 const SampleConfig& cfg, bool timings = false);

// True when every verdict matches the spec's [expect] section: the last
// matching entry (same predicate, component wildcard or equal) decides the
// expected outcome, and verdicts without an entry are expected to pass.
bool matchesExpectations(const ManifoldSpec& spec, const Report& report);

}  // namespace gentwist
