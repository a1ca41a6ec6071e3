#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gentwist/integrability.hpp"

namespace gentwist {

inline constexpr const char* kToolVersion = "0.1.0";

struct SuiteReport {
  std::string name;
  std::vector<Verdict> verdicts;
  double elapsedMs = 0.0;
};

struct Report {
  std::string version = kToolVersion;
  std::string specHash;
  std::uint64_t seed = 0;
  std::vector<SuiteReport> suites;
};

// FNV-1a 64-bit content hash, rendered as 16 hex digits.
std::uint64_t fnv1a64(const std::string& data);
std::string hashHex(const std::string& data);

// Canonical JSON serialization (stable key order, newline-terminated):
// {version, spec_hash, seed, suites: [{name, verdicts: [{predicate,
// component, pass, max_residual, samples, tolerance, reason?, witness?}],
// elapsed_ms}]}.  "reason" appears only when non-empty; "witness" appears
// exactly on failing verdicts.
std::string reportJson(const Report& r);
Report reportFromJson(const std::string& text);

// Human-readable table, one block per suite.
std::string reportText(const Report& r);

bool reportAllPass(const Report& r);

}  // namespace gentwist
