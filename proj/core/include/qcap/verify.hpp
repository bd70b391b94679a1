#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcap/io.hpp"

namespace qcap {

struct SuiteResult {
  std::string name;
  long long instances = 0;
  long long violations = 0;
  double max_violation = 0.0;  // worst signed violation; ≤ 0 means clean
  bool pass = false;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  SlackParams slacks;
  // Extra fixtures to validate and run the small protocol instance on; the
  // built-in ones are always included.
  std::vector<std::string> fixture_paths;
};

// Runs every property suite with the given seed. Deterministic: equal seeds
// produce identical results.
std::vector<SuiteResult> run_verify_suites(const VerifyOptions& options);

// Fixed-width table used by the verify command; ends with a newline.
std::string format_suite_table(const std::vector<SuiteResult>& results);

// Built-in channel/ensemble fixtures (JSON documents keyed by name).
std::vector<std::pair<std::string, std::string>> builtin_fixture_documents();

} // namespace qcap
