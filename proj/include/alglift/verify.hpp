#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "alglift/serialize.hpp"

namespace alglift {

/// Named thresholds used by the verification suites. Names are the keys of
/// default_tolerances(); overrides must be positive and known.
using Tolerances = std::map<std::string, double>;

Tolerances default_tolerances();
/// Throws PreconditionError on an unknown name or a non-positive value.
void apply_override(Tolerances& tol, const std::string& name, double value);

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  std::vector<std::string> suites;  // empty: all
  int cases = 0;                    // > 0 overrides every suite's case count
  Tolerances tol = default_tolerances();
};

/// One suite's outcome. Everything except `seconds` is a deterministic
/// function of the seed, the options and the suite name.
struct SuiteReport {
  std::string name;
  std::uint64_t seed = 0;
  int cases = 0;
  int passed = 0;
  std::vector<std::string> failures;  // first few, "case <i>: <reason>"
  std::map<std::string, double> worst;  // largest observed value per metric
  double seconds = 0.0;

  bool ok() const { return cases > 0 && passed == cases; }
};

std::vector<std::string> suite_names();
int default_case_count(const std::string& suite);

SuiteReport run_suite(const std::string& name, const VerifyOptions& opts);

/// Runs the selected suites concurrently; the result is sorted by name.
std::vector<SuiteReport> run_verify(const VerifyOptions& opts);

Json to_json(const SuiteReport& r, bool with_timing = true);

}  // namespace alglift
