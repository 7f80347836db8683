// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <map>
#include <string>

#include "alglift/verify.hpp"

using namespace alglift;

namespace {

int failures = 0;

void line(bool ok, int id, const std::string& title, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double worst(const SuiteReport& r, const std::string& key) {
  auto it = r.worst.find(key);
  return it == r.worst.end() ? 0.0 : it->second;
}

std::string counts(const SuiteReport& r) {
  std::string s = std::to_string(r.passed) + "/" + std::to_string(r.cases) + " cases";
  if (!r.failures.empty()) s += " (first failure: " + r.failures.front() + ")";
  return s;
}

}  // namespace

int main() {
  VerifyOptions opts;
  const auto t0 = std::chrono::steady_clock::now();
  const auto first = run_verify(opts);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::map<std::string, SuiteReport> by;
  for (const auto& r : first) by[r.name] = r;

  const auto& rad = by["radius"];
  line(rad.ok() && rad.cases == 200 && rad.seconds <= 30.0, 1, "generalized spectral radius formula",
       counts(rad) + ", worst |value - max(rho, ||x mod I||)| / max(1e-3, 1e-3 ||x||) = " +
           fmt("%.3g", worst(rad, "oracle_gap_relative")) + ", worst attainment gap " +
           fmt("%.2g", worst(rad, "attainment_gap")) + " (limit 1e-4), " +
           fmt("%.2f", rad.seconds) + " s (limit 30 s)");

  const auto& mw = by["whole_algebra"];
  line(mw.ok() && mw.cases == 100, 2, "whole algebra as the ideal",
       counts(mw) + ", worst |schedule(1e-6) - rho| / max(1e-2, 1e-2 ||X||) = " +
           fmt("%.3g", worst(mw, "schedule_gap_relative")));

  const auto& st = by["structure"];
  line(st.ok() && st.cases == 200, 3, "triangular form and structure decomposition",
       counts(st) + ", worst reconstruction / (1 + ||T||) = " +
           fmt("%.2g", std::max(worst(st, "triangular_reconstruction"),
                                worst(st, "decomposition_reconstruction"))) +
           " (limit 1e-8), labels match ground truth for unitary instances");

  const auto& id = by["idempotent"];
  line(id.ok() && id.cases == 100, 4, "range projection of idempotents",
       counts(id) + ", worst ||P^2 - P|| = " + fmt("%.2g", worst(id, "idempotence")) +
           ", ||P - P*|| = " + fmt("%.2g", worst(id, "self_adjointness")) +
           " (limit 1e-10), SVD oracle gap " + fmt("%.2g", worst(id, "svd_oracle")) +
           " (limit 1e-7)");

  const auto& be = by["spectral_idempotent"];
  const bool empties = be.worst.count("empty_eigenspaces") > 0;
  line(be.ok() && be.cases == 100 && empties, 5, "spectral idempotents",
       counts(be) + ", worst principal angle " + fmt("%.2g", worst(be, "subspace_angle")) +
           " (limit 1e-6), zero-eigenspace cases " + (empties ? "present" : "missing"));

  const auto& ni = by["nilpotent"];
  line(ni.ok() && ni.cases == 100 && worst(ni, "initial_norm_ratio") >= 10.0 - 1e-9, 6,
       "nilpotent lifting",
       counts(ni) + ", initial lift norm up to " + fmt("%.3g", worst(ni, "initial_norm_ratio")) +
           " x ||x||, worst X^n residual " + fmt("%.2g", worst(ni, "nilpotency")) +
           " (limit 1e-10), worst | ||X|| - ||x|| | " + fmt("%.2g", worst(ni, "norm_gap")) +
           " (limit 1e-6)");

  const auto& se = by["lifting"];
  line(se.ok() && se.cases == 100, 7, "polynomial lifting over ideal chains",
       counts(se) + ", worst relation residual " + fmt("%.2g", worst(se, "relation_residual")) +
           " (limit 1e-8), stage index equals the brute-force minimum, latest stage used " +
           fmt("%.0f", worst(se, "stage_index")));

  const auto& rf = by["approximants"];
  line(rf.ok() && rf.cases == 50, 8, "flag-prefix approximants",
       counts(rf) + ", worst residual " + fmt("%.2g", worst(rf, "relation_residual")) +
           " (limit 1e-8), worst norm excess " + fmt("%.2g", worst(rf, "norm_excess")) +
           " (limit 1e-10), final reconstruction " + fmt("%.2g", worst(rf, "final_reconstruction")));

  const auto second = run_verify(opts);
  bool same = first.size() == second.size();
  for (std::size_t i = 0; same && i < first.size(); ++i)
    same = to_json(first[i], false) == to_json(second[i], false);
  line(same, 9, "determinism", std::string("two runs with seed ") + std::to_string(opts.seed) +
                                   (same ? " produced identical certificates" : " differ"));

  std::printf("verify wall time %.2f s, %d criteria failed\n", wall, failures);
  return failures == 0 ? 0 : 1;
}
