#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cursvd {

/// Outcome of one property suite run over many random instances.
struct LemmaCheckResult {
  std::string name;
  int instances = 0;
  /// Instances violating the property beyond its tolerance. For the one
  /// probabilistic suite (row-sum-drift) this counts exceedances beyond the
  /// allowed 5% quota; every other suite allows none.
  int failures = 0;
  /// Largest observed lhs - rhs over all instances (negative = margin).
  double max_slack = 0.0;
  /// Per-instance slack bound counted as a pass.
  double tolerance = 0.0;
  double runtime_ms = 0.0;

  bool passed() const { return failures == 0; }
};

/// Names of all property suites, in canonical order. The first seven are the
/// core matrix inequalities exercised by the acceptance gate.
std::vector<std::string> lemma_suite_names();

/// Runs one suite by name over `instances` seeded instances.
LemmaCheckResult run_lemma_suite(const std::string& name, int instances, std::uint64_t seed);

/// Runs every suite (instances per suite, one shared base seed).
std::vector<LemmaCheckResult> run_lemma_suites(int instances, std::uint64_t seed);

}  // namespace cursvd
