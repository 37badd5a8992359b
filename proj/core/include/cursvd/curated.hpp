#pragma once

#include "cursvd/rng.hpp"
#include "cursvd/types.hpp"

#include <optional>
#include <vector>

namespace cursvd {

/// Derived threshold triple controlling row deletion.
struct Thresholds {
  double tau = 0.0;            ///< c_tau * sqrt(n_avg) * max(1, ln(r * n_avg))
  double w_cn = 1.0;           ///< max(1, c_w * k / (r * n_avg)^2): knapsack capacity
  double impact_cutoff = 0.0;  ///< 8 * tau^2: per-component deletion bar

  static Thresholds from(const CuratedConfig& cfg, int k, double n_avg_value);
};

/// Greedy 0/1-knapsack approximation: items are sorted by value/weight
/// (ties toward the lower index), packed greedily skipping anything that
/// would overflow, and the result is the better of that bundle and the best
/// single feasible item. Guarantees at least half the optimal value. Returns
/// the selected indices sorted ascending.
std::vector<int> greedy_knapsack(const std::vector<double>& values,
                                 const std::vector<double>& weights, double capacity);

/// One round of randomized row deletion against a single singular component
/// (sigma_j, u_j). Repeatedly solves the greedy knapsack over the rows not
/// yet zeroed (value = that row's impact sigma_j^2 u_j(i)^2, weight =
/// w_row(i), capacity as given); while the greedy bundle's impact exceeds the
/// cutoff, one of its rows is sampled with probability proportional to
/// impact/weight and appended to zeroed_rows.
void row_deletion(double sigma_j, const Eigen::VectorXd& u_j, const RegWeights& w,
                  double impact_cutoff, double capacity, std::vector<int>& zeroed_rows,
                  Rng& rng);

/// Result of one curated run: the rank-(2r) estimate with the zeroed rows set
/// to exactly zero, which rows were zeroed (sorted), their total row weight,
/// how many outer iterations ran, and which restart produced it.
struct CuratedOutcome {
  Eigen::MatrixXd estimate;
  std::vector<int> zeroed_rows;
  double zeroed_weight = 0.0;
  int iterations = 0;
  int restart_index = 0;
};

/// One restart of the curated estimator: regularize X with degree weights
/// (computed once), then alternate truncated rank-2r SVD with per-component
/// row deletion until the zeroed set stops growing; the estimate is the
/// deregularized truncation with zeroed rows blanked. An all-zero X yields a
/// zero estimate and no zeroed rows.
CuratedOutcome curated_svd_once(const Observation& obs, const CuratedConfig& cfg,
                                std::uint64_t restart_seed);

/// Full estimator: runs restarts with seeds cfg.seed + 0, +1, ... and keeps
/// the outcome with the smallest zeroed weight (ties toward the earliest
/// restart).
CuratedOutcome curated_svd(const Observation& obs, const CuratedConfig& cfg);

/// Post-termination certificate for one singular component: the greedy
/// bundle impact over the surviving rows must sit at or below the cutoff.
struct ComponentCertificate {
  double sigma = 0.0;
  double greedy_impact = 0.0;
  /// Per-surviving-row impacts for this component, aligned with
  /// CertificateReport::candidate_rows; kept only when few enough rows
  /// survive for exhaustive cross-checking.
  std::vector<double> candidate_values;
};

/// Everything needed to audit a finished run against its stopping rule.
struct CertificateReport {
  Thresholds thresholds;
  std::vector<int> candidate_rows;       ///< rows not zeroed, ascending
  std::vector<double> candidate_weights; ///< their row weights (only when candidate_values kept)
  std::vector<ComponentCertificate> components;
  double max_greedy_impact = 0.0;
};

/// Recomputes the final SVD state of a finished run and reports, per
/// component, the greedy-knapsack impact over the surviving rows. Row
/// impacts/weights are embedded when at most max_kept_candidates rows
/// survive, so small instances can be cross-checked exhaustively.
CertificateReport objective_certificates(const Observation& obs, const CuratedConfig& cfg,
                                         const CuratedOutcome& outcome,
                                         int max_kept_candidates = 22);

}  // namespace cursvd
