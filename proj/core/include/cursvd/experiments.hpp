#pragma once

#include "cursvd/curated.hpp"
#include "cursvd/models.hpp"
#include "cursvd/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cursvd {

/// Reconstruction baselines that can run alongside the curated estimator.
enum class Baseline { kPlainRankR, kPlainRank2R, kRwSvdNoDeletion };

std::string baseline_name(Baseline b);
Baseline parse_baseline(const std::string& name);

/// Full description of one experiment: the model recipe, the estimator
/// configuration, and the trial/mass schedule.
struct ExperimentSpec {
  ModelSpec model;
  CuratedConfig cfg;
  SampleOptions sample_options;
  int trials = 1;
  /// Total-mass grid for scaling studies; empty means the single mass in
  /// model.target_mass. Must be strictly increasing.
  std::vector<double> mass_grid;
  std::vector<Baseline> baselines;
  int threads = 1;
  std::string output_path;  ///< CSV destination; empty = stdout
};

/// Loads a spec from either flat key = value text or a JSON object with the
/// same keys (detected by content). Unknown keys are rejected.
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);
ExperimentSpec parse_experiment_spec(const std::string& text, const std::string& name);

/// One recovery trial's record in a scaling study.
struct TrialRecord {
  int mass_index = 0;
  double mass = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double x_mass = 0.0;
  double n_avg_estimate = 0.0;
  double error = 0.0;         ///< normalized L1 against the true matrix
  double noise_norm = 0.0;    ///< spectral norm of X - M
  int zeroed_rows = 0;
  double zeroed_weight = 0.0;
  int iterations = 0;
  int restart_index = 0;
  double runtime_ms = 0.0;
  // Stopping-rule audit of the finished run.
  double greedy_impact_max = 0.0;
  double impact_cutoff = 0.0;
  double knapsack_capacity = 0.0;
  int surviving_rows = 0;
  bool certificate_ok = false;
  /// Exhaustive-knapsack cross-check, present when few enough rows survive.
  std::optional<double> brute_impact_max;
  // Collab-family extras: per-entry absolute and squared rating errors.
  std::optional<double> rating_l1;
  std::optional<double> rating_mse;
  /// Errors of the requested baselines, aligned with the spec's list.
  std::vector<double> baseline_errors;
};

struct MassSummary {
  double mass = 0.0;
  double median_error = 0.0;
  std::vector<double> baseline_median_errors;
};

struct ScalingResult {
  std::vector<TrialRecord> trials;
  std::vector<MassSummary> summaries;
  /// Least-squares slope of log(median error) vs log(mass) over unsaturated
  /// points (median < 0.9); present for grids of >= 4 masses with >= 2
  /// unsaturated points.
  std::optional<double> slope;
};

/// Runs trials x masses recovery runs. Per-trial sampling seeds are derived
/// from (cfg.seed, mass index, trial index), so results are independent of
/// the thread count.
ScalingResult run_scaling(const ExperimentSpec& spec);

/// One trial of the adversarial lower-bound experiment: sample the
/// block-diagonal model and scan the observation's block supports directly
/// (no SVD anywhere). An empty block certifies that any estimator seeing
/// only X must miss mass n_max somewhere, so certified_lower_bound is n_max
/// exactly when a zero block exists.
struct CounterexampleTrial {
  int trial = 0;
  std::uint64_t seed = 0;
  bool zero_block_found = false;
  int zero_block_count = 0;
  double certified_lower_bound = 0.0;
  double runtime_ms = 0.0;
};

struct CounterexampleResult {
  int blocks = 0;
  std::vector<CounterexampleTrial> trials;
  double empirical_probability = 0.0;  ///< fraction of trials with a zero block
};

CounterexampleResult run_counterexample(const ExperimentSpec& spec);

/// Exact zero-block scan used by the adversarial experiment: the number of
/// side-by-side diagonal blocks of side 2*n_max with no observed entry.
int count_zero_blocks(const Observation& obs, int n_max);

// CSV writers. All numbers use shortest round-trip formatting, so a fixed
// (spec, seed) pair reproduces files byte-for-byte.
void write_scaling_csv(std::ostream& out, const ExperimentSpec& spec, const ScalingResult& result);
void write_counterexample_csv(std::ostream& out, const ExperimentSpec& spec,
                              const CounterexampleResult& result);

/// Single-shot recovery of an observation file: runs the curated estimator
/// and reports one CSV row (error only when the true matrix is supplied).
struct RecoverReport {
  CuratedOutcome outcome;
  std::optional<double> error;
  double runtime_ms = 0.0;
};

RecoverReport run_recover(const Observation& obs, const CuratedConfig& cfg,
                          const std::optional<ModelMatrix>& truth);
void write_recover_csv(std::ostream& out, const Observation& obs, const CuratedConfig& cfg,
                       const RecoverReport& report);

}  // namespace cursvd
