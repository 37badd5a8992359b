#include "cursvd/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cursvd/metrics.hpp"
#include "cursvd/models.hpp"
#include "cursvd/types.hpp"

namespace cursvd {
namespace {

// --- Metrics ----------------------------------------------------------------

TEST(Metrics, NormalizedL1MatchesHandComputation) {
  Eigen::MatrixXd truth(2, 2), estimate(2, 2);
  truth << 1, 2, 3, 4;         // mass 10
  estimate << 1.5, 2, 3, 3;    // |diff| = 0.5 + 0 + 0 + 1 = 1.5
  EXPECT_DOUBLE_EQ(normalized_l1(truth, estimate), 0.15);
  EXPECT_THROW(normalized_l1(Eigen::MatrixXd::Zero(2, 2), estimate), std::invalid_argument);
}

TEST(Metrics, CollabEvalClampsAndOrdersErrors) {
  Eigen::MatrixXd f(2, 2), m_est(2, 2);
  f << 0.2, 0.8, 0.5, 1.0;
  // p = 0.5: estimates 0.1/0.5 = 0.2 (exact), 1.0, -0.2 -> clamp 0, 0.6 -> clamp... 0.6/0.5 = 1.2 -> clamp 1.
  m_est << 0.1, 0.5, -0.1, 0.6;
  const EvalReport report = collab_eval(f, m_est, 0.5);
  // Absolute errors: 0, 0.2, 0.5, 0; MAE = 0.175; MSE = (0.04 + 0.25)/4 = 0.0725.
  EXPECT_NEAR(report.normalized_l1, 0.175, 1e-12);
  ASSERT_TRUE(report.mse.has_value());
  EXPECT_NEAR(*report.mse, 0.0725, 1e-12);
  EXPECT_GE(report.normalized_l1, *report.mse);
  EXPECT_THROW(collab_eval(f, m_est, 0.0), std::invalid_argument);
}

TEST(Metrics, RowSumDeviationSumsAbsoluteRowDrift) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 1, 2, 2;
  const ModelMatrix truth = ModelMatrix::dense(m, 2, ModelKind::poisson());
  Eigen::MatrixXd x(2, 2);
  x << 2, 1, 1, 2;  // row sums 3 vs 2 and 3 vs 4: drift 1 + 1
  const Observation obs = Observation::dense(x, ModelKind::poisson());
  EXPECT_DOUBLE_EQ(row_sum_deviation(obs, truth), 2.0);
}

// --- Config parsing ---------------------------------------------------------

TEST(ExperimentConfig, ParsesFlatKeyValueText) {
  const std::string text =
      "# scaling study\n"
      "[model]\n"
      "model = heavy_rows\n"
      "kind = binomial\n"
      "kind_param = 6\n"
      "k = 64\n"
      "r = 2\n"
      "target_mass = 4096\n"
      "heavy_count = 4\n"
      "heavy_boost = 25\n"
      "; estimator\n"
      "rank = 2\n"
      "c_tau = 0.5\n"
      "restarts = 3\n"
      "seed = 99\n"
      "trials = 7\n"
      "mass_grid = 1024 2048 4096\n"
      "baselines = plain_2r_svd rw_svd_no_deletion\n"
      "threads = 2\n";
  const ExperimentSpec spec = parse_experiment_spec(text, "inline");
  EXPECT_EQ(spec.model.shape, ModelShape::kHeavyRows);
  EXPECT_EQ(spec.model.kind.trials(), 6);
  EXPECT_EQ(spec.model.k, 64);
  EXPECT_EQ(spec.model.heavy_count, 4);
  EXPECT_DOUBLE_EQ(spec.model.heavy_boost, 25.0);
  EXPECT_EQ(spec.cfg.rank, 2);
  EXPECT_DOUBLE_EQ(spec.cfg.c_tau, 0.5);
  ASSERT_TRUE(spec.cfg.restarts.has_value());
  EXPECT_EQ(*spec.cfg.restarts, 3);
  EXPECT_EQ(spec.cfg.seed, 99u);
  EXPECT_EQ(spec.model.seed, 99u);  // model_seed defaults to seed
  EXPECT_EQ(spec.trials, 7);
  ASSERT_EQ(spec.mass_grid.size(), 3u);
  EXPECT_DOUBLE_EQ(spec.mass_grid[1], 2048.0);
  ASSERT_EQ(spec.baselines.size(), 2u);
  EXPECT_EQ(spec.baselines[0], Baseline::kPlainRank2R);
  EXPECT_EQ(spec.baselines[1], Baseline::kRwSvdNoDeletion);
  EXPECT_EQ(spec.threads, 2);
}

TEST(ExperimentConfig, ParsesJsonObjects) {
  const std::string text = R"({
    "model": "sbm", "kind": "poisson", "k": 32, "r": 4,
    "target_mass": 2000, "sbm_p_in": 3.0, "sbm_p_out": 0.5,
    "rank": 4, "trials": 2, "mass_grid": [100, 200], "seed": 1
  })";
  const ExperimentSpec spec = parse_experiment_spec(text, "inline.json");
  EXPECT_EQ(spec.model.shape, ModelShape::kSbm);
  EXPECT_EQ(spec.model.k, 32);
  EXPECT_DOUBLE_EQ(spec.model.sbm_p_in, 3.0);
  EXPECT_DOUBLE_EQ(spec.model.sbm_p_out, 0.5);
  ASSERT_EQ(spec.mass_grid.size(), 2u);
  EXPECT_DOUBLE_EQ(spec.mass_grid[0], 100.0);
}

TEST(ExperimentConfig, RejectsUnknownAndDuplicateKeys) {
  EXPECT_THROW(parse_experiment_spec("k = 8\nmystery = 1\n", "bad"), std::runtime_error);
  EXPECT_THROW(parse_experiment_spec("k = 8\nk = 9\n", "dup"), std::runtime_error);
  EXPECT_THROW(parse_experiment_spec("{\"k\": 8, \"trials\": 0}", "zero"), std::runtime_error);
  EXPECT_THROW(parse_experiment_spec("k = 8\nmass_grid = 10 5\n", "order"), std::runtime_error);
  EXPECT_THROW(parse_experiment_spec("k = 8\nbaselines = nope\n", "base"), std::runtime_error);
}

TEST(ExperimentConfig, DistributionDefaultsMassToDraws) {
  const ExperimentSpec spec =
      parse_experiment_spec("kind = distribution\nkind_param = 500\nk = 16\n", "dist");
  EXPECT_DOUBLE_EQ(spec.model.target_mass, 500.0);
}

// --- Scaling runs -----------------------------------------------------------

ExperimentSpec small_scaling_spec() {
  ExperimentSpec spec;
  spec.model.shape = ModelShape::kRandomFactors;
  spec.model.kind = ModelKind::poisson();
  spec.model.k = 24;
  spec.model.r = 1;
  spec.model.seed = 3;
  spec.cfg.rank = 1;
  spec.cfg.seed = 12;
  spec.cfg.restarts = 2;
  spec.trials = 5;
  spec.mass_grid = {200.0, 800.0, 3200.0, 12800.0};
  return spec;
}

TEST(RunScaling, ErrorsShrinkWithMassAndSlopeIsNegative) {
  const ScalingResult result = run_scaling(small_scaling_spec());
  ASSERT_EQ(result.summaries.size(), 4u);
  ASSERT_EQ(result.trials.size(), 20u);
  EXPECT_LT(result.summaries.back().median_error, result.summaries.front().median_error);
  ASSERT_TRUE(result.slope.has_value());
  EXPECT_LT(*result.slope, 0.0);
  for (const auto& rec : result.trials) {
    EXPECT_GT(rec.x_mass, 0.0);
    EXPECT_TRUE(rec.certificate_ok) << "mass " << rec.mass << " trial " << rec.trial;
    EXPECT_GE(rec.error, 0.0);
  }
}

TEST(RunScaling, ThreadCountDoesNotChangeResults) {
  ExperimentSpec spec = small_scaling_spec();
  spec.trials = 4;
  spec.mass_grid = {300.0, 1200.0};
  const ScalingResult serial = run_scaling(spec);
  spec.threads = 4;
  const ScalingResult threaded = run_scaling(spec);
  ASSERT_EQ(serial.trials.size(), threaded.trials.size());
  for (std::size_t i = 0; i < serial.trials.size(); ++i) {
    EXPECT_EQ(serial.trials[i].seed, threaded.trials[i].seed);
    EXPECT_EQ(serial.trials[i].error, threaded.trials[i].error);
    EXPECT_EQ(serial.trials[i].zeroed_weight, threaded.trials[i].zeroed_weight);
  }
  EXPECT_EQ(serial.summaries[0].median_error, threaded.summaries[0].median_error);
}

std::string csv_without_runtime(const ExperimentSpec& spec, const ScalingResult& result,
                                int runtime_column) {
  std::ostringstream out;
  write_scaling_csv(out, spec, result);
  std::istringstream in(out.str());
  std::string line, rebuilt;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cellbuf;
    std::istringstream cells_in(line);
    while (std::getline(cells_in, cellbuf, ',')) cells.push_back(cellbuf);
    if (runtime_column < static_cast<int>(cells.size())) cells[runtime_column] = "X";
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) rebuilt += ',';
      rebuilt += cells[i];
    }
    rebuilt += '\n';
  }
  return rebuilt;
}

TEST(RunScaling, CsvIsByteStableUpToRuntime) {
  ExperimentSpec spec = small_scaling_spec();
  spec.trials = 3;
  spec.mass_grid = {250.0, 1000.0};
  spec.baselines = {Baseline::kPlainRank2R};
  const std::string first = csv_without_runtime(spec, run_scaling(spec), 16);
  const std::string second = csv_without_runtime(spec, run_scaling(spec), 16);
  EXPECT_EQ(first, second);
  EXPECT_NE(first.find("row,mass,trial,seed,k,r,model,kind"), std::string::npos);
  EXPECT_NE(first.find("baseline:plain_2r_svd"), std::string::npos);
  EXPECT_NE(first.find("\nmedian,"), std::string::npos);
}

TEST(RunScaling, BaselinesRideAlongAndCollabAddsRatingColumns) {
  ExperimentSpec spec;
  spec.model.shape = ModelShape::kRandomFactors;
  spec.model.kind = ModelKind::collab(0.4);
  spec.model.k = 20;
  spec.model.r = 1;
  spec.model.target_mass = 0.4 * 20.0 * 20.0 * 0.2;
  spec.model.seed = 6;
  spec.cfg.rank = 1;
  spec.cfg.restarts = 1;
  spec.trials = 3;
  spec.baselines = {Baseline::kPlainRankR, Baseline::kRwSvdNoDeletion};
  const ScalingResult result = run_scaling(spec);
  ASSERT_EQ(result.trials.size(), 3u);
  for (const auto& rec : result.trials) {
    ASSERT_EQ(rec.baseline_errors.size(), 2u);
    for (double err : rec.baseline_errors) EXPECT_GE(err, 0.0);
    ASSERT_TRUE(rec.rating_l1.has_value());
    ASSERT_TRUE(rec.rating_mse.has_value());
    EXPECT_GE(*rec.rating_l1, *rec.rating_mse);
  }
  std::ostringstream out;
  write_scaling_csv(out, spec, result);
  EXPECT_NE(out.str().find("rating_l1,rating_mse"), std::string::npos);
}

TEST(RunScaling, SlopeNeedsAtLeastFourMasses) {
  ExperimentSpec spec = small_scaling_spec();
  spec.mass_grid = {400.0, 1600.0};
  spec.trials = 2;
  const ScalingResult result = run_scaling(spec);
  EXPECT_FALSE(result.slope.has_value());
}

// --- Adversarial lower-bound runs --------------------------------------------

TEST(CountZeroBlocks, ScansDiagonalBlockSupports) {
  // k = 8, n_max = 2: two diagonal blocks of side 4. Leave block 0 empty.
  std::vector<Triplet> entries = {{5, 6, 1.0}, {7, 4, 1.0}};
  const Observation obs = Observation::sparse(8, entries, ModelKind::bernoulli());
  EXPECT_EQ(count_zero_blocks(obs, 2), 1);

  std::vector<Triplet> both = {{0, 0, 1.0}, {5, 6, 1.0}};
  EXPECT_EQ(count_zero_blocks(Observation::sparse(8, both, ModelKind::bernoulli()), 2), 0);

  const Observation empty = Observation::sparse(8, {}, ModelKind::bernoulli());
  EXPECT_EQ(count_zero_blocks(empty, 2), 2);
  EXPECT_THROW(count_zero_blocks(empty, 3), std::invalid_argument);
}

TEST(RunCounterexample, CertifiesNMaxExactlyWhenABlockIsEmpty) {
  ExperimentSpec spec;
  spec.model.shape = ModelShape::kCounterexample;
  spec.model.kind = ModelKind::bernoulli();
  spec.model.k = 64;
  spec.model.n_max = 1;
  spec.cfg.seed = 4;
  spec.trials = 30;
  const CounterexampleResult result = run_counterexample(spec);
  EXPECT_EQ(result.blocks, 32);
  ASSERT_EQ(result.trials.size(), 30u);
  int found = 0;
  for (const auto& trial : result.trials) {
    EXPECT_EQ(trial.zero_block_found, trial.zero_block_count > 0);
    EXPECT_DOUBLE_EQ(trial.certified_lower_bound, trial.zero_block_found ? 1.0 : 0.0);
    found += trial.zero_block_found ? 1 : 0;
  }
  EXPECT_DOUBLE_EQ(result.empirical_probability, found / 30.0);
  // With 32 blocks of 4 Bernoulli(1/2) cells, an all-empty block appears in a
  // trial with probability 1 - (1 - 2^-4)^32 = 0.873; 30 trials make at
  // least one detection overwhelming and the seed is pinned anyway.
  EXPECT_GT(found, 0);

  std::ostringstream out;
  write_counterexample_csv(out, spec, result);
  EXPECT_NE(out.str().find("row,trial,seed,k,n_max,blocks"), std::string::npos);
  EXPECT_NE(out.str().find("\nsummary"), std::string::npos);
}

TEST(RunCounterexample, RequiresTheAdversarialShape) {
  ExperimentSpec spec;
  spec.model.shape = ModelShape::kRandomFactors;
  spec.model.kind = ModelKind::bernoulli();
  spec.model.k = 16;
  spec.model.target_mass = 20.0;
  EXPECT_THROW(run_counterexample(spec), std::runtime_error);
}

// --- Single-shot recovery -----------------------------------------------------

TEST(RunRecover, ReportsErrorOnlyWithTruth) {
  ModelSpec mspec;
  mspec.shape = ModelShape::kRandomFactors;
  mspec.k = 20;
  mspec.r = 1;
  mspec.kind = ModelKind::poisson();
  mspec.target_mass = 1500.0;
  mspec.seed = 2;
  const ModelMatrix truth = gen_model(mspec);
  const Observation obs = sample(truth, 10);
  CuratedConfig cfg;
  cfg.rank = 1;

  const RecoverReport with_truth = run_recover(obs, cfg, truth);
  ASSERT_TRUE(with_truth.error.has_value());
  EXPECT_GE(*with_truth.error, 0.0);
  EXPECT_LT(*with_truth.error, 1.0);

  const RecoverReport blind = run_recover(obs, cfg, std::nullopt);
  EXPECT_FALSE(blind.error.has_value());

  std::ostringstream out;
  write_recover_csv(out, obs, cfg, with_truth);
  const std::string csv = out.str();
  EXPECT_NE(csv.find("k,r,kind,x_mass,error"), std::string::npos);
  EXPECT_NE(csv.find("\n20,"), std::string::npos);
}

}  // namespace
}  // namespace cursvd
