#include "cursvd/lemma_checks.hpp"

#include "cursvd/curated.hpp"
#include "cursvd/metrics.hpp"
#include "cursvd/models.hpp"
#include "cursvd/oracles.hpp"
#include "cursvd/regularization.hpp"
#include "cursvd/rng.hpp"
#include "cursvd/spectral.hpp"
#include "cursvd/types.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace cursvd {
namespace {

constexpr std::uint64_t fnv1a(const char* s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  while (*s) {
    h ^= static_cast<unsigned char>(*s++);
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng instance_rng(const char* suite, std::uint64_t seed, int index) {
  return make_rng(derive_seed({fnv1a(suite), seed, static_cast<std::uint64_t>(index)}));
}

int rand_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double rand_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Eigen::MatrixXd gaussian(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = gauss(rng);
  }
  return m;
}

/// Gaussian matrix rescaled to unit spectral norm.
Eigen::MatrixXd unit_gaussian(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd m = gaussian(rng, rows, cols);
  const double norm = dense_spectral_norm(m);
  if (norm > 0.0) m /= norm;
  return m;
}

/// Rank-r product of two gaussian factors, rescaled to unit spectral norm.
Eigen::MatrixXd unit_low_rank(Rng& rng, int k, int r) {
  Eigen::MatrixXd m = gaussian(rng, k, r) * gaussian(rng, r, k);
  const double norm = dense_spectral_norm(m);
  if (norm > 0.0) m /= norm;
  return m;
}

Eigen::VectorXd rand_weights(Rng& rng, int n, double lo, double hi) {
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = rand_real(rng, lo, hi);
  return w;
}

Eigen::VectorXd exact_singular_values(const Eigen::MatrixXd& a) {
  return Eigen::BDCSVD<Eigen::MatrixXd>(a).singularValues();
}

/// Small Poisson observation with degree weights at lambda = ||X||_1 / k;
/// shared by the weight-law suites. Returns false if X sampled to all-zero
/// (practically impossible at these masses).
bool poisson_instance(Rng& rng, Observation* obs_out, RegWeights* weights_out) {
  const int k = rand_int(rng, 8, 40);
  const double n_avg_target = rand_real(rng, 5.0, 30.0);
  ModelSpec spec;
  spec.shape = ModelShape::kRandomFactors;
  spec.kind = ModelKind::poisson();
  spec.k = k;
  spec.r = rand_int(rng, 1, 3);
  spec.target_mass = n_avg_target * k;
  spec.seed = rng();
  const ModelMatrix model = gen_model(spec);
  Observation obs = sample(model, rng());
  if (obs.total_mass() <= 0.0) return false;
  const double lambda = obs.total_mass() / k;
  *weights_out = compute_weights(obs, lambda);
  *obs_out = std::move(obs);
  return true;
}

// --- individual suites; each returns lhs - rhs for one random instance ---

double slack_norm_damping(Rng& rng) {
  const int k = rand_int(rng, 4, 12);
  const Eigen::MatrixXd a = unit_gaussian(rng, k, k);
  const Eigen::VectorXd wf = rand_weights(rng, k, 0.2, 3.0);
  const Eigen::VectorXd wb = rand_weights(rng, k, 0.2, 3.0);
  const double lhs = dense_spectral_norm(regularize(a, wf, wb));
  const double row_factor =
      (a.cwiseAbs().rowwise().sum().array() / wf.array()).maxCoeff();
  const double col_factor =
      (a.cwiseAbs().colwise().sum().transpose().array() / wb.array()).maxCoeff();
  return lhs - std::sqrt(row_factor * col_factor);
}

double slack_weighted_l1_cap(Rng& rng) {
  const int k = rand_int(rng, 6, 14);
  const int r = rand_int(rng, 1, 3);
  const Eigen::MatrixXd a = unit_low_rank(rng, k, r);
  const Eigen::VectorXd wf = rand_weights(rng, k, 1.0, 4.0);
  const Eigen::VectorXd wb = rand_weights(rng, k, 1.0, 4.0);
  const double lhs = deregularize(a, wf, wb).cwiseAbs().sum();
  const double rhs = std::sqrt(r * wf.sum() * wb.sum()) * dense_spectral_norm(a);
  return lhs - rhs;
}

double slack_row_subset_norms(Rng& rng) {
  const int k = rand_int(rng, 6, 12);
  const Eigen::MatrixXd a = unit_gaussian(rng, k, k);
  const int parts = rand_int(rng, 2, 4);
  std::vector<std::vector<int>> groups(parts);
  for (int i = 0; i < k; ++i) groups[rand_int(rng, 0, parts - 1)].push_back(i);
  double rhs = 0.0;
  for (const auto& group : groups) {
    if (group.empty()) continue;
    Eigen::MatrixXd block(group.size(), k);
    for (std::size_t i = 0; i < group.size(); ++i) block.row(i) = a.row(group[i]);
    const double norm = dense_spectral_norm(block);
    rhs += norm * norm;
  }
  const double lhs = dense_spectral_norm(a);
  return lhs * lhs - rhs;
}

double slack_row_zeroing_interlacing(Rng& rng) {
  const int k = rand_int(rng, 5, 12);
  const Eigen::MatrixXd a = unit_gaussian(rng, k, k);
  std::vector<int> zeroed;
  for (int i = 0; i < k; ++i) {
    if (rand_real(rng, 0.0, 1.0) < 0.3) zeroed.push_back(i);
  }
  const Eigen::VectorXd before = exact_singular_values(a);
  const Eigen::VectorXd after = exact_singular_values(zero_rows(a, zeroed));
  return (after - before).maxCoeff();
}

double slack_shifted_weyl(Rng& rng) {
  const int k = rand_int(rng, 4, 10);
  const Eigen::MatrixXd a = unit_gaussian(rng, k, k);
  const Eigen::MatrixXd b = unit_gaussian(rng, k, k);
  const Eigen::VectorXd sa = exact_singular_values(a);
  const Eigen::VectorXd sb = exact_singular_values(b);
  const Eigen::VectorXd sum = exact_singular_values(a + b);
  double slack = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= k; ++i) {
    for (int j = 1; i + j - 1 <= k; ++j) {
      slack = std::max(slack, sum(i + j - 2) - sa(i - 1) - sb(j - 1));
    }
  }
  return slack;
}

double slack_impact_identity(Rng& rng) {
  const int k = rand_int(rng, 4, 10);
  const Eigen::MatrixXd a = unit_gaussian(rng, k, k);
  const int t = rand_int(rng, 1, k);
  const SvdResult svd = truncated_svd(a, t);
  const int j = rand_int(rng, 0, t - 1);
  std::vector<int> rows;
  for (int i = 0; i < k; ++i) {
    if (rand_real(rng, 0.0, 1.0) < 0.4) rows.push_back(i);
  }
  double direct = 0.0;
  for (int i : rows) {
    const double projected = a.row(i).dot(svd.right().col(j));
    direct += projected * projected;
  }
  return std::abs(impact(svd, rows, j) - direct);
}

double slack_row_recovery(Rng& rng) {
  const int k = rand_int(rng, 6, 12);
  const int r = rand_int(rng, 1, 3);
  const Eigen::MatrixXd a = unit_low_rank(rng, k, r);
  const double delta = std::pow(10.0, rand_real(rng, -3.0, -0.3));
  const Eigen::MatrixXd b = a + delta * unit_gaussian(rng, k, k);
  const Eigen::VectorXd wf = rand_weights(rng, k, 1.0, 3.0);
  const Eigen::VectorXd wb = rand_weights(rng, k, 1.0, 3.0);
  const RegWeights w(wf, wb, 1.0);
  const double lhs = (a - rw_svd(b, r, w)).cwiseAbs().sum();
  const double rhs =
      std::sqrt(r * wf.sum() * wb.sum()) * dense_spectral_norm(regularize(a - b, w));
  return lhs - rhs;
}

double slack_regularized_norm_cap(Rng& rng) {
  Observation obs = Observation::dense(Eigen::MatrixXd::Zero(1, 1), ModelKind::poisson());
  RegWeights weights(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), 1.0);
  if (!poisson_instance(rng, &obs, &weights)) return -1.0;
  const double lambda = weights.lambda();
  const double lhs = dense_spectral_norm(regularize(obs.dense_entries(), weights));
  return lhs - lambda;
}

double slack_weight_totals(Rng& rng) {
  Observation obs = Observation::dense(Eigen::MatrixXd::Zero(1, 1), ModelKind::poisson());
  RegWeights weights(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), 1.0);
  if (!poisson_instance(rng, &obs, &weights)) return -1.0;
  const double cap = 2.0 * obs.k();
  return std::max(weights.row_weights().sum(), weights.col_weights().sum()) - cap;
}

double slack_knapsack_ratio(Rng& rng) {
  const int n = rand_int(rng, 1, 15);
  std::vector<double> values(n);
  std::vector<double> weights(n);
  for (int i = 0; i < n; ++i) {
    values[i] = rand_real(rng, 0.0, 10.0);
    weights[i] = rand_real(rng, 0.1, 5.0);
  }
  double total_weight = 0.0;
  for (double w : weights) total_weight += w;
  const double capacity = rand_real(rng, 0.5, std::max(0.6, 0.5 * total_weight));
  const std::vector<int> chosen = greedy_knapsack(values, weights, capacity);
  double greedy_value = 0.0;
  for (int c : chosen) greedy_value += values[c];
  const auto [best_set, best_value] = brute_knapsack(values, weights, capacity);
  return 0.5 * best_value - greedy_value;
}

double slack_heavy_subset_bound(Rng& rng) {
  const int k = rand_int(rng, 8, 24);
  const int r = rand_int(rng, 1, 3);
  Eigen::MatrixXd a = gaussian(rng, k, r) * gaussian(rng, r, k);
  const double sigma1 = dense_spectral_norm(a);
  const double beta = sigma1 * rand_real(rng, 0.05, 0.5);
  const double bound = (r * sigma1 / beta) * (r * sigma1 / beta);
  return static_cast<double>(heavy_subset_count(a, beta)) - bound;
}

double slack_bad_part_rank(Rng& rng) {
  const int r = rand_int(rng, 1, 3);
  const int k = rand_int(rng, std::max(8, 2 * r + 1), 16);
  const double beta = rand_real(rng, 0.05, 0.3);
  // Build B with sigma_{r+1}(B) <= beta and C with ||C|| <= 2*beta; then the
  // sum A = B + C can keep at most 2r - 1 singular values above 4*beta.
  Eigen::MatrixXd core = gaussian(rng, k, r) * gaussian(rng, r, k);
  core *= rand_real(rng, 0.5, 3.0) / std::max(1e-12, dense_spectral_norm(core));
  const Eigen::MatrixXd tail = beta * rand_real(rng, 0.0, 1.0) * unit_gaussian(rng, k, k);
  const Eigen::MatrixXd c = 2.0 * beta * rand_real(rng, 0.0, 1.0) * unit_gaussian(rng, k, k);
  const Eigen::MatrixXd a = core + tail + c;
  const Eigen::VectorXd sv = exact_singular_values(a);
  return sv(2 * r - 1) - 4.0 * beta;
}

double slack_rating_error_ordering(Rng& rng) {
  const int k = rand_int(rng, 4, 12);
  Eigen::MatrixXd f(k, k);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i) f(i, j) = rand_real(rng, 0.0, 1.0);
  }
  const double p = rand_real(rng, 0.05, 1.0);
  const Eigen::MatrixXd estimate = p * f + 0.5 * gaussian(rng, k, k);
  const EvalReport report = collab_eval(f, estimate, p);
  return *report.mse - report.normalized_l1;
}

struct SuiteSpec {
  const char* name;
  double tolerance;
  double (*slack)(Rng&);
};

// The first seven are the core matrix inequalities the acceptance gate runs.
const SuiteSpec kSuites[] = {
    {"norm-damping", 1e-8, slack_norm_damping},
    {"weighted-l1-cap", 1e-8, slack_weighted_l1_cap},
    {"row-subset-norms", 1e-8, slack_row_subset_norms},
    {"row-zeroing-interlacing", 1e-8, slack_row_zeroing_interlacing},
    {"shifted-weyl", 1e-8, slack_shifted_weyl},
    {"impact-identity", 1e-8, slack_impact_identity},
    {"row-recovery", 1e-8, slack_row_recovery},
    {"regularized-norm-cap", 1e-8, slack_regularized_norm_cap},
    {"weight-totals", 1e-8, slack_weight_totals},
    {"knapsack-ratio", 1e-9, slack_knapsack_ratio},
    {"heavy-subset-bound", 1e-9, slack_heavy_subset_bound},
    {"bad-part-rank", 1e-8, slack_bad_part_rank},
    {"rating-error-ordering", 1e-12, slack_rating_error_ordering},
};

/// Sampling-noise drift: sum_i |row drift| stays below 10 k sqrt(n_avg) in at
/// least 95% of trials. The one suite with a probabilistic quota.
LemmaCheckResult run_row_sum_drift(int instances, std::uint64_t seed) {
  LemmaCheckResult result;
  result.name = "row-sum-drift";
  result.instances = instances;
  result.tolerance = 0.0;

  const int k = 256;
  const double n_avg_target = 16.0;
  ModelSpec spec;
  spec.shape = ModelShape::kRandomFactors;
  spec.kind = ModelKind::poisson();
  spec.k = k;
  spec.r = 2;
  spec.target_mass = n_avg_target * k;
  spec.seed = derive_seed({fnv1a("row-sum-drift"), seed});
  const ModelMatrix model = gen_model(spec);
  const double bound = 10.0 * k * std::sqrt(model.n_avg());

  int exceedances = 0;
  double max_slack = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < instances; ++i) {
    const Observation obs = sample(model, derive_seed({spec.seed, 1, static_cast<std::uint64_t>(i)}));
    const double deviation = row_sum_deviation(obs, model);
    max_slack = std::max(max_slack, deviation - bound);
    if (deviation > bound) ++exceedances;
  }
  const int allowed = instances / 20;  // 5% quota
  result.failures = std::max(0, exceedances - allowed);
  result.max_slack = max_slack;
  return result;
}

}  // namespace

std::vector<std::string> lemma_suite_names() {
  std::vector<std::string> names;
  for (const auto& suite : kSuites) names.emplace_back(suite.name);
  names.emplace_back("row-sum-drift");
  return names;
}

LemmaCheckResult run_lemma_suite(const std::string& name, int instances, std::uint64_t seed) {
  if (instances < 1) throw std::invalid_argument("instance count must be positive");
  const auto start = std::chrono::steady_clock::now();
  LemmaCheckResult result;
  if (name == "row-sum-drift") {
    result = run_row_sum_drift(instances, seed);
  } else {
    const SuiteSpec* suite = nullptr;
    for (const auto& s : kSuites) {
      if (name == s.name) {
        suite = &s;
        break;
      }
    }
    if (suite == nullptr) throw std::invalid_argument("unknown property suite '" + name + "'");
    result.name = suite->name;
    result.instances = instances;
    result.tolerance = suite->tolerance;
    result.max_slack = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < instances; ++i) {
      Rng rng = instance_rng(suite->name, seed, i);
      const double slack = suite->slack(rng);
      result.max_slack = std::max(result.max_slack, slack);
      if (slack > suite->tolerance) ++result.failures;
    }
  }
  const auto stop = std::chrono::steady_clock::now();
  result.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return result;
}

std::vector<LemmaCheckResult> run_lemma_suites(int instances, std::uint64_t seed) {
  std::vector<LemmaCheckResult> results;
  for (const auto& name : lemma_suite_names()) {
    results.push_back(run_lemma_suite(name, instances, seed));
  }
  return results;
}

}  // namespace cursvd
