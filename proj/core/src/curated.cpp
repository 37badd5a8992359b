#include "cursvd/curated.hpp"

#include "cursvd/regularization.hpp"
#include "cursvd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cursvd {
namespace {

struct KnapsackItem {
  int index;
  double value;
  double weight;
};

std::vector<KnapsackItem> sorted_by_density(const std::vector<double>& values,
                                            const std::vector<double>& weights) {
  std::vector<KnapsackItem> items;
  items.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] > 0.0)) throw std::invalid_argument("knapsack weights must be positive");
    if (values[i] < 0.0) throw std::invalid_argument("knapsack values must be nonnegative");
    items.push_back({static_cast<int>(i), values[i], weights[i]});
  }
  std::sort(items.begin(), items.end(), [](const KnapsackItem& a, const KnapsackItem& b) {
    const double lhs = a.value * b.weight;  // compare value/weight without dividing
    const double rhs = b.value * a.weight;
    return lhs != rhs ? lhs > rhs : a.index < b.index;
  });
  return items;
}

/// Rows of the final SVD state that survived deletion, ascending.
std::vector<int> surviving_rows(int k, const std::vector<int>& zeroed) {
  std::vector<char> gone(k, 0);
  for (int i : zeroed) gone[i] = 1;
  std::vector<int> rows;
  rows.reserve(k - static_cast<int>(zeroed.size()));
  for (int i = 0; i < k; ++i) {
    if (!gone[i]) rows.push_back(i);
  }
  return rows;
}

}  // namespace

Thresholds Thresholds::from(const CuratedConfig& cfg, int k, double n_avg_value) {
  if (!(n_avg_value > 0.0)) throw std::invalid_argument("n_avg must be positive");
  if (cfg.rank < 1) throw std::invalid_argument("config rank must be positive");
  if (!(cfg.c_tau > 0.0) || !(cfg.c_w > 0.0))
    throw std::invalid_argument("threshold constants must be positive");
  Thresholds t;
  const double log_term = std::max(1.0, std::log(cfg.rank * n_avg_value));
  t.tau = cfg.c_tau * std::sqrt(n_avg_value) * log_term;
  const double denom = cfg.rank * n_avg_value;
  t.w_cn = std::max(1.0, cfg.c_w * k / (denom * denom));
  t.impact_cutoff = 8.0 * t.tau * t.tau;
  return t;
}

std::vector<int> greedy_knapsack(const std::vector<double>& values,
                                 const std::vector<double>& weights, double capacity) {
  if (values.size() != weights.size())
    throw std::invalid_argument("knapsack values and weights must have equal length");
  if (capacity < 0.0) throw std::invalid_argument("knapsack capacity must be nonnegative");
  const auto items = sorted_by_density(values, weights);

  std::vector<int> bundle;
  double bundle_value = 0.0;
  double bundle_weight = 0.0;
  int best_single = -1;
  for (const auto& item : items) {
    if (item.weight <= capacity && (best_single < 0 || item.value > values[best_single]))
      best_single = item.index;
    if (bundle_weight + item.weight <= capacity) {
      bundle.push_back(item.index);
      bundle_value += item.value;
      bundle_weight += item.weight;
    }
  }
  if (best_single >= 0 && values[best_single] > bundle_value) {
    bundle.assign(1, best_single);
  }
  std::sort(bundle.begin(), bundle.end());
  return bundle;
}

void row_deletion(double sigma_j, const Eigen::VectorXd& u_j, const RegWeights& w,
                  double impact_cutoff, double capacity, std::vector<int>& zeroed_rows,
                  Rng& rng) {
  const int k = static_cast<int>(u_j.size());
  if (w.k() != k) throw std::invalid_argument("weight vector length must match u_j");
  std::vector<char> gone(k, 0);
  for (int i : zeroed_rows) {
    if (i < 0 || i >= k) throw std::out_of_range("zeroed row index out of range");
    gone[i] = 1;
  }
  const double sigma2 = sigma_j * sigma_j;

  while (true) {
    std::vector<int> rows;
    std::vector<double> values;
    std::vector<double> weights;
    rows.reserve(k);
    for (int i = 0; i < k; ++i) {
      if (gone[i]) continue;
      rows.push_back(i);
      values.push_back(sigma2 * u_j(i) * u_j(i));
      weights.push_back(w.row_weights()(i));
    }
    if (rows.empty()) return;

    const std::vector<int> chosen = greedy_knapsack(values, weights, capacity);
    double total = 0.0;
    for (int c : chosen) total += values[c];
    if (total <= impact_cutoff) return;

    // Sample one selected row with probability proportional to impact/weight.
    double density_sum = 0.0;
    for (int c : chosen) density_sum += values[c] / weights[c];
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double ticket = unit(rng) * density_sum;
    double prefix = 0.0;
    int victim = chosen.back();
    for (int c : chosen) {
      prefix += values[c] / weights[c];
      if (ticket < prefix) {
        victim = c;
        break;
      }
    }
    gone[rows[victim]] = 1;
    zeroed_rows.push_back(rows[victim]);
  }
}

CuratedOutcome curated_svd_once(const Observation& obs, const CuratedConfig& cfg,
                                std::uint64_t restart_seed) {
  if (!obs.is_dense())
    throw std::invalid_argument(
        "the curated estimator materializes a dense estimate; observations this large are "
        "not supported");
  const int k = obs.k();
  CuratedOutcome out;
  if (obs.total_mass() <= 0.0) {
    out.estimate = Eigen::MatrixXd::Zero(k, k);
    out.iterations = 0;
    return out;
  }

  const double lambda = n_avg(obs, cfg);
  const RegWeights weights = compute_weights(obs, lambda);
  const Thresholds th = Thresholds::from(cfg, k, lambda);
  const Eigen::MatrixXd regularized = regularize(obs.dense_entries(), weights);
  const int t = std::min(2 * cfg.rank, k);

  Rng rng = make_rng(restart_seed);
  std::vector<int> zeroed;
  std::optional<SvdResult> svd;
  while (true) {
    ++out.iterations;
    SvdOptions svd_options;
    svd_options.dense_threshold = cfg.svd_dense_threshold;
    svd_options.seed = derive_seed({restart_seed, static_cast<std::uint64_t>(out.iterations)});
    svd = truncated_svd(zero_rows(regularized, zeroed), t, svd_options);
    const std::size_t before = zeroed.size();
    for (int j = 0; j < svd->rank(); ++j) {
      row_deletion(svd->sigma(j), svd->left().col(j), weights, th.impact_cutoff, th.w_cn,
                   zeroed, rng);
    }
    if (zeroed.size() == before) break;
    if (out.iterations > k) break;  // every iteration zeroes at least one row
  }

  out.estimate = deregularize(svd->reconstruction(), weights);
  for (int i : zeroed) out.estimate.row(i).setZero();
  std::sort(zeroed.begin(), zeroed.end());
  out.zeroed_weight = weight_of_rows(weights, zeroed);
  out.zeroed_rows = std::move(zeroed);
  return out;
}

CuratedOutcome curated_svd(const Observation& obs, const CuratedConfig& cfg) {
  const int restarts = effective_restarts(cfg, obs.k());
  std::optional<CuratedOutcome> best;
  for (int index = 0; index < restarts; ++index) {
    CuratedOutcome run = curated_svd_once(obs, cfg, cfg.seed + static_cast<std::uint64_t>(index));
    run.restart_index = index;
    if (!best || run.zeroed_weight < best->zeroed_weight) best = std::move(run);
  }
  return std::move(*best);
}

CertificateReport objective_certificates(const Observation& obs, const CuratedConfig& cfg,
                                         const CuratedOutcome& outcome,
                                         int max_kept_candidates) {
  if (!obs.is_dense())
    throw std::invalid_argument("certificates require a dense observation");
  const int k = obs.k();
  CertificateReport report;
  report.candidate_rows = surviving_rows(k, outcome.zeroed_rows);
  if (obs.total_mass() <= 0.0) return report;

  const double lambda = n_avg(obs, cfg);
  const RegWeights weights = compute_weights(obs, lambda);
  report.thresholds = Thresholds::from(cfg, k, lambda);

  SvdOptions svd_options;
  svd_options.dense_threshold = cfg.svd_dense_threshold;
  svd_options.seed = derive_seed({cfg.seed, 0x6365727469667943ULL});
  const Eigen::MatrixXd state =
      zero_rows(regularize(obs.dense_entries(), weights), outcome.zeroed_rows);
  const SvdResult svd = truncated_svd(state, std::min(2 * cfg.rank, k), svd_options);

  const bool keep_rows =
      static_cast<int>(report.candidate_rows.size()) <= max_kept_candidates;
  std::vector<double> cand_weights;
  cand_weights.reserve(report.candidate_rows.size());
  for (int i : report.candidate_rows) cand_weights.push_back(weights.row_weights()(i));
  if (keep_rows) report.candidate_weights = cand_weights;

  for (int j = 0; j < svd.rank(); ++j) {
    ComponentCertificate cert;
    cert.sigma = svd.sigma(j);
    std::vector<double> values;
    values.reserve(report.candidate_rows.size());
    for (int i : report.candidate_rows) {
      const double entry = svd.left()(i, j);
      values.push_back(cert.sigma * cert.sigma * entry * entry);
    }
    const std::vector<int> chosen =
        greedy_knapsack(values, cand_weights, report.thresholds.w_cn);
    for (int c : chosen) cert.greedy_impact += values[c];
    if (keep_rows) cert.candidate_values = values;
    report.max_greedy_impact = std::max(report.max_greedy_impact, cert.greedy_impact);
    report.components.push_back(std::move(cert));
  }
  return report;
}

}  // namespace cursvd
