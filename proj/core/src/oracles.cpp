#include "cursvd/oracles.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cursvd {

double dense_spectral_norm(const Eigen::MatrixXd& a) {
  if (a.rows() > 512 || a.cols() > 512)
    throw std::invalid_argument("dense spectral-norm reference is capped at 512x512");
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

std::pair<std::vector<int>, double> brute_knapsack(const std::vector<double>& values,
                                                   const std::vector<double>& weights,
                                                   double capacity) {
  const int n = static_cast<int>(values.size());
  if (weights.size() != values.size())
    throw std::invalid_argument("knapsack values and weights must have equal length");
  if (n > 22) throw std::invalid_argument("exhaustive knapsack is capped at 22 items");
  std::uint32_t best_mask = 0;
  double best_value = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double value = 0.0;
    double weight = 0.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        value += values[i];
        weight += weights[i];
      }
    }
    if (weight <= capacity && value > best_value) {
      best_value = value;
      best_mask = mask;
    }
  }
  std::vector<int> chosen;
  for (int i = 0; i < n; ++i) {
    if (best_mask & (1u << i)) chosen.push_back(i);
  }
  return {chosen, best_value};
}

double inf_to_2_norm(const Eigen::MatrixXd& a) {
  const int m = static_cast<int>(a.cols());
  if (m > 20) throw std::invalid_argument("box-norm enumeration is capped at 20 columns");
  if (a.size() == 0) return 0.0;
  // Walk all sign vectors in gray-code order so each step flips one sign:
  // w <- w -/+ 2 * column.
  Eigen::VectorXd w = a.rowwise().sum();  // all-ones sign vector
  Eigen::VectorXd signs = Eigen::VectorXd::Ones(m);
  double best = w.norm();
  const std::uint32_t total = 1u << m;
  for (std::uint32_t step = 1; step < total; ++step) {
    const int flip = __builtin_ctz(step);  // bit that changes in the gray code
    signs(flip) = -signs(flip);
    w += 2.0 * signs(flip) * a.col(flip);
    best = std::max(best, w.norm());
  }
  return best;
}

int heavy_subset_count(const Eigen::MatrixXd& a, double beta) {
  const int k = static_cast<int>(a.rows());
  if (k > 64) throw std::invalid_argument("heavy-subset extraction is capped at 64 rows");
  if (!(beta > 0.0)) throw std::invalid_argument("the heaviness bar beta must be positive");
  const double bar = 2.0 * beta;

  auto rows_norm = [&](const std::vector<int>& rows) {
    Eigen::MatrixXd block(rows.size(), a.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) block.row(i) = a.row(rows[i]);
    return dense_spectral_norm(block);
  };

  std::vector<int> remaining(k);
  std::iota(remaining.begin(), remaining.end(), 0);
  int count = 0;
  while (!remaining.empty() && rows_norm(remaining) > bar) {
    // Grow a subset by descending row norm until it crosses the bar; the
    // loop above guarantees this terminates before the subset exhausts the
    // remaining rows.
    std::vector<int> order = remaining;
    std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
      const double ln = a.row(lhs).norm();
      const double rn = a.row(rhs).norm();
      return ln != rn ? ln > rn : lhs < rhs;
    });
    std::vector<int> subset;
    for (int row : order) {
      subset.push_back(row);
      if (rows_norm(subset) > bar) break;
    }
    ++count;
    std::vector<int> next;
    for (int row : remaining) {
      if (std::find(subset.begin(), subset.end(), row) == subset.end()) next.push_back(row);
    }
    remaining = std::move(next);
  }
  return count;
}

}  // namespace cursvd
