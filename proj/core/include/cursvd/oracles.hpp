#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace cursvd {

/// Exact spectral norm via a full dense SVD. Deliberately capped at 512x512:
/// this is the slow reference route used to cross-check the iterative
/// spectral-norm estimate, never a production path.
double dense_spectral_norm(const Eigen::MatrixXd& a);

/// Exhaustive 0/1-knapsack solver for n <= 22 items: returns the selected
/// index set (sorted) and its total value. Maximizes total value subject to
/// total weight <= capacity; among equal-value optima the first subset in
/// mask order (i.e. lexicographically smallest bitmask) is returned.
std::pair<std::vector<int>, double> brute_knapsack(const std::vector<double>& values,
                                                   const std::vector<double>& weights,
                                                   double capacity);

/// The l_inf -> l_2 operator norm: max over sign vectors s in {-1,+1}^m of
/// ||A s||_2, computed by exhaustive gray-code enumeration (m = cols <= 20).
/// Always >= the spectral norm, since the unit l_2 ball sits inside the box.
double inf_to_2_norm(const Eigen::MatrixXd& a);

/// Greedy count of disjoint "heavy" row subsets: repeatedly extracts a subset
/// I of the remaining rows with ||A_I|| > 2*beta until the remaining block has
/// spectral norm <= 2*beta (at which point no further subset can exceed the
/// bar, since dropping rows never increases the norm). Capped at k <= 64
/// because each step uses the dense spectral-norm reference. The count is
/// bounded by (r * sigma_1 / beta)^2 for rank-r matrices.
int heavy_subset_count(const Eigen::MatrixXd& a, double beta);

}  // namespace cursvd
