#pragma once

#include "cursvd/types.hpp"

#include <vector>

namespace cursvd {

/// Degree weights w_row(i) = max(1, rowmass_i / lambda), w_col likewise.
/// Computed once per observation; the estimator never recomputes them after
/// zeroing rows. With lambda = ||X||_1 / k the totals obey
/// sum(w_row) <= 2k and sum(w_col) <= 2k.
RegWeights compute_weights(const Observation& obs, double lambda);

/// Entrywise scaling A_ij / sqrt(w_row(i) * w_col(j)). The raw-vector
/// overloads accept any positive weights (the norm-damping bound holds for
/// those too); the RegWeights overloads are the >=1 pipeline path.
Eigen::MatrixXd regularize(const Eigen::MatrixXd& a, const Eigen::VectorXd& row_weights,
                           const Eigen::VectorXd& col_weights);
Eigen::MatrixXd regularize(const Eigen::MatrixXd& a, const RegWeights& w);
SparseMatrix regularize(const SparseMatrix& a, const RegWeights& w);

/// Exact inverse of regularize: A_ij * sqrt(w_row(i) * w_col(j)).
Eigen::MatrixXd deregularize(const Eigen::MatrixXd& a, const Eigen::VectorXd& row_weights,
                             const Eigen::VectorXd& col_weights);
Eigen::MatrixXd deregularize(const Eigen::MatrixXd& a, const RegWeights& w);

/// Total row weight of an index set: sum_{i in rows} w_row(i).
double weight_of_rows(const RegWeights& w, const std::vector<int>& rows);

}  // namespace cursvd
