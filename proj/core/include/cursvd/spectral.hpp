#pragma once

#include "cursvd/types.hpp"

#include <vector>

namespace cursvd {

struct SvdOptions {
  /// Matrices with both sides at or below this use the exact dense backend;
  /// larger ones use seeded randomized subspace iteration.
  int dense_threshold = 2048;
  std::uint64_t seed = 0;      ///< randomized backend's test-matrix seed
  int oversampling = 10;
  int power_iterations = 4;
};

/// Top-t singular triplets of a. Exact (thin BDC) at small sizes, randomized
/// subspace iteration above the threshold. Signs are normalized so the first
/// non-negligible entry of each left vector is positive; singular values
/// below 1e-12 * sigma_1 are reported as exactly 0. Throws if t exceeds
/// either dimension.
SvdResult truncated_svd(const Eigen::MatrixXd& a, int t, const SvdOptions& options = {});
SvdResult truncated_svd(const SparseMatrix& a, int t, const SvdOptions& options = {});

/// The regularized-truncation estimator: deregularize(truncate(regularize(
/// a, w), t), w) as one dense matrix.
Eigen::MatrixXd rw_svd(const Eigen::MatrixXd& a, int t, const RegWeights& w,
                       const SvdOptions& options = {});

/// Largest singular value by power iteration on A^T A (relative tolerance
/// 1e-9, at most 10000 iterations). Independent of the SVD backends; the
/// estimate approaches sigma_1 from below, so it is safe inside upper-bound
/// certificates. Returns 0 for the zero matrix.
double spectral_norm(const Eigen::MatrixXd& a);
double spectral_norm(const SparseMatrix& a);

/// Influence of a row set on one singular direction:
/// sigma_j^2 * sum_{i in rows} u_j(i)^2, which equals ||A_rows v_j||^2 for
/// exact triplets. Throws if j is not a computed component.
double impact(const SvdResult& svd, const std::vector<int>& rows, int j);

/// Copy of a with the given rows set to zero.
Eigen::MatrixXd zero_rows(const Eigen::MatrixXd& a, const std::vector<int>& rows);
SparseMatrix zero_rows(const SparseMatrix& a, const std::vector<int>& rows);

/// Per-row, per-component influence table: value(i, j) = sigma_j^2 * u_j(i)^2.
/// Column j sums to sigma_j^2.
class ImpactTable {
 public:
  explicit ImpactTable(const SvdResult& svd);

  int rows() const { return static_cast<int>(values_.rows()); }
  int components() const { return static_cast<int>(values_.cols()); }
  double at(int row, int component) const;
  const Eigen::MatrixXd& values() const { return values_; }
  /// Column sums; entry j equals sigma_j^2.
  Eigen::VectorXd component_sums() const { return values_.colwise().sum(); }

 private:
  Eigen::MatrixXd values_;
};

}  // namespace cursvd
