#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cursvd {

/// Matrices with at most this many entries are stored dense; larger ones use
/// coordinate-list sparse storage (the adversarial experiments need k ~ 10^6
/// with only ~k nonzeros).
inline constexpr std::int64_t kDenseEntryCap = 4'000'000;

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

enum class ModelFamily { kPoisson, kBernoulli, kBinomial, kDistribution, kCollab };

/// Tag describing which observation law produced X from M, together with the
/// family parameter: the binomial trial count t, the distribution draw total
/// n, or the collaborative-filtering observation probability p. Under every
/// family, E[X_ij] = M_ij and Var(X_ij) <= M_ij.
class ModelKind {
 public:
  static ModelKind poisson();
  static ModelKind bernoulli();
  static ModelKind binomial(std::int64_t trials);
  static ModelKind distribution(std::int64_t draws);
  static ModelKind collab(double observe_prob);

  ModelFamily family() const { return family_; }
  bool has_param() const;
  /// Binomial trial count t (throws unless family is Binomial).
  std::int64_t trials() const;
  /// Distribution total draw count n (throws unless family is Distribution).
  std::int64_t draws() const;
  /// Collab observation probability p (throws unless family is Collab).
  double observe_prob() const;

  /// Token used in matrix-file headers and configs, e.g. "poisson",
  /// "binomial 8", "collab 0.3".
  std::string token() const;
  /// Parses a family name plus optional parameter as produced by token().
  static ModelKind parse(const std::string& family,
                         std::optional<double> param = std::nullopt);

  bool operator==(const ModelKind& other) const;

 private:
  ModelKind(ModelFamily family, double param) : family_(family), param_(param) {}

  ModelFamily family_;
  double param_;
};

/// The k x k expected-observation matrix M with a known rank bound r and an
/// observation-model tag. Entries are validated against the family's range
/// (nonnegative; [0,1] for Bernoulli; [0,t] for Binomial; [0,p] for Collab,
/// whose entries are p*F with F in [0,1]; summing to n for Distribution).
/// Immutable after construction.
class ModelMatrix {
 public:
  /// Wraps a dense matrix; validates ranges and, since dense matrices are
  /// small enough for a values-only SVD, the numerical-rank bound
  /// (singular values > 1e-9 * sigma_1 counted, must be <= rank_bound).
  static ModelMatrix dense(Eigen::MatrixXd entries, int rank_bound, ModelKind kind);
  /// Wraps coordinate-list storage for large matrices; validates ranges.
  /// Rank is not SVD-checked at this scale: callers must construct matrices
  /// whose rank bound holds structurally.
  static ModelMatrix sparse(int k, const std::vector<Triplet>& entries,
                            int rank_bound, ModelKind kind);

  int k() const { return k_; }
  int rank_bound() const { return rank_bound_; }
  const ModelKind& kind() const { return kind_; }
  bool is_dense() const { return dense_.has_value(); }
  const Eigen::MatrixXd& dense_entries() const;
  const SparseMatrix& sparse_entries() const;
  double entry(int i, int j) const;

  /// ||M||_1, the total expected number of observations.
  double total_mass() const { return total_mass_; }
  /// n_avg = ||M||_1 / k, the average expected observations per row/column.
  double n_avg() const { return total_mass_ / k_; }
  const Eigen::VectorXd& row_masses() const { return row_masses_; }
  const Eigen::VectorXd& col_masses() const { return col_masses_; }

 private:
  ModelMatrix(int k, int rank_bound, ModelKind kind);
  void finalize_masses();

  int k_;
  int rank_bound_;
  ModelKind kind_;
  std::optional<Eigen::MatrixXd> dense_;
  std::optional<SparseMatrix> sparse_;
  Eigen::VectorXd row_masses_;
  Eigen::VectorXd col_masses_;
  double total_mass_ = 0.0;
};

/// One sampled observation matrix X ~ M. Entries are validated against the
/// family (integers for Poisson/Binomial/Distribution, {0,1} for Bernoulli,
/// [0,1] for Collab). Immutable after construction.
class Observation {
 public:
  static Observation dense(Eigen::MatrixXd entries, ModelKind kind);
  static Observation sparse(int k, const std::vector<Triplet>& entries, ModelKind kind);

  int k() const { return k_; }
  const ModelKind& kind() const { return kind_; }
  bool is_dense() const { return dense_.has_value(); }
  const Eigen::MatrixXd& dense_entries() const;
  const SparseMatrix& sparse_entries() const;
  double entry(int i, int j) const;

  /// ||X||_1, the realized number of observations.
  double total_mass() const { return total_mass_; }
  const Eigen::VectorXd& row_masses() const { return row_masses_; }
  const Eigen::VectorXd& col_masses() const { return col_masses_; }

 private:
  Observation(int k, ModelKind kind);
  void finalize_masses();

  int k_;
  ModelKind kind_;
  std::optional<Eigen::MatrixXd> dense_;
  std::optional<SparseMatrix> sparse_;
  Eigen::VectorXd row_masses_;
  Eigen::VectorXd col_masses_;
  double total_mass_ = 0.0;
};

/// Row and column regularization weights. Every entry is >= 1 by
/// construction: w_row(i) = max(1, row_i_mass / lambda) and likewise for
/// columns, where lambda is the normalizer (default n_avg).
class RegWeights {
 public:
  RegWeights(Eigen::VectorXd row_weights, Eigen::VectorXd col_weights, double lambda);

  int k() const { return static_cast<int>(row_weights_.size()); }
  const Eigen::VectorXd& row_weights() const { return row_weights_; }
  const Eigen::VectorXd& col_weights() const { return col_weights_; }
  double lambda() const { return lambda_; }

 private:
  Eigen::VectorXd row_weights_;
  Eigen::VectorXd col_weights_;
  double lambda_;
};

/// Ordered singular triplets (sigma_j, u_j, v_j) of some source matrix,
/// possibly computed after zeroing a set of its rows. sigma is non-increasing
/// and nonnegative; u_j / v_j are the columns of left() / right().
class SvdResult {
 public:
  SvdResult(Eigen::MatrixXd left, Eigen::VectorXd values, Eigen::MatrixXd right,
            std::vector<int> source_rows_zeroed = {});

  /// Number of triplets (the truncation rank t).
  int rank() const { return static_cast<int>(values_.size()); }
  int rows() const { return static_cast<int>(left_.rows()); }
  int cols() const { return static_cast<int>(right_.rows()); }
  double sigma(int j) const;
  const Eigen::VectorXd& values() const { return values_; }
  const Eigen::MatrixXd& left() const { return left_; }
  const Eigen::MatrixXd& right() const { return right_; }
  const std::vector<int>& source_rows_zeroed() const { return source_rows_zeroed_; }

  /// U * diag(sigma) * V^T.
  Eigen::MatrixXd reconstruction() const;

 private:
  Eigen::MatrixXd left_;
  Eigen::VectorXd values_;
  Eigen::MatrixXd right_;
  std::vector<int> source_rows_zeroed_;
};

/// Tuning knobs of the curated estimator: the target rank r, the constants
/// hidden inside the tau / W_cn thresholds, restart count, seeding, and the
/// switch-over size between exact and randomized SVD backends.
struct CuratedConfig {
  int rank = 1;                ///< r, the model-rank bound used by the algorithm
  double c_tau = 1.0;          ///< constant in tau = c_tau*sqrt(n_avg)*max(1, ln(r*n_avg))
  double c_w = 1.0;            ///< constant in W_cn = max(1, c_w*k/(r*n_avg)^2)
  std::optional<int> restarts; ///< restart count; defaults to ceil(log2 k)
  std::uint64_t seed = 0;
  /// When set, n_avg is taken as n_total_override/k (the idealized known-mass
  /// setting) instead of the ||X||_1/k estimate.
  std::optional<double> n_total_override;
  int svd_dense_threshold = 2048;
};

/// Restart count actually used for a size-k problem: the configured value if
/// present, else ceil(log2 k), floored at 1.
int effective_restarts(const CuratedConfig& cfg, int k);

/// The normalizer lambda = n_avg used everywhere downstream: the override
/// divided by k when configured, else the ||X||_1/k estimate. Throws
/// "empty observation" if X is all zeros and no override is set.
double n_avg(const Observation& obs, const CuratedConfig& cfg);

}  // namespace cursvd
