#pragma once

#include "cursvd/types.hpp"

#include <optional>

namespace cursvd {

/// Quality metrics of one recovery run.
struct EvalReport {
  /// ||estimate - M||_1 / ||M||_1 for count models; for collab evaluations
  /// this field holds the mean per-entry absolute error of the recovered
  /// preference matrix (entries in [0,1], so no normalization is needed).
  double normalized_l1 = 0.0;
  /// Mean per-entry squared error; only populated by collab evaluations.
  std::optional<double> mse;
  /// Spectral norm of the noise X - M (0 when M is unknown).
  double spectral_noise_norm = 0.0;
  /// Total regularization weight of the rows the estimator zeroed out.
  double zeroed_weight = 0.0;
  double runtime_ms = 0.0;
};

/// ||estimate - M||_1 / ||M||_1. Throws if ||M||_1 = 0.
double normalized_l1(const ModelMatrix& truth, const Eigen::MatrixXd& estimate);
double normalized_l1(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& estimate);

/// Evaluates a collab recovery: the preference estimate is
/// clamp(m_estimate / p, 0, 1), compared entrywise against f_true (in [0,1]).
/// Reports mean absolute error in normalized_l1 and mean squared error in
/// mse; since both matrices live in [0,1], |d| >= d^2 holds per entry and the
/// report always satisfies normalized_l1 >= mse. Throws if p = 0.
EvalReport collab_eval(const Eigen::MatrixXd& f_true, const Eigen::MatrixXd& m_estimate,
                       double p);

/// sum_i | sum_j (X - M)_ij |: the total row-sum drift of the sampling noise.
double row_sum_deviation(const Observation& obs, const ModelMatrix& truth);

}  // namespace cursvd
