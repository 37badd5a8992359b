#include "cursvd/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace cursvd {
namespace {

void check_same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrices must have identical shapes");
}

}  // namespace

double normalized_l1(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& estimate) {
  check_same_shape(truth, estimate);
  const double mass = truth.cwiseAbs().sum();
  if (!(mass > 0.0))
    throw std::invalid_argument("normalized L1 error is undefined for an all-zero truth matrix");
  return (estimate - truth).cwiseAbs().sum() / mass;
}

double normalized_l1(const ModelMatrix& truth, const Eigen::MatrixXd& estimate) {
  if (!truth.is_dense())
    throw std::invalid_argument("normalized L1 against a sparse truth matrix is not supported");
  return normalized_l1(truth.dense_entries(), estimate);
}

EvalReport collab_eval(const Eigen::MatrixXd& f_true, const Eigen::MatrixXd& m_estimate,
                       double p) {
  check_same_shape(f_true, m_estimate);
  if (!(p > 0.0)) throw std::invalid_argument("collab observation probability must be positive");
  const Eigen::MatrixXd f_est = (m_estimate / p).cwiseMax(0.0).cwiseMin(1.0);
  const Eigen::MatrixXd diff = f_est - f_true;
  const double entries = static_cast<double>(f_true.size());
  EvalReport report;
  report.normalized_l1 = diff.cwiseAbs().sum() / entries;
  report.mse = diff.squaredNorm() / entries;
  if (report.normalized_l1 < *report.mse - 1e-12)
    throw std::logic_error("mean absolute error fell below mean squared error on [0,1] entries");
  return report;
}

double row_sum_deviation(const Observation& obs, const ModelMatrix& truth) {
  if (obs.k() != truth.k())
    throw std::invalid_argument("observation and truth matrix sizes differ");
  // Row sums of X - M are exactly rowmass(X) - rowmass(M): entries of both
  // matrices are nonnegative, so the cached masses are plain sums.
  return (obs.row_masses() - truth.row_masses()).cwiseAbs().sum();
}

}  // namespace cursvd
