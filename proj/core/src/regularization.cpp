#include "cursvd/regularization.hpp"

#include <cmath>
#include <stdexcept>

namespace cursvd {
namespace {

void check_positive_weights(const Eigen::VectorXd& w, const char* which) {
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!(w(i) > 0.0)) throw std::invalid_argument(std::string(which) + " weights must be positive");
  }
}

void check_shape(Eigen::Index rows, Eigen::Index cols, const Eigen::VectorXd& row_weights,
                 const Eigen::VectorXd& col_weights) {
  if (row_weights.size() != rows || col_weights.size() != cols)
    throw std::invalid_argument("weight vector lengths must match the matrix shape");
}

}  // namespace

RegWeights compute_weights(const Observation& obs, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("weight normalizer lambda must be positive");
  Eigen::VectorXd row = (obs.row_masses() / lambda).cwiseMax(1.0);
  Eigen::VectorXd col = (obs.col_masses() / lambda).cwiseMax(1.0);
  return RegWeights(std::move(row), std::move(col), lambda);
}

Eigen::MatrixXd regularize(const Eigen::MatrixXd& a, const Eigen::VectorXd& row_weights,
                           const Eigen::VectorXd& col_weights) {
  check_shape(a.rows(), a.cols(), row_weights, col_weights);
  check_positive_weights(row_weights, "row");
  check_positive_weights(col_weights, "column");
  const Eigen::VectorXd row_scale = row_weights.cwiseSqrt().cwiseInverse();
  const Eigen::VectorXd col_scale = col_weights.cwiseSqrt().cwiseInverse();
  return row_scale.asDiagonal() * a * col_scale.asDiagonal();
}

Eigen::MatrixXd regularize(const Eigen::MatrixXd& a, const RegWeights& w) {
  return regularize(a, w.row_weights(), w.col_weights());
}

SparseMatrix regularize(const SparseMatrix& a, const RegWeights& w) {
  check_shape(a.rows(), a.cols(), w.row_weights(), w.col_weights());
  const Eigen::VectorXd row_scale = w.row_weights().cwiseSqrt().cwiseInverse();
  const Eigen::VectorXd col_scale = w.col_weights().cwiseSqrt().cwiseInverse();
  SparseMatrix out = a;
  for (int outer = 0; outer < out.outerSize(); ++outer) {
    for (SparseMatrix::InnerIterator it(out, outer); it; ++it) {
      it.valueRef() *= row_scale(it.row()) * col_scale(it.col());
    }
  }
  return out;
}

Eigen::MatrixXd deregularize(const Eigen::MatrixXd& a, const Eigen::VectorXd& row_weights,
                             const Eigen::VectorXd& col_weights) {
  check_shape(a.rows(), a.cols(), row_weights, col_weights);
  check_positive_weights(row_weights, "row");
  check_positive_weights(col_weights, "column");
  const Eigen::VectorXd row_scale = row_weights.cwiseSqrt();
  const Eigen::VectorXd col_scale = col_weights.cwiseSqrt();
  return row_scale.asDiagonal() * a * col_scale.asDiagonal();
}

Eigen::MatrixXd deregularize(const Eigen::MatrixXd& a, const RegWeights& w) {
  return deregularize(a, w.row_weights(), w.col_weights());
}

double weight_of_rows(const RegWeights& w, const std::vector<int>& rows) {
  double total = 0.0;
  for (int i : rows) {
    if (i < 0 || i >= w.k()) throw std::out_of_range("row index out of range");
    total += w.row_weights()(i);
  }
  return total;
}

}  // namespace cursvd
