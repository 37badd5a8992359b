#include "cursvd/spectral.hpp"

#include "cursvd/regularization.hpp"
#include "cursvd/rng.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace cursvd {
namespace {

constexpr double kZeroSigmaRel = 1e-12;

void check_truncation(Eigen::Index rows, Eigen::Index cols, int t) {
  if (t < 1) throw std::invalid_argument("truncation rank must be positive");
  if (t > rows || t > cols)
    throw std::invalid_argument("truncation rank exceeds the matrix dimensions");
}

/// Flips triplet signs so each left vector's first non-negligible entry is
/// positive, and zeroes values below 1e-12 * sigma_1; makes both backends
/// produce comparable output on well-separated spectra.
SvdResult canonicalize(Eigen::MatrixXd u, Eigen::VectorXd sigma, Eigen::MatrixXd v) {
  const double sigma1 = sigma.size() > 0 ? sigma(0) : 0.0;
  for (Eigen::Index j = 0; j < sigma.size(); ++j) {
    if (sigma(j) < kZeroSigmaRel * sigma1) sigma(j) = 0.0;
    const double scale = u.col(j).cwiseAbs().maxCoeff();
    if (scale <= 0.0) continue;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      if (std::abs(u(i, j)) > 1e-9 * scale) {
        if (u(i, j) < 0.0) {
          u.col(j) = -u.col(j);
          v.col(j) = -v.col(j);
        }
        break;
      }
    }
  }
  return SvdResult(std::move(u), std::move(sigma), std::move(v));
}

SvdResult dense_exact_svd(const Eigen::MatrixXd& a, int t) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return canonicalize(svd.matrixU().leftCols(t), svd.singularValues().head(t),
                      svd.matrixV().leftCols(t));
}

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

/// Randomized range-finder SVD with power iterations; works for any linear
/// operator given as multiply / transposed-multiply callbacks.
template <typename MatVec, typename MatTVec>
SvdResult randomized_svd(Eigen::Index rows, Eigen::Index cols, int t, const SvdOptions& options,
                         const MatVec& multiply, const MatTVec& multiply_t) {
  const int probe = std::min<Eigen::Index>(t + options.oversampling, std::min(rows, cols));
  Rng rng = make_rng(derive_seed({options.seed, 0x72616e647376644cULL}));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd test(cols, probe);
  for (Eigen::Index j = 0; j < probe; ++j) {
    for (Eigen::Index i = 0; i < cols; ++i) test(i, j) = gauss(rng);
  }
  Eigen::MatrixXd q = thin_q(multiply(test));
  for (int it = 0; it < options.power_iterations; ++it) {
    q = thin_q(multiply_t(q));
    q = thin_q(multiply(q));
  }
  const Eigen::MatrixXd small = multiply_t(q).transpose();  // q^T a, probe x cols
  Eigen::BDCSVD<Eigen::MatrixXd> svd(small, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd u = q * svd.matrixU().leftCols(t);
  return canonicalize(std::move(u), svd.singularValues().head(t), svd.matrixV().leftCols(t));
}

template <typename Matrix>
double power_iteration_norm(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Rng rng = make_rng(0x706f776572697465ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = gauss(rng);
  v.normalize();
  double sigma = 0.0;
  for (int iter = 0; iter < 10000; ++iter) {
    const Eigen::VectorXd av = a * v;
    const double next = av.norm();
    if (next == 0.0) return 0.0;
    Eigen::VectorXd atav = a.transpose() * av;
    const double scale = atav.norm();
    if (scale == 0.0) return next;
    v = atav / scale;
    if (std::abs(next - sigma) <= 1e-9 * next) return next;
    sigma = next;
  }
  return sigma;
}

}  // namespace

SvdResult truncated_svd(const Eigen::MatrixXd& a, int t, const SvdOptions& options) {
  check_truncation(a.rows(), a.cols(), t);
  if (a.rows() <= options.dense_threshold && a.cols() <= options.dense_threshold)
    return dense_exact_svd(a, t);
  return randomized_svd(
      a.rows(), a.cols(), t, options,
      [&](const Eigen::MatrixXd& x) -> Eigen::MatrixXd { return a * x; },
      [&](const Eigen::MatrixXd& x) -> Eigen::MatrixXd { return a.transpose() * x; });
}

SvdResult truncated_svd(const SparseMatrix& a, int t, const SvdOptions& options) {
  check_truncation(a.rows(), a.cols(), t);
  if (a.rows() <= options.dense_threshold && a.cols() <= options.dense_threshold)
    return dense_exact_svd(Eigen::MatrixXd(a), t);
  return randomized_svd(
      a.rows(), a.cols(), t, options,
      [&](const Eigen::MatrixXd& x) -> Eigen::MatrixXd { return a * x; },
      [&](const Eigen::MatrixXd& x) -> Eigen::MatrixXd { return a.transpose() * x; });
}

Eigen::MatrixXd rw_svd(const Eigen::MatrixXd& a, int t, const RegWeights& w,
                       const SvdOptions& options) {
  const SvdResult svd = truncated_svd(regularize(a, w), t, options);
  return deregularize(svd.reconstruction(), w);
}

double spectral_norm(const Eigen::MatrixXd& a) { return power_iteration_norm(a); }
double spectral_norm(const SparseMatrix& a) { return power_iteration_norm(a); }

double impact(const SvdResult& svd, const std::vector<int>& rows, int j) {
  if (j < 0 || j >= svd.rank()) throw std::out_of_range("singular component index out of range");
  const double sigma2 = svd.sigma(j) * svd.sigma(j);
  double mass = 0.0;
  for (int i : rows) {
    if (i < 0 || i >= svd.rows()) throw std::out_of_range("row index out of range");
    mass += svd.left()(i, j) * svd.left()(i, j);
  }
  return sigma2 * mass;
}

Eigen::MatrixXd zero_rows(const Eigen::MatrixXd& a, const std::vector<int>& rows) {
  Eigen::MatrixXd out = a;
  for (int i : rows) {
    if (i < 0 || i >= a.rows()) throw std::out_of_range("row index out of range");
    out.row(i).setZero();
  }
  return out;
}

SparseMatrix zero_rows(const SparseMatrix& a, const std::vector<int>& rows) {
  std::vector<char> drop(a.rows(), 0);
  for (int i : rows) {
    if (i < 0 || i >= a.rows()) throw std::out_of_range("row index out of range");
    drop[i] = 1;
  }
  SparseMatrix out = a;
  for (int outer = 0; outer < out.outerSize(); ++outer) {
    for (SparseMatrix::InnerIterator it(out, outer); it; ++it) {
      if (drop[it.row()]) it.valueRef() = 0.0;
    }
  }
  out.prune(0.0);
  return out;
}

ImpactTable::ImpactTable(const SvdResult& svd) {
  values_ = svd.left().array().square().matrix() *
            svd.values().array().square().matrix().asDiagonal();
}

double ImpactTable::at(int row, int component) const {
  if (row < 0 || row >= rows() || component < 0 || component >= components())
    throw std::out_of_range("impact-table index out of range");
  return values_(row, component);
}

}  // namespace cursvd
