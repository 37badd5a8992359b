#include "cursvd/types.hpp"

#include <Eigen/SVD>

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace cursvd {
namespace {

bool is_integer(double x) { return std::isfinite(x) && x == std::floor(x); }

[[noreturn]] void fail_entry(int i, int j, double value, const std::string& reason) {
  std::ostringstream msg;
  msg << "entry (" << i << ", " << j << ") = " << value << " " << reason;
  throw std::invalid_argument(msg.str());
}

void check_model_entry(const ModelKind& kind, int i, int j, double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) fail_entry(i, j, x, "must be finite and nonnegative");
  switch (kind.family()) {
    case ModelFamily::kBernoulli:
      if (x > 1.0) fail_entry(i, j, x, "exceeds 1 for a Bernoulli mean");
      break;
    case ModelFamily::kBinomial:
      if (x > static_cast<double>(kind.trials()))
        fail_entry(i, j, x, "exceeds the binomial trial count");
      break;
    case ModelFamily::kCollab:
      if (x > kind.observe_prob())
        fail_entry(i, j, x, "exceeds the collab observation probability");
      break;
    default:
      break;
  }
}

void check_observation_entry(const ModelKind& kind, int i, int j, double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) fail_entry(i, j, x, "must be finite and nonnegative");
  switch (kind.family()) {
    case ModelFamily::kPoisson:
    case ModelFamily::kBinomial:
    case ModelFamily::kDistribution:
      if (!is_integer(x)) fail_entry(i, j, x, "must be an integer count");
      break;
    case ModelFamily::kBernoulli:
      if (x != 0.0 && x != 1.0) fail_entry(i, j, x, "must be 0 or 1");
      break;
    case ModelFamily::kCollab:
      if (x > 1.0) fail_entry(i, j, x, "exceeds 1 for a collab rating");
      break;
  }
}

SparseMatrix build_sparse(int k, const std::vector<Triplet>& entries) {
  SparseMatrix m(k, k);
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return m;
}

void check_index_range(int k, const std::vector<Triplet>& entries) {
  for (const auto& t : entries) {
    if (t.row() < 0 || t.row() >= k || t.col() < 0 || t.col() >= k) {
      std::ostringstream msg;
      msg << "triplet index (" << t.row() << ", " << t.col() << ") out of range for k=" << k;
      throw std::invalid_argument(msg.str());
    }
  }
}

/// Number of singular values above 1e-9 * sigma_1.
int numerical_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  const double cutoff = 1e-9 * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

}  // namespace

ModelKind ModelKind::poisson() { return ModelKind(ModelFamily::kPoisson, 0.0); }
ModelKind ModelKind::bernoulli() { return ModelKind(ModelFamily::kBernoulli, 0.0); }

ModelKind ModelKind::binomial(std::int64_t trials) {
  if (trials < 1) throw std::invalid_argument("binomial trial count must be a positive integer");
  return ModelKind(ModelFamily::kBinomial, static_cast<double>(trials));
}

ModelKind ModelKind::distribution(std::int64_t draws) {
  if (draws < 1) throw std::invalid_argument("distribution draw count must be a positive integer");
  return ModelKind(ModelFamily::kDistribution, static_cast<double>(draws));
}

ModelKind ModelKind::collab(double observe_prob) {
  if (!(observe_prob > 0.0) || observe_prob > 1.0)
    throw std::invalid_argument("collab observation probability must lie in (0, 1]");
  return ModelKind(ModelFamily::kCollab, observe_prob);
}

bool ModelKind::has_param() const {
  return family_ == ModelFamily::kBinomial || family_ == ModelFamily::kDistribution ||
         family_ == ModelFamily::kCollab;
}

std::int64_t ModelKind::trials() const {
  if (family_ != ModelFamily::kBinomial)
    throw std::logic_error("trials() is only defined for the binomial family");
  return static_cast<std::int64_t>(param_);
}

std::int64_t ModelKind::draws() const {
  if (family_ != ModelFamily::kDistribution)
    throw std::logic_error("draws() is only defined for the distribution family");
  return static_cast<std::int64_t>(param_);
}

double ModelKind::observe_prob() const {
  if (family_ != ModelFamily::kCollab)
    throw std::logic_error("observe_prob() is only defined for the collab family");
  return param_;
}

std::string ModelKind::token() const {
  std::ostringstream out;
  switch (family_) {
    case ModelFamily::kPoisson: return "poisson";
    case ModelFamily::kBernoulli: return "bernoulli";
    case ModelFamily::kBinomial: out << "binomial " << trials(); break;
    case ModelFamily::kDistribution: out << "distribution " << draws(); break;
    case ModelFamily::kCollab: {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), param_);
      if (ec != std::errc()) throw std::runtime_error("failed to format collab probability");
      out << "collab " << std::string_view(buf, ptr - buf);
      break;
    }
  }
  return out.str();
}

ModelKind ModelKind::parse(const std::string& family, std::optional<double> param) {
  auto require_param = [&](const char* what) {
    if (!param.has_value()) {
      throw std::invalid_argument("model kind '" + family + "' requires a " + what + " parameter");
    }
    return *param;
  };
  auto require_integer = [&](const char* what) {
    const double v = require_param(what);
    if (!is_integer(v)) {
      throw std::invalid_argument("model kind '" + family + "' needs an integer " + what);
    }
    return static_cast<std::int64_t>(v);
  };
  if (family == "poisson") return poisson();
  if (family == "bernoulli") return bernoulli();
  if (family == "binomial") return binomial(require_integer("trial-count"));
  if (family == "distribution") return distribution(require_integer("draw-count"));
  if (family == "collab") return collab(require_param("probability"));
  throw std::invalid_argument("unknown model kind '" + family + "'");
}

bool ModelKind::operator==(const ModelKind& other) const {
  return family_ == other.family_ && param_ == other.param_;
}

ModelMatrix::ModelMatrix(int k, int rank_bound, ModelKind kind)
    : k_(k), rank_bound_(rank_bound), kind_(kind) {
  if (k < 1) throw std::invalid_argument("matrix size k must be positive");
  if (rank_bound < 1) throw std::invalid_argument("rank bound must be positive");
}

ModelMatrix ModelMatrix::dense(Eigen::MatrixXd entries, int rank_bound, ModelKind kind) {
  if (entries.rows() != entries.cols()) throw std::invalid_argument("model matrix must be square");
  ModelMatrix m(static_cast<int>(entries.rows()), rank_bound, kind);
  for (int j = 0; j < m.k_; ++j) {
    for (int i = 0; i < m.k_; ++i) check_model_entry(kind, i, j, entries(i, j));
  }
  const int rank = numerical_rank(entries);
  if (rank > rank_bound) {
    std::ostringstream msg;
    msg << "matrix has numerical rank " << rank << ", above the declared bound " << rank_bound;
    throw std::invalid_argument(msg.str());
  }
  m.dense_ = std::move(entries);
  m.finalize_masses();
  return m;
}

ModelMatrix ModelMatrix::sparse(int k, const std::vector<Triplet>& entries, int rank_bound,
                                ModelKind kind) {
  ModelMatrix m(k, rank_bound, kind);
  check_index_range(k, entries);
  for (const auto& t : entries) check_model_entry(kind, t.row(), t.col(), t.value());
  m.sparse_ = build_sparse(k, entries);
  m.finalize_masses();
  return m;
}

void ModelMatrix::finalize_masses() {
  row_masses_ = Eigen::VectorXd::Zero(k_);
  col_masses_ = Eigen::VectorXd::Zero(k_);
  if (dense_) {
    row_masses_ = dense_->rowwise().sum();
    col_masses_ = dense_->colwise().sum().transpose();
  } else {
    for (int outer = 0; outer < sparse_->outerSize(); ++outer) {
      for (SparseMatrix::InnerIterator it(*sparse_, outer); it; ++it) {
        row_masses_(it.row()) += it.value();
        col_masses_(it.col()) += it.value();
      }
    }
  }
  total_mass_ = row_masses_.sum();
  if (kind_.family() == ModelFamily::kDistribution) {
    const double n = static_cast<double>(kind_.draws());
    if (std::abs(total_mass_ - n) > 1e-6 * std::max(1.0, n)) {
      std::ostringstream msg;
      msg << "distribution-model entries sum to " << total_mass_ << ", expected " << n;
      throw std::invalid_argument(msg.str());
    }
  }
}

const Eigen::MatrixXd& ModelMatrix::dense_entries() const {
  if (!dense_) throw std::logic_error("matrix is stored sparse; dense entries unavailable");
  return *dense_;
}

const SparseMatrix& ModelMatrix::sparse_entries() const {
  if (!sparse_) throw std::logic_error("matrix is stored dense; sparse entries unavailable");
  return *sparse_;
}

double ModelMatrix::entry(int i, int j) const {
  if (i < 0 || i >= k_ || j < 0 || j >= k_) throw std::out_of_range("matrix index out of range");
  return dense_ ? (*dense_)(i, j) : sparse_->coeff(i, j);
}

Observation::Observation(int k, ModelKind kind) : k_(k), kind_(kind) {
  if (k < 1) throw std::invalid_argument("matrix size k must be positive");
}

Observation Observation::dense(Eigen::MatrixXd entries, ModelKind kind) {
  if (entries.rows() != entries.cols()) throw std::invalid_argument("observation must be square");
  Observation x(static_cast<int>(entries.rows()), kind);
  for (int j = 0; j < x.k_; ++j) {
    for (int i = 0; i < x.k_; ++i) check_observation_entry(kind, i, j, entries(i, j));
  }
  x.dense_ = std::move(entries);
  x.finalize_masses();
  return x;
}

Observation Observation::sparse(int k, const std::vector<Triplet>& entries, ModelKind kind) {
  Observation x(k, kind);
  check_index_range(k, entries);
  for (const auto& t : entries) check_observation_entry(kind, t.row(), t.col(), t.value());
  x.sparse_ = build_sparse(k, entries);
  x.finalize_masses();
  return x;
}

void Observation::finalize_masses() {
  row_masses_ = Eigen::VectorXd::Zero(k_);
  col_masses_ = Eigen::VectorXd::Zero(k_);
  if (dense_) {
    row_masses_ = dense_->rowwise().sum();
    col_masses_ = dense_->colwise().sum().transpose();
  } else {
    for (int outer = 0; outer < sparse_->outerSize(); ++outer) {
      for (SparseMatrix::InnerIterator it(*sparse_, outer); it; ++it) {
        row_masses_(it.row()) += it.value();
        col_masses_(it.col()) += it.value();
      }
    }
  }
  total_mass_ = row_masses_.sum();
}

const Eigen::MatrixXd& Observation::dense_entries() const {
  if (!dense_) throw std::logic_error("observation is stored sparse; dense entries unavailable");
  return *dense_;
}

const SparseMatrix& Observation::sparse_entries() const {
  if (!sparse_) throw std::logic_error("observation is stored dense; sparse entries unavailable");
  return *sparse_;
}

double Observation::entry(int i, int j) const {
  if (i < 0 || i >= k_ || j < 0 || j >= k_) throw std::out_of_range("matrix index out of range");
  return dense_ ? (*dense_)(i, j) : sparse_->coeff(i, j);
}

RegWeights::RegWeights(Eigen::VectorXd row_weights, Eigen::VectorXd col_weights, double lambda)
    : row_weights_(std::move(row_weights)), col_weights_(std::move(col_weights)), lambda_(lambda) {
  if (row_weights_.size() != col_weights_.size())
    throw std::invalid_argument("row and column weight vectors must have equal length");
  if (!(lambda_ > 0.0)) throw std::invalid_argument("weight normalizer lambda must be positive");
  for (Eigen::Index i = 0; i < row_weights_.size(); ++i) {
    if (!(row_weights_(i) >= 1.0) || !(col_weights_(i) >= 1.0))
      throw std::invalid_argument("regularization weights must all be >= 1");
  }
}

SvdResult::SvdResult(Eigen::MatrixXd left, Eigen::VectorXd values, Eigen::MatrixXd right,
                     std::vector<int> source_rows_zeroed)
    : left_(std::move(left)),
      values_(std::move(values)),
      right_(std::move(right)),
      source_rows_zeroed_(std::move(source_rows_zeroed)) {
  if (left_.cols() != values_.size() || right_.cols() != values_.size())
    throw std::invalid_argument("singular vector blocks must have one column per singular value");
  for (Eigen::Index j = 0; j < values_.size(); ++j) {
    if (!(values_(j) >= 0.0)) throw std::invalid_argument("singular values must be nonnegative");
    if (j > 0 && values_(j) > values_(j - 1) + 1e-12 * values_(0))
      throw std::invalid_argument("singular values must be non-increasing");
  }
}

double SvdResult::sigma(int j) const {
  if (j < 0 || j >= rank()) throw std::out_of_range("singular value index out of range");
  return values_(j);
}

Eigen::MatrixXd SvdResult::reconstruction() const {
  return left_ * values_.asDiagonal() * right_.transpose();
}

int effective_restarts(const CuratedConfig& cfg, int k) {
  if (cfg.restarts.has_value()) {
    if (*cfg.restarts < 1) throw std::invalid_argument("restart count must be positive");
    return *cfg.restarts;
  }
  int restarts = 1;
  while ((1 << restarts) < k && restarts < 62) ++restarts;  // ceil(log2 k)
  return std::max(1, restarts);
}

double n_avg(const Observation& obs, const CuratedConfig& cfg) {
  if (cfg.n_total_override.has_value()) {
    if (!(*cfg.n_total_override > 0.0))
      throw std::invalid_argument("n_total_override must be positive");
    return *cfg.n_total_override / obs.k();
  }
  if (obs.total_mass() <= 0.0)
    throw std::invalid_argument("empty observation: cannot estimate n_avg from an all-zero X");
  return obs.total_mass() / obs.k();
}

}  // namespace cursvd
