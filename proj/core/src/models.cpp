#include "cursvd/models.hpp"

#include "cursvd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cursvd {
namespace {

double family_entry_bound(const ModelKind& kind) {
  switch (kind.family()) {
    case ModelFamily::kBernoulli: return 1.0;
    case ModelFamily::kBinomial: return static_cast<double>(kind.trials());
    case ModelFamily::kCollab: return kind.observe_prob();
    default: return std::numeric_limits<double>::infinity();
  }
}

void check_spec(const ModelSpec& spec) {
  if (spec.k < 1) throw std::invalid_argument("model size k must be positive");
  if (spec.r < 1) throw std::invalid_argument("model rank must be positive");
  if (spec.shape != ModelShape::kCounterexample) {
    if (!(spec.target_mass > 0.0)) throw std::invalid_argument("target mass must be positive");
    const double bound = family_entry_bound(spec.kind);
    const double max_mass = bound * spec.k * static_cast<double>(spec.k);
    if (spec.target_mass > max_mass) {
      std::ostringstream msg;
      msg << "target mass " << spec.target_mass << " exceeds the family's maximum "
          << max_mass << " for k=" << spec.k;
      throw std::invalid_argument(msg.str());
    }
  }
  if (spec.kind.family() == ModelFamily::kDistribution) {
    const double n = static_cast<double>(spec.kind.draws());
    if (std::abs(spec.target_mass - n) > 1e-6 * std::max(1.0, n))
      throw std::invalid_argument(
          "distribution models must target exactly the declared draw count");
  }
}

Eigen::MatrixXd scaled_to_mass(Eigen::MatrixXd m, double target_mass) {
  const double mass = m.sum();
  if (!(mass > 0.0)) throw std::logic_error("generated matrix has zero mass before scaling");
  m *= target_mass / mass;
  return m;
}

ModelMatrix gen_random_factors(const ModelSpec& spec) {
  Rng rng = make_rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd u(spec.k, spec.r);
  Eigen::MatrixXd v(spec.r, spec.k);
  for (int i = 0; i < spec.k; ++i) {
    for (int j = 0; j < spec.r; ++j) u(i, j) = unit(rng);
  }
  for (int i = 0; i < spec.r; ++i) {
    for (int j = 0; j < spec.k; ++j) v(i, j) = unit(rng);
  }
  return ModelMatrix::dense(scaled_to_mass(u * v, spec.target_mass), spec.r, spec.kind);
}

ModelMatrix gen_sbm(const ModelSpec& spec) {
  auto community = [&](int i) {
    return static_cast<int>(static_cast<std::int64_t>(i) * spec.r / spec.k);
  };
  if (!(spec.sbm_p_in > 0.0) || !(spec.sbm_p_out >= 0.0))
    throw std::invalid_argument("community intensities must be positive (within) and nonnegative (across)");
  Eigen::MatrixXd m(spec.k, spec.k);
  for (int j = 0; j < spec.k; ++j) {
    for (int i = 0; i < spec.k; ++i) {
      m(i, j) = community(i) == community(j) ? spec.sbm_p_in : spec.sbm_p_out;
    }
  }
  return ModelMatrix::dense(scaled_to_mass(std::move(m), spec.target_mass), spec.r, spec.kind);
}

ModelMatrix gen_heavy_rows(const ModelSpec& spec) {
  if (spec.heavy_count < 0 || spec.heavy_count > spec.k)
    throw std::invalid_argument("heavy-row count must lie in [0, k]");
  if (!(spec.heavy_boost >= 1.0))
    throw std::invalid_argument("heavy-row boost must be at least 1");
  Rng rng = make_rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd u(spec.k, spec.r);
  Eigen::MatrixXd v(spec.r, spec.k);
  for (int i = 0; i < spec.k; ++i) {
    for (int j = 0; j < spec.r; ++j) u(i, j) = unit(rng);
  }
  for (int i = 0; i < spec.r; ++i) {
    for (int j = 0; j < spec.k; ++j) v(i, j) = unit(rng);
  }
  Eigen::MatrixXd m = u * v;
  m.topRows(spec.heavy_count) *= spec.heavy_boost;
  return ModelMatrix::dense(scaled_to_mass(std::move(m), spec.target_mass), spec.r, spec.kind);
}

ModelMatrix gen_counterexample(const ModelSpec& spec) {
  if (spec.kind.family() != ModelFamily::kBernoulli)
    throw std::invalid_argument("the block-diagonal adversarial model is a Bernoulli construction");
  if (spec.n_max < 1) throw std::invalid_argument("n_max must be positive");
  const int side = 2 * spec.n_max;
  if (spec.k % side != 0)
    throw std::invalid_argument("2*n_max must divide k for the block-diagonal model");
  const int blocks = spec.k / side;
  const std::int64_t total = static_cast<std::int64_t>(spec.k) * spec.k;
  if (total <= kDenseEntryCap) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(spec.k, spec.k);
    for (int b = 0; b < blocks; ++b) {
      m.block(b * side, b * side, side, side).setConstant(0.5);
    }
    return ModelMatrix::dense(std::move(m), blocks, spec.kind);
  }
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(spec.k) * side);
  for (int b = 0; b < blocks; ++b) {
    for (int j = b * side; j < (b + 1) * side; ++j) {
      for (int i = b * side; i < (b + 1) * side; ++i) entries.emplace_back(i, j, 0.5);
    }
  }
  return ModelMatrix::sparse(spec.k, entries, blocks, spec.kind);
}

/// Visits the nonzero model entries in column-major order, matching the
/// storage order of compressed sparse columns, so both storages consume the
/// random stream identically.
template <typename Fn>
void for_each_nonzero(const ModelMatrix& model, Fn&& fn) {
  if (model.is_dense()) {
    const auto& m = model.dense_entries();
    for (int j = 0; j < model.k(); ++j) {
      for (int i = 0; i < model.k(); ++i) {
        if (m(i, j) != 0.0) fn(i, j, m(i, j));
      }
    }
  } else {
    const auto& s = model.sparse_entries();
    for (int outer = 0; outer < s.outerSize(); ++outer) {
      for (SparseMatrix::InnerIterator it(s, outer); it; ++it) {
        if (it.value() != 0.0)
          fn(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
      }
    }
  }
}

class ObservationBuilder {
 public:
  explicit ObservationBuilder(const ModelMatrix& model)
      : k_(model.k()), dense_(model.is_dense()) {
    if (dense_) {
      matrix_ = Eigen::MatrixXd::Zero(k_, k_);
    } else {
      entries_.reserve(1024);
    }
  }

  void set(int i, int j, double value) {
    if (value == 0.0) return;
    if (dense_) {
      matrix_(i, j) = value;
    } else {
      entries_.emplace_back(i, j, value);
    }
  }

  Observation finish(const ModelKind& kind) {
    return dense_ ? Observation::dense(std::move(matrix_), kind)
                  : Observation::sparse(k_, entries_, kind);
  }

 private:
  int k_;
  bool dense_;
  Eigen::MatrixXd matrix_;
  std::vector<Triplet> entries_;
};

Observation sample_counts(const ModelMatrix& model, Rng& rng) {
  ObservationBuilder out(model);
  const ModelKind& kind = model.kind();
  switch (kind.family()) {
    case ModelFamily::kPoisson:
    case ModelFamily::kDistribution:
      for_each_nonzero(model, [&](int i, int j, double mean) {
        std::poisson_distribution<long long> draw(mean);
        out.set(i, j, static_cast<double>(draw(rng)));
      });
      break;
    case ModelFamily::kBernoulli:
      for_each_nonzero(model, [&](int i, int j, double mean) {
        std::bernoulli_distribution draw(std::min(1.0, mean));
        out.set(i, j, draw(rng) ? 1.0 : 0.0);
      });
      break;
    case ModelFamily::kBinomial: {
      const long long t = kind.trials();
      for_each_nonzero(model, [&](int i, int j, double mean) {
        std::binomial_distribution<long long> draw(t, std::min(1.0, mean / t));
        out.set(i, j, static_cast<double>(draw(rng)));
      });
      break;
    }
    default:
      throw std::logic_error("sample_counts only handles count families");
  }
  return out.finish(kind);
}

Observation sample_multinomial(const ModelMatrix& model, Rng& rng) {
  // Sequential-binomial decomposition of one multinomial draw: conditioned on
  // what remains, each entry's count is Binomial(remaining, mass_ij / mass_left).
  ObservationBuilder out(model);
  long long remaining = model.kind().draws();
  double mass_left = model.total_mass();
  for_each_nonzero(model, [&](int i, int j, double mean) {
    if (remaining <= 0 || !(mass_left > 0.0)) return;
    const double p = std::clamp(mean / mass_left, 0.0, 1.0);
    long long x = 0;
    if (p >= 1.0) {
      x = remaining;
    } else {
      std::binomial_distribution<long long> draw(remaining, p);
      x = draw(rng);
    }
    remaining -= x;
    mass_left -= mean;
    out.set(i, j, static_cast<double>(x));
  });
  return out.finish(model.kind());
}

Observation sample_collab(const ModelMatrix& model, Rng& rng, CollabNoise noise) {
  ObservationBuilder out(model);
  const double p = model.kind().observe_prob();
  std::bernoulli_distribution observe(p);
  for_each_nonzero(model, [&](int i, int j, double mean) {
    if (!observe(rng)) return;
    const double f = std::clamp(mean / p, 0.0, 1.0);
    double rating = f;
    switch (noise) {
      case CollabNoise::kUniform: {
        const double a = std::min(f, 1.0 - f);
        if (a > 0.0) {
          std::uniform_real_distribution<double> jitter(-a, a);
          rating = std::clamp(f + jitter(rng), 0.0, 1.0);
        }
        break;
      }
      case CollabNoise::kBernoulli: {
        std::bernoulli_distribution draw(f);
        rating = draw(rng) ? 1.0 : 0.0;
        break;
      }
    }
    out.set(i, j, rating);
  });
  return out.finish(model.kind());
}

}  // namespace

ModelMatrix gen_model(const ModelSpec& spec) {
  check_spec(spec);
  switch (spec.shape) {
    case ModelShape::kRandomFactors: return gen_random_factors(spec);
    case ModelShape::kSbm: return gen_sbm(spec);
    case ModelShape::kHeavyRows: return gen_heavy_rows(spec);
    case ModelShape::kCounterexample: return gen_counterexample(spec);
  }
  throw std::logic_error("unhandled model shape");
}

Observation sample(const ModelMatrix& model, std::uint64_t seed) {
  return sample(model, seed, SampleOptions{});
}

Observation sample(const ModelMatrix& model, std::uint64_t seed, const SampleOptions& options) {
  if (options.exact_multinomial && model.kind().family() != ModelFamily::kDistribution)
    throw std::invalid_argument("exact_multinomial applies only to distribution models");
  Rng rng = make_rng(seed);
  switch (model.kind().family()) {
    case ModelFamily::kDistribution:
      if (options.exact_multinomial) return sample_multinomial(model, rng);
      return sample_counts(model, rng);
    case ModelFamily::kCollab:
      return sample_collab(model, rng, options.collab_noise);
    default:
      return sample_counts(model, rng);
  }
}

}  // namespace cursvd
