#pragma once

#include "cursvd/types.hpp"

#include <cstdint>

namespace cursvd {

enum class ModelShape { kRandomFactors, kSbm, kHeavyRows, kCounterexample };

/// Noise law applied to an observed collab rating around its mean F_ij.
enum class CollabNoise {
  kUniform,    ///< F + U[-a, a] with a = min(F, 1-F); stays inside [0,1]
  kBernoulli,  ///< Bernoulli(F); ratings become 0/1
};

/// Recipe for a synthetic ground-truth matrix.
struct ModelSpec {
  ModelShape shape = ModelShape::kRandomFactors;
  ModelKind kind = ModelKind::poisson();
  int k = 0;
  int r = 1;
  /// Desired ||M||_1; hit to within 1e-6 relative. The block-diagonal
  /// adversarial shape ignores this and always has mass k * n_max.
  double target_mass = 0.0;
  std::uint64_t seed = 0;

  // Community-block shape: relative within/across intensities (the absolute
  // level is set by target_mass) over r equal communities.
  double sbm_p_in = 2.0;
  double sbm_p_out = 1.0;

  // Heavy-rows shape: the first heavy_count rows are boosted by heavy_boost
  // before rescaling to target_mass.
  int heavy_count = 0;
  double heavy_boost = 1.0;

  // Adversarial block-diagonal shape: all-1/2 blocks of side 2*n_max; the
  // declared rank bound becomes k / (2*n_max) and r is ignored.
  int n_max = 1;
};

/// Deterministically builds M from the recipe. Validates that target_mass is
/// achievable under the family's entry bound (e.g. Bernoulli mass <= k^2) and
/// that shape-specific divisibility constraints hold.
ModelMatrix gen_model(const ModelSpec& spec);

struct SampleOptions {
  /// Distribution family only: draw the n observations as one exact
  /// multinomial over the entries instead of independent Poissons.
  bool exact_multinomial = false;
  /// Collab family only: noise law around the observed rating's mean.
  CollabNoise collab_noise = CollabNoise::kUniform;
};

/// Draws one observation X ~ M. The same (model, seed) pair yields a
/// bit-identical X. Entries with M_ij = 0 consume no randomness, so dense and
/// sparse storage of the same matrix sample identically; entries are visited
/// in column-major order.
Observation sample(const ModelMatrix& model, std::uint64_t seed);
Observation sample(const ModelMatrix& model, std::uint64_t seed, const SampleOptions& options);

}  // namespace cursvd
