#include "cursvd/curated.hpp"
#include "cursvd/models.hpp"
#include "cursvd/regularization.hpp"
#include "cursvd/spectral.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace {

using namespace cursvd;

Eigen::MatrixXd gaussian(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) a(i, j) = normal(rng);
  return a;
}

ModelMatrix bench_model(int k, double mass) {
  ModelSpec spec;
  spec.kind = ModelKind::poisson();
  spec.k = k;
  spec.r = 2;
  spec.target_mass = mass;
  spec.seed = 7;
  return gen_model(spec);
}

void bm_truncated_svd(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const bool randomized = state.range(1) != 0;
  const Eigen::MatrixXd a = gaussian(k, k, 11);
  SvdOptions options;
  options.dense_threshold = randomized ? 16 : 4096;
  for (auto _ : state) {
    benchmark::DoNotOptimize(truncated_svd(a, 4, options));
  }
  state.SetLabel(randomized ? "randomized" : "exact");
}
BENCHMARK(bm_truncated_svd)
    ->Args({128, 0})
    ->Args({128, 1})
    ->Args({512, 0})
    ->Args({512, 1})
    ->Unit(benchmark::kMillisecond);

void bm_spectral_norm_power(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Eigen::MatrixXd a = gaussian(k, k, 13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral_norm(a));
  }
}
BENCHMARK(bm_spectral_norm_power)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void bm_greedy_knapsack(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uniform(0.5, 10.0);
  std::vector<double> values(n);
  std::vector<double> weights(n);
  for (int i = 0; i < n; ++i) {
    values[i] = uniform(rng);
    weights[i] = uniform(rng);
  }
  const double capacity = 0.25 * n;
  for (auto _ : state) {
    benchmark::DoNotOptimize(greedy_knapsack(values, weights, capacity));
  }
}
BENCHMARK(bm_greedy_knapsack)->Arg(64)->Arg(1024)->Unit(benchmark::kMicrosecond);

void bm_sample_poisson(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const ModelMatrix model = bench_model(k, 64.0 * k);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample(model, ++seed));
  }
}
BENCHMARK(bm_sample_poisson)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void bm_regularize(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const ModelMatrix model = bench_model(k, 64.0 * k);
  const Observation obs = sample(model, 3);
  const RegWeights w = compute_weights(obs, obs.total_mass() / k);
  for (auto _ : state) {
    benchmark::DoNotOptimize(regularize(obs.dense_entries(), w));
  }
}
BENCHMARK(bm_regularize)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void bm_curated_recover(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const ModelMatrix model = bench_model(k, 64.0 * k);
  const Observation obs = sample(model, 5);
  CuratedConfig cfg;
  cfg.rank = 2;
  cfg.seed = 9;
  cfg.restarts = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(curated_svd(obs, cfg));
  }
}
BENCHMARK(bm_curated_recover)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
