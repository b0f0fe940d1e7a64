#include <benchmark/benchmark.h>

#include <random>

#include "adasel/gfk.hpp"
#include "adasel/profile.hpp"
#include "adasel/runtime.hpp"
#include "adasel/subspace.hpp"

namespace {

using namespace adasel;

Matrix gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  return Matrix::NullaryExpr(rows, cols, [&] { return normal(rng); });
}

SubspaceBasis random_subspace(std::mt19937_64& rng, int a, int b) {
  const Matrix q = gaussian(rng, a, b).householderQr().householderQ() * Matrix::Identity(a, b);
  return SubspaceBasis::from_orthonormal(q);
}

DesignProfile random_profile(std::mt19937_64& rng, int a, int b, int m) {
  DesignProfile profile;
  profile.config.ambient_dim = a;
  profile.config.subspace_dim = b;
  for (int i = 0; i < m; ++i) {
    ScenarioProfile s;
    s.scenario_id = "s" + std::to_string(i);
    s.subspace = random_subspace(rng, a, b);
    s.representative_feature = gaussian(rng, a, 1).col(0);
    profile.scenarios.push_back(std::move(s));
  }
  return profile;
}

// Args: ambient dim, subspace dim, scenario count.
void BM_MatchScenario(benchmark::State& state) {
  std::mt19937_64 rng(7);
  const int a = static_cast<int>(state.range(0));
  const int b = static_cast<int>(state.range(1));
  const DesignProfile profile = random_profile(rng, a, b, static_cast<int>(state.range(2)));
  const Matrix frames = gaussian(rng, 30, a);
  for (auto _ : state) {
    const TimeWindow window = build_window(frames, b);
    benchmark::DoNotOptimize(match_scenario(window, profile));
  }
}
BENCHMARK(BM_MatchScenario)->Args({64, 5, 5})->Args({1288, 20, 15})->Unit(benchmark::kMillisecond);

void BM_GfkKernel(benchmark::State& state) {
  std::mt19937_64 rng(8);
  const int a = static_cast<int>(state.range(0));
  const int b = static_cast<int>(state.range(1));
  const SubspaceBasis x = random_subspace(rng, a, b);
  const SubspaceBasis z = random_subspace(rng, a, b);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gfk_kernel(principal_angles(x, z), x));
  }
}
BENCHMARK(BM_GfkKernel)->Args({64, 5})->Args({1288, 20})->Unit(benchmark::kMicrosecond);

void BM_KernelDistance(benchmark::State& state) {
  std::mt19937_64 rng(9);
  const int a = static_cast<int>(state.range(0));
  const SubspaceBasis x = random_subspace(rng, a, 20);
  const GeodesicKernel k = gfk_kernel(principal_angles(x, random_subspace(rng, a, 20)), x);
  const Vector t = gaussian(rng, a, 1).col(0);
  const Vector r = gaussian(rng, a, 1).col(0);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_distance(t, r, k));
}
BENCHMARK(BM_KernelDistance)->Arg(1288);

void BM_PcaBasis(benchmark::State& state) {
  std::mt19937_64 rng(10);
  const Matrix samples = gaussian(rng, state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(pca_basis(samples, 20));
}
BENCHMARK(BM_PcaBasis)->Args({30, 1288})->Args({600, 1288})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
