#include "prefband/confidence.hpp"
#include "prefband/logistic.hpp"
#include "prefband/rng.hpp"
#include "prefband/solver.hpp"

#include <benchmark/benchmark.h>

using namespace prefband;

namespace {

Dataset make_data(int d, int n, std::uint64_t seed) {
  RngStream rng(seed);
  const Vector theta = rng.unit_sphere(d);
  Dataset data;
  data.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Vector x = rng.unit_sphere(d);
    data.emplace_back(x, rng.bernoulli(sigmoid(x.dot(theta))) ? 1 : 0);
  }
  return data;
}

void BM_Sigmoid(benchmark::State& state) {
  double z = -20.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sigmoid(z));
    z += 1e-4;
    if (z > 20.0) z = -20.0;
  }
}
BENCHMARK(BM_Sigmoid);

void BM_LogLikelihood(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const Dataset data = make_data(d, n, 7);
  RngStream rng(8);
  const ModelParams params(rng.gaussian_vector(d), 1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_likelihood(params, data));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_LogLikelihood)->Args({4, 50})->Args({8, 200})->Args({16, 1000});

void BM_Hessian(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const Dataset data = make_data(d, n, 9);
  RngStream rng(10);
  const ModelParams params(rng.gaussian_vector(d), 1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hessian(params, data));
  }
}
BENCHMARK(BM_Hessian)->Args({4, 100})->Args({8, 200})->Args({16, 400});

void BM_FitMle(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const Dataset data = make_data(d, n, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_mle(data, 1.0));
  }
}
BENCHMARK(BM_FitMle)->Args({2, 50})->Args({8, 200})->Args({16, 400});

void BM_WarmStartRefit(benchmark::State& state) {
  // the per-round refit pattern of the adaptation loop
  const int d = 8;
  const Dataset data = make_data(d, 200, 12);
  const FitResult cold = fit_mle(data, 1.0);
  Dataset plus_one = data;
  plus_one.push_back(data.front());
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_mle(plus_one, 1.0, {}, 1.0, cold.estimate.theta));
  }
}
BENCHMARK(BM_WarmStartRefit);

void BM_TheoremRadius(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Dataset data = make_data(d, 200, 13);
  RngStream rng(14);
  const ModelParams params(rng.gaussian_vector(d), 1.0, 1.0);
  const HessianMatrix h = hessian(params, data);
  RadiusParams rp;
  rp.dim = d;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tail_radius(h, rp));
  }
}
BENCHMARK(BM_TheoremRadius)->Arg(4)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
