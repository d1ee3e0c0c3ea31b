#include "prefband/logistic.hpp"
#include "prefband/mf.hpp"
#include "prefband/rng.hpp"
#include "prefband/selection.hpp"

#include <benchmark/benchmark.h>

using namespace prefband;

namespace {

void BM_SelectFromPool(benchmark::State& state) {
  const int d = 8;
  const int pool_size = static_cast<int>(state.range(0));
  RngStream rng(21);
  std::vector<Vector> cands;
  for (int i = 0; i < pool_size; ++i) cands.push_back(rng.uniform() * rng.unit_sphere(d));
  const CandidatePool pool(std::move(cands));

  Dataset data;
  const Vector theta = rng.unit_sphere(d);
  for (int i = 0; i < 60; ++i) {
    Vector x = rng.unit_sphere(d);
    data.emplace_back(x, rng.bernoulli(sigmoid(x.dot(theta))) ? 1 : 0);
  }
  const HessianMatrix h = hessian(ModelParams(theta, 1.0, 1.0), data);

  for (auto _ : state) {
    benchmark::DoNotOptimize(select_from_pool(pool, h));
  }
  state.SetItemsProcessed(state.iterations() * pool_size);
}
BENCHMARK(BM_SelectFromPool)->Arg(100)->Arg(1000);

void BM_OptimalDirection(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  RngStream rng(22);
  Dataset data;
  const Vector theta = rng.unit_sphere(d);
  for (int i = 0; i < 100; ++i) {
    Vector x = rng.unit_sphere(d);
    data.emplace_back(x, rng.bernoulli(sigmoid(x.dot(theta))) ? 1 : 0);
  }
  const HessianMatrix h = hessian(ModelParams(theta, 1.0, 1.0), data);
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimal_direction(h));
  }
}
BENCHMARK(BM_OptimalDirection)->Arg(4)->Arg(16);

void BM_MfSweep(benchmark::State& state) {
  const int n_users = static_cast<int>(state.range(0));
  const int n_items = static_cast<int>(state.range(1));
  RngStream rng(23);

  FactorizationModel truth;
  truth.user_factors = Matrix(3, n_users);
  truth.item_factors = Matrix(3, n_items);
  for (int u = 0; u < n_users; ++u) truth.user_factors.col(u) = rng.ball(3, 1.5);
  for (int m = 0; m < n_items; ++m) truth.item_factors.col(m) = rng.ball(3, 1.5);
  const Matrix p = truth.probabilities();
  std::vector<RawPreference> raw;
  for (int i = 0; i < n_users; ++i)
    for (int j = 0; j < n_items; ++j) raw.push_back({i, j, rng.bernoulli(p(i, j)) ? 1.0 : 0.0});
  const PreferenceData data = PreferenceData::from_raw(raw, n_users, n_items);
  const FactorizationModel init = svd_init(data, 3);

  MfFitConfig one_sweep;
  one_sweep.max_sweeps = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_logistic_mf(data, init, 0.05, 1.5, one_sweep));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(data.entries().size()));
}
BENCHMARK(BM_MfSweep)->Args({25, 100})->Args({100, 400});

void BM_SvdInit(benchmark::State& state) {
  const int n_users = static_cast<int>(state.range(0));
  const int n_items = static_cast<int>(state.range(1));
  RngStream rng(24);
  std::vector<RawPreference> raw;
  for (int i = 0; i < n_users; ++i)
    for (int j = 0; j < n_items; ++j) raw.push_back({i, j, rng.bernoulli(0.5) ? 1.0 : 0.0});
  const PreferenceData data = PreferenceData::from_raw(raw, n_users, n_items);
  for (auto _ : state) {
    benchmark::DoNotOptimize(svd_init(data, 3));
  }
}
BENCHMARK(BM_SvdInit)->Args({25, 100})->Args({100, 400});

}  // namespace

BENCHMARK_MAIN();
