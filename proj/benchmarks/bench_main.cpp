#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "qmqfc/dlcz.hpp"
#include "qmqfc/event_sim.hpp"
#include "qmqfc/fit.hpp"

using namespace qmqfc;

static void BM_Simulate(benchmark::State& state) {
  SimulationConfig c;
  c.n_trials = static_cast<std::uint64_t>(state.range(0));
  c.workers = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    c.seed++;
    benchmark::DoNotOptimize(simulate(c));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Args({1'000'000, 1})->Args({1'000'000, 4})->UseRealTime()->Unit(benchmark::kMillisecond);

static void BM_ConversionRun(benchmark::State& state) {
  ConversionRun run;
  run.n_trials = 1'000'000;
  for (auto _ : state) {
    run.seed++;
    benchmark::DoNotOptimize(simulate_conversion(run));
  }
  state.SetItemsProcessed(state.iterations() * 1'000'000);
}
BENCHMARK(BM_ConversionRun)->Unit(benchmark::kMillisecond);

static void BM_DephasingOverlap(benchmark::State& state) {
  const auto deph = default_dephasing();
  for (auto _ : state) {
    benchmark::DoNotOptimize(dephasing_overlap_mc(10'000, deph, deph.tau(), 10, 1));
  }
  state.SetItemsProcessed(state.iterations() * 100'000);
}
BENCHMARK(BM_DephasingOverlap)->Unit(benchmark::kMicrosecond);

static void BM_GaussianFit(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<DataPoint> pts;
  for (int i = 0; i < 12; ++i) {
    const double t = 60e-6 * i / 11.0;
    const double y = 0.08 * std::exp(-t * t / (23.6e-6 * 23.6e-6)) + 0.002;
    pts.push_back({t, y * (1.0 + 0.05 * n(rng)), 0.05 * y});
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_gaussian_decay(pts));
}
BENCHMARK(BM_GaussianFit)->Unit(benchmark::kMicrosecond);
