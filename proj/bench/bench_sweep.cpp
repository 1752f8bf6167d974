// Serial reference vs OpenMP sweep over the default 18 x 3 grid.
#include <benchmark/benchmark.h>

#include "hppc/estimation.hpp"

namespace {

void BM_SweepSerial(benchmark::State& state) {
  const hppc::BatteryConfig cfg;
  const auto grid = hppc::default_soc_grid();
  const auto rates = hppc::default_c_rates();
  for (auto _ : state) benchmark::DoNotOptimize(hppc::soc_sweep_serial(cfg, grid, rates));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.size() * rates.size()));
}

void BM_SweepParallel(benchmark::State& state) {
  const hppc::BatteryConfig cfg;
  const auto grid = hppc::default_soc_grid();
  const auto rates = hppc::default_c_rates();
  for (auto _ : state) benchmark::DoNotOptimize(hppc::soc_sweep(cfg, grid, rates));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.size() * rates.size()));
}

void BM_CorrectedEstimate(benchmark::State& state) {
  const hppc::BatteryConfig cfg;
  const hppc::CurrentProfile pulse{{{30.0, -22.5}}};
  const auto series = hppc::run_profile(cfg, 0.5, pulse);
  const auto seg = hppc::extract_segment(series, 1, series.size() - 1);
  for (auto _ : state) benchmark::DoNotOptimize(hppc::estimate_corrected(seg, cfg.sampling_period_s));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CorrectedEstimate)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
