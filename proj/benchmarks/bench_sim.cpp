#include <benchmark/benchmark.h>

#include "evcs/mdc_sim.hpp"

static void BM_SimulateReplication(benchmark::State& state) {
  const int servers = static_cast<int>(state.range(0));
  const evcs::SimConfig cfg{0.9 * servers, 1.0, servers, 10000.0, 42, 1};
  for (auto _ : state) benchmark::DoNotOptimize(evcs::simulate_replication(cfg, 42));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.arrival_rate * cfg.horizon));
}
BENCHMARK(BM_SimulateReplication)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
