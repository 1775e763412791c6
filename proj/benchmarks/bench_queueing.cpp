#include <benchmark/benchmark.h>

#include "evcs/queueing.hpp"

static void BM_StationTotalWait(benchmark::State& state) {
  const int servers = static_cast<int>(state.range(0));
  const evcs::QueueInput q{0.8 * servers * 6.0, 6.0, servers};
  for (auto _ : state) benchmark::DoNotOptimize(evcs::station_total_wait(q));
}
BENCHMARK(BM_StationTotalWait)->RangeMultiplier(4)->Range(1, 256);

static void BM_MmcQueueWait(benchmark::State& state) {
  const evcs::QueueInput q{7.0, 1.0, 10};
  for (auto _ : state) benchmark::DoNotOptimize(evcs::mmc_queue_wait(q));
}
BENCHMARK(BM_MmcQueueWait);
