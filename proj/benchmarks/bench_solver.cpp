#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "evcs/msa_solver.hpp"
#include "evcs/network.hpp"

namespace {

evcs::Network grid_city(int n_nodes, int n_stations, double load) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> coord(0.0, 20.0);
  std::uniform_int_distribution<int> chargers(1, 6);
  std::vector<evcs::Station> stations;
  double capacity = 0.0;
  for (int j = 0; j < n_stations; ++j) {
    stations.push_back({"s" + std::to_string(j), coord(gen), coord(gen), chargers(gen),
                        evcs::kLevel2ServiceRate, evcs::ChargerClass::Level2});
    capacity += stations.back().capacity();
  }
  std::vector<evcs::DemandNode> nodes;
  for (int i = 0; i < n_nodes; ++i) {
    nodes.push_back({"n" + std::to_string(i), coord(gen), coord(gen), 1, load * capacity / n_nodes});
  }
  auto travel = evcs::euclidean_travel_times(nodes, stations, 600.0);
  return {std::move(nodes), std::move(stations), std::move(travel),
          {evcs::DistanceMode::Euclidean, 600.0, 1.0}};
}

}  // namespace

static void BM_SolveEquilibrium(benchmark::State& state) {
  const auto net = grid_city(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 0.6);
  evcs::SolverConfig cfg;
  cfg.tolerance = 1e-3;
  std::int64_t iterations = 0;
  for (auto _ : state) {
    const auto r = evcs::solve_equilibrium(net, cfg);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.wardrop_gap);
  }
  state.counters["msa_iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_SolveEquilibrium)->Args({10, 5})->Args({50, 20})->Args({200, 50})
    ->Unit(benchmark::kMillisecond);

static void BM_MsaStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  evcs::Matrix x(n, n);
  evcs::Matrix y(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    y(i, i) = 1.0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(evcs::msa_step(x, y, 10));
}
BENCHMARK(BM_MsaStep)->Arg(16)->Arg(256);
