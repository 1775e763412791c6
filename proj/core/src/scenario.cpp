#include "evcs/scenario.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "evcs/error.hpp"

namespace evcs {

SystemMetrics system_metrics(const EquilibriumResult& result, const Network& network) {
  SystemMetrics m;
  const auto& d = network.travel().values;
  const auto& stations = network.stations();
  double demand = 0.0;
  for (std::size_t i = 0; i < network.node_count(); ++i) {
    const double lambda = network.nodes()[i].arrival_rate;
    demand += lambda;
    for (std::size_t j = 0; j < network.station_count(); ++j) {
      const double flow = lambda * result.assignment(i, j);
      const double access = d(i, j) + result.station_delays[j].wait_queue_mdc;
      m.total_access_time += flow * access;
      m.total_access_plus_charging += flow * (access + stations[j].service_time());
    }
  }
  if (demand <= 0.0) {
    m.zero_demand = true;
    return m;
  }
  m.avg_access_time_min = m.total_access_time / demand * kMinutesPerDay;
  m.avg_access_plus_charging_h = m.total_access_plus_charging / demand * kHoursPerDay;
  return m;
}

RankCriterion rank_criterion_from_string(std::string_view s) {
  if (s == "utilization") return RankCriterion::Utilization;
  if (s == "queue_delay" || s == "queue-delay") return RankCriterion::QueueDelay;
  fail(ErrorKind::InvalidInput, fmt::format("unknown ranking criterion '{}'", s));
}

std::vector<std::string> rank_stations(const EquilibriumResult& result, const Network& network,
                                       RankCriterion criterion,
                                       std::optional<ChargerClass> filter) {
  const auto& stations = network.stations();
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < stations.size(); ++j) {
    if (!filter || stations[j].charger_class == *filter) idx.push_back(j);
  }
  auto metric = [&](std::size_t j) {
    const auto& q = result.station_delays[j];
    return criterion == RankCriterion::Utilization ? q.utilization : q.wait_queue_mdc;
  };
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double ma = metric(a);
    const double mb = metric(b);
    if (ma != mb) return ma > mb;
    return stations[a].id < stations[b].id;
  });
  std::vector<std::string> ids;
  ids.reserve(idx.size());
  for (const auto j : idx) ids.push_back(stations[j].id);
  return ids;
}

std::string dcfc_station_id(std::string_view station_id) {
  return fmt::format("{}#dcfc", station_id);
}

Network apply_upgrade(const Network& network, const ScenarioSpec& spec) {
  if (!(spec.dcfc_service_rate > 0.0)) {
    fail(ErrorKind::InvalidInput,
         fmt::format("scenario '{}': dcfc_service_rate must be positive", spec.name));
  }
  std::vector<std::size_t> sources;
  std::unordered_set<std::string> seen;
  for (const auto& up : spec.upgrades) {
    const auto j = network.station_index(up.station_id);
    if (!j) {
      fail(ErrorKind::InvalidInput,
           fmt::format("scenario '{}': unknown station id '{}'", spec.name, up.station_id));
    }
    if (up.dcfc_count < 1) {
      fail(ErrorKind::InvalidInput, fmt::format("scenario '{}': dcfc_count for '{}' must be >= 1",
                                                spec.name, up.station_id));
    }
    if (!seen.insert(up.station_id).second) {
      fail(ErrorKind::InvalidInput, fmt::format("scenario '{}': station '{}' upgraded twice",
                                                spec.name, up.station_id));
    }
    sources.push_back(*j);
  }
  if (spec.upgrades.empty()) return network;

  auto stations = network.stations();
  for (std::size_t u = 0; u < spec.upgrades.size(); ++u) {
    const Station& src = network.stations()[sources[u]];
    stations.push_back({dcfc_station_id(src.id), src.x, src.y, spec.upgrades[u].dcfc_count,
                        spec.dcfc_service_rate, ChargerClass::Dcfc});
  }

  const auto& old = network.travel().values;
  TravelTimeMatrix travel{Matrix(old.rows(), stations.size()), network.travel().provenance};
  for (std::size_t i = 0; i < old.rows(); ++i) {
    for (std::size_t j = 0; j < old.cols(); ++j) travel.values(i, j) = old(i, j);
    for (std::size_t u = 0; u < sources.size(); ++u) {
      travel.values(i, old.cols() + u) = old(i, sources[u]);
    }
  }
  return Network(network.nodes(), std::move(stations), std::move(travel), network.settings());
}

std::vector<ScenarioSpec> strategy_scenarios(const EquilibriumResult& base_result,
                                             const Network& base, RankCriterion criterion,
                                             const std::vector<int>& batch_sizes,
                                             const std::string& prefix, double dcfc_service_rate) {
  const auto ranking = rank_stations(base_result, base, criterion, ChargerClass::Level2);
  std::vector<ScenarioSpec> out;
  for (std::size_t b = 0; b < batch_sizes.size(); ++b) {
    const int n = batch_sizes[b];
    if (n < 1 || static_cast<std::size_t>(n) > ranking.size()) {
      fail(ErrorKind::InvalidInput,
           fmt::format("batch size {} outside [1, {}] Level 2 stations", n, ranking.size()));
    }
    ScenarioSpec spec{fmt::format("{}{}", prefix, b + 1), {}, dcfc_service_rate};
    for (int k = 0; k < n; ++k) spec.upgrades.push_back({ranking[static_cast<std::size_t>(k)], 1});
    out.push_back(std::move(spec));
  }
  return out;
}

namespace {

ComparisonRow run_row(const std::string& name, const Network& network, const SolverConfig& cfg,
                      const ProgressCallback& progress) {
  ComparisonRow row;
  row.scenario = name;
  row.stations = network.station_count();
  const auto result = solve_equilibrium(network, cfg, progress);
  row.ok = true;
  row.metrics = system_metrics(result, network);
  row.iterations = result.iterations;
  row.final_epsilon = result.final_epsilon;
  row.wardrop_gap = result.wardrop_gap;
  row.converged = result.converged;
  return row;
}

}  // namespace

ComparisonReport compare_scenarios(const Network& base, const std::vector<ScenarioSpec>& scenarios,
                                   const SolverConfig& solver_cfg,
                                   const ProgressCallback& progress) {
  ComparisonReport report;
  report.rows.push_back(run_row("base", base, solver_cfg, progress));
  for (const auto& spec : scenarios) {
    try {
      report.rows.push_back(run_row(spec.name, apply_upgrade(base, spec), solver_cfg, progress));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Cancelled) throw;
      ComparisonRow failed;
      failed.scenario = spec.name;
      failed.error = e.what();
      report.rows.push_back(std::move(failed));
    }
  }
  return report;
}

void write_comparison_csv(std::ostream& os, const ComparisonReport& report) {
  os << "scenario,status,system_total_access_time_day,system_total_access_plus_charging_day,"
        "average_access_time_min,average_access_plus_charging_hour,iterations,final_epsilon,"
        "wardrop_gap,converged\n";
  for (const auto& r : report.rows) {
    if (!r.ok) {
      fmt::print(os, "{},failed,,,,,,,,\n", r.scenario);
      continue;
    }
    fmt::print(os, "{},ok,{},{},{},{},{},{},{},{}\n", r.scenario, r.metrics.total_access_time,
               r.metrics.total_access_plus_charging, r.metrics.avg_access_time_min,
               r.metrics.avg_access_plus_charging_h, r.iterations, r.final_epsilon, r.wardrop_gap,
               r.converged);
  }
}

}  // namespace evcs
