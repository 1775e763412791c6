#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evcs/msa_solver.hpp"
#include "evcs/network.hpp"

namespace evcs {

inline constexpr double kMinutesPerDay = 1440.0;
inline constexpr double kHoursPerDay = 24.0;

/// Reporting quantities at equilibrium. Totals are vehicle-days per day;
/// access time is travel plus queue delay, charging adds 1/mu. Raw times are
/// used regardless of the solver's cost weights.
struct SystemMetrics {
  double total_access_time = 0.0;
  double total_access_plus_charging = 0.0;
  double avg_access_time_min = 0.0;
  double avg_access_plus_charging_h = 0.0;
  bool zero_demand = false;

  bool operator==(const SystemMetrics&) const = default;
};

SystemMetrics system_metrics(const EquilibriumResult& result, const Network& network);

enum class RankCriterion { Utilization, QueueDelay };
RankCriterion rank_criterion_from_string(std::string_view s);  // "utilization" | "queue_delay"

/// Station ids sorted by descending rho_j or Wq_j, ties by id ascending.
std::vector<std::string> rank_stations(const EquilibriumResult& result, const Network& network,
                                       RankCriterion criterion,
                                       std::optional<ChargerClass> filter = std::nullopt);

struct Upgrade {
  std::string station_id;
  int dcfc_count = 1;

  bool operator==(const Upgrade&) const = default;
};

struct ScenarioSpec {
  std::string name;
  std::vector<Upgrade> upgrades;
  double dcfc_service_rate = kDcfcServiceRate;

  bool operator==(const ScenarioSpec&) const = default;
};

/// Id given to the DCFC station co-located with `station_id`.
std::string dcfc_station_id(std::string_view station_id);

/// Adds, for each upgrade, a new DCFC station at the upgraded station's
/// location with its own queue and a copy of its travel-time column. The
/// original station is kept.
Network apply_upgrade(const Network& network, const ScenarioSpec& spec);

/// Nested scenarios `<prefix>1, <prefix>2, ...` adding one DCFC to each of
/// the top-n Level 2 stations of the base ranking, one scenario per n.
std::vector<ScenarioSpec> strategy_scenarios(const EquilibriumResult& base_result,
                                             const Network& base, RankCriterion criterion,
                                             const std::vector<int>& batch_sizes,
                                             const std::string& prefix,
                                             double dcfc_service_rate = kDcfcServiceRate);

struct ComparisonRow {
  std::string scenario;
  bool ok = false;
  std::string error;
  SystemMetrics metrics;
  std::int64_t iterations = 0;
  double final_epsilon = 0.0;
  double wardrop_gap = 0.0;
  bool converged = false;
  std::size_t stations = 0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;  // base first, then scenarios in order
};

/// Solves the base and every scenario. A failing scenario is reported as a
/// failed row; the others still run.
ComparisonReport compare_scenarios(const Network& base, const std::vector<ScenarioSpec>& scenarios,
                                   const SolverConfig& solver_cfg,
                                   const ProgressCallback& progress = {});

void write_comparison_csv(std::ostream& os, const ComparisonReport& report);

}  // namespace evcs
