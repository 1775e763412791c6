#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "evcs/calibration.hpp"
#include "evcs/msa_solver.hpp"
#include "evcs/network.hpp"
#include "evcs/scenario.hpp"

// JSON wire formats shared by the CLI and the HTTP service. All payload
// times are days unless the key says otherwise (_min, _h).

namespace evcs {

/// { converged, iterations, final_epsilon, wardrop_gap, assignment, costs,
///   station_report[], node_report[], system_metrics{}, warnings[] }
nlohmann::json equilibrium_to_json(const EquilibriumResult& result, const Network& network);

nlohmann::json system_metrics_to_json(const SystemMetrics& m);
nlohmann::json queue_delays_to_json(const QueueDelays& q);
nlohmann::json comparison_to_json(const ComparisonReport& report);
nlohmann::json calibration_to_json(const CalibrationResult& result);
nlohmann::json curve_to_json(const std::vector<CurvePoint>& curve);

/// Missing keys keep their defaults; wrong types raise Error(InvalidInput)
/// with the field path.
SolverConfig solver_config_from_json(const nlohmann::json& j);
CalibrationSpec calibration_spec_from_json(const nlohmann::json& j);

/// Accepts { "scenarios": [...] } or a bare array.
std::vector<ScenarioSpec> scenarios_from_json(const nlohmann::json& j);
nlohmann::json scenarios_to_json(const std::vector<ScenarioSpec>& scenarios);

}  // namespace evcs
