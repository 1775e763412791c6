#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evcs/calibration.hpp"
#include "evcs/msa_solver.hpp"
#include "evcs/network.hpp"
#include "evcs/scenario.hpp"

// Request decoding and result payloads shared by the CLI and the HTTP
// service, so both paths produce the same bytes for the same input.

namespace evcs::app {

struct SolveRequest {
  Network network;
  SolverConfig solver;
  std::vector<std::string> warnings;
};

struct CalibrateRequest {
  Network network;
  SolverConfig solver;
  CalibrationSpec spec;
  std::vector<double> curve_factors;
  std::vector<std::string> warnings;
};

struct CompareRequest {
  Network network;
  SolverConfig solver;
  std::vector<ScenarioSpec> scenarios;
  std::vector<std::string> warnings;
};

/// The network may be given inline under "network" or, when the body has
/// "nodes" at top level, as the body itself. Field paths in errors are
/// relative to the request body.
SolveRequest parse_solve_request(const nlohmann::json& body);
CalibrateRequest parse_calibrate_request(const nlohmann::json& body);
CompareRequest parse_compare_request(const nlohmann::json& body);

nlohmann::json solve_payload(const SolveRequest& req, const ProgressCallback& progress = {});
nlohmann::json calibrate_payload(const CalibrateRequest& req,
                                 const ProgressCallback& progress = {});
nlohmann::json compare_payload(const CompareRequest& req, const ProgressCallback& progress = {});

/// Station ids from a solve payload's embedded rankings.
std::optional<std::vector<std::string>> ranking_from_payload(const nlohmann::json& payload,
                                                             RankCriterion criterion,
                                                             bool level2_only);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace evcs::app
