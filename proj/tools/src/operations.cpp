#include "evcs/app/operations.hpp"

#include <fstream>

#include <fmt/format.h>

#include "evcs/error.hpp"
#include "evcs/report.hpp"

namespace evcs::app {

using nlohmann::json;

namespace {

std::string rank_key(RankCriterion c, bool level2_only) {
  const char* base = c == RankCriterion::Utilization ? "utilization" : "queue_delay";
  return level2_only ? fmt::format("level2_{}", base) : std::string(base);
}

Network network_field(const json& body, std::vector<std::string>& warnings) {
  if (!body.is_object()) fail(ErrorKind::InvalidInput, "$: expected a JSON object");
  const bool wrapped = body.contains("network");
  const json& doc = wrapped ? body.at("network") : body;
  try {
    return network_from_json(doc, {}, &warnings);
  } catch (const Error& e) {
    std::string msg = e.what();
    if (wrapped && msg.rfind("$", 0) == 0) msg.replace(0, 1, "$.network");
    fail(e.kind(), msg);
  }
}

SolverConfig solver_field(const json& body) {
  SolverConfig cfg;
  if (auto it = body.find("solver"); it != body.end()) cfg = solver_config_from_json(*it);
  cfg.validate();
  return cfg;
}

json rankings(const EquilibriumResult& result, const Network& net) {
  json out = json::object();
  for (const auto c : {RankCriterion::Utilization, RankCriterion::QueueDelay}) {
    out[rank_key(c, false)] = rank_stations(result, net, c);
    out[rank_key(c, true)] = rank_stations(result, net, c, ChargerClass::Level2);
  }
  return out;
}

void append_warnings(json& payload, const std::vector<std::string>& warnings) {
  if (warnings.empty()) return;
  auto& list = payload["warnings"];
  if (!list.is_array()) list = json::array();
  for (const auto& w : warnings) list.push_back(w);
}

}  // namespace

SolveRequest parse_solve_request(const json& body) {
  std::vector<std::string> warnings;
  Network net = network_field(body, warnings);
  return {std::move(net), solver_field(body), std::move(warnings)};
}

CalibrateRequest parse_calibrate_request(const json& body) {
  std::vector<std::string> warnings;
  Network net = network_field(body, warnings);
  CalibrateRequest req{std::move(net), solver_field(body), {}, {}, std::move(warnings)};
  if (auto it = body.find("calibration"); it != body.end()) {
    req.spec = calibration_spec_from_json(*it);
  }
  req.spec.validate();
  if (auto it = body.find("curve_factors"); it != body.end()) {
    if (!it->is_array()) fail(ErrorKind::InvalidInput, "$.curve_factors: expected an array");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const json& v = (*it)[k];
      if (!v.is_number() || !(v.get<double>() > 0.0)) {
        fail(ErrorKind::InvalidInput,
             fmt::format("$.curve_factors[{}]: expected a positive number", k));
      }
      req.curve_factors.push_back(v.get<double>());
    }
  }
  return req;
}

CompareRequest parse_compare_request(const json& body) {
  std::vector<std::string> warnings;
  Network net = network_field(body, warnings);
  CompareRequest req{std::move(net), solver_field(body), {}, std::move(warnings)};
  auto it = body.find("scenarios");
  if (it == body.end()) fail(ErrorKind::InvalidInput, "$.scenarios: required");
  req.scenarios = scenarios_from_json(*it);
  return req;
}

json solve_payload(const SolveRequest& req, const ProgressCallback& progress) {
  const auto result = solve_equilibrium(req.network, req.solver, progress);
  json payload = equilibrium_to_json(result, req.network);
  payload["rankings"] = rankings(result, req.network);
  append_warnings(payload, req.warnings);
  return payload;
}

json calibrate_payload(const CalibrateRequest& req, const ProgressCallback& progress) {
  json payload = calibration_to_json(
      calibrate_frequency_factor(req.network, req.spec, req.solver, progress));
  if (!req.curve_factors.empty()) {
    payload["curve"] =
        curve_to_json(frequency_curve(req.network, req.curve_factors, req.solver,
                                      req.spec.averaging));
  }
  append_warnings(payload, req.warnings);
  return payload;
}

json compare_payload(const CompareRequest& req, const ProgressCallback& progress) {
  json payload = comparison_to_json(compare_scenarios(req.network, req.scenarios, req.solver,
                                                      progress));
  append_warnings(payload, req.warnings);
  return payload;
}

std::optional<std::vector<std::string>> ranking_from_payload(const json& payload,
                                                             RankCriterion criterion,
                                                             bool level2_only) {
  auto r = payload.find("rankings");
  if (r == payload.end()) return std::nullopt;
  auto list = r->find(rank_key(criterion, level2_only));
  if (list == r->end()) return std::nullopt;
  return list->get<std::vector<std::string>>();
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidInput, fmt::format("cannot open '{}'", path.string()));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::InvalidInput, fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace evcs::app
