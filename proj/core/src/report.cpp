#include "evcs/report.hpp"

#include <cmath>

#include <fmt/format.h>

#include "evcs/error.hpp"

namespace evcs {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(json(std::vector<double>(r.begin(), r.end())));
  }
  return rows;
}

[[noreturn]] void bad_field(const std::string& path, const std::string& what) {
  fail(ErrorKind::InvalidInput, fmt::format("{}: {}", path, what));
}

double number_field(const json& obj, const char* key, double fallback, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) bad_field(path + "." + key, "expected a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) bad_field(path + "." + key, "expected a finite number");
  return v;
}

std::int64_t integer_field(const json& obj, const char* key, std::int64_t fallback,
                           const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (it->is_number_integer()) return it->get<std::int64_t>();
  if (it->is_number_float()) {
    const double d = it->get<double>();
    if (std::isfinite(d) && d == std::floor(d)) return static_cast<std::int64_t>(d);
  }
  bad_field(path + "." + key, "expected an integer");
}

}  // namespace

json queue_delays_to_json(const QueueDelays& q) {
  return {{"rho", q.utilization},
          {"wq_mmc_days", q.wait_queue_mmc},
          {"wq_mdc_days", q.wait_queue_mdc},
          {"w_total_days", q.total_wait_mdc},
          {"over_capacity", q.over_capacity}};
}

json system_metrics_to_json(const SystemMetrics& m) {
  return {{"system_total_access_time_day", m.total_access_time},
          {"system_total_access_plus_charging_day", m.total_access_plus_charging},
          {"average_access_time_min", m.avg_access_time_min},
          {"average_access_plus_charging_hour", m.avg_access_plus_charging_h},
          {"zero_demand", m.zero_demand}};
}

json equilibrium_to_json(const EquilibriumResult& result, const Network& network) {
  json doc;
  doc["converged"] = result.converged;
  doc["iterations"] = result.iterations;
  doc["final_epsilon"] = result.final_epsilon;
  doc["wardrop_gap"] = result.wardrop_gap;
  doc["assignment"] = matrix_to_json(result.assignment);
  doc["costs"] = matrix_to_json(result.costs);

  json stations = json::array();
  for (std::size_t j = 0; j < network.station_count(); ++j) {
    const auto& s = network.stations()[j];
    const auto& q = result.station_delays[j];
    stations.push_back({{"id", s.id},
                        {"charger_class", std::string(to_string(s.charger_class))},
                        {"chargers", s.chargers},
                        {"flow", result.flows[j]},
                        {"rho", q.utilization},
                        {"wq_days", q.wait_queue_mdc},
                        {"w_days", q.total_wait_mdc},
                        {"over_capacity", q.over_capacity}});
  }
  doc["station_report"] = std::move(stations);

  json nodes = json::array();
  const auto& d = network.travel().values;
  for (std::size_t i = 0; i < network.node_count(); ++i) {
    double access = 0.0;
    double total = 0.0;
    for (std::size_t j = 0; j < network.station_count(); ++j) {
      const double x = result.assignment(i, j);
      const double a = d(i, j) + result.station_delays[j].wait_queue_mdc;
      access += x * a;
      total += x * (a + network.stations()[j].service_time());
    }
    nodes.push_back({{"id", network.nodes()[i].id},
                     {"access_time_min", access * kMinutesPerDay},
                     {"total_time_min", total * kMinutesPerDay}});
  }
  doc["node_report"] = std::move(nodes);
  doc["system_metrics"] = system_metrics_to_json(system_metrics(result, network));
  doc["warnings"] = result.warnings;
  return doc;
}

json comparison_to_json(const ComparisonReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json row{{"scenario", r.scenario}, {"status", r.ok ? "ok" : "failed"}};
    if (r.ok) {
      row["metrics"] = system_metrics_to_json(r.metrics);
      row["iterations"] = r.iterations;
      row["final_epsilon"] = r.final_epsilon;
      row["wardrop_gap"] = r.wardrop_gap;
      row["converged"] = r.converged;
      row["stations"] = r.stations;
    } else {
      row["error"] = r.error;
    }
    rows.push_back(std::move(row));
  }
  return {{"rows", std::move(rows)}};
}

json calibration_to_json(const CalibrationResult& result) {
  return {{"factor", result.factor},
          {"days_per_charge", result.days_per_charge},
          {"achieved_utilization", result.achieved_utilization},
          {"evaluations", result.evaluations},
          {"warnings", result.warnings}};
}

json curve_to_json(const std::vector<CurvePoint>& curve) {
  json rows = json::array();
  for (const auto& p : curve) {
    rows.push_back({{"factor", p.factor},
                    {"days_per_charge", p.days_per_charge},
                    {"mean_utilization", p.mean_utilization}});
  }
  return rows;
}

SolverConfig solver_config_from_json(const json& j) {
  SolverConfig cfg;
  if (j.is_null()) return cfg;
  if (!j.is_object()) bad_field("$.solver", "expected an object");
  const std::string path = "$.solver";
  cfg.tolerance = number_field(j, "tolerance", cfg.tolerance, path);
  cfg.max_iterations = integer_field(j, "max_iterations", cfg.max_iterations, path);
  cfg.weight_access = number_field(j, "weight_access", cfg.weight_access, path);
  cfg.weight_charging = number_field(j, "weight_charging", cfg.weight_charging, path);
  cfg.gap_check_period = integer_field(j, "gap_check_period", cfg.gap_check_period, path);
  cfg.validate();
  return cfg;
}

CalibrationSpec calibration_spec_from_json(const json& j) {
  CalibrationSpec spec;
  if (j.is_null()) return spec;
  if (!j.is_object()) bad_field("$.calibration", "expected an object");
  const std::string path = "$.calibration";
  spec.target_utilization = number_field(j, "target_utilization", spec.target_utilization, path);
  spec.tolerance = number_field(j, "tolerance", spec.tolerance, path);
  spec.factor_low = number_field(j, "factor_low", spec.factor_low, path);
  spec.factor_high = number_field(j, "factor_high", spec.factor_high, path);
  spec.max_evals = static_cast<int>(integer_field(j, "max_evals", spec.max_evals, path));
  if (auto it = j.find("weighted"); it != j.end()) {
    if (!it->is_boolean()) bad_field(path + ".weighted", "expected a boolean");
    spec.averaging =
        it->get<bool>() ? UtilizationAverage::ChargerWeighted : UtilizationAverage::Unweighted;
  }
  spec.validate();
  return spec;
}

std::vector<ScenarioSpec> scenarios_from_json(const json& j) {
  const json* list = &j;
  std::string root = "$";
  if (j.is_object()) {
    auto it = j.find("scenarios");
    if (it == j.end()) bad_field("$.scenarios", "required field missing");
    list = &*it;
    root = "$.scenarios";
  }
  if (!list->is_array()) bad_field(root, "expected an array");

  std::vector<ScenarioSpec> out;
  for (std::size_t s = 0; s < list->size(); ++s) {
    const auto path = fmt::format("{}[{}]", root, s);
    const json& js = (*list)[s];
    if (!js.is_object()) bad_field(path, "expected an object");
    ScenarioSpec spec;
    auto name = js.find("name");
    if (name == js.end() || !name->is_string()) bad_field(path + ".name", "expected a string");
    spec.name = name->get<std::string>();
    spec.dcfc_service_rate = number_field(js, "dcfc_service_rate", spec.dcfc_service_rate, path);
    auto ups = js.find("upgrades");
    if (ups == js.end() || !ups->is_array()) bad_field(path + ".upgrades", "expected an array");
    for (std::size_t u = 0; u < ups->size(); ++u) {
      const auto upath = fmt::format("{}.upgrades[{}]", path, u);
      const json& ju = (*ups)[u];
      if (!ju.is_object()) bad_field(upath, "expected an object");
      auto id = ju.find("station_id");
      if (id == ju.end()) bad_field(upath + ".station_id", "required field missing");
      Upgrade up;
      if (id->is_string()) {
        up.station_id = id->get<std::string>();
      } else if (id->is_number_integer()) {
        up.station_id = std::to_string(id->get<std::int64_t>());
      } else {
        bad_field(upath + ".station_id", "expected a string id");
      }
      up.dcfc_count = static_cast<int>(integer_field(ju, "dcfc_count", 1, upath));
      if (up.dcfc_count < 1) bad_field(upath + ".dcfc_count", "must be >= 1");
      spec.upgrades.push_back(std::move(up));
    }
    out.push_back(std::move(spec));
  }
  return out;
}

json scenarios_to_json(const std::vector<ScenarioSpec>& scenarios) {
  json list = json::array();
  for (const auto& s : scenarios) {
    json ups = json::array();
    for (const auto& u : s.upgrades) {
      ups.push_back({{"station_id", u.station_id}, {"dcfc_count", u.dcfc_count}});
    }
    list.push_back(
        {{"name", s.name}, {"upgrades", std::move(ups)}, {"dcfc_service_rate", s.dcfc_service_rate}});
  }
  return {{"scenarios", std::move(list)}};
}

}  // namespace evcs
