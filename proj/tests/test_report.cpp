#include <doctest.h>

#include "evcs/error.hpp"
#include "evcs/report.hpp"
#include "support/instances.hpp"

using namespace evcs;
using nlohmann::json;

namespace {

std::string error_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("solver config from json") {
  const auto cfg = solver_config_from_json(
      json{{"tolerance", 1e-3}, {"max_iterations", 50}, {"weight_access", 2.0}});
  CHECK(cfg.tolerance == 1e-3);
  CHECK(cfg.max_iterations == 50);
  CHECK(cfg.weight_access == 2.0);
  CHECK(cfg.weight_charging == 1.0);
  CHECK(solver_config_from_json(json::object()).tolerance == SolverConfig{}.tolerance);
  CHECK(error_of([] { solver_config_from_json(json{{"tolerance", "x"}}); })
            .find("$.solver.tolerance") != std::string::npos);
}

TEST_CASE("calibration settings from json") {
  const auto spec = calibration_spec_from_json(
      json{{"target_utilization", 0.1}, {"factor_low", 0.01}, {"weighted", true}});
  CHECK(spec.target_utilization == 0.1);
  CHECK(spec.factor_low == 0.01);
  CHECK(spec.averaging == UtilizationAverage::ChargerWeighted);
  CHECK(error_of([] { calibration_spec_from_json(json{{"max_evals", 2.5}}); })
            .find("$.calibration.max_evals") != std::string::npos);
}

TEST_CASE("scenario list round trip") {
  const std::vector<ScenarioSpec> specs{{"A1", {{"cs01", 1}}, 48.0},
                                        {"B1", {{"cs02", 2}, {"cs05", 1}}, 40.0}};
  CHECK(scenarios_from_json(scenarios_to_json(specs)) == specs);
  CHECK(scenarios_from_json(scenarios_to_json(specs)["scenarios"]) == specs);
  CHECK(error_of([] {
          scenarios_from_json(json::parse(R"({"scenarios":[{"name":"x","upgrades":[{}]}]})"));
        }).find("$.scenarios[0].upgrades[0].station_id") != std::string::npos);
}

TEST_CASE("equilibrium payload") {
  const Network net = evcs::testing::random_small_instance(3);
  const auto r = solve_equilibrium(net, {});
  const json j = equilibrium_to_json(r, net);
  CHECK(j["converged"] == r.converged);
  CHECK(j["iterations"] == r.iterations);
  CHECK(j["assignment"].size() == net.node_count());
  CHECK(j["station_report"].size() == net.station_count());
  CHECK(j["node_report"].size() == net.node_count());
  for (std::size_t s = 0; s < net.station_count(); ++s) {
    CHECK(j["station_report"][s]["id"] == net.stations()[s].id);
    CHECK(j["station_report"][s]["rho"].get<double>() == r.station_delays[s].utilization);
  }
  CHECK(j["system_metrics"].contains("average_access_time_min"));
  CHECK(j.dump() == equilibrium_to_json(solve_equilibrium(net, {}), net).dump());
}
