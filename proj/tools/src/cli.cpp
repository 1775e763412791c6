#include "evcs/app/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "evcs/app/operations.hpp"
#include "evcs/app/service.hpp"
#include "evcs/calibration.hpp"
#include "evcs/error.hpp"
#include "evcs/mdc_sim.hpp"
#include "evcs/queueing.hpp"
#include "evcs/report.hpp"
#include "evcs/scenario.hpp"

namespace evcs::app {

using nlohmann::json;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::ZeroArrival:
    case ErrorKind::OverCapacity:
    case ErrorKind::UnbracketedTarget:
      return 1;
    case ErrorKind::Numeric:
    case ErrorKind::NotConverged:
    case ErrorKind::Cancelled:
      return 2;
  }
  return 2;
}

std::vector<double> default_rho_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 19; ++k) grid.push_back(0.05 * k);
  return grid;
}

std::vector<double> default_curve_factors() {
  std::vector<double> factors;
  for (const double days : {0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 7.0, 10.0, 15.0, 20.0, 30.0}) {
    factors.push_back(1.0 / days);
  }
  return factors;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) fail(ErrorKind::InvalidInput, fmt::format("cannot write '{}'", path));
  f << text;
}

struct SolverFlags {
  double tolerance = SolverConfig{}.tolerance;
  std::int64_t max_iterations = SolverConfig{}.max_iterations;
  double weight_access = 1.0;
  double weight_charging = 1.0;

  void attach(CLI::App* cmd, const std::string& tolerance_flag = "--tolerance") {
    cmd->add_option(tolerance_flag, tolerance, "MSA convergence threshold on ||X^n - X^(n-1)||")
        ->capture_default_str();
    cmd->add_option("--max-iterations", max_iterations)->capture_default_str();
    cmd->add_option("--weight-access", weight_access)->capture_default_str();
    cmd->add_option("--weight-charging", weight_charging)->capture_default_str();
  }

  json to_json() const {
    return {{"tolerance", tolerance},
            {"max_iterations", max_iterations},
            {"weight_access", weight_access},
            {"weight_charging", weight_charging}};
  }
};

json with_network(const std::string& path) { return {{"network", read_json_file(path)}}; }

void print_warnings(std::ostream& err, const json& payload) {
  if (auto it = payload.find("warnings"); it != payload.end()) {
    for (const auto& w : *it) fmt::print(err, "warning: {}\n", w.get<std::string>());
  }
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"EV charging station equilibrium toolkit", "evcs"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 42;
  app.add_option("--seed", seed, "Seed for every random stream")->capture_default_str();

  // queue
  QueueInput q;
  auto* queue = app.add_subcommand("queue", "Evaluate one station's M/M/C and M/D/C delays");
  queue->add_option("--lambda", q.arrival_rate, "Arrivals per day")->required();
  queue->add_option("--mu", q.service_rate, "Services per day per charger")->required();
  queue->add_option("--servers", q.servers)->required();

  // sim
  SimConfig sim{0.0, 1.0, 1, 10000.0, 42, 5};
  auto* simc = app.add_subcommand("sim", "Simulate an M/D/C queue");
  simc->add_option("--lambda", sim.arrival_rate)->required();
  simc->add_option("--service-time", sim.service_time)->capture_default_str();
  simc->add_option("--servers", sim.servers)->required();
  simc->add_option("--horizon", sim.horizon)->capture_default_str();
  simc->add_option("--runs", sim.runs)->capture_default_str();

  // validate
  std::vector<double> rho_grid = default_rho_grid();
  std::vector<int> c_grid{1, 2, 4, 8, 16};
  SimConfig tmpl{0.0, 1.0, 1, 10000.0, 42, 5};
  std::string table_out;
  auto* val = app.add_subcommand("validate", "Tabulate M/D/C approximation error against simulation");
  val->add_option("--rho", rho_grid)->delimiter(',');
  val->add_option("--servers", c_grid)->delimiter(',');
  val->add_option("--horizon", tmpl.horizon)->capture_default_str();
  val->add_option("--runs", tmpl.runs)->capture_default_str();
  val->add_option("--out", table_out, "CSV path (default: stdout)");

  // solve
  std::string network_path;
  std::string solve_out;
  bool solve_json = false;
  SolverFlags solver_flags;
  auto* solve = app.add_subcommand("solve", "Solve the user equilibrium");
  solve->add_option("--network", network_path)->required()->check(CLI::ExistingFile);
  solver_flags.attach(solve);
  solve->add_option("--out", solve_out, "Write the result JSON here");
  solve->add_flag("--json", solve_json, "Print the result JSON instead of a summary");

  // calibrate
  CalibrationSpec cal;
  bool weighted = false;
  std::string curve_out;
  std::vector<double> curve_factors;
  std::string cal_out;
  SolverFlags cal_solver;
  auto* calc = app.add_subcommand("calibrate", "Fit the charging-frequency factor");
  calc->add_option("--network", network_path)->required()->check(CLI::ExistingFile);
  calc->add_option("--target-utilization", cal.target_utilization)->capture_default_str();
  calc->add_option("--tolerance", cal.tolerance)->capture_default_str();
  calc->add_option("--factor-low", cal.factor_low)->capture_default_str();
  calc->add_option("--factor-high", cal.factor_high)->capture_default_str();
  calc->add_option("--max-evals", cal.max_evals)->capture_default_str();
  calc->add_flag("--weighted", weighted, "Weight the mean utilization by charger count");
  cal_solver.attach(calc, "--solver-tolerance");
  calc->add_option("--curve-out", curve_out, "Write the frequency-utilization curve CSV");
  calc->add_option("--curve-factors", curve_factors)->delimiter(',');
  calc->add_option("--out", cal_out, "Write the result JSON here");

  // scenario
  auto* scen = app.add_subcommand("scenario", "DCFC upgrade scenarios");
  scen->require_subcommand(1);

  std::string base_path;
  std::string scenarios_path;
  std::string report_out;
  std::string report_json;
  SolverFlags cmp_solver;
  auto* cmp = scen->add_subcommand("compare", "Compare scenarios against the base network");
  cmp->add_option("--base", base_path)->required()->check(CLI::ExistingFile);
  cmp->add_option("--scenarios", scenarios_path)->required()->check(CLI::ExistingFile);
  cmp->add_option("--out", report_out, "CSV path (default: stdout)");
  cmp->add_option("--json-out", report_json);
  cmp_solver.attach(cmp);

  std::string criterion = "utilization";
  bool level2_only = false;
  SolverFlags rank_solver;
  auto* rank = scen->add_subcommand("rank", "Rank stations at equilibrium");
  rank->add_option("--network", network_path)->required()->check(CLI::ExistingFile);
  rank->add_option("--criterion", criterion)->capture_default_str();
  rank->add_flag("--level2-only", level2_only);
  rank_solver.attach(rank);

  std::vector<int> batches;
  std::string prefix = "A";
  double dcfc_rate = kDcfcServiceRate;
  std::string strategy_out;
  SolverFlags strat_solver;
  auto* strat = scen->add_subcommand("strategy", "Build nested top-n DCFC scenarios");
  strat->add_option("--base", base_path)->required()->check(CLI::ExistingFile);
  strat->add_option("--criterion", criterion)->capture_default_str();
  strat->add_option("--batches", batches)->required()->delimiter(',');
  strat->add_option("--prefix", prefix)->capture_default_str();
  strat->add_option("--dcfc-rate", dcfc_rate)->capture_default_str();
  strat->add_option("--out", strategy_out, "Scenario JSON path (default: stdout)");
  strat_solver.attach(strat);

  // serve
  ServiceOptions svc;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", svc.host)->capture_default_str();
  serve->add_option("--port", svc.port)->capture_default_str();
  serve->add_option("--workers", svc.workers, "Worker threads (default: hardware threads)");
  serve->add_option("--state-dir", svc.state_dir, "Append-only job journal directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return 0;
    err << app.help();
    return 1;
  }

  try {
    if (*queue) {
      const auto d = station_total_wait(q);
      fmt::print(out, "rho={}\nwq_mmc={} days\nwq_mdc={} days\nw_total={} days\nover_capacity={}\n",
                 d.utilization, d.wait_queue_mmc, d.wait_queue_mdc, d.total_wait_mdc,
                 d.over_capacity);
      return 0;
    }

    if (*simc) {
      sim.seed = seed;
      const auto r = simulate_mdc(sim);
      fmt::print(out, "mean_wait={}\nsamples={}\n", r.mean_wait, r.sample_count);
      for (std::size_t k = 0; k < r.per_run_means.size(); ++k) {
        fmt::print(out, "run{}={}\n", k + 1, r.per_run_means[k]);
      }
      return 0;
    }

    if (*val) {
      tmpl.seed = seed;
      const auto rows = validate_approximation(rho_grid, c_grid, tmpl);
      if (table_out.empty()) {
        write_error_table_csv(out, rows);
      } else {
        std::ofstream f(table_out);
        if (!f) fail(ErrorKind::InvalidInput, fmt::format("cannot write '{}'", table_out));
        write_error_table_csv(f, rows);
        fmt::print(out, "wrote {} rows to {}\n", rows.size(), table_out);
      }
      return 0;
    }

    if (*solve) {
      json body = with_network(network_path);
      body["solver"] = solver_flags.to_json();
      const json payload = solve_payload(parse_solve_request(body));
      print_warnings(err, payload);
      if (!solve_out.empty()) write_text(solve_out, payload.dump(2) + "\n");
      if (solve_json) {
        out << payload.dump(2) << '\n';
        return 0;
      }
      const auto& m = payload["system_metrics"];
      fmt::print(out, "converged={} iterations={} epsilon={} wardrop_gap={}\n",
                 payload["converged"].get<bool>(), payload["iterations"].get<std::int64_t>(),
                 payload["final_epsilon"].dump(), payload["wardrop_gap"].get<double>());
      for (const auto& [key, value] : m.items()) fmt::print(out, "{}={}\n", key, value.dump());
      for (const auto& row : payload["assignment"]) fmt::print(out, "{}\n", row.dump());
      return 0;
    }

    if (*calc) {
      cal.averaging = weighted ? UtilizationAverage::ChargerWeighted : UtilizationAverage::Unweighted;
      json body = with_network(network_path);
      body["solver"] = cal_solver.to_json();
      body["calibration"] = {{"target_utilization", cal.target_utilization},
                             {"factor_low", cal.factor_low},
                             {"factor_high", cal.factor_high},
                             {"tolerance", cal.tolerance},
                             {"max_evals", cal.max_evals},
                             {"weighted", weighted}};
      if (!curve_out.empty() && curve_factors.empty()) curve_factors = default_curve_factors();
      if (!curve_factors.empty()) body["curve_factors"] = curve_factors;
      const auto req = parse_calibrate_request(body);
      const json payload = calibrate_payload(req);
      print_warnings(err, payload);
      fmt::print(out, "factor={}\ndays_per_charge={}\nachieved_utilization={}\nevaluations={}\n",
                 payload["factor"].get<double>(), payload["days_per_charge"].get<double>(),
                 payload["achieved_utilization"].get<double>(),
                 payload["evaluations"].get<int>());
      if (!curve_out.empty()) {
        std::vector<CurvePoint> curve;
        for (const auto& p : payload["curve"]) {
          curve.push_back({p["factor"], p["days_per_charge"], p["mean_utilization"]});
        }
        std::ofstream f(curve_out);
        if (!f) fail(ErrorKind::InvalidInput, fmt::format("cannot write '{}'", curve_out));
        write_curve_csv(f, curve);
      }
      if (!cal_out.empty()) write_text(cal_out, payload.dump(2) + "\n");
      return 0;
    }

    if (*cmp) {
      json body = with_network(base_path);
      body["solver"] = cmp_solver.to_json();
      body["scenarios"] = read_json_file(scenarios_path);
      const auto req = parse_compare_request(body);
      const auto report = compare_scenarios(req.network, req.scenarios, req.solver);
      for (const auto& w : req.warnings) fmt::print(err, "warning: {}\n", w);
      for (const auto& row : report.rows) {
        if (!row.ok) fmt::print(err, "scenario {} failed: {}\n", row.scenario, row.error);
      }
      if (report_out.empty()) {
        write_comparison_csv(out, report);
      } else {
        std::ofstream f(report_out);
        if (!f) fail(ErrorKind::InvalidInput, fmt::format("cannot write '{}'", report_out));
        write_comparison_csv(f, report);
        fmt::print(out, "wrote {} rows to {}\n", report.rows.size(), report_out);
      }
      if (!report_json.empty()) write_text(report_json, comparison_to_json(report).dump(2) + "\n");
      return 0;
    }

    if (*rank || *strat) {
      json body = with_network(*rank ? network_path : base_path);
      body["solver"] = (*rank ? rank_solver : strat_solver).to_json();
      const auto req = parse_solve_request(body);
      const auto c = rank_criterion_from_string(criterion);
      const auto result = solve_equilibrium(req.network, req.solver);
      if (*rank) {
        const auto ids = rank_stations(result, req.network, c,
                                       level2_only ? std::optional(ChargerClass::Level2)
                                                   : std::nullopt);
        for (const auto& id : ids) out << id << '\n';
        return 0;
      }
      const auto specs = strategy_scenarios(result, req.network, c, batches, prefix, dcfc_rate);
      const std::string text = scenarios_to_json(specs).dump(2) + "\n";
      if (strategy_out.empty()) {
        out << text;
      } else {
        write_text(strategy_out, text);
        fmt::print(out, "wrote {} scenarios to {}\n", specs.size(), strategy_out);
      }
      return 0;
    }

    if (*serve) {
      svc.seed = seed;
      Service service(svc);
      const int port = service.bind();
      if (port < 0) {
        fmt::print(err, "cannot bind {}:{}\n", svc.host, svc.port);
        return 1;
      }
      fmt::print(out, "listening on http://{}:{}/v1/ with {} workers\n", svc.host, port,
                 service.jobs().worker_count());
      out.flush();
      return service.serve() ? 0 : 1;
    }
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 1;
  }
  return 1;
}

}  // namespace evcs::app
