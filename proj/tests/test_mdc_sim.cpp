#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "evcs/error.hpp"
#include "evcs/mdc_sim.hpp"
#include "evcs/queueing.hpp"

using namespace evcs;

TEST_CASE("no arrivals gives an empty sample") {
  const auto r = simulate_mdc({0.0, 2.0, 3, 500.0, 1, 3});
  CHECK(r.mean_wait == 0.0);
  CHECK(r.sample_count == 0);
  CHECK(r.per_run_means.size() == 3);
}

TEST_CASE("M/D/1 at rho 0.5 reproduces Pollaczek-Khinchine") {
  const auto r = simulate_mdc({0.5, 1.0, 1, 10000.0, 42, 5});
  CHECK(r.mean_wait == doctest::Approx(0.5).epsilon(0.1));  // 0.5 +/- 0.05
  CHECK(std::abs(r.mean_wait - 0.5) <= 0.05);
  CHECK(r.per_run_means.size() == 5);
  CHECK(r.sample_count > 20000);
}

TEST_CASE("long horizon converges to the exact M/D/1 delay") {
  const auto r = simulate_mdc({0.5, 1.0, 1, 1e5, 7, 1});
  CHECK(std::abs(r.mean_wait - 0.5) <= 0.05 * 0.5);
}

TEST_CASE("seeded determinism") {
  const SimConfig cfg{1.7, 1.0, 2, 3000.0, 99, 3};
  const auto a = simulate_mdc(cfg);
  const auto b = simulate_mdc(cfg);
  CHECK(a == b);
  SimConfig other = cfg;
  other.seed = 100;
  CHECK_FALSE(simulate_mdc(other) == a);
}

TEST_CASE("replications use consecutive seeds") {
  const SimConfig cfg{0.8, 1.0, 1, 2000.0, 10, 3};
  const auto all = simulate_mdc(cfg);
  for (int r = 0; r < 3; ++r) {
    CHECK(simulate_replication(cfg, 10 + r).mean_wait == all.per_run_means[r]);
  }
}

TEST_CASE("single server trace satisfies the Lindley recurrence") {
  const SimConfig cfg{0.8, 1.0, 1, 5000.0, 3, 1};
  ReplicationTrace trace;
  simulate_replication(cfg, cfg.seed, &trace);
  REQUIRE(trace.customers.size() > 100);
  double w_prev = 0.0;
  double a_prev = trace.customers.front().arrival;
  CHECK(*trace.customers.front().service_start == a_prev);
  for (std::size_t n = 1; n < trace.customers.size(); ++n) {
    const auto& c = trace.customers[n];
    if (!c.service_start) break;
    const double w = *c.service_start - c.arrival;
    const double lindley = std::max(0.0, w_prev + cfg.service_time - (c.arrival - a_prev));
    CHECK(w == doctest::Approx(lindley).epsilon(1e-9));
    w_prev = w;
    a_prev = c.arrival;
  }
}

TEST_CASE("flow conservation at the horizon") {
  for (const int c : {1, 2, 5}) {
    for (const double rho : {0.3, 0.9, 1.2}) {
      const SimConfig cfg{rho * c, 1.0, c, 800.0, 5, 1};
      ReplicationTrace trace;
      simulate_replication(cfg, cfg.seed, &trace);
      CHECK(trace.served + trace.in_system == trace.arrived);
      CHECK(trace.arrived == static_cast<std::int64_t>(trace.customers.size()));
      // FIFO: service starts in arrival order.
      double last_start = 0.0;
      for (const auto& rec : trace.customers) {
        if (!rec.service_start) continue;
        CHECK(*rec.service_start >= last_start);
        CHECK(*rec.service_start >= rec.arrival);
        last_start = *rec.service_start;
      }
    }
  }
}

TEST_CASE("customers still queued at the horizon are excluded") {
  // Heavily overloaded: many customers never start service.
  const SimConfig cfg{5.0, 1.0, 1, 200.0, 11, 1};
  ReplicationTrace trace;
  const auto r = simulate_replication(cfg, cfg.seed, &trace);
  const auto started = std::count_if(trace.customers.begin(), trace.customers.end(),
                                     [](const CustomerRecord& c) { return c.service_start; });
  CHECK(r.sample_count == started);
  CHECK(started < trace.arrived);
}

TEST_CASE("simulation config validation") {
  CHECK_THROWS_AS(simulate_mdc({1.0, 1.0, 1, 0.0, 1, 1}), Error);
  CHECK_THROWS_AS(simulate_mdc({1.0, 1.0, 1, 10.0, 1, 0}), Error);
  CHECK_THROWS_AS(simulate_mdc({1.0, 0.0, 1, 10.0, 1, 1}), Error);
}

TEST_CASE("approximation error table") {
  const SimConfig tmpl{0.0, 1.0, 1, 10000.0, 42, 5};
  const auto rows = validate_approximation({0.05, 0.5, 0.9}, {1, 2, 4}, tmpl);
  REQUIRE(rows.size() == 9);
  for (const auto& r : rows) {
    CAPTURE(r.rho);
    CAPTURE(r.servers);
    CHECK(r.approx == doctest::Approx(mdc_queue_wait({r.rho * r.servers, 1.0, r.servers})));
    CHECK(r.abs_err == doctest::Approx(std::abs(r.approx - r.sim_mean)));
    if (r.servers == 1 && r.rho == 0.5) CHECK(*r.rel_err <= 0.05);
    if (r.servers == 1 && r.rho == 0.05) CHECK(r.abs_err <= 0.05);
    if (r.rho == 0.9 && r.servers > 1) CHECK(*r.rel_err <= 0.10);
  }

  std::ostringstream csv;
  write_error_table_csv(csv, rows);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "rho,servers,approx,sim_mean,abs_err,rel_err");
  int count = 0;
  for (std::string line; std::getline(lines, line);) ++count;
  CHECK(count == 9);

  CHECK_THROWS_AS(validate_approximation({1.0}, {1}, tmpl), Error);
}
