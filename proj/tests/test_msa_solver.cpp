#include <doctest.h>

#include <cmath>
#include <numeric>

#include "evcs/error.hpp"
#include "evcs/msa_solver.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace evcs;
using evcs::testing::Rng;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (const double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

double row_sum(const Matrix& m, std::size_t i) {
  const auto r = m.row(i);
  return std::accumulate(r.begin(), r.end(), 0.0);
}

}  // namespace

TEST_CASE("cost matrix") {
  std::vector<Station> stations{{"s", 0, 0, 1, 2.0, ChargerClass::Custom}};
  TravelTimeMatrix travel{from_rows({{0.1}}), TravelProvenance::External};
  std::vector<QueueDelays> delays{{0.0, 0.2, 0.7, 0.5, false}};

  SolverConfig cfg;
  CHECK(cost_matrix(travel, delays, stations, cfg)(0, 0) == doctest::Approx(0.8));

  cfg.weight_charging = 0.0;
  CHECK(cost_matrix(travel, delays, stations, cfg)(0, 0) == doctest::Approx(0.3));

  cfg.weight_access = 2.0;
  cfg.weight_charging = 3.0;
  CHECK(cost_matrix(travel, delays, stations, cfg)(0, 0) == doctest::Approx(2 * 0.3 + 3 * 0.5));
}

TEST_CASE("unit weights give travel time plus total station wait") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Network net = evcs::testing::random_small_instance(100 + trial);
    std::vector<double> flows;
    for (const auto& s : net.stations()) flows.push_back(rng.uniform(0, 1.3) * s.capacity());
    const auto delays = station_delays(flows, net.stations());
    const Matrix t = cost_matrix(net.travel(), delays, net.stations(), SolverConfig{});
    for (std::size_t i = 0; i < t.rows(); ++i) {
      for (std::size_t j = 0; j < t.cols(); ++j) {
        CHECK(t(i, j) ==
              doctest::Approx(net.travel().values(i, j) + delays[j].total_wait_mdc).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("auxiliary assignment") {
  CHECK(auxiliary_assignment(from_rows({{0.63, 0.57, 0.4}})) == from_rows({{0, 0, 1}}));
  CHECK(auxiliary_assignment(from_rows({{0.5, 0.5, 0.5}})) == from_rows({{1, 0, 0}}));
  CHECK(auxiliary_assignment(from_rows({{42.0}})) == from_rows({{1}}));
  CHECK(auxiliary_assignment(from_rows({{0.3, 0.2, 0.2}, {0.1, 0.9, 0.1}})) ==
        from_rows({{0, 1, 0}, {1, 0, 0}}));
}

TEST_CASE("auxiliary assignment is invariant to positive cost scaling") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix t(4, 5);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 5; ++j) t(i, j) = std::round(rng.uniform(0, 10)) / 4.0;
    }
    Matrix scaled = t;
    const double k = std::ldexp(1.0, rng.integer(-8, 8));  // exact scaling keeps ties
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 5; ++j) scaled(i, j) *= k;
    }
    CHECK(auxiliary_assignment(t) == auxiliary_assignment(scaled));
  }
}

TEST_CASE("msa step") {
  SUBCASE("fixed point") {
    const Matrix y = from_rows({{0, 1}, {1, 0}});
    const auto step = msa_step(y, y, 1);
    CHECK(step.assignment == y);
    CHECK(step.epsilon == 0.0);
  }
  SUBCASE("halfway") {
    const auto step = msa_step(from_rows({{1, 0}}), from_rows({{0, 1}}), 1);
    CHECK(step.assignment == from_rows({{0.5, 0.5}}));
    CHECK(step.epsilon == doctest::Approx(std::sqrt(2.0) / 2.0));
  }
  SUBCASE("rows stay stochastic") {
    Rng rng(9);
    Matrix x = auxiliary_assignment(from_rows({{1, 2, 3}, {3, 2, 1}, {2, 1, 3}}));
    for (std::int64_t n = 1; n < 300; ++n) {
      Matrix t(3, 3);
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) t(i, j) = rng.uniform(0, 1);
      }
      x = msa_step(x, auxiliary_assignment(t), n).assignment;
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(row_sum(x, i) == doctest::Approx(1.0).epsilon(1e-12));
        for (const double v : x.row(i)) CHECK(v >= 0.0);
      }
    }
  }
  CHECK_THROWS_AS(msa_step(from_rows({{1}}), from_rows({{1}}), 0), Error);
}

TEST_CASE("station flows") {
  CHECK(station_flows(from_rows({{1, 0}, {0, 1}, {1, 0}}), std::vector<double>{1, 2, 3}) ==
        std::vector<double>{4, 2});
  CHECK(station_flows(from_rows({{0.5, 0.5}, {0.2, 0.8}}), std::vector<double>{0, 0}) ==
        std::vector<double>{0, 0});
  CHECK(station_flows(from_rows({{0.5, 0.5}, {0.5, 0.5}}), std::vector<double>{3, 9}) ==
        std::vector<double>{6, 6});
}

TEST_CASE("wardrop gap") {
  const Matrix t = from_rows({{0.3, 0.1, 0.2}, {0.5, 0.6, 0.5}});
  const std::vector<double> lambda{2.0, 1.0};
  CHECK(wardrop_gap(auxiliary_assignment(t), t, lambda) == 0.0);
  CHECK(wardrop_gap(from_rows({{1, 0, 0}, {1, 0, 0}}), t, lambda) > 0.0);
  CHECK(wardrop_gap(from_rows({{1, 0, 0}, {1, 0, 0}}), t, std::vector<double>{0, 0}) == 0.0);
}

TEST_CASE("symmetric two-station split") {
  const Network net = evcs::testing::two_station_network(4.0, 0.05, 0.05, 6.0, 1, 6.0, 1);
  const auto r = solve_equilibrium(net, {});
  CHECK(r.converged);
  CHECK(r.assignment(0, 0) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(r.assignment(0, 1) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("dominant station takes all demand") {
  // W_q at full load is about 1e-9 days, far below the 0.1 day travel gap.
  const Network net = evcs::testing::two_station_network(0.001, 0.01, 0.11, 48.0, 4, 48.0, 4);
  const auto r = solve_equilibrium(net, {});
  CHECK(r.converged);
  CHECK(r.assignment(0, 0) == 1.0);
  CHECK(r.assignment(0, 1) == 0.0);
  CHECK(r.wardrop_gap == 0.0);
}

TEST_CASE("congested split matches the Beckmann grid minimiser") {
  evcs::testing::TwoStationInstance inst;
  inst.lambda = 13.0;
  inst.d[0] = 0.02;
  inst.d[1] = 0.08;
  inst.mu[0] = 6.0;
  inst.mu[1] = 4.0;
  inst.servers[0] = 2;
  inst.servers[1] = 3;
  const double x_star = evcs::testing::beckmann_grid_minimizer(inst);
  const Network net = evcs::testing::two_station_network(inst.lambda, inst.d[0], inst.d[1],
                                                         inst.mu[0], inst.servers[0], inst.mu[1],
                                                         inst.servers[1]);
  const auto r = solve_equilibrium(net, {});
  CHECK(x_star > 0.05);
  CHECK(x_star < 0.95);
  CHECK(std::abs(r.assignment(0, 0) - x_star) <= 1e-2);
}

TEST_CASE("solver invariants on random instances") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Network net = evcs::testing::random_small_instance(seed);
    const auto lambda = net.arrival_rates();
    std::int64_t last = 0;
    const auto r = solve_equilibrium(net, {}, [&](const SolverProgress& p) {
      CHECK(p.iteration == last + 1);
      last = p.iteration;
      return true;
    });
    CAPTURE(seed);
    CHECK(r.iterations == last);
    CHECK(r.iterations <= SolverConfig{}.max_iterations);
    for (std::size_t i = 0; i < r.assignment.rows(); ++i) {
      CHECK(row_sum(r.assignment, i) == doctest::Approx(1.0).epsilon(1e-9));
    }
    const double flow = std::accumulate(r.flows.begin(), r.flows.end(), 0.0);
    CHECK(flow == doctest::Approx(net.total_demand()).epsilon(1e-9));
    CHECK(r.wardrop_gap >= 0.0);
    CHECK(r.wardrop_gap <= 1e-2);
    CHECK(r.wardrop_gap == wardrop_gap(r, lambda));
  }
}

TEST_CASE("solve is deterministic") {
  const Network net = evcs::testing::random_small_instance(77);
  CHECK(solve_equilibrium(net, {}) == solve_equilibrium(net, {}));
}

TEST_CASE("iteration cap and cancellation") {
  const Network net = evcs::testing::random_small_instance(4);
  SolverConfig cfg;
  cfg.max_iterations = 5;
  cfg.tolerance = 1e-12;
  const auto r = solve_equilibrium(net, cfg);
  CHECK(r.iterations == 5);
  CHECK_FALSE(r.converged);
  CHECK_FALSE(r.warnings.empty());

  try {
    (void)solve_equilibrium(net, {}, [](const SolverProgress& p) { return p.iteration < 10; });
    FAIL("expected cancellation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Cancelled);
  }
}

TEST_CASE("zero-demand node still receives an assignment row") {
  std::vector<DemandNode> nodes{{"busy", 0, 0, 0, 3.0}, {"idle", 5, 0, 0, 0.0}};
  std::vector<Station> stations{{"a", 0, 0, 1, 6.0}, {"b", 5, 0, 1, 6.0}};
  const Network net = evcs::testing::make_network(nodes, stations, 20.0);
  const auto r = solve_equilibrium(net, {});
  CHECK(row_sum(r.assignment, 1) == doctest::Approx(1.0));
  CHECK(r.flows[0] + r.flows[1] == doctest::Approx(3.0));
}

TEST_CASE("demand above total capacity completes and flags stations") {
  const Network net = evcs::testing::two_station_network(20.0, 0.01, 0.02, 6.0, 1, 6.0, 2);
  SolverConfig cfg;
  cfg.tolerance = 1e-3;
  const auto r = solve_equilibrium(net, cfg);
  CHECK(r.converged);
  CHECK(std::any_of(r.station_delays.begin(), r.station_delays.end(),
                    [](const QueueDelays& q) { return q.over_capacity; }));
  REQUIRE_FALSE(r.warnings.empty());
  CHECK(r.warnings[0].find("exceeds total capacity") != std::string::npos);
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  cfg.weight_access = 0.0;
  cfg.weight_charging = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.tolerance = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
