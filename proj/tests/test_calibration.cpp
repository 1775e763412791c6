#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "evcs/calibration.hpp"
#include "evcs/error.hpp"
#include "support/instances.hpp"

using namespace evcs;

namespace {

EquilibriumResult with_utilizations(std::initializer_list<double> rho) {
  EquilibriumResult r;
  for (const double p : rho) r.station_delays.push_back({0.0, 0.0, 0.0, p, false});
  return r;
}

Network single_station(std::int64_t ev_count, int chargers, double mu) {
  std::vector<DemandNode> nodes{{"n", 0, 0, ev_count, static_cast<double>(ev_count)}};
  std::vector<Station> stations{{"s", 1, 0, chargers, mu, ChargerClass::Custom}};
  return evcs::testing::make_network(std::move(nodes), std::move(stations), 100.0);
}

}  // namespace

TEST_CASE("mean utilization") {
  CHECK(mean_utilization(with_utilizations({0.0, 0.0, 0.0})) == 0.0);
  CHECK(mean_utilization(with_utilizations({0.1, 0.3})) == doctest::Approx(0.2));
  CHECK(mean_utilization(EquilibriumResult{}) == 0.0);

  std::vector<Station> stations{{"a", 0, 0, 1, 6.0}, {"b", 0, 0, 3, 6.0}};
  const auto r = with_utilizations({0.1, 0.3});
  CHECK(mean_utilization(r, stations, UtilizationAverage::ChargerWeighted) ==
        doctest::Approx((0.1 + 3 * 0.3) / 4));
  CHECK(mean_utilization(r, stations, UtilizationAverage::Unweighted) ==
        doctest::Approx(0.2));
}

TEST_CASE("mean utilization ignores station order") {
  evcs::testing::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    EquilibriumResult r;
    std::vector<Station> stations;
    for (int j = 0; j < 8; ++j) {
      r.station_delays.push_back({0, 0, 0, rng.uniform(0, 1), false});
      stations.push_back({"s" + std::to_string(j), 0, 0, rng.integer(1, 5), 6.0});
    }
    EquilibriumResult p = r;
    std::vector<Station> ps = stations;
    std::reverse(p.station_delays.begin(), p.station_delays.end());
    std::reverse(ps.begin(), ps.end());
    CHECK(mean_utilization(p) == doctest::Approx(mean_utilization(r)).epsilon(1e-14));
    CHECK(mean_utilization(p, ps, UtilizationAverage::ChargerWeighted) ==
          doctest::Approx(mean_utilization(r, stations, UtilizationAverage::ChargerWeighted))
              .epsilon(1e-14));
  }
}

TEST_CASE("target below the low-factor utilization is unbracketed") {
  const Network net = single_station(10, 2, 6.0);
  CalibrationSpec spec;
  spec.target_utilization = 0.01;  // low factor already gives 10/30/12
  try {
    (void)calibrate_frequency_factor(net, spec, {});
    FAIL("expected unbracketed-target");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnbracketedTarget);
    CHECK(std::string(e.what()).find("widen") != std::string::npos);
  }
}

TEST_CASE("single station closed form") {
  for (const int k : {1, 2, 5}) {
    for (const std::int64_t ev : {3, 10, 40}) {
      const double mu = 6.0;
      const Network net = single_station(ev, k, mu);
      CalibrationSpec spec;
      spec.target_utilization = 0.076;
      spec.tolerance = 1e-9;
      spec.factor_low = 1e-4;
      spec.factor_high = 30.0;
      const auto r = calibrate_frequency_factor(net, spec, {});
      const double exact = 0.076 * mu * k / static_cast<double>(ev);
      CAPTURE(k);
      CAPTURE(ev);
      CHECK(r.factor == doctest::Approx(exact).epsilon(1e-6));
      CHECK(std::abs(r.achieved_utilization - 0.076) <= spec.tolerance);
      CHECK(r.days_per_charge == doctest::Approx(1.0 / r.factor));
    }
  }
}

TEST_CASE("calibration is deterministic and honors tolerance") {
  const Network net = evcs::testing::synthetic_city(21, 15, 6, true);
  CalibrationSpec spec;
  spec.target_utilization = 0.1;
  SolverConfig cfg;
  cfg.tolerance = 1e-3;
  const auto a = calibrate_frequency_factor(net, spec, cfg);
  const auto b = calibrate_frequency_factor(net, spec, cfg);
  CHECK(a.factor == b.factor);
  CHECK(a.evaluations == b.evaluations);
  CHECK(std::abs(a.achieved_utilization - spec.target_utilization) <= spec.tolerance);
  CHECK(a.evaluations <= spec.max_evals);
}

TEST_CASE("exhausted evaluations report not-converged") {
  const Network net = single_station(10, 2, 6.0);
  CalibrationSpec spec;
  spec.tolerance = 1e-12;
  spec.max_evals = 4;
  try {
    (void)calibrate_frequency_factor(net, spec, {});
    FAIL("expected not-converged");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotConverged);
  }
}

TEST_CASE("calibration settings validation") {
  CalibrationSpec spec;
  spec.target_utilization = 1.0;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = {};
  spec.factor_low = 2.0;
  spec.factor_high = 1.0;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = {};
  spec.tolerance = 0.0;
  CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("frequency curve") {
  const Network net = evcs::testing::synthetic_city(8, 12, 5, false);
  SolverConfig cfg;
  cfg.tolerance = 1e-3;
  const auto curve = frequency_curve(net, {0.5, 0.05, 0.2}, cfg);
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].factor == 0.05);
  CHECK(curve[2].factor == 0.5);
  for (std::size_t k = 1; k < curve.size(); ++k) {
    CHECK(curve[k].mean_utilization >= curve[k - 1].mean_utilization);
  }
  CHECK(frequency_curve(net, {1e-9}, cfg)[0].mean_utilization < 1e-8);
  CHECK_THROWS_AS(frequency_curve(net, {0.0}, cfg), Error);

  std::ostringstream csv;
  write_curve_csv(csv, curve);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "days_per_charge,mean_utilization");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}
