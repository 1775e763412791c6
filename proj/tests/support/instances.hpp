#pragma once

// Seeded synthetic problem instances shared by unit and acceptance tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "evcs/network.hpp"

namespace evcs::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(gen_() >> 11) * 0x1.0p-53);
  }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 gen_;
};

inline Network make_network(std::vector<DemandNode> nodes, std::vector<Station> stations,
                            double speed) {
  auto travel = euclidean_travel_times(nodes, stations, speed);
  return Network(std::move(nodes), std::move(stations), std::move(travel),
                 {DistanceMode::Euclidean, speed, 1.0});
}

/// Up to 10 nodes and 5 stations on a 10 x 10 plane at speed 20, with total
/// demand between 10% and 85% of total capacity.
inline Network random_small_instance(std::uint64_t seed) {
  Rng rng(seed);
  const int n_nodes = rng.integer(1, 10);
  const int n_stations = rng.integer(1, 5);
  std::vector<Station> stations;
  for (int j = 0; j < n_stations; ++j) {
    Station s;
    s.id = "s" + std::to_string(j);
    s.x = rng.uniform(0, 10);
    s.y = rng.uniform(0, 10);
    s.chargers = rng.integer(1, 4);
    const int kind = rng.integer(0, 2);
    if (kind == 0) {
      s.charger_class = ChargerClass::Level2;
      s.service_rate = kLevel2ServiceRate;
    } else if (kind == 1) {
      s.charger_class = ChargerClass::Dcfc;
      s.service_rate = kDcfcServiceRate;
    } else {
      s.charger_class = ChargerClass::Custom;
      s.service_rate = rng.uniform(2, 20);
    }
    stations.push_back(s);
  }
  double capacity = 0.0;
  for (const auto& s : stations) capacity += s.capacity();

  std::vector<DemandNode> nodes;
  std::vector<double> weights;
  double wsum = 0.0;
  for (int i = 0; i < n_nodes; ++i) {
    weights.push_back(rng.uniform(0.1, 1.0));
    wsum += weights.back();
  }
  const double load = rng.uniform(0.10, 0.85);
  for (int i = 0; i < n_nodes; ++i) {
    DemandNode n;
    n.id = "n" + std::to_string(i);
    n.x = rng.uniform(0, 10);
    n.y = rng.uniform(0, 10);
    n.arrival_rate = load * capacity * weights[static_cast<std::size_t>(i)] / wsum;
    nodes.push_back(n);
  }
  return make_network(std::move(nodes), std::move(stations), 20.0);
}

/// Single node, two stations with an explicit travel matrix.
inline Network two_station_network(double lambda, double d0, double d1, double mu0, int k0,
                                   double mu1, int k1) {
  std::vector<DemandNode> nodes{{"n0", 0, 0, 0, lambda}};
  std::vector<Station> stations{{"s0", 0, 0, k0, mu0, ChargerClass::Custom},
                                {"s1", 0, 0, k1, mu1, ChargerClass::Custom}};
  Matrix d(1, 2);
  d(0, 0) = d0;
  d(0, 1) = d1;
  return Network(std::move(nodes), std::move(stations), {d, TravelProvenance::External});
}

/// Larger planning-style instance: ev_count per node, Level 2 stations with
/// mostly one charger (a few DCFCs when `with_dcfc`), coordinates in miles and
/// a 25 mph (600 mi/day) travel speed.
inline Network synthetic_city(std::uint64_t seed, int n_nodes, int n_stations, bool with_dcfc) {
  Rng rng(seed);
  std::vector<Station> stations;
  for (int j = 0; j < n_stations; ++j) {
    Station s;
    s.id = (j < 10 ? "cs0" : "cs") + std::to_string(j);
    s.x = rng.uniform(0, 20);
    s.y = rng.uniform(0, 20);
    const double r = rng.uniform(0, 1);
    s.chargers = r < 0.6 ? 1 : (r < 0.85 ? rng.integer(2, 4) : rng.integer(5, 10));
    s.charger_class = ChargerClass::Level2;
    s.service_rate = kLevel2ServiceRate;
    if (with_dcfc && j % 10 == 9) {
      s.charger_class = ChargerClass::Dcfc;
      s.service_rate = kDcfcServiceRate;
      s.chargers = 1;
    }
    stations.push_back(s);
  }
  std::vector<DemandNode> nodes;
  for (int i = 0; i < n_nodes; ++i) {
    DemandNode n;
    n.id = "taz" + std::to_string(i);
    n.x = rng.uniform(0, 20);
    n.y = rng.uniform(0, 20);
    n.ev_count = rng.integer(1, 6);
    n.arrival_rate = static_cast<double>(n.ev_count);
    nodes.push_back(n);
  }
  return make_network(std::move(nodes), std::move(stations), 600.0);
}

/// Level-2-only city with 2-4 chargers per station. Demand is raw ev_count;
/// callers scale it to the congestion level they need.
inline Network multi_charger_level2_city(std::uint64_t seed, int n_nodes = 50,
                                         int n_stations = 20) {
  Rng rng(seed);
  std::vector<Station> stations;
  for (int j = 0; j < n_stations; ++j) {
    stations.push_back({"cs" + std::to_string(100 + j), rng.uniform(0, 20), rng.uniform(0, 20),
                        rng.integer(2, 4), kLevel2ServiceRate, ChargerClass::Level2});
  }
  std::vector<DemandNode> nodes;
  for (int i = 0; i < n_nodes; ++i) {
    DemandNode n{"taz" + std::to_string(i), rng.uniform(0, 20), rng.uniform(0, 20),
                 rng.integer(1, 6), 0.0};
    n.arrival_rate = static_cast<double>(n.ev_count);
    nodes.push_back(n);
  }
  return make_network(std::move(nodes), std::move(stations), 600.0);
}

}  // namespace evcs::testing
