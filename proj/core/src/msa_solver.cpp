#include "evcs/msa_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "evcs/error.hpp"

namespace evcs {

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) fail(ErrorKind::InvalidInput, "tolerance must be positive");
  if (max_iterations < 1) fail(ErrorKind::InvalidInput, "max_iterations must be >= 1");
  if (!(weight_access >= 0.0) || !(weight_charging >= 0.0)) {
    fail(ErrorKind::InvalidInput, "cost weights must be non-negative");
  }
  if (weight_access == 0.0 && weight_charging == 0.0) {
    fail(ErrorKind::InvalidInput, "cost weights must not both be zero");
  }
  if (gap_check_period < 1) fail(ErrorKind::InvalidInput, "gap_check_period must be >= 1");
}

Matrix cost_matrix(const TravelTimeMatrix& travel, std::span<const QueueDelays> delays,
                   std::span<const Station> stations, const SolverConfig& cfg) {
  const auto& d = travel.values;
  Matrix out(d.rows(), d.cols());
  for (std::size_t j = 0; j < d.cols(); ++j) {
    const double queue = delays[j].wait_queue_mdc;
    const double charging = cfg.weight_charging * stations[j].service_time();
    for (std::size_t i = 0; i < d.rows(); ++i) {
      out(i, j) = cfg.weight_access * (d(i, j) + queue) + charging;
    }
  }
  return out;
}

Matrix auxiliary_assignment(const Matrix& costs) {
  Matrix y(costs.rows(), costs.cols());
  for (std::size_t i = 0; i < costs.rows(); ++i) {
    const auto row = costs.row(i);
    // min_element keeps the first of equal values.
    const auto best = std::min_element(row.begin(), row.end());
    y(i, static_cast<std::size_t>(best - row.begin())) = 1.0;
  }
  return y;
}

MsaStep msa_step(const Matrix& previous, const Matrix& auxiliary, std::int64_t n) {
  if (n < 1) fail(ErrorKind::InvalidInput, "msa_step requires n >= 1");
  const double denom = static_cast<double>(n + 1);
  const double keep = static_cast<double>(n);
  MsaStep out{Matrix(previous.rows(), previous.cols()), 0.0};
  double sq = 0.0;
  for (std::size_t i = 0; i < previous.rows(); ++i) {
    for (std::size_t j = 0; j < previous.cols(); ++j) {
      const double x = auxiliary(i, j) / denom + keep * previous(i, j) / denom;
      const double diff = x - previous(i, j);
      sq += diff * diff;
      out.assignment(i, j) = x;
    }
  }
  out.epsilon = std::sqrt(sq);
  return out;
}

std::vector<double> station_flows(const Matrix& assignment, std::span<const double> lambda) {
  std::vector<double> flows(assignment.cols(), 0.0);
  for (std::size_t i = 0; i < assignment.rows(); ++i) {
    for (std::size_t j = 0; j < assignment.cols(); ++j) {
      flows[j] += lambda[i] * assignment(i, j);
    }
  }
  return flows;
}

std::vector<QueueDelays> station_delays(std::span<const double> flows,
                                        std::span<const Station> stations) {
  std::vector<QueueDelays> out;
  out.reserve(stations.size());
  for (std::size_t j = 0; j < stations.size(); ++j) {
    out.push_back(station_total_wait({flows[j], stations[j].service_rate, stations[j].chargers}));
  }
  return out;
}

double wardrop_gap(const Matrix& assignment, const Matrix& costs, std::span<const double> lambda) {
  double incurred = 0.0;
  double best = 0.0;
  for (std::size_t i = 0; i < costs.rows(); ++i) {
    const auto row = costs.row(i);
    const double row_min = *std::min_element(row.begin(), row.end());
    double row_cost = 0.0;
    for (std::size_t j = 0; j < costs.cols(); ++j) row_cost += assignment(i, j) * row[j];
    incurred += lambda[i] * row_cost;
    best += lambda[i] * row_min;
  }
  if (best <= 0.0) return 0.0;
  return std::max(0.0, (incurred - best) / best);
}

double wardrop_gap(const EquilibriumResult& result, std::span<const double> lambda) {
  return wardrop_gap(result.assignment, result.costs, lambda);
}

EquilibriumResult solve_equilibrium(const Network& network, const SolverConfig& cfg,
                                    const ProgressCallback& progress) {
  cfg.validate();
  const auto lambda = network.arrival_rates();
  const std::span<const Station> stations = network.stations();

  EquilibriumResult result;
  if (network.total_demand() > network.total_capacity()) {
    result.warnings.push_back(fmt::format(
        "total demand {} veh/day exceeds total capacity {} veh/day; some stations stay over "
        "capacity",
        network.total_demand(), network.total_capacity()));
  }

  Matrix costs = network.travel().values;  // T^0 = d
  Matrix x;
  std::vector<double> flows;
  std::vector<QueueDelays> delays;
  double epsilon = std::numeric_limits<double>::infinity();
  double gap = 0.0;
  std::int64_t n = 0;

  while (epsilon > cfg.tolerance && n < cfg.max_iterations) {
    Matrix y = auxiliary_assignment(costs);
    if (n == 0) {
      x = std::move(y);
    } else {
      auto step = msa_step(x, y, n);
      x = std::move(step.assignment);
      epsilon = step.epsilon;
    }

    flows = station_flows(x, lambda);
    delays = station_delays(flows, stations);
    costs = cost_matrix(network.travel(), delays, stations, cfg);
    for (const double t : costs.values()) {
      if (!std::isfinite(t)) {
        fail(ErrorKind::Numeric, fmt::format("non-finite cost at iteration {}", n));
      }
    }
    ++n;

    if (progress) {
      if (n % cfg.gap_check_period == 0 || epsilon <= cfg.tolerance) {
        gap = wardrop_gap(x, costs, lambda);
      }
      if (!progress({n, epsilon, gap})) {
        fail(ErrorKind::Cancelled, fmt::format("solve cancelled at iteration {}", n));
      }
    }
  }

  result.assignment = std::move(x);
  result.flows = std::move(flows);
  result.costs = std::move(costs);
  result.station_delays = std::move(delays);
  result.iterations = n;
  result.final_epsilon = epsilon;
  result.converged = epsilon <= cfg.tolerance;
  result.wardrop_gap = wardrop_gap(result.assignment, result.costs, lambda);
  if (!result.converged) {
    result.warnings.push_back(
        fmt::format("iteration cap {} reached with epsilon {}", cfg.max_iterations, epsilon));
  }
  return result;
}

}  // namespace evcs
