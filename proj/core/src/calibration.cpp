#include "evcs/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "evcs/error.hpp"

namespace evcs {

double mean_utilization(const EquilibriumResult& result) {
  if (result.station_delays.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& d : result.station_delays) sum += d.utilization;
  return sum / static_cast<double>(result.station_delays.size());
}

double mean_utilization(const EquilibriumResult& result, std::span<const Station> stations,
                        UtilizationAverage mode) {
  if (mode == UtilizationAverage::Unweighted) return mean_utilization(result);
  double sum = 0.0;
  double weight = 0.0;
  for (std::size_t j = 0; j < result.station_delays.size(); ++j) {
    sum += stations[j].chargers * result.station_delays[j].utilization;
    weight += stations[j].chargers;
  }
  return weight > 0.0 ? sum / weight : 0.0;
}

void CalibrationSpec::validate() const {
  if (!(target_utilization > 0.0 && target_utilization < 1.0)) {
    fail(ErrorKind::InvalidInput, "target_utilization must lie in (0, 1)");
  }
  if (!(factor_low >= 0.0 && factor_low < factor_high)) {
    fail(ErrorKind::InvalidInput, "factor bounds must satisfy 0 <= low < high");
  }
  if (!(tolerance > 0.0)) fail(ErrorKind::InvalidInput, "tolerance must be positive");
  if (max_evals < 3) fail(ErrorKind::InvalidInput, "max_evals must be >= 3");
}

namespace {

CurvePoint evaluate(const Network& network, double factor, const SolverConfig& cfg,
                    UtilizationAverage mode, const ProgressCallback& progress) {
  const Network scaled = scale_demand(network, factor);
  const auto result = solve_equilibrium(scaled, cfg, progress);
  return {factor, factor > 0.0 ? 1.0 / factor : std::numeric_limits<double>::infinity(),
          mean_utilization(result, scaled.stations(), mode)};
}

}  // namespace

CalibrationResult calibrate_frequency_factor(const Network& network, const CalibrationSpec& spec,
                                             const SolverConfig& solver_cfg,
                                             const ProgressCallback& progress) {
  spec.validate();
  const double target = spec.target_utilization;
  CalibrationResult out;

  auto finish = [&](const CurvePoint& p) {
    out.factor = p.factor;
    out.days_per_charge = p.days_per_charge;
    out.achieved_utilization = p.mean_utilization;
    out.point = p;
    return out;
  };

  CurvePoint lo = evaluate(network, spec.factor_low, solver_cfg, spec.averaging, progress);
  CurvePoint hi = evaluate(network, spec.factor_high, solver_cfg, spec.averaging, progress);
  out.evaluations = 2;
  if (!(lo.mean_utilization < target && target < hi.mean_utilization)) {
    fail(ErrorKind::UnbracketedTarget,
         fmt::format("unbracketed-target: utilization is {} at factor {} and {} at factor {}; "
                     "widen the factor bounds to bracket {}",
                     lo.mean_utilization, lo.factor, hi.mean_utilization, hi.factor, target));
  }

  while (out.evaluations < spec.max_evals) {
    const double mid_factor = 0.5 * (lo.factor + hi.factor);
    const CurvePoint mid = evaluate(network, mid_factor, solver_cfg, spec.averaging, progress);
    ++out.evaluations;
    if (std::abs(mid.mean_utilization - target) <= spec.tolerance) return finish(mid);
    if (mid.mean_utilization < lo.mean_utilization || mid.mean_utilization > hi.mean_utilization) {
      out.warnings.push_back(fmt::format(
          "non-monotone utilization: {} at factor {} lies outside [{}, {}]", mid.mean_utilization,
          mid.factor, lo.mean_utilization, hi.mean_utilization));
    }
    if (mid.mean_utilization > target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  fail(ErrorKind::NotConverged,
       fmt::format("calibration did not reach tolerance {} within {} evaluations (bracket [{}, {}])",
                   spec.tolerance, spec.max_evals, lo.factor, hi.factor));
}

std::vector<CurvePoint> frequency_curve(const Network& network, std::vector<double> factors,
                                        const SolverConfig& solver_cfg, UtilizationAverage mode) {
  for (const double f : factors) {
    if (!(f > 0.0)) fail(ErrorKind::InvalidInput, "curve factors must be positive");
  }
  std::sort(factors.begin(), factors.end());
  std::vector<CurvePoint> curve;
  curve.reserve(factors.size());
  for (const double f : factors) curve.push_back(evaluate(network, f, solver_cfg, mode, {}));
  return curve;
}

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve) {
  os << "days_per_charge,mean_utilization\n";
  for (const auto& p : curve) fmt::print(os, "{},{}\n", p.days_per_charge, p.mean_utilization);
}

}  // namespace evcs
