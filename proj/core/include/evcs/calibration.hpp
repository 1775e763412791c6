#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "evcs/msa_solver.hpp"
#include "evcs/network.hpp"

namespace evcs {

enum class UtilizationAverage { Unweighted, ChargerWeighted };

/// Mean of rho_j over stations. The charger-weighted variant weights each
/// station by k_j and needs the station list.
double mean_utilization(const EquilibriumResult& result);
double mean_utilization(const EquilibriumResult& result, std::span<const Station> stations,
                        UtilizationAverage mode);

struct CalibrationSpec {
  double target_utilization = 0.076;
  double factor_low = 1.0 / 30.0;  // charges/day per EV
  double factor_high = 2.0;
  double tolerance = 0.001;  // absolute, in utilization units
  int max_evals = 60;
  UtilizationAverage averaging = UtilizationAverage::Unweighted;

  void validate() const;
};

struct CurvePoint {
  double factor = 0.0;          // charges/day per EV
  double days_per_charge = 0.0;  // 1 / factor
  double mean_utilization = 0.0;
};

struct CalibrationResult {
  double factor = 0.0;
  double days_per_charge = 0.0;
  double achieved_utilization = 0.0;
  int evaluations = 0;
  CurvePoint point;
  std::vector<std::string> warnings;
};

/// Bisection on the charging-frequency factor until the equilibrium's mean
/// utilization is within tolerance of the target. Throws
/// Error(UnbracketedTarget) when the bounds do not bracket the target and
/// Error(NotConverged) when max_evals is exhausted.
CalibrationResult calibrate_frequency_factor(const Network& network, const CalibrationSpec& spec,
                                             const SolverConfig& solver_cfg,
                                             const ProgressCallback& progress = {});

/// One solve per factor; rows sorted by factor.
std::vector<CurvePoint> frequency_curve(const Network& network, std::vector<double> factors,
                                        const SolverConfig& solver_cfg,
                                        UtilizationAverage mode = UtilizationAverage::Unweighted);

/// CSV with header days_per_charge,mean_utilization.
void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve);

}  // namespace evcs
