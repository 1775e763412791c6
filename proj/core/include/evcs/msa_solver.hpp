#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "evcs/matrix.hpp"
#include "evcs/network.hpp"
#include "evcs/queueing.hpp"

namespace evcs {

struct SolverConfig {
  double tolerance = 1e-4;  // stop when ||X^n - X^{n-1}||_F <= tolerance
  std::int64_t max_iterations = 500'000;
  double weight_access = 1.0;
  double weight_charging = 1.0;
  std::int64_t gap_check_period = 100;  // iterations between Wardrop gap updates in progress

  void validate() const;
};

struct SolverProgress {
  std::int64_t iteration = 0;
  double epsilon = 0.0;
  double wardrop_gap = 0.0;  // last computed value (refreshed every gap_check_period)
};

/// Called once per iteration; returning false cancels the solve with
/// Error(Cancelled).
using ProgressCallback = std::function<bool(const SolverProgress&)>;

struct EquilibriumResult {
  Matrix assignment;  // X, row-stochastic
  std::vector<double> flows;  // A_j
  Matrix costs;       // T^{n+1}
  std::vector<QueueDelays> station_delays;
  std::int64_t iterations = 0;
  double final_epsilon = 0.0;
  double wardrop_gap = 0.0;
  bool converged = false;
  std::vector<std::string> warnings;

  bool operator==(const EquilibriumResult&) const = default;
};

/// T_ij = w_acc (d_ij + Wq_j) + w_char / mu_j.
Matrix cost_matrix(const TravelTimeMatrix& travel, std::span<const QueueDelays> delays,
                   std::span<const Station> stations, const SolverConfig& cfg);

/// One-hot rows at argmin_j T_ij; ties go to the lowest station index.
Matrix auxiliary_assignment(const Matrix& costs);

struct MsaStep {
  Matrix assignment;
  double epsilon = 0.0;  // Frobenius norm of the change
};

/// X^n = Y/(n+1) + n X^{n-1}/(n+1), for n >= 1.
MsaStep msa_step(const Matrix& previous, const Matrix& auxiliary, std::int64_t n);

/// A_j = sum_i lambda_i X_ij.
std::vector<double> station_flows(const Matrix& assignment, std::span<const double> lambda);

/// Queue delays at every station for the given flows.
std::vector<QueueDelays> station_delays(std::span<const double> flows,
                                        std::span<const Station> stations);

/// Flow-weighted relative excess of incurred cost over each node's best cost.
/// Zero demand gives 0.
double wardrop_gap(const Matrix& assignment, const Matrix& costs, std::span<const double> lambda);
double wardrop_gap(const EquilibriumResult& result, std::span<const double> lambda);

/// Method of Successive Averages for the charging-station access equilibrium.
EquilibriumResult solve_equilibrium(const Network& network, const SolverConfig& cfg = {},
                                    const ProgressCallback& progress = {});

}  // namespace evcs
