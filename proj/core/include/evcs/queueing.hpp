#pragma once

#include <optional>

namespace evcs {

// Units throughout: rates in vehicles/day, times in days.

/// Arrivals at or below this rate are treated as an empty station.
inline constexpr double kZeroArrivalThreshold = 1e-12;

/// Any alpha term above this is taken to mean the queue delay is negligible.
inline constexpr double kAlphaOverflowGuard = 1e100;

struct QueueInput {
  double arrival_rate = 0.0;  // lambda
  double service_rate = 1.0;  // mu, per charger
  int servers = 1;            // C

  double utilization() const noexcept {
    return arrival_rate / (service_rate * servers);
  }
};

struct QueueDelays {
  double wait_queue_mmc = 0.0;
  double wait_queue_mdc = 0.0;
  double total_wait_mdc = 0.0;
  double utilization = 0.0;
  bool over_capacity = false;

  bool operator==(const QueueDelays&) const = default;
};

/// Throws Error(InvalidInput) when the QueueInput invariants are violated.
void validate(const QueueInput& q);

/// Recursive term alpha_C with alpha_1 = 1, alpha_i = 1 + (mu/lambda)(i-1)alpha_{i-1}.
/// Returns std::nullopt when a term exceeds kAlphaOverflowGuard (negligible delay).
/// Throws Error(ZeroArrival) if arrival_rate is zero.
std::optional<double> alpha_recursion(const QueueInput& q);

/// M/M/C expected time in queue. Throws Error(OverCapacity) when rho >= 1.
/// Returns 0 in the alpha-overflow regime.
double mmc_queue_wait(const QueueInput& q);

/// Approximate M/D/C expected time in queue: the M/M/C delay halved and
/// corrected by a factor that only depends on rho and C. Exact for C = 1.
double mdc_queue_wait(const QueueInput& q);

/// Total function used by the solver: empty-station short circuit, the
/// M/D/C approximation below capacity, and the deterministic worst-case
/// delay lambda/(2 mu C) at or above capacity.
QueueDelays station_total_wait(const QueueInput& q);

}  // namespace evcs
