#include "evcs/queueing.hpp"

#include <cmath>
#include <string>

#include "evcs/error.hpp"

namespace evcs {

void validate(const QueueInput& q) {
  if (!(q.service_rate > 0.0) || !std::isfinite(q.service_rate)) {
    fail(ErrorKind::InvalidInput, "service_rate must be positive and finite");
  }
  if (q.servers < 1) {
    fail(ErrorKind::InvalidInput, "servers must be >= 1");
  }
  if (!(q.arrival_rate >= 0.0) || !std::isfinite(q.arrival_rate)) {
    fail(ErrorKind::InvalidInput, "arrival_rate must be non-negative and finite");
  }
}

std::optional<double> alpha_recursion(const QueueInput& q) {
  validate(q);
  if (q.arrival_rate == 0.0) {
    fail(ErrorKind::ZeroArrival, "alpha recursion requires a positive arrival rate");
  }
  const double ratio = q.service_rate / q.arrival_rate;
  double alpha = 1.0;
  for (int i = 2; i <= q.servers; ++i) {
    alpha = 1.0 + ratio * static_cast<double>(i - 1) * alpha;
    if (!(alpha <= kAlphaOverflowGuard)) {
      return std::nullopt;
    }
  }
  return alpha;
}

double mmc_queue_wait(const QueueInput& q) {
  validate(q);
  if (q.utilization() >= 1.0) {
    fail(ErrorKind::OverCapacity,
         "M/M/C delay undefined at utilization " + std::to_string(q.utilization()));
  }
  const auto alpha = alpha_recursion(q);
  if (!alpha) {
    return 0.0;
  }
  const double lambda = q.arrival_rate;
  const double slack = q.servers * q.service_rate - lambda;
  return lambda / (slack * slack * (*alpha + lambda / slack));
}

double mdc_queue_wait(const QueueInput& q) {
  const double mmc = mmc_queue_wait(q);
  if (mmc == 0.0) {
    return 0.0;
  }
  const double rho = q.utilization();
  const double c = static_cast<double>(q.servers);
  const double correction =
      (1.0 - rho) * (c - 1.0) * (std::sqrt(4.0 + 5.0 * c) - 2.0) / (16.0 * rho * c);
  return 0.5 * mmc * (1.0 + correction);
}

QueueDelays station_total_wait(const QueueInput& q) {
  validate(q);
  QueueDelays out;
  const double service_time = 1.0 / q.service_rate;
  out.utilization = q.utilization();

  if (q.arrival_rate <= kZeroArrivalThreshold) {
    out.total_wait_mdc = service_time;
    return out;
  }
  if (out.utilization < 1.0) {
    out.wait_queue_mmc = mmc_queue_wait(q);
    out.wait_queue_mdc = mdc_queue_wait(q);
    out.total_wait_mdc = out.wait_queue_mdc + service_time;
    return out;
  }
  // Worst case: everyone assigned arrives at once; delay of the last in line.
  const double fallback = q.arrival_rate / (2.0 * q.service_rate * q.servers);
  out.wait_queue_mmc = fallback;
  out.wait_queue_mdc = fallback;
  out.total_wait_mdc = fallback + service_time;
  out.over_capacity = true;
  return out;
}

}  // namespace evcs
