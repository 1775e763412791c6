#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace evcs {

struct SimConfig {
  double arrival_rate = 0.5;  // per time unit
  double service_time = 1.0;  // deterministic, = 1/mu
  int servers = 1;
  double horizon = 10000.0;
  std::uint64_t seed = 42;
  int runs = 5;
};

struct SimResult {
  double mean_wait = 0.0;  // mean of per_run_means
  std::int64_t sample_count = 0;
  std::vector<double> per_run_means;

  bool operator==(const SimResult&) const = default;
};

/// Per-customer record of one replication, in arrival order.
struct CustomerRecord {
  double arrival = 0.0;
  std::optional<double> service_start;  // unset if still queued at the horizon
  std::optional<double> departure;      // unset if not finished by the horizon
};

struct ReplicationTrace {
  std::vector<CustomerRecord> customers;
  std::int64_t arrived = 0;
  std::int64_t served = 0;     // completed service before the horizon
  std::int64_t in_system = 0;  // queued or in service at the horizon
};

/// Throws Error(InvalidInput) when the config invariants are violated.
void validate(const SimConfig& cfg);

/// One replication of an M/D/C FIFO queue with an empty start. Waiting times
/// are counted for customers that enter service before the horizon.
/// Fills `trace` when given.
SimResult simulate_replication(const SimConfig& cfg, std::uint64_t seed,
                               ReplicationTrace* trace = nullptr);

/// Runs cfg.runs replications seeded seed, seed+1, ... and averages them.
SimResult simulate_mdc(const SimConfig& cfg);

struct ApproxErrorRow {
  double rho = 0.0;
  int servers = 1;
  double approx = 0.0;
  double sim_mean = 0.0;
  double abs_err = 0.0;
  std::optional<double> rel_err;  // undefined when sim_mean == 0

  bool operator==(const ApproxErrorRow&) const = default;
};

/// Compares the closed-form M/D/C delay with simulation over a (rho, C) grid.
/// Service rate is fixed to 1; arrival_rate and servers of the template are
/// overridden per cell.
std::vector<ApproxErrorRow> validate_approximation(const std::vector<double>& rho_grid,
                                                   const std::vector<int>& c_grid,
                                                   const SimConfig& cfg_template);

/// CSV with header rho,servers,approx,sim_mean,abs_err,rel_err.
void write_error_table_csv(std::ostream& os, const std::vector<ApproxErrorRow>& rows);

}  // namespace evcs
