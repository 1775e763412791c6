#include "evcs/mdc_sim.hpp"

#include <cmath>
#include <deque>
#include <ostream>
#include <queue>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "evcs/error.hpp"
#include "evcs/queueing.hpp"

namespace evcs {
namespace {

enum class EventType : int { Completion = 0, Arrival = 1 };

struct Event {
  double time;
  EventType type;
  std::uint64_t seq;
  std::int64_t customer;
};

// Earliest time first; at equal times completions go before arrivals so a
// freed charger is visible to a simultaneous arrival.
struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.type != b.type) return static_cast<int>(a.type) > static_cast<int>(b.type);
    return a.seq > b.seq;
  }
};

// Uniform on the open interval (0, 1) from the top 53 bits, so the stream is
// reproducible across standard library implementations.
double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double exponential(std::mt19937_64& rng, double rate) {
  return -std::log(open_uniform(rng)) / rate;
}

}  // namespace

void validate(const SimConfig& cfg) {
  if (!(cfg.horizon > 0.0)) fail(ErrorKind::InvalidInput, "horizon must be positive");
  if (cfg.runs < 1) fail(ErrorKind::InvalidInput, "runs must be >= 1");
  if (!(cfg.service_time > 0.0)) fail(ErrorKind::InvalidInput, "service_time must be positive");
  if (cfg.servers < 1) fail(ErrorKind::InvalidInput, "servers must be >= 1");
  if (!(cfg.arrival_rate >= 0.0) || !std::isfinite(cfg.arrival_rate)) {
    fail(ErrorKind::InvalidInput, "arrival_rate must be non-negative and finite");
  }
}

SimResult simulate_replication(const SimConfig& cfg, std::uint64_t seed,
                               ReplicationTrace* trace) {
  validate(cfg);
  std::mt19937_64 rng(seed);
  std::priority_queue<Event, std::vector<Event>, Later> events;
  std::deque<std::pair<std::int64_t, double>> waiting;  // (customer, arrival)
  std::uint64_t seq = 0;
  std::int64_t next_customer = 0;
  int busy = 0;

  double wait_sum = 0.0;
  std::int64_t started = 0;
  std::int64_t served = 0;

  if (trace) *trace = ReplicationTrace{};

  auto schedule_arrival = [&](double now) {
    const double t = now + exponential(rng, cfg.arrival_rate);
    if (t < cfg.horizon) events.push({t, EventType::Arrival, seq++, -1});
  };
  auto start_service = [&](std::int64_t customer, double arrival, double now) {
    ++busy;
    ++started;
    wait_sum += now - arrival;
    if (trace) trace->customers[static_cast<std::size_t>(customer)].service_start = now;
    events.push({now + cfg.service_time, EventType::Completion, seq++, customer});
  };

  if (cfg.arrival_rate > 0.0) schedule_arrival(0.0);

  while (!events.empty() && events.top().time < cfg.horizon) {
    const Event ev = events.top();
    events.pop();
    if (ev.type == EventType::Arrival) {
      const std::int64_t id = next_customer++;
      if (trace) trace->customers.push_back({ev.time, std::nullopt, std::nullopt});
      if (busy < cfg.servers) {
        start_service(id, ev.time, ev.time);
      } else {
        waiting.emplace_back(id, ev.time);
      }
      schedule_arrival(ev.time);
    } else {
      --busy;
      ++served;
      if (trace) trace->customers[static_cast<std::size_t>(ev.customer)].departure = ev.time;
      if (!waiting.empty()) {
        const auto [id, arrival] = waiting.front();
        waiting.pop_front();
        start_service(id, arrival, ev.time);
      }
    }
  }

  if (trace) {
    trace->arrived = next_customer;
    trace->served = served;
    trace->in_system = next_customer - served;
  }

  SimResult out;
  out.sample_count = started;
  out.mean_wait = started > 0 ? wait_sum / static_cast<double>(started) : 0.0;
  out.per_run_means.push_back(out.mean_wait);
  return out;
}

SimResult simulate_mdc(const SimConfig& cfg) {
  validate(cfg);
  SimResult out;
  double sum = 0.0;
  for (int r = 0; r < cfg.runs; ++r) {
    const SimResult run = simulate_replication(cfg, cfg.seed + static_cast<std::uint64_t>(r));
    out.sample_count += run.sample_count;
    out.per_run_means.push_back(run.mean_wait);
    sum += run.mean_wait;
  }
  out.mean_wait = sum / static_cast<double>(cfg.runs);
  return out;
}

std::vector<ApproxErrorRow> validate_approximation(const std::vector<double>& rho_grid,
                                                   const std::vector<int>& c_grid,
                                                   const SimConfig& cfg_template) {
  std::vector<ApproxErrorRow> rows;
  rows.reserve(rho_grid.size() * c_grid.size());
  for (const int c : c_grid) {
    for (const double rho : rho_grid) {
      if (!(rho > 0.0 && rho < 1.0)) {
        fail(ErrorKind::InvalidInput, fmt::format("rho must lie in (0, 1), got {}", rho));
      }
      SimConfig cfg = cfg_template;
      cfg.servers = c;
      cfg.service_time = 1.0;
      cfg.arrival_rate = rho * c;

      ApproxErrorRow row;
      row.rho = rho;
      row.servers = c;
      row.approx = mdc_queue_wait({cfg.arrival_rate, 1.0, c});
      row.sim_mean = simulate_mdc(cfg).mean_wait;
      row.abs_err = std::abs(row.approx - row.sim_mean);
      if (row.sim_mean > 0.0) row.rel_err = row.abs_err / row.sim_mean;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_error_table_csv(std::ostream& os, const std::vector<ApproxErrorRow>& rows) {
  os << "rho,servers,approx,sim_mean,abs_err,rel_err\n";
  for (const auto& r : rows) {
    fmt::print(os, "{},{},{},{},{},{}\n", r.rho, r.servers, r.approx, r.sim_mean, r.abs_err,
               r.rel_err ? fmt::format("{}", *r.rel_err) : std::string{});
  }
}

}  // namespace evcs
