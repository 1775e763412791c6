#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "evcs/msa_solver.hpp"

namespace evcs {

enum class JobKind { Solve, Calibrate, Compare };
enum class JobStatus { Queued, Running, Done, Failed };

std::string_view to_string(JobKind k) noexcept;
std::string_view to_string(JobStatus s) noexcept;

struct JobProgress {
  std::int64_t iteration = 0;  // cumulative over every solve the job runs
  double epsilon = 0.0;
  double wardrop_gap = 0.0;
};

struct JobRecord {
  std::string job_id;
  JobKind kind = JobKind::Solve;
  JobStatus status = JobStatus::Queued;
  JobProgress progress;
  std::optional<nlohmann::json> result;  // set when Done
  std::string error;                     // set when Failed
};

nlohmann::json job_record_to_json(const JobRecord& record);

/// Handed to a running job: forwards solver progress into the job table and
/// exposes the cancellation flag.
class JobContext {
 public:
  /// Returns false once the job has been cancelled.
  bool report(const SolverProgress& p);
  bool cancelled() const noexcept;
  ProgressCallback callback() {
    return [this](const SolverProgress& p) { return report(p); };
  }

 private:
  friend class JobStore;
  struct Entry;
  JobContext(class JobStore& store, std::shared_ptr<Entry> entry)
      : store_(store), entry_(std::move(entry)) {}

  JobStore& store_;
  std::shared_ptr<Entry> entry_;
  std::int64_t offset_ = 0;
  std::int64_t last_raw_ = 0;
};

using JobFn = std::function<nlohmann::json(JobContext&)>;

enum class CancelOutcome { Cancelled, NotFound, AlreadyFinished };

/// In-memory job table served by a bounded worker pool. With a state
/// directory, every status change is appended to jobs.jsonl; on startup jobs
/// that were queued or running are marked failed with "restart".
class JobStore {
 public:
  explicit JobStore(std::size_t workers,
                    std::optional<std::filesystem::path> state_dir = std::nullopt);
  ~JobStore();

  JobStore(const JobStore&) = delete;
  JobStore& operator=(const JobStore&) = delete;

  std::string submit(JobKind kind, JobFn fn);
  std::optional<JobRecord> get(const std::string& job_id) const;
  CancelOutcome cancel(const std::string& job_id);

  /// Blocks until the job is Done or Failed or the timeout expires.
  bool wait(const std::string& job_id, std::chrono::milliseconds timeout) const;

  std::size_t worker_count() const noexcept { return workers_.size(); }

 private:
  friend class JobContext;
  using Entry = JobContext::Entry;

  void worker_loop(std::stop_token stop);
  void persist(const JobRecord& record);  // caller holds mutex_
  void replay_state();

  mutable std::mutex mutex_;
  mutable std::condition_variable_any changed_;
  std::map<std::string, std::shared_ptr<Entry>> jobs_;
  std::deque<std::shared_ptr<Entry>> queue_;
  std::uint64_t next_id_ = 1;
  std::optional<std::filesystem::path> state_dir_;
  std::ofstream journal_;
  std::vector<std::jthread> workers_;
};

struct JobContext::Entry {
  JobRecord record;
  JobFn fn;
  std::atomic<bool> cancel{false};
};

}  // namespace evcs
