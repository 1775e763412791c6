#include "evcs/jobs.hpp"

#include <fmt/format.h>

#include "evcs/error.hpp"

namespace evcs {

using nlohmann::json;

std::string_view to_string(JobKind k) noexcept {
  switch (k) {
    case JobKind::Solve: return "SOLVE";
    case JobKind::Calibrate: return "CALIBRATE";
    case JobKind::Compare: return "COMPARE";
  }
  return "SOLVE";
}

std::string_view to_string(JobStatus s) noexcept {
  switch (s) {
    case JobStatus::Queued: return "QUEUED";
    case JobStatus::Running: return "RUNNING";
    case JobStatus::Done: return "DONE";
    case JobStatus::Failed: return "FAILED";
  }
  return "FAILED";
}

namespace {

std::optional<JobKind> kind_from_string(std::string_view s) {
  if (s == "SOLVE") return JobKind::Solve;
  if (s == "CALIBRATE") return JobKind::Calibrate;
  if (s == "COMPARE") return JobKind::Compare;
  return std::nullopt;
}

std::optional<JobStatus> status_from_string(std::string_view s) {
  if (s == "QUEUED") return JobStatus::Queued;
  if (s == "RUNNING") return JobStatus::Running;
  if (s == "DONE") return JobStatus::Done;
  if (s == "FAILED") return JobStatus::Failed;
  return std::nullopt;
}

bool finished(JobStatus s) { return s == JobStatus::Done || s == JobStatus::Failed; }

}  // namespace

json job_record_to_json(const JobRecord& r) {
  json j{{"job_id", r.job_id},
         {"kind", std::string(to_string(r.kind))},
         {"status", std::string(to_string(r.status))},
         {"progress",
          {{"iteration", r.progress.iteration},
           {"epsilon", r.progress.epsilon},
           {"wardrop_gap", r.progress.wardrop_gap}}}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

bool JobContext::report(const SolverProgress& p) {
  // A new solve restarts the solver's counter; keep the job's counter rising.
  if (p.iteration <= last_raw_) offset_ += last_raw_;
  last_raw_ = p.iteration;
  {
    std::lock_guard lock(store_.mutex_);
    entry_->record.progress = {offset_ + p.iteration, p.epsilon, p.wardrop_gap};
  }
  return !cancelled();
}

bool JobContext::cancelled() const noexcept { return entry_->cancel.load(); }

JobStore::JobStore(std::size_t workers, std::optional<std::filesystem::path> state_dir)
    : state_dir_(std::move(state_dir)) {
  if (state_dir_) {
    std::filesystem::create_directories(*state_dir_);
    replay_state();
    journal_.open(*state_dir_ / "jobs.jsonl", std::ios::app);
    if (!journal_) {
      fail(ErrorKind::InvalidInput,
           fmt::format("cannot open job journal in '{}'", state_dir_->string()));
    }
    std::lock_guard lock(mutex_);
    for (auto& [id, entry] : jobs_) {
      if (entry->record.error == "restart") persist(entry->record);
    }
  }
  if (workers == 0) workers = 1;
  workers_.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    workers_.emplace_back([this](std::stop_token st) { worker_loop(st); });
  }
}

JobStore::~JobStore() {
  {
    std::lock_guard lock(mutex_);
    for (auto& [id, entry] : jobs_) entry->cancel = true;
  }
  for (auto& w : workers_) w.request_stop();
  changed_.notify_all();
  workers_.clear();  // joins
}

void JobStore::replay_state() {
  std::ifstream in(*state_dir_ / "jobs.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    auto kind = kind_from_string(j.value("kind", ""));
    auto status = status_from_string(j.value("status", ""));
    const std::string id = j.value("job_id", "");
    if (!kind || !status || id.empty()) continue;

    auto& entry = jobs_[id];
    if (!entry) entry = std::make_shared<Entry>();
    entry->record.job_id = id;
    entry->record.kind = *kind;
    entry->record.status = *status;
    entry->record.error = j.value("error", "");
    if (auto it = j.find("result"); it != j.end()) entry->record.result = *it;

    if (id.rfind("job-", 0) == 0) {
      try {
        next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(id.substr(4)) + 1);
      } catch (const std::exception&) {
      }
    }
  }
  for (auto& [id, entry] : jobs_) {
    if (!finished(entry->record.status)) {
      entry->record.status = JobStatus::Failed;
      entry->record.error = "restart";
    }
  }
}

void JobStore::persist(const JobRecord& record) {
  if (!journal_.is_open()) return;
  json j{{"job_id", record.job_id},
         {"kind", std::string(to_string(record.kind))},
         {"status", std::string(to_string(record.status))}};
  if (!record.error.empty()) j["error"] = record.error;
  if (record.result) j["result"] = *record.result;
  journal_ << j.dump() << '\n';
  journal_.flush();
}

std::string JobStore::submit(JobKind kind, JobFn fn) {
  auto entry = std::make_shared<Entry>();
  std::string id;
  {
    std::lock_guard lock(mutex_);
    id = fmt::format("job-{:06}", next_id_++);
    entry->record.job_id = id;
    entry->record.kind = kind;
    entry->fn = std::move(fn);
    jobs_[id] = entry;
    queue_.push_back(entry);
    persist(entry->record);
  }
  changed_.notify_all();
  return id;
}

std::optional<JobRecord> JobStore::get(const std::string& job_id) const {
  std::lock_guard lock(mutex_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second->record;
}

CancelOutcome JobStore::cancel(const std::string& job_id) {
  {
    std::lock_guard lock(mutex_);
    auto it = jobs_.find(job_id);
    if (it == jobs_.end()) return CancelOutcome::NotFound;
    auto& entry = *it->second;
    if (finished(entry.record.status)) return CancelOutcome::AlreadyFinished;
    entry.cancel = true;
    if (entry.record.status == JobStatus::Queued) {
      entry.record.status = JobStatus::Failed;
      entry.record.error = "cancelled";
      persist(entry.record);
    }
  }
  changed_.notify_all();
  return CancelOutcome::Cancelled;
}

bool JobStore::wait(const std::string& job_id, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) return false;
  auto entry = it->second;
  return changed_.wait_for(lock, timeout, [&] { return finished(entry->record.status); });
}

void JobStore::worker_loop(std::stop_token stop) {
  while (true) {
    std::shared_ptr<Entry> entry;
    {
      std::unique_lock lock(mutex_);
      if (!changed_.wait(lock, stop, [&] { return !queue_.empty(); })) return;
      entry = std::move(queue_.front());
      queue_.pop_front();
      if (entry->record.status != JobStatus::Queued) continue;  // cancelled while queued
      entry->record.status = JobStatus::Running;
      persist(entry->record);
    }

    JobContext ctx(*this, entry);
    std::optional<json> result;
    std::string error;
    try {
      result = entry->fn(ctx);
    } catch (const Error& e) {
      error = e.kind() == ErrorKind::Cancelled ? "cancelled" : e.what();
    } catch (const std::exception& e) {
      error = e.what();
    }

    {
      std::lock_guard lock(mutex_);
      if (result) {
        entry->record.status = JobStatus::Done;
        entry->record.result = std::move(result);
      } else {
        entry->record.status = JobStatus::Failed;
        entry->record.error = std::move(error);
      }
      entry->fn = nullptr;
      persist(entry->record);
    }
    changed_.notify_all();
  }
}

}  // namespace evcs
