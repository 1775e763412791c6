#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "evcs/jobs.hpp"

namespace evcs::app {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t workers = 0;  // 0: one per hardware thread
  std::optional<std::filesystem::path> state_dir;
  std::uint64_t seed = 42;
};

/// JSON-over-HTTP front end to the job store. All routes live under /v1/.
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Port 0 binds an ephemeral port. Returns the bound port, or -1.
  int bind();
  /// Blocks until stop().
  bool serve();
  void stop();

  JobStore& jobs();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace evcs::app
