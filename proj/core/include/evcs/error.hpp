#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evcs {

enum class ErrorKind {
  InvalidInput,  // schema, shape, duplicate id, bad parameter
  ZeroArrival,
  OverCapacity,
  Numeric,
  UnbracketedTarget,
  NotConverged,
  Cancelled,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library. `kind()` drives the CLI exit code
/// and the HTTP status; `what()` carries the human readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace evcs
