#include "evcs/error.hpp"

namespace evcs {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::ZeroArrival: return "zero-arrival";
    case ErrorKind::OverCapacity: return "over-capacity";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::UnbracketedTarget: return "unbracketed-target";
    case ErrorKind::NotConverged: return "not-converged";
    case ErrorKind::Cancelled: return "cancelled";
  }
  return "unknown";
}

}  // namespace evcs
