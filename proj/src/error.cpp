#include "mnpt/error.hpp"

namespace mnpt {

std::string_view to_string(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::Domain:
      return "domain";
    case ErrorCategory::Config:
      return "config";
    case ErrorCategory::Convergence:
      return "convergence";
    case ErrorCategory::Estimation:
      return "estimation";
    case ErrorCategory::Io:
      return "io";
  }
  return "unknown";
}

int exit_code(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::Domain:
      return 3;
    case ErrorCategory::Config:
      return 4;
    case ErrorCategory::Convergence:
      return 5;
    case ErrorCategory::Estimation:
      return 6;
    case ErrorCategory::Io:
      return 7;
  }
  return 1;
}

}  // namespace mnpt
