#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mnpt {

/// Machine-readable failure classes. The CLI maps each to a distinct exit code.
enum class ErrorCategory {
  Domain,       // argument outside a function's mathematical domain
  Config,       // inconsistent or unparsable configuration
  Convergence,  // a numerical procedure failed to converge
  Estimation,   // the inverse pipeline could not produce a valid number
  Io,           // file system / parsing of data files
};

std::string_view to_string(ErrorCategory c) noexcept;
int exit_code(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCategory::Domain, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what) : Error(ErrorCategory::Convergence, what) {}
};

class EstimationError : public Error {
 public:
  explicit EstimationError(const std::string& what) : Error(ErrorCategory::Estimation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

}  // namespace mnpt
