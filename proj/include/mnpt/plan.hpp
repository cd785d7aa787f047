#pragma once

// Choice and validation of the excitation pair and acquisition rate.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mnpt {

struct FrequencyPlan {
  std::int64_t f_high = 6000;
  std::int64_t f_low = 1570;
  std::int64_t f_plus = 9140;
  std::int64_t f_minus = 2860;
  std::int64_t f_base = 10;
  double sample_rate = 500e3;
  int window_periods = 10;
  std::int64_t mains = 50;  // 0 disables the mains rule
};

enum class PlanViolation {
  NonPositiveFrequency,  // f_low <= 0 or f_high <= 0
  MinusLineNotPositive,  // f_high <= 2 f_low
  PlusLineOnMains,       // f_plus is a multiple of the mains frequency
  MinusLineOnMains,
  NonCommensurate,       // sample_rate is not an integer multiple of f_base
  SampleRateTooLow,      // sample_rate < 10 f_plus
  BadWindow,             // window_periods < 1
};

std::string to_string(PlanViolation v);

struct PlanResult {
  FrequencyPlan plan;  // filled in as far as the inputs allow
  std::vector<PlanViolation> violations;

  bool valid() const { return violations.empty(); }
  /// One line listing every violation, empty when valid.
  std::string describe() const;
};

/// Checks every constraint and collects all violations.
PlanResult check_plan(std::int64_t f_high, std::int64_t f_low, double sample_rate, std::int64_t mains = 50,
                      int window_periods = 10);

/// As check_plan, but throws ConfigError naming every violation.
FrequencyPlan plan_frequencies(std::int64_t f_high, std::int64_t f_low, double sample_rate, std::int64_t mains = 50,
                               int window_periods = 10);

}  // namespace mnpt
