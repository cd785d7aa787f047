#include "mnpt/plan.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "mnpt/error.hpp"

namespace mnpt {

std::string to_string(PlanViolation v) {
  switch (v) {
    case PlanViolation::NonPositiveFrequency:
      return "non_positive_frequency";
    case PlanViolation::MinusLineNotPositive:
      return "minus_line_not_positive";
    case PlanViolation::PlusLineOnMains:
      return "plus_line_on_mains";
    case PlanViolation::MinusLineOnMains:
      return "minus_line_on_mains";
    case PlanViolation::NonCommensurate:
      return "non_commensurate";
    case PlanViolation::SampleRateTooLow:
      return "sample_rate_too_low";
    case PlanViolation::BadWindow:
      return "bad_window";
  }
  return "unknown";
}

std::string PlanResult::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << to_string(violations[i]);
    switch (violations[i]) {
      case PlanViolation::PlusLineOnMains:
        os << " (f_plus = " << plan.f_plus << " Hz = " << plan.f_plus / plan.mains << " x " << plan.mains << " Hz)";
        break;
      case PlanViolation::MinusLineOnMains:
        os << " (f_minus = " << plan.f_minus << " Hz = " << plan.f_minus / plan.mains << " x " << plan.mains
           << " Hz)";
        break;
      case PlanViolation::NonCommensurate:
        os << " (sample_rate " << plan.sample_rate << " Hz / f_base " << plan.f_base << " Hz)";
        break;
      case PlanViolation::SampleRateTooLow:
        os << " (need >= " << 10 * plan.f_plus << " Hz)";
        break;
      case PlanViolation::MinusLineNotPositive:
        os << " (f_minus = " << plan.f_minus << " Hz)";
        break;
      default:
        break;
    }
  }
  return os.str();
}

PlanResult check_plan(std::int64_t f_high, std::int64_t f_low, double sample_rate, std::int64_t mains,
                      int window_periods) {
  PlanResult r;
  auto& p = r.plan;
  p.f_high = f_high;
  p.f_low = f_low;
  p.f_plus = f_high + 2 * f_low;
  p.f_minus = f_high - 2 * f_low;
  p.sample_rate = sample_rate;
  p.window_periods = window_periods;
  p.mains = mains;

  if (f_high <= 0 || f_low <= 0) {
    r.violations.push_back(PlanViolation::NonPositiveFrequency);
    p.f_base = 0;
  } else {
    p.f_base = std::gcd(f_high, f_low);
  }
  if (p.f_minus <= 0) r.violations.push_back(PlanViolation::MinusLineNotPositive);
  if (mains > 0) {
    if (p.f_plus > 0 && p.f_plus % mains == 0) r.violations.push_back(PlanViolation::PlusLineOnMains);
    if (p.f_minus > 0 && p.f_minus % mains == 0) r.violations.push_back(PlanViolation::MinusLineOnMains);
  }
  if (p.f_base > 0) {
    const double ratio = sample_rate / double(p.f_base);
    if (!(sample_rate > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
      r.violations.push_back(PlanViolation::NonCommensurate);
    }
  }
  if (!(sample_rate >= 10.0 * double(p.f_plus))) r.violations.push_back(PlanViolation::SampleRateTooLow);
  if (window_periods < 1) r.violations.push_back(PlanViolation::BadWindow);
  return r;
}

FrequencyPlan plan_frequencies(std::int64_t f_high, std::int64_t f_low, double sample_rate, std::int64_t mains,
                               int window_periods) {
  auto r = check_plan(f_high, f_low, sample_rate, mains, window_periods);
  if (!r.valid()) throw ConfigError("frequency plan rejected: " + r.describe());
  return r.plan;
}

}  // namespace mnpt
