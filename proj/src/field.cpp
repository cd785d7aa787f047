#include "mnpt/field.hpp"

#include <cmath>
#include <numeric>

#include "mnpt/constants.hpp"
#include "mnpt/error.hpp"

namespace mnpt {

FieldConfig::FieldConfig(std::int64_t f_high_hz, std::int64_t f_low_hz, double B_high, double B_low,
                         double phase_high, double phase_low)
    : f_high_(f_high_hz),
      f_low_(f_low_hz),
      B_high_(B_high),
      B_low_(B_low),
      phase_high_(phase_high),
      phase_low_(phase_low) {
  if (f_low_ <= 0) throw ConfigError("f_low must be > 0");
  if (f_high_ <= f_low_) throw ConfigError("f_high must be > f_low");
  if (!(B_high_ >= 0.0) || !(B_low_ >= 0.0) || !std::isfinite(B_high_) || !std::isfinite(B_low_)) {
    throw ConfigError("field amplitudes must be finite and >= 0");
  }
  f_base_ = std::gcd(f_high_, f_low_);
}

double FieldConfig::omega_base() const { return kTwoPi * f_base(); }

double FieldConfig::field_at(double t) const {
  // Reduce f·t to a fraction of a cycle first; keeps long time stamps exact.
  const auto cyc = [t](std::int64_t f) {
    const double c = double(f) * t;
    return kTwoPi * (c - std::floor(c));
  };
  return B_low_ * std::cos(cyc(f_low_) + phase_low_) + B_high_ * std::cos(cyc(f_high_) + phase_high_);
}

FieldConfig FieldConfig::with_amplitudes(double B_high, double B_low) const {
  return FieldConfig(f_high_, f_low_, B_high, B_low, phase_high_, phase_low_);
}

FieldConfig FieldConfig::with_phases(double phase_high, double phase_low) const {
  return FieldConfig(f_high_, f_low_, B_high_, B_low_, phase_high, phase_low);
}

}  // namespace mnpt
