#pragma once

#include <cstdint>

namespace mnpt {

/// Dual-tone excitation H(t) = H_L cos(2πf_L t + θ_L) + H_H cos(2πf_H t + θ_H).
/// Frequencies are whole hertz so that the pair is exactly periodic with
/// fundamental f_base = gcd(f_H, f_L). Amplitudes are given as μ0·H in tesla.
class FieldConfig {
 public:
  FieldConfig() = default;
  FieldConfig(std::int64_t f_high_hz, std::int64_t f_low_hz, double B_high, double B_low,
              double phase_high = 0.0, double phase_low = 0.0);

  std::int64_t f_high_hz() const { return f_high_; }
  std::int64_t f_low_hz() const { return f_low_; }
  double f_high() const { return double(f_high_); }
  double f_low() const { return double(f_low_); }
  std::int64_t f_base_hz() const { return f_base_; }
  double f_base() const { return double(f_base_); }
  double omega_base() const;

  double B_high() const { return B_high_; }
  double B_low() const { return B_low_; }
  double phase_high() const { return phase_high_; }
  double phase_low() const { return phase_low_; }

  /// Harmonic indices of the two tones relative to f_base.
  int n_high() const { return int(f_high_ / f_base_); }
  int n_low() const { return int(f_low_ / f_base_); }

  /// μ0·H(t) in tesla.
  double field_at(double t) const;
  /// Peak of |μ0·H|, B_H + B_L.
  double peak() const { return B_high_ + B_low_; }

  FieldConfig with_amplitudes(double B_high, double B_low) const;
  FieldConfig with_phases(double phase_high, double phase_low) const;

 private:
  std::int64_t f_high_ = 6000;
  std::int64_t f_low_ = 1570;
  std::int64_t f_base_ = 10;
  double B_high_ = 0.36e-3;
  double B_low_ = 1.98e-3;
  double phase_high_ = 0.0;
  double phase_low_ = 0.0;
};

/// Intermodulation line n_high·f_H + n_low·f_L (n_low may be negative).
struct MixingLine {
  int n_high = 1;
  int n_low = 0;

  double frequency(const FieldConfig& field) const {
    return n_high * field.f_high() + n_low * field.f_low();
  }
  int harmonic(const FieldConfig& field) const { return n_high * field.n_high() + n_low * field.n_low(); }

  static constexpr MixingLine high() { return {1, 0}; }
  static constexpr MixingLine low() { return {0, 1}; }
  static constexpr MixingLine plus() { return {1, 2}; }
  static constexpr MixingLine minus() { return {1, -2}; }
};

}  // namespace mnpt
