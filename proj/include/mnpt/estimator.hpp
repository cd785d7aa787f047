#pragma once

// Inverse pipeline: line phasors of the measured channels, background and
// reference removal, reconstruction of the relaxation phase at f_H from the
// two mixing lines, relaxation time and temperature.

#include <limits>
#include <string>
#include <vector>

#include "mnpt/field.hpp"
#include "mnpt/plan.hpp"
#include "mnpt/signal_chain.hpp"
#include "mnpt/spectrum.hpp"

namespace mnpt {

/// Where the excitation/coil phase removed from a sample line comes from.
enum class ReferenceMode {
  /// Sample-free coil A phase at f_H and f_L, composed as n_H·ref(f_H) + n_L·ref(f_L).
  Fundamental,
  /// Raw coil A channel at the analysed line itself.
  SameLine,
  /// No reference channel; only the induction factor j is removed.
  None,
};

enum class EstimatorMode { Mixing, Single };

std::string to_string(ReferenceMode m);
std::string to_string(EstimatorMode m);
ReferenceMode parse_reference_mode(const std::string& s);
EstimatorMode parse_estimator_mode(const std::string& s);

/// Complex line values of the three channels at one frequency.
struct LinePhasors {
  double frequency = 0.0;
  Complex sample;      // diff_sample
  Complex background;  // diff_background
  Complex ref;         // ref_A

  Complex difference() const { return sample - background; }
};

LinePhasors line_phasors(const MeasurementChannels& ch, double f);

/// Coil A content without the sample: ref_A − (sample − background)/amplifier.
Complex clean_reference(const LinePhasors& lp, const AmplifierModel& amp);

/// Phase of the sample line `line` relative to the excitation, with the
/// amplifier phase and the induction factor removed. Result in (−π, π].
/// Throws EstimationError when the difference line or the reference vanishes.
double sample_phase(const MeasurementChannels& ch, const AmplifierModel& amp, const FieldConfig& field,
                    MixingLine line, double phi_o = 0.0, ReferenceMode ref = ReferenceMode::Fundamental);

/// Single-frequency form: reference taken from the cleaned coil A line at f.
double sample_phase(const MeasurementChannels& ch, const AmplifierModel& amp, double f, double phi_o = 0.0);

/// φ_H from the measured voltage phases at f_H + 2f_L and f_H − 2f_L, both
/// carrying the −3π/2 offset: φ_H = (φ₊ + φ₋ + 3π)/2 on [0, π/2).
/// Throws EstimationError when the half-angle falls outside that range.
double phi_H_from_mixing(double phi_plus, double phi_minus);

/// Same reconstruction without the range check; returns the half-angle on [0, π).
double mixing_half_angle(double phi_plus, double phi_minus);

/// τ = tan(φ_H)/(2π f_H). Throws DomainError unless φ_H ∈ [0, π/2).
double tau_from_phase(double phi_H, double f_H);

struct CalibrationPoint {
  double tau;  // s
  double T;    // K
};

struct CalibrationModel {
  enum class Kind { OnePoint, AffineInInverseTau };

  Kind kind = Kind::OnePoint;
  double A = 0.0;  // K·s
  double B = 0.0;  // K, affine only
  std::vector<CalibrationPoint> points;

  /// Builds a one-point model directly from A.
  static CalibrationModel from_constant(double A);
};

std::string to_string(CalibrationModel::Kind k);
CalibrationModel::Kind parse_calibration_kind(const std::string& s);

/// One point: A = mean(T·τ). Affine: least squares of T against 1/τ.
/// Throws ConfigError for too few or degenerate points.
CalibrationModel calibrate(const std::vector<CalibrationPoint>& points, CalibrationModel::Kind kind);

/// T = A/τ (+ B). Throws DomainError for τ <= 0.
double temperature_from_tau(double tau, const CalibrationModel& cal);

struct EstimatorOptions {
  EstimatorMode mode = EstimatorMode::Mixing;
  ReferenceMode reference = ReferenceMode::Fundamental;
  double phi_o = 0.0;
};

struct LineDiagnostics {
  double frequency = 0.0;
  double amplitude = 0.0;  // |sample − background|
  double snr_db = std::numeric_limits<double>::infinity();
  double phase = 0.0;      // sample_phase at this line
};

struct TemperatureEstimate {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  bool valid = false;
  std::string reason;  // empty when valid
  double T_est = kNaN;
  double tau_est = kNaN;
  double phi_H = kNaN;
  double phi_plus = kNaN;   // voltage-phase convention (−3π/2 offset), mixing only
  double phi_minus = kNaN;
  std::vector<LineDiagnostics> lines;
};

/// Field whose tones the plan describes (amplitudes irrelevant to the estimator).
FieldConfig plan_field(const FrequencyPlan& plan);

/// Full pipeline. Never throws for estimation failures: the returned estimate
/// is flagged invalid and carries the reason. Inconsistent inputs (channels
/// not matching the plan) still throw ConfigError.
TemperatureEstimate estimate_temperature(const MeasurementChannels& ch, const FrequencyPlan& plan,
                                         const AmplifierModel& amp, const CalibrationModel& cal,
                                         const EstimatorOptions& opts = {});

}  // namespace mnpt
