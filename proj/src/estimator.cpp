#include "mnpt/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "mnpt/constants.hpp"
#include "mnpt/error.hpp"

namespace mnpt {

std::string to_string(ReferenceMode m) {
  switch (m) {
    case ReferenceMode::Fundamental:
      return "fundamental";
    case ReferenceMode::SameLine:
      return "same_line";
    case ReferenceMode::None:
      return "none";
  }
  return "fundamental";
}

std::string to_string(EstimatorMode m) { return m == EstimatorMode::Mixing ? "mixing" : "single"; }

ReferenceMode parse_reference_mode(const std::string& s) {
  if (s == "fundamental") return ReferenceMode::Fundamental;
  if (s == "same_line" || s == "same-line") return ReferenceMode::SameLine;
  if (s == "none") return ReferenceMode::None;
  throw ConfigError("unknown reference mode '" + s + "' (fundamental|same_line|none)");
}

EstimatorMode parse_estimator_mode(const std::string& s) {
  if (s == "mixing") return EstimatorMode::Mixing;
  if (s == "single") return EstimatorMode::Single;
  throw ConfigError("unknown estimator mode '" + s + "' (mixing|single)");
}

LinePhasors line_phasors(const MeasurementChannels& ch, double f) {
  LinePhasors lp;
  lp.frequency = f;
  lp.sample = extract_phasor(ch.diff_sample, f, ch.f_base).value();
  lp.background = extract_phasor(ch.diff_background, f, ch.f_base).value();
  lp.ref = extract_phasor(ch.ref_A, f, ch.f_base).value();
  return lp;
}

Complex clean_reference(const LinePhasors& lp, const AmplifierModel& amp) {
  return lp.ref - lp.difference() / amp.response(lp.frequency);
}

namespace {

double peak(const TimeSeries& ts) {
  double m = 0.0;
  for (double v : ts.samples) m = std::max(m, std::abs(v));
  return m;
}

// Lines below roundoff of the channel they come from carry no phase.
double checked_arg(Complex z, double scale, const std::string& what) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !(std::abs(z) > 1e-13 * scale)) {
    throw EstimationError(what + " vanishes; phase undefined");
  }
  return std::arg(z);
}

}  // namespace

double sample_phase(const MeasurementChannels& ch, const AmplifierModel& amp, const FieldConfig& field,
                    MixingLine line, double phi_o, ReferenceMode ref) {
  const double f = line.frequency(field);
  if (!(f > 0.0)) throw DomainError("analysed line must have a positive frequency");
  const auto lp = line_phasors(ch, f);
  const double sample =
      checked_arg(lp.difference(), peak(ch.diff_sample), "sample line at " + std::to_string(f) + " Hz");

  double reference = 0.0;
  switch (ref) {
    case ReferenceMode::Fundamental: {
      const auto tone = [&](int n, double ft) {
        if (n == 0) return 0.0;
        const auto t = line_phasors(ch, ft);
        const auto what = "reference at " + std::to_string(ft) + " Hz";
        return double(n) * checked_arg(clean_reference(t, amp), peak(ch.ref_A), what);
      };
      reference = tone(line.n_high, field.f_high()) + tone(line.n_low, field.f_low());
      break;
    }
    case ReferenceMode::SameLine:
      reference = checked_arg(lp.ref, peak(ch.ref_A), "reference at " + std::to_string(f) + " Hz");
      break;
    case ReferenceMode::None:
      reference = double(line.n_high + line.n_low) * kPi / 2.0;
      break;
  }
  return wrap_phase(sample - reference - amp.phase(f) + phi_o);
}

double sample_phase(const MeasurementChannels& ch, const AmplifierModel& amp, double f, double phi_o) {
  if (!(f > 0.0)) throw DomainError("analysed line must have a positive frequency");
  const auto lp = line_phasors(ch, f);
  const double sample =
      checked_arg(lp.difference(), peak(ch.diff_sample), "sample line at " + std::to_string(f) + " Hz");
  const double reference =
      checked_arg(clean_reference(lp, amp), peak(ch.ref_A), "reference at " + std::to_string(f) + " Hz");
  return wrap_phase(sample - reference - amp.phase(f) + phi_o);
}

double mixing_half_angle(double phi_plus, double phi_minus) {
  // Sum as a phasor product, mapped to [0, 2π), then halved.
  double s = std::arg(std::polar(1.0, phi_plus) * std::polar(1.0, phi_minus) * std::polar(1.0, 3.0 * kPi));
  if (s < 0.0) s += kTwoPi;
  return 0.5 * s;
}

double phi_H_from_mixing(double phi_plus, double phi_minus) {
  if (!std::isfinite(phi_plus) || !std::isfinite(phi_minus)) throw EstimationError("non-finite mixing phase");
  const double h = mixing_half_angle(phi_plus, phi_minus);
  if (!(h < kPi / 2.0)) {
    throw EstimationError("reconstructed phi_H = " + std::to_string(h) + " rad lies outside [0, pi/2)");
  }
  return h;
}

double tau_from_phase(double phi_H, double f_H) {
  if (!(f_H > 0.0)) throw DomainError("f_H must be > 0");
  if (!(phi_H >= 0.0) || !(phi_H < kPi / 2.0)) {
    throw DomainError("phi_H = " + std::to_string(phi_H) + " rad outside [0, pi/2)");
  }
  return std::tan(phi_H) / (kTwoPi * f_H);
}

CalibrationModel CalibrationModel::from_constant(double A) {
  if (!(A > 0.0) || !std::isfinite(A)) throw ConfigError("calibration constant A must be > 0");
  CalibrationModel m;
  m.A = A;
  return m;
}

std::string to_string(CalibrationModel::Kind k) {
  return k == CalibrationModel::Kind::OnePoint ? "one_point" : "affine";
}

CalibrationModel::Kind parse_calibration_kind(const std::string& s) {
  if (s == "one_point") return CalibrationModel::Kind::OnePoint;
  if (s == "affine" || s == "affine_in_inverse_tau") return CalibrationModel::Kind::AffineInInverseTau;
  throw ConfigError("unknown calibration kind '" + s + "' (one_point|affine)");
}

CalibrationModel calibrate(const std::vector<CalibrationPoint>& points, CalibrationModel::Kind kind) {
  for (const auto& p : points) {
    if (!(p.tau > 0.0) || !(p.T > 0.0) || !std::isfinite(p.tau) || !std::isfinite(p.T)) {
      throw ConfigError("calibration points need tau > 0 and T > 0");
    }
  }
  CalibrationModel m;
  m.kind = kind;
  m.points = points;
  const double n = double(points.size());

  if (kind == CalibrationModel::Kind::OnePoint) {
    if (points.empty()) throw ConfigError("one-point calibration needs at least one point");
    double s = 0.0;
    for (const auto& p : points) s += p.T * p.tau;
    m.A = s / n;
  } else {
    if (points.size() < 2) throw ConfigError("affine calibration needs at least two points");
    double mu = 0.0, mt = 0.0;
    for (const auto& p : points) {
      mu += 1.0 / p.tau;
      mt += p.T;
    }
    mu /= n;
    mt /= n;
    double suu = 0.0, sut = 0.0;
    for (const auto& p : points) {
      const double du = 1.0 / p.tau - mu;
      suu += du * du;
      sut += du * (p.T - mt);
    }
    if (!(suu > 1e-24 * mu * mu * n)) throw ConfigError("affine calibration needs distinct tau values");
    m.A = sut / suu;
    m.B = mt - m.A * mu;
  }
  if (!(m.A > 0.0)) throw ConfigError("calibration produced A <= 0");
  return m;
}

double temperature_from_tau(double tau, const CalibrationModel& cal) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("tau must be > 0 for a temperature");
  if (!(cal.A > 0.0)) throw ConfigError("calibration model is not calibrated (A <= 0)");
  const double T = cal.A / tau + (cal.kind == CalibrationModel::Kind::AffineInInverseTau ? cal.B : 0.0);
  if (!std::isfinite(T)) throw DomainError("temperature is not finite");
  return T;
}

FieldConfig plan_field(const FrequencyPlan& plan) { return FieldConfig(plan.f_high, plan.f_low, 1.0, 1.0); }

TemperatureEstimate estimate_temperature(const MeasurementChannels& ch, const FrequencyPlan& plan,
                                         const AmplifierModel& amp, const CalibrationModel& cal,
                                         const EstimatorOptions& opts) {
  ch.validate();
  const FieldConfig field = plan_field(plan);
  if (std::abs(ch.f_base - field.f_base()) > 1e-9 * field.f_base()) {
    throw ConfigError("channels were recorded with f_base = " + std::to_string(ch.f_base) +
                      " Hz, plan has " + std::to_string(field.f_base()) + " Hz");
  }

  TemperatureEstimate est;
  const double N = double(ch.diff_sample.size());
  const double floor = ch.noise_sigma * std::sqrt(8.0 / N);
  const auto diagnose = [&](MixingLine line, double phase) {
    LineDiagnostics d;
    d.frequency = line.frequency(field);
    d.amplitude = std::abs(line_phasors(ch, d.frequency).difference());
    if (floor > 0.0) d.snr_db = 20.0 * std::log10(d.amplitude / floor);
    d.phase = phase;
    est.lines.push_back(d);
  };

  try {
    if (opts.mode == EstimatorMode::Mixing) {
      const double xp = sample_phase(ch, amp, field, MixingLine::plus(), opts.phi_o, opts.reference);
      const double xm = sample_phase(ch, amp, field, MixingLine::minus(), opts.phi_o, opts.reference);
      diagnose(MixingLine::plus(), xp);
      diagnose(MixingLine::minus(), xm);
      est.phi_plus = wrap_phase(-xp - 1.5 * kPi);
      est.phi_minus = wrap_phase(-xm - 1.5 * kPi);
      est.phi_H = phi_H_from_mixing(est.phi_plus, est.phi_minus);
    } else {
      const double xh = sample_phase(ch, amp, field, MixingLine::high(), opts.phi_o, opts.reference);
      diagnose(MixingLine::high(), xh);
      est.phi_H = -xh;
      if (!(est.phi_H >= 0.0 && est.phi_H < kPi / 2.0)) {
        throw EstimationError("measured phi_H = " + std::to_string(est.phi_H) + " rad lies outside [0, pi/2)");
      }
    }
    est.tau_est = tau_from_phase(est.phi_H, field.f_high());
    est.T_est = temperature_from_tau(est.tau_est, cal);
    est.valid = true;
  } catch (const Error& e) {
    est.valid = false;
    est.reason = std::string(to_string(e.category())) + ": " + e.what();
    est.T_est = TemperatureEstimate::kNaN;
  }
  return est;
}

}  // namespace mnpt
