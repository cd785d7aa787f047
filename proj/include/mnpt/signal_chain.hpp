#pragma once

// Everything between M(t) and the digitised channels: Faraday induction in two
// mismatched pick-up coils with temperature-dependent impedance, a
// differential amplifier with tabulated gain/phase, excitation feedthrough and
// additive white noise. All line-wise operations are exact in the frequency
// domain because every signal is periodic in the base period.

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mnpt/field.hpp"
#include "mnpt/magnetization.hpp"
#include "mnpt/physics.hpp"
#include "mnpt/spectrum.hpp"

namespace mnpt {

/// Lumped pick-up coil. R(T) = R0·(1 + alpha_R·(T − T_ref)); L likewise with alpha_L.
struct CoilParams {
  double R0 = 10.4177;     // Ω
  double L0 = 1.64741e-3;  // H
  double alpha_R = 3.9e-3; // 1/K, copper
  double alpha_L = 0.0;    // 1/K
  double T_ref = 298.15;   // K
  double coupling = 1e-5;  // V per (A/m per s)

  double resistance(double T) const { return R0 * (1.0 + alpha_R * (T - T_ref)); }
  double inductance(double T) const { return L0 * (1.0 + alpha_L * (T - T_ref)); }
  void validate(double T) const;

  static CoilParams nominal_coil_a();
  static CoilParams nominal_coil_b();
};

struct CoilTransfer {
  double gain;
  double phase;  // rad, arctan(ωL/R)

  Complex value() const { return std::polar(gain, phase); }
};

/// Normalised impedance response Z(ω, T)/|Z(ω, T_ref)|: phase arctan(ωL(T)/R(T)),
/// gain 1 at the reference temperature.
CoilTransfer coil_transfer(const CoilParams& coil, double omega, double T_amb);

/// Differential amplifier, linear interpolation over a calibration table.
class AmplifierModel {
 public:
  struct Row {
    double frequency;  // Hz
    double phase;      // rad
    double gain;
  };

  AmplifierModel() : AmplifierModel(placeholder()) {}
  AmplifierModel(std::vector<Row> rows, double reference_gain);

  /// Smooth single-pole stand-in (gain 1000, corner 200 kHz). Not measured data.
  static AmplifierModel placeholder();
  /// Columns: frequency_hz, phase_deg[, gain]. '#' starts a comment; commas or
  /// whitespace separate fields. Missing gain defaults to `reference_gain`.
  static AmplifierModel load(const std::string& path, double reference_gain = 1000.0);
  static AmplifierModel parse(std::istream& in, double reference_gain = 1000.0,
                              const std::string& origin = "<stream>");

  double phase(double f) const;
  double gain(double f) const;
  Complex response(double f) const { return std::polar(gain(f), phase(f)); }
  double reference_gain() const { return reference_gain_; }
  const std::vector<Row>& rows() const { return rows_; }

  /// Same table with φ(f) + offset(f) in every row.
  AmplifierModel with_phase_offset(const std::function<double(double)>& offset) const;

 private:
  std::vector<Row> rows_;
  double reference_gain_ = 1000.0;
};

struct NoiseModel {
  static constexpr double kNoiseless = std::numeric_limits<double>::infinity();
  double snr_db = kNoiseless;  // against the largest sample-signal line
  std::uint64_t seed = 1;
  bool background = true;      // noise also on the background acquisition

  bool enabled() const { return std::isfinite(snr_db); }
};

/// Per-sample σ giving `snr_db` against a line of amplitude `peak`:
/// σ² = (peak²/2)/10^(snr_db/10). Zero when the noise model is off.
double noise_sigma(double peak, double snr_db);

/// White Gaussian noise with variance reference_power / 10^(snr_db/10).
TimeSeries add_noise(const TimeSeries& ts, const NoiseModel& noise, double reference_power);
/// Adds N(0, sigma²) per sample from a generator seeded with `seed`.
void add_white_noise(std::vector<double>& samples, double sigma, std::uint64_t seed);

/// Coupling·d/dt applied line by line: amplitude ×coupling·2πf, phase +π/2.
TimeSeries induced_emf(const TimeSeries& m, const CoilParams& coil, double f_base);

enum class ForwardModel {
  Spectral,  // every line delayed by arctan(nωτ)
  Composed,  // f_H ± 2f_L lines delayed by φ_H ± 2φ_L instead
};

struct AcquisitionConfig {
  double sample_rate = 500e3;
  int window_periods = 10;
};

struct ChainConfig {
  CoilParams coil_a = CoilParams::nominal_coil_a();
  CoilParams coil_b = CoilParams::nominal_coil_b();
  AmplifierModel amplifier;
  NoiseModel noise;
  AcquisitionConfig acquisition;
  double fill_factor = 0.1;                  // share of the sample magnetization linking coil A
  std::optional<double> background_ambient;  // K; empty = background taken at the live ambient
  ForwardModel model = ForwardModel::Spectral;
  SizeDistribution distribution;             // monodisperse uses the particle's own d_core
  FieldCorrectionModel field_correction;
};

struct MeasurementChannels {
  TimeSeries diff_background;  // amplifier output without sample
  TimeSeries diff_sample;      // amplifier output with sample
  TimeSeries ref_A;            // coil A, before the amplifier, with sample
  double f_base = 0.0;
  double noise_sigma = 0.0;    // per-sample σ on the differential channels
  double sample_peak = 0.0;    // largest sample line amplitude on the differential channels
  double tau = 0.0;            // relaxation time used by the forward model (monodisperse)

  void validate() const;
};

/// The three channels as line spectra over one base period (noiseless).
struct ChannelLines {
  LineSpectrum diff_background;
  LineSpectrum diff_sample;
  LineSpectrum ref_A;
  LineSpectrum sample_term;  // amplifier·coil A·fill·dM/dt: diff_sample − diff_background
  LineSpectrum magnetization;
  double tau = 0.0;
};

ChannelLines simulate_lines(const FieldConfig& field, const ParticleSpec& p, double T_sample,
                            const ChainConfig& chain, double T_amb);

MeasurementChannels simulate_channels(const FieldConfig& field, const ParticleSpec& p, double T_sample,
                                      const ChainConfig& chain, double T_amb);

/// Materialises noiseless channels from line spectra, then applies `noise`.
MeasurementChannels render_channels(const ChannelLines& lines, const AcquisitionConfig& acq,
                                    const NoiseModel& noise, double reference_gain);

/// Adds fresh noise (seeded by `seed`) to already rendered noiseless channels.
MeasurementChannels with_noise(const MeasurementChannels& clean, double sigma, double ref_sigma, bool background,
                               std::uint64_t seed);

/// splitmix64 hash; derives independent stream seeds from (master, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace mnpt
