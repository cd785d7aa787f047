#include "mnpt/signal_chain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "mnpt/constants.hpp"
#include "mnpt/error.hpp"

namespace mnpt {

// ---------------------------------------------------------------- coils

void CoilParams::validate(double T) const {
  if (!(R0 > 0.0) || !(L0 > 0.0) || !(coupling > 0.0)) {
    throw ConfigError("coil R0, L0 and coupling must be > 0");
  }
  if (!(resistance(T) > 0.0) || !(inductance(T) > 0.0)) {
    throw ConfigError("coil impedance model is non-physical at T = " + std::to_string(T) + " K");
  }
}

CoilParams CoilParams::nominal_coil_a() { return CoilParams{}; }

CoilParams CoilParams::nominal_coil_b() {
  CoilParams b;
  b.R0 = 10.6454;
  b.L0 = 1.70752e-3;
  return b;
}

CoilTransfer coil_transfer(const CoilParams& coil, double omega, double T_amb) {
  if (!(omega > 0.0)) throw DomainError("coil_transfer needs omega > 0");
  coil.validate(T_amb);
  const double R = coil.resistance(T_amb);
  const double wL = omega * coil.inductance(T_amb);
  const double wL0 = omega * coil.L0;
  return {std::hypot(R, wL) / std::hypot(coil.R0, wL0), std::atan2(wL, R)};
}

// ---------------------------------------------------------------- amplifier

AmplifierModel::AmplifierModel(std::vector<Row> rows, double reference_gain)
    : rows_(std::move(rows)), reference_gain_(reference_gain) {
  if (rows_.empty()) throw ConfigError("amplifier table is empty");
  if (!(reference_gain_ > 0.0)) throw ConfigError("amplifier reference gain must be > 0");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    if (!std::isfinite(r.frequency) || !std::isfinite(r.phase) || !(r.gain > 0.0)) {
      throw ConfigError("amplifier table row " + std::to_string(i) + " is not finite/positive");
    }
    if (i > 0) {
      if (!(r.frequency > rows_[i - 1].frequency)) {
        throw ConfigError("amplifier table frequencies must be strictly increasing");
      }
      if (std::abs(r.phase - rows_[i - 1].phase) >= kPi) {
        throw ConfigError("amplifier phase table jumps by more than 180 degrees between rows");
      }
    }
  }
}

AmplifierModel AmplifierModel::placeholder() {
  constexpr double gain = 1000.0;
  constexpr double corner = 200e3;
  std::vector<Row> rows;
  for (double f : {0.0, 50.0, 100.0, 200.0, 500.0, 1e3, 2e3, 3e3, 5e3, 7e3, 10e3, 15e3, 20e3, 30e3, 50e3, 70e3,
                   100e3, 150e3, 200e3, 250e3, 300e3}) {
    const double x = f / corner;
    rows.push_back({f, -std::atan(x), gain / std::sqrt(1.0 + x * x)});
  }
  return AmplifierModel(std::move(rows), gain);
}

AmplifierModel AmplifierModel::parse(std::istream& in, double reference_gain, const std::string& origin) {
  std::vector<Row> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    std::vector<double> values;
    try {
      for (const auto& t : tokens) {
        std::size_t used = 0;
        values.push_back(std::stod(t, &used));
        if (used != t.size()) throw std::invalid_argument(t);
      }
    } catch (const std::exception&) {
      if (rows.empty()) continue;  // header line
      throw IoError(origin + ":" + std::to_string(lineno) + ": non-numeric field in amplifier table");
    }
    if (values.size() < 2 || values.size() > 3) {
      throw IoError(origin + ":" + std::to_string(lineno) + ": expected 2 or 3 columns");
    }
    rows.push_back({values[0], values[1] * kPi / 180.0, values.size() == 3 ? values[2] : reference_gain});
  }
  try {
    return AmplifierModel(std::move(rows), reference_gain);
  } catch (const ConfigError& e) {
    throw IoError(origin + ": " + e.what());
  }
}

AmplifierModel AmplifierModel::load(const std::string& path, double reference_gain) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open amplifier table '" + path + "'");
  return parse(in, reference_gain, path);
}

namespace {

template <class Get>
double interpolate(const std::vector<AmplifierModel::Row>& rows, double f, Get get) {
  if (f <= rows.front().frequency) return get(rows.front());
  if (f >= rows.back().frequency) return get(rows.back());
  const auto hi = std::upper_bound(rows.begin(), rows.end(), f,
                                   [](double v, const AmplifierModel::Row& r) { return v < r.frequency; });
  const auto lo = hi - 1;
  const double w = (f - lo->frequency) / (hi->frequency - lo->frequency);
  return get(*lo) + w * (get(*hi) - get(*lo));
}

}  // namespace

double AmplifierModel::phase(double f) const {
  return interpolate(rows_, f, [](const Row& r) { return r.phase; });
}

double AmplifierModel::gain(double f) const {
  return interpolate(rows_, f, [](const Row& r) { return r.gain; });
}

AmplifierModel AmplifierModel::with_phase_offset(const std::function<double(double)>& offset) const {
  auto rows = rows_;
  for (auto& r : rows) r.phase += offset(r.frequency);
  return AmplifierModel(std::move(rows), reference_gain_);
}

// ---------------------------------------------------------------- noise

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double noise_sigma(double peak, double snr_db) {
  if (!std::isfinite(snr_db)) return 0.0;
  return std::sqrt(0.5 * peak * peak / std::pow(10.0, snr_db / 10.0));
}

void add_white_noise(std::vector<double>& samples, double sigma, std::uint64_t seed) {
  if (!(sigma > 0.0)) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  for (auto& x : samples) x += normal(rng);
}

TimeSeries add_noise(const TimeSeries& ts, const NoiseModel& noise, double reference_power) {
  if (ts.samples.empty()) throw DomainError("add_noise on an empty series");
  TimeSeries out = ts;
  if (!noise.enabled()) return out;
  if (!(reference_power > 0.0)) throw DomainError("reference power must be > 0");
  const double sigma = std::sqrt(reference_power / std::pow(10.0, noise.snr_db / 10.0));
  add_white_noise(out.samples, sigma, noise.seed);
  return out;
}

// ---------------------------------------------------------------- induction

TimeSeries induced_emf(const TimeSeries& m, const CoilParams& coil, double f_base) {
  if (!(coil.coupling > 0.0)) throw ConfigError("coil coupling must be > 0");
  auto lines = analyze(m, f_base);
  const double wb = kTwoPi * f_base;
  lines.lines[0] = 0.0;
  for (std::size_t n = 1; n < lines.size(); ++n) lines.lines[n] *= Complex(0.0, coil.coupling * double(n) * wb);
  const int P = samples_per_period(m.sample_rate, f_base);
  return synthesize(lines, m.sample_rate, int(m.size() / std::size_t(P)), m.t0, Unit::Volt);
}

// ---------------------------------------------------------------- channels

void MeasurementChannels::validate() const {
  const auto same = [](const TimeSeries& a, const TimeSeries& b) {
    return a.sample_rate == b.sample_rate && a.size() == b.size() && a.t0 == b.t0;
  };
  if (!same(diff_background, diff_sample) || !same(diff_sample, ref_A)) {
    throw ConfigError("measurement channels differ in sample rate or window");
  }
  if (!(f_base > 0.0)) throw ConfigError("measurement channels carry no base frequency");
  const int P = samples_per_period(diff_sample.sample_rate, f_base);
  if (diff_sample.size() == 0 || diff_sample.size() % std::size_t(P) != 0) {
    throw ConfigError("measurement window does not span an integer number of base periods");
  }
}

namespace {

// Sample magnetization lines summed over the size distribution, each node
// with its own relaxation time.
LineSpectrum sample_magnetization(const FieldConfig& field, const ParticleSpec& p, double T, const ChainConfig& chain,
                                  int n_top, double& tau_out) {
  std::vector<SizeNode> nodes;
  if (chain.distribution.kind == DistributionKind::Monodisperse) {
    nodes = {{p.d_core, 1.0}};
  } else {
    nodes = size_quadrature(chain.distribution);
  }

  LineSpectrum total;
  total.f_base = field.f_base();
  total.lines.assign(std::size_t(n_top) + 1, Complex{});
  const double wb = field.omega_base();
  const int n_plus = MixingLine::plus().harmonic(field);
  const int n_minus = MixingLine::minus().harmonic(field);
  double tau_weighted = 0.0;

  for (const auto& node : nodes) {
    ParticleSpec q = node.diameter == p.d_core ? p : rescale_core(p, node.diameter);
    q.N_conc = p.N_conc * node.weight;
    const double xi_peak = xi_parameter(q, field.peak(), T);
    const double tau = tau_field_corrected(tau_particle(q, T), xi_peak, chain.field_correction);
    tau_weighted += node.weight * tau;

    const auto h = fourier_coefficients(field, q, T, n_top);
    auto lines = debye_filtered_lines(h, tau);
    if (chain.model == ForwardModel::Composed) {
      const double phi_H = std::atan(kTwoPi * field.f_high() * tau);
      const double phi_L = std::atan(kTwoPi * field.f_low() * tau);
      const auto recompose = [&](int n, double delay) {
        if (n <= 0 || n > n_top) return;
        const Complex c = h.coefficient(n);
        const double att = 1.0 / std::sqrt(1.0 + std::pow(double(n) * wb * tau, 2));
        lines.lines[std::size_t(n)] = std::polar(std::abs(c) * att, std::arg(c) - delay);
      };
      recompose(n_plus, phi_H + 2.0 * phi_L);
      recompose(n_minus, phi_H - 2.0 * phi_L);
    }
    for (std::size_t n = 0; n < total.lines.size(); ++n) total.lines[n] += lines.lines[n];
  }
  tau_out = tau_weighted;
  return total;
}

}  // namespace

ChannelLines simulate_lines(const FieldConfig& field, const ParticleSpec& p, double T_sample,
                            const ChainConfig& chain, double T_amb) {
  p.validate();
  if (!(T_sample > 0.0) || !(T_amb > 0.0)) throw DomainError("temperatures must be > 0");
  const double T_bg = chain.background_ambient.value_or(T_amb);
  chain.coil_a.validate(T_amb);
  chain.coil_b.validate(T_amb);
  chain.coil_a.validate(T_bg);
  chain.coil_b.validate(T_bg);
  if (!(chain.fill_factor > 0.0)) throw ConfigError("fill factor must be > 0");

  const int P = samples_per_period(chain.acquisition.sample_rate, field.f_base());
  const int n_top = (P + 1) / 2 - 1;  // highest line strictly below Nyquist
  if (field.n_high() > n_top) throw ConfigError("f_high is at or above the Nyquist frequency");

  ChannelLines out;
  out.magnetization = sample_magnetization(field, p, T_sample, chain, n_top, out.tau);

  std::vector<Complex> H(std::size_t(n_top) + 1);
  H[std::size_t(field.n_high())] += std::polar(field.B_high() / PhysicalConstants::mu_0, field.phase_high());
  H[std::size_t(field.n_low())] += std::polar(field.B_low() / PhysicalConstants::mu_0, field.phase_low());

  const auto blank = [&] {
    LineSpectrum s;
    s.f_base = field.f_base();
    s.lines.assign(std::size_t(n_top) + 1, Complex{});
    return s;
  };
  out.diff_background = blank();
  out.diff_sample = blank();
  out.ref_A = blank();
  out.sample_term = blank();

  const double wb = field.omega_base();
  const auto& amp = chain.amplifier;
  for (int n = 1; n <= n_top; ++n) {
    const std::size_t i = std::size_t(n);
    const double w = double(n) * wb;
    const Complex d(0.0, w);  // d/dt
    const Complex amp_n = amp.response(double(n) * field.f_base());
    const Complex ga = coil_transfer(chain.coil_a, w, T_amb).value() * chain.coil_a.coupling * d;
    const Complex gb = coil_transfer(chain.coil_b, w, T_amb).value() * chain.coil_b.coupling * d;

    const Complex feed_a = ga * H[i];
    const Complex feed_b = gb * H[i];
    const Complex sample_a = ga * (chain.fill_factor * out.magnetization.lines[i]);

    Complex bg = amp_n * (feed_a - feed_b);
    if (chain.background_ambient) {
      const Complex ga0 = coil_transfer(chain.coil_a, w, T_bg).value() * chain.coil_a.coupling * d;
      const Complex gb0 = coil_transfer(chain.coil_b, w, T_bg).value() * chain.coil_b.coupling * d;
      bg = amp_n * (ga0 * H[i] - gb0 * H[i]);
    }
    out.diff_background.lines[i] = bg;
    out.sample_term.lines[i] = amp_n * sample_a;
    out.diff_sample.lines[i] = amp_n * (feed_a - feed_b) + out.sample_term.lines[i];
    out.ref_A.lines[i] = feed_a + sample_a;
  }
  return out;
}

MeasurementChannels render_channels(const ChannelLines& lines, const AcquisitionConfig& acq, const NoiseModel& noise,
                                    double reference_gain) {
  MeasurementChannels ch;
  ch.f_base = lines.diff_sample.f_base;
  ch.tau = lines.tau;
  ch.diff_background = synthesize(lines.diff_background, acq.sample_rate, acq.window_periods, 0.0, Unit::Volt);
  ch.diff_sample = synthesize(lines.diff_sample, acq.sample_rate, acq.window_periods, 0.0, Unit::Volt);
  ch.ref_A = synthesize(lines.ref_A, acq.sample_rate, acq.window_periods, 0.0, Unit::Volt);
  for (std::size_t n = 1; n < lines.sample_term.size(); ++n) {
    ch.sample_peak = std::max(ch.sample_peak, std::abs(lines.sample_term.lines[n]));
  }
  if (!noise.enabled()) return ch;
  const double sigma = noise_sigma(ch.sample_peak, noise.snr_db);
  return with_noise(ch, sigma, sigma / reference_gain, noise.background, noise.seed);
}

MeasurementChannels with_noise(const MeasurementChannels& clean, double sigma, double ref_sigma, bool background,
                               std::uint64_t seed) {
  MeasurementChannels ch = clean;
  ch.noise_sigma = sigma;
  add_white_noise(ch.diff_sample.samples, sigma, derive_seed(seed, 0));
  if (background) add_white_noise(ch.diff_background.samples, sigma, derive_seed(seed, 1));
  add_white_noise(ch.ref_A.samples, ref_sigma, derive_seed(seed, 2));
  return ch;
}

MeasurementChannels simulate_channels(const FieldConfig& field, const ParticleSpec& p, double T_sample,
                                      const ChainConfig& chain, double T_amb) {
  const auto lines = simulate_lines(field, p, T_sample, chain, T_amb);
  auto ch = render_channels(lines, chain.acquisition, chain.noise, chain.amplifier.reference_gain());
  ch.validate();
  return ch;
}

}  // namespace mnpt
