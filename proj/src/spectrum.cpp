#include "mnpt/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "fft.hpp"
#include "mnpt/constants.hpp"
#include "mnpt/error.hpp"

namespace mnpt {

namespace {

// Returns round(x) if x is within a relative 1e-9 of an integer, else -1.
std::int64_t exact_integer(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9 * std::max(1.0, std::abs(r))) return -1;
  return std::int64_t(r);
}

void require_series(const TimeSeries& ts) {
  if (!(ts.sample_rate > 0.0)) throw DomainError("time series needs a positive sample rate");
  if (ts.samples.empty()) throw DomainError("time series is empty");
}

}  // namespace

std::string to_string(Unit u) {
  switch (u) {
    case Unit::AmperePerMetre:
      return "A/m";
    case Unit::Volt:
      return "V";
    case Unit::Tesla:
      return "T";
    case Unit::Arbitrary:
      return "arb";
  }
  return "arb";
}

Phasor Phasor::from_complex(double frequency, Complex z) {
  return {frequency, std::abs(z), std::abs(z) > 0.0 ? wrap_phase(std::arg(z)) : 0.0};
}

double wrap_phase(double x) {
  double y = std::remainder(x, kTwoPi);  // [-π, π]
  if (y <= -kPi) y += kTwoPi;
  return y;
}

int samples_per_period(double sample_rate, double f_base) {
  if (!(sample_rate > 0.0) || !(f_base > 0.0)) throw DomainError("sample rate and f_base must be > 0");
  const auto p = exact_integer(sample_rate / f_base);
  if (p < 2) throw DomainError("sample rate must be an integer multiple (>= 2) of f_base");
  return int(p);
}

TimeSeries synthesize(const LineSpectrum& spec, double sample_rate, int periods, double t0, Unit unit) {
  if (periods < 1) throw DomainError("need at least one base period");
  const int P = samples_per_period(sample_rate, spec.f_base);

  std::vector<Complex> bins(std::size_t(P / 2 + 1));
  const std::size_t top = std::min<std::size_t>(spec.lines.size(), (P + 1) / 2);  // excludes Nyquist
  for (std::size_t n = 0; n < top; ++n) {
    Complex c = spec.lines[n];
    if (t0 != 0.0 && n > 0) {
      const double cyc = double(n) * spec.f_base * t0;
      c *= std::polar(1.0, kTwoPi * (cyc - std::floor(cyc)));
    }
    bins[n] = n == 0 ? Complex(c.real(), 0.0) : 0.5 * c;
  }
  const auto one = detail::irfft(bins, std::size_t(P));

  TimeSeries ts;
  ts.sample_rate = sample_rate;
  ts.t0 = t0;
  ts.unit = unit;
  ts.samples.reserve(std::size_t(P) * std::size_t(periods));
  for (int k = 0; k < periods; ++k) ts.samples.insert(ts.samples.end(), one.begin(), one.end());
  return ts;
}

LineSpectrum analyze(const TimeSeries& ts, double f_base) {
  require_series(ts);
  const int P = samples_per_period(ts.sample_rate, f_base);
  const std::size_t N = ts.size();
  if (N % std::size_t(P) != 0) throw DomainError("window does not span an integer number of base periods");
  const std::size_t K = N / std::size_t(P);

  const auto X = detail::rfft(ts.samples);
  LineSpectrum out;
  out.f_base = f_base;
  const std::size_t top = (std::size_t(P) + 1) / 2;
  out.lines.resize(top);
  for (std::size_t n = 0; n < top; ++n) {
    Complex c = X[n * K] / double(N);
    if (n > 0) {
      c *= 2.0;
      if (ts.t0 != 0.0) {
        const double cyc = double(n) * f_base * ts.t0;
        c *= std::polar(1.0, -kTwoPi * (cyc - std::floor(cyc)));
      }
    }
    out.lines[n] = c;
  }
  return out;
}

Phasor extract_phasor(const TimeSeries& ts, double f) {
  require_series(ts);
  if (!(f >= 0.0)) throw DomainError("frequency must be >= 0");
  const std::int64_t N = std::int64_t(ts.size());
  const std::int64_t k = exact_integer(f * double(N) / ts.sample_rate);
  if (k < 0) throw DomainError("frequency " + std::to_string(f) + " Hz is not an exact bin of the window");
  if (2 * k >= N && k != 0) throw DomainError("frequency at or above Nyquist");

  const double* x = ts.samples.data();
  if (k == 0) {
    double s = 0.0;
    for (std::int64_t i = 0; i < N; ++i) s += x[i];
    return Phasor::from_complex(0.0, Complex(s / double(N), 0.0));
  }

  // Rotating phasor in extended precision, re-anchored every block from the
  // exact integer phase k·i mod N.
  using Wide = std::complex<long double>;
  constexpr std::int64_t kBlock = 256;
  constexpr long double kTwoPiL = 6.283185307179586476925286766559L;
  const Wide step = std::polar(1.0L, -kTwoPiL * (long double)k / (long double)N);
  Wide acc{0.0L, 0.0L};
  for (std::int64_t i0 = 0; i0 < N; i0 += kBlock) {
    const std::int64_t idx = (k * i0) % N;
    Wide rot = std::polar(1.0L, -kTwoPiL * (long double)idx / (long double)N);
    const std::int64_t end = std::min(N, i0 + kBlock);
    for (std::int64_t i = i0; i < end; ++i) {
      acc += (long double)x[i] * rot;
      rot *= step;
    }
  }
  Complex z(double(acc.real() * 2.0L / (long double)N), double(acc.imag() * 2.0L / (long double)N));
  if (ts.t0 != 0.0) {
    const double cyc = f * ts.t0;
    z *= std::polar(1.0, -kTwoPi * (cyc - std::floor(cyc)));
  }
  return Phasor::from_complex(f, z);
}

Phasor extract_phasor(const TimeSeries& ts, double f, double f_base) {
  require_series(ts);
  const int P = samples_per_period(ts.sample_rate, f_base);
  if (ts.size() % std::size_t(P) != 0) {
    throw DomainError("window does not span an integer number of base periods");
  }
  if (exact_integer(f / f_base) < 0) throw DomainError("frequency is not a multiple of f_base");
  return extract_phasor(ts, f);
}

std::vector<SpectrumLine> magnetization_spectrum(const TimeSeries& ts, double f_base) {
  const auto spec = analyze(ts, f_base);
  std::vector<SpectrumLine> out;
  double peak = 0.0;
  for (std::size_t n = 1; n < spec.size(); ++n) {
    const auto ph = Phasor::from_complex(double(n) * f_base, spec.lines[n]);
    out.push_back({ph.frequency, ph.amplitude, 0.0, ph.phase});
    peak = std::max(peak, ph.amplitude);
  }
  for (auto& l : out) l.normalized = peak > 0.0 ? l.amplitude / peak : 0.0;
  return out;
}

}  // namespace mnpt
