#pragma once

// Sampled signals, phasors and exact-bin spectral analysis. Every signal in
// this project is periodic in the excitation base period, so "lines" are
// indexed by harmonic number n of f_base.

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace mnpt {

using Complex = std::complex<double>;

enum class Unit { AmperePerMetre, Volt, Tesla, Arbitrary };

std::string to_string(Unit u);

struct TimeSeries {
  double sample_rate = 0.0;  // Hz
  double t0 = 0.0;           // s, time stamp of samples[0]
  std::vector<double> samples;
  Unit unit = Unit::Arbitrary;

  std::size_t size() const { return samples.size(); }
  double duration() const { return double(samples.size()) / sample_rate; }
  double time(std::size_t i) const { return t0 + double(i) / sample_rate; }
};

/// One spectral line: x(t) = amplitude·cos(2πf·t + phase).
struct Phasor {
  double frequency = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;  // rad, (-π, π]

  Complex value() const { return std::polar(amplitude, phase); }
  static Phasor from_complex(double frequency, Complex z);
};

/// Wraps to (-π, π].
double wrap_phase(double x);

/// Complex line amplitudes C_n of a periodic signal x(t) = Re Σ C_n e^{jnω t},
/// ω = 2π·f_base. lines[0] is the mean.
struct LineSpectrum {
  double f_base = 0.0;
  std::vector<Complex> lines;

  std::size_t size() const { return lines.size(); }
  Complex at(std::size_t n) const { return n < lines.size() ? lines[n] : Complex{}; }
};

/// Integer number of samples per base period; throws if fs/f_base is not integral.
int samples_per_period(double sample_rate, double f_base);

/// Samples of the line spectrum at t0 + i/fs for `periods` base periods.
/// Lines at or above the Nyquist index are dropped.
TimeSeries synthesize(const LineSpectrum& spec, double sample_rate, int periods, double t0 = 0.0,
                      Unit unit = Unit::Arbitrary);

/// Line spectrum of a series spanning an integer number of base periods.
/// Throws DomainError for a non-integer period window.
LineSpectrum analyze(const TimeSeries& ts, double f_base);

/// Single-bin DFT projection (rectangular window). Phase is referenced to t = 0.
/// Throws DomainError if f is not an exact bin of the window.
Phasor extract_phasor(const TimeSeries& ts, double f);
/// As above and additionally requires the window to span whole base periods.
Phasor extract_phasor(const TimeSeries& ts, double f, double f_base);

struct SpectrumLine {
  double frequency;
  double amplitude;
  double normalized;  // amplitude / largest amplitude
  double phase;
};

/// Exact-bin decomposition at every multiple of f_base up to Nyquist.
std::vector<SpectrumLine> magnetization_spectrum(const TimeSeries& ts, double f_base);

}  // namespace mnpt
