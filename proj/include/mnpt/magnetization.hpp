#pragma once

// Forward model of the suspension magnetization under the dual-tone field:
// equilibrium Langevin magnetization, its Fourier series over one base
// period, the Debye-filtered steady state and an independent time-domain
// integration of dM/dt = (M0 - M)/τ.

#include <vector>

#include "mnpt/field.hpp"
#include "mnpt/physics.hpp"
#include "mnpt/spectrum.hpp"

namespace mnpt {

struct SamplingGrid {
  double sample_rate = 500e3;  // Hz, integer multiple of f_base
  int periods = 1;             // base periods
  double t0 = 0.0;
};

struct HarmonicLine {
  int n;
  double a;  // cos coefficient (A/m)
  double b;  // sin coefficient (A/m); zero when both tone phases are zero
  double frequency;
};

/// Fourier series M0(t) = Σ a_n cos nωt + b_n sin nωt over one base period.
struct HarmonicSet {
  double f_base = 0.0;
  int n_max = 0;
  int quadrature_nodes = 0;
  double dc = 0.0;
  std::vector<HarmonicLine> lines;  // n = 1..n_max in order

  /// c_n = a_n - j·b_n, so M0(t) = Re Σ c_n e^{jnωt}.
  Complex coefficient(int n) const;
  const HarmonicLine& line(int n) const { return lines.at(std::size_t(n - 1)); }
  LineSpectrum to_lines() const;
};

/// M0(t) = N·m_s·L(ξ(t)).
double equilibrium_magnetization(double t, const FieldConfig& field, const ParticleSpec& p, double T);

/// Smallest harmonic index that reaches f_H + 6 f_L.
int default_n_max(const FieldConfig& field);

struct QuadratureOptions {
  double rel_tolerance = 1e-12;
  int max_nodes = 1 << 23;
};

/// Fourier coefficients of M0 up to n_max (0 selects default_n_max). Uniform
/// nodes over one period, doubled until no coefficient moves by more than
/// rel_tolerance·max|a_n|. Throws ConvergenceError otherwise.
HarmonicSet fourier_coefficients(const FieldConfig& field, const ParticleSpec& p, double T, int n_max = 0,
                                 const QuadratureOptions& opts = {});

/// Steady-state line amplitudes c_n/(1 + jnωτ). τ = 0 returns M0 unfiltered.
LineSpectrum debye_filtered_lines(const HarmonicSet& h, double tau);

/// Steady-state M(t) sampled on the grid.
TimeSeries spectral_magnetization(const HarmonicSet& h, double tau, const FieldConfig& field,
                                  const SamplingGrid& grid);

/// Number of leading base periods needed to let the e^{-t/τ} transient die (10τ).
int transient_periods(double tau, double f_base);

struct OdeOptions {
  double max_step = 0.0;  // s; 0 picks min(τ/20, 1/(50 f_H))
  double m_initial = 0.0;
};

struct OdeResult {
  TimeSeries series;  // from t = 0, transient included
  int transient_periods = 0;
  int samples_per_period = 0;
  double step = 0.0;  // integration step actually used

  /// The post-transient part, time stamps preserved.
  TimeSeries steady() const;
};

/// Fixed-step RK4 integration from M(0) = m_initial. The grid's `periods`
/// counts post-transient periods; the transient is simulated in front.
OdeResult ode_magnetization(const FieldConfig& field, const ParticleSpec& p, double T, double tau,
                            const SamplingGrid& grid, const OdeOptions& opts = {});

/// Generic RK4 on dM/dt = (drive(t) - M)/τ at the grid's sample times, used
/// for closed-form checks of the integrator.
template <class Drive>
std::vector<double> integrate_relaxation(Drive&& drive, double tau, double m0, double dt, int substeps,
                                         std::size_t n_samples) {
  std::vector<double> out(n_samples);
  double m = m0;
  double t = 0.0;
  const double h = dt / substeps;
  double d0 = drive(t);
  for (std::size_t i = 0; i < n_samples; ++i) {
    out[i] = m;
    for (int s = 0; s < substeps; ++s) {
      const double dh = drive(t + 0.5 * h);
      const double d1 = drive(t + h);
      const double k1 = (d0 - m) / tau;
      const double k2 = (dh - (m + 0.5 * h * k1)) / tau;
      const double k3 = (dh - (m + 0.5 * h * k2)) / tau;
      const double k4 = (d1 - (m + h * k3)) / tau;
      m += h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
      t = double(i) * dt + double(s + 1) * h;
      d0 = d1;
    }
  }
  return out;
}

}  // namespace mnpt
