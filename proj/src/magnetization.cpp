#include "mnpt/magnetization.hpp"

#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "mnpt/constants.hpp"
#include "mnpt/error.hpp"

namespace mnpt {

namespace {

std::vector<Complex> coefficients_at(const FieldConfig& field, double scale, double xi_per_tesla, int nodes) {
  std::vector<double> m0(static_cast<std::size_t>(nodes));
  const double period = 1.0 / field.f_base();
  for (int i = 0; i < nodes; ++i) {
    const double t = period * double(i) / double(nodes);
    m0[std::size_t(i)] = scale * langevin(xi_per_tesla * field.field_at(t));
  }
  const auto X = detail::rfft(m0);
  std::vector<Complex> c(X.size());
  for (std::size_t n = 0; n < X.size(); ++n) c[n] = X[n] * ((n == 0 ? 1.0 : 2.0) / double(nodes));
  return c;
}

int next_pow2(int x) {
  int p = 1;
  while (p < x) p <<= 1;
  return p;
}

}  // namespace

Complex HarmonicSet::coefficient(int n) const {
  if (n == 0) return {dc, 0.0};
  if (n < 0 || n > n_max) return {};
  const auto& l = lines[std::size_t(n - 1)];
  return {l.a, -l.b};
}

LineSpectrum HarmonicSet::to_lines() const {
  LineSpectrum s;
  s.f_base = f_base;
  s.lines.resize(std::size_t(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) s.lines[std::size_t(n)] = coefficient(n);
  return s;
}

double equilibrium_magnetization(double t, const FieldConfig& field, const ParticleSpec& p, double T) {
  return p.saturation() * langevin(xi_parameter(p, field.field_at(t), T));
}

int default_n_max(const FieldConfig& field) {
  const auto top = field.f_high_hz() + 6 * field.f_low_hz();
  return int((top + field.f_base_hz() - 1) / field.f_base_hz());
}

HarmonicSet fourier_coefficients(const FieldConfig& field, const ParticleSpec& p, double T, int n_max,
                                 const QuadratureOptions& opts) {
  p.validate();
  if (!(T > 0.0)) throw DomainError("temperature must be > 0");
  if (n_max <= 0) n_max = default_n_max(field);
  const double scale = p.saturation();
  const double xi_per_tesla = xi_parameter(p, 1.0, T);
  const bool even = field.phase_high() == 0.0 && field.phase_low() == 0.0;

  int nodes = next_pow2(std::max(4 * (n_max + 1), 1024));
  auto coarse = coefficients_at(field, scale, xi_per_tesla, nodes);
  for (;;) {
    const int finer_nodes = 2 * nodes;
    if (finer_nodes > opts.max_nodes) {
      throw ConvergenceError("Fourier quadrature did not converge within " + std::to_string(opts.max_nodes) +
                             " nodes");
    }
    auto fine = coefficients_at(field, scale, xi_per_tesla, finer_nodes);
    double peak = 0.0;
    double delta = 0.0;
    for (int n = 0; n <= n_max; ++n) {
      peak = std::max(peak, std::abs(fine[std::size_t(n)]));
      delta = std::max(delta, std::abs(fine[std::size_t(n)] - coarse[std::size_t(n)]));
    }
    nodes = finer_nodes;
    coarse = std::move(fine);
    if (delta <= opts.rel_tolerance * peak) break;
  }

  HarmonicSet h;
  h.f_base = field.f_base();
  h.n_max = n_max;
  h.quadrature_nodes = nodes;
  h.dc = coarse[0].real();
  h.lines.reserve(std::size_t(n_max));
  for (int n = 1; n <= n_max; ++n) {
    const Complex c = coarse[std::size_t(n)];
    h.lines.push_back({n, c.real(), even ? 0.0 : -c.imag(), double(n) * h.f_base});
  }
  if (even) h.dc = 0.0;  // M0 is odd in H, the mean over a period vanishes
  return h;
}

LineSpectrum debye_filtered_lines(const HarmonicSet& h, double tau) {
  if (!(tau >= 0.0)) throw DomainError("tau must be >= 0");
  LineSpectrum s = h.to_lines();
  const double wb = kTwoPi * h.f_base;
  for (std::size_t n = 1; n < s.lines.size(); ++n) s.lines[n] /= Complex(1.0, double(n) * wb * tau);
  return s;
}

TimeSeries spectral_magnetization(const HarmonicSet& h, double tau, const FieldConfig& field,
                                  const SamplingGrid& grid) {
  if (h.f_base != field.f_base()) throw DomainError("harmonic set does not belong to this field");
  return synthesize(debye_filtered_lines(h, tau), grid.sample_rate, grid.periods, grid.t0, Unit::AmperePerMetre);
}

int transient_periods(double tau, double f_base) { return int(std::ceil(10.0 * tau * f_base - 1e-12)); }

TimeSeries OdeResult::steady() const {
  TimeSeries out;
  out.sample_rate = series.sample_rate;
  out.unit = series.unit;
  const std::size_t skip = std::size_t(transient_periods) * std::size_t(samples_per_period);
  out.t0 = series.time(skip);
  out.samples.assign(series.samples.begin() + std::ptrdiff_t(skip), series.samples.end());
  return out;
}

OdeResult ode_magnetization(const FieldConfig& field, const ParticleSpec& p, double T, double tau,
                            const SamplingGrid& grid, const OdeOptions& opts) {
  p.validate();
  if (!(tau > 0.0)) throw DomainError("tau must be > 0");
  if (grid.periods < 1) throw DomainError("need at least one base period");
  const int P = samples_per_period(grid.sample_rate, field.f_base());
  const double limit = std::min(tau / 20.0, 1.0 / (50.0 * field.f_high()));
  double h_max = limit;
  if (opts.max_step > 0.0) {
    if (opts.max_step > limit * (1.0 + 1e-12)) {
      throw DomainError("integration step exceeds min(tau/20, 1/(50 f_H))");
    }
    h_max = opts.max_step;
  }
  const double dt = 1.0 / grid.sample_rate;
  const int substeps = std::max(1, int(std::ceil(dt / h_max - 1e-9)));

  OdeResult r;
  r.transient_periods = transient_periods(tau, field.f_base());
  r.samples_per_period = P;
  r.step = dt / substeps;
  const std::size_t n = std::size_t(P) * std::size_t(r.transient_periods + grid.periods);

  const double scale = p.saturation();
  const double xi_per_tesla = xi_parameter(p, 1.0, T);
  auto drive = [&](double t) { return scale * langevin(xi_per_tesla * field.field_at(t)); };

  r.series.sample_rate = grid.sample_rate;
  r.series.t0 = 0.0;
  r.series.unit = Unit::AmperePerMetre;
  r.series.samples = integrate_relaxation(drive, tau, opts.m_initial, dt, substeps, n);
  return r;
}

}  // namespace mnpt
