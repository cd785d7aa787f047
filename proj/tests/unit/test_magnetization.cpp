#include <doctest.h>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "helpers.hpp"
#include "mnpt/constants.hpp"
#include "mnpt/error.hpp"
#include "mnpt/magnetization.hpp"

using namespace mnpt;
using mnpt::testing::rel_err;

namespace {

const FieldConfig kNominal{6000, 1570, 0.36e-3, 1.98e-3};

// a_n = (2/P) ∫ M0(t) cos(nωt) dt by fixed Gauss–Legendre on many panels.
double cosine_coefficient_oracle(const FieldConfig& field, const ParticleSpec& p, double T, int n, int panels) {
  using boost::math::quadrature::gauss;
  const double P = 1.0 / field.f_base();
  const double w = kTwoPi * field.f_base();
  const double width = P / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = k * width;
    sum += gauss<double, 30>::integrate(
        [&](double t) { return equilibrium_magnetization(t, field, p, T) * std::cos(n * w * t); }, a, a + width);
  }
  return 2.0 / P * sum;
}

// Chebyshev-type coefficient of L(ξ cos θ): (2/π) ∫_0^π L(ξ cos θ) cos kθ dθ.
double single_tone_oracle(double xi, int k) {
  using boost::math::quadrature::gauss_kronrod;
  return 2.0 / kPi *
         gauss_kronrod<double, 61>::integrate([&](double th) { return langevin(xi * std::cos(th)) * std::cos(k * th); },
                                              0.0, kPi, 15, 1e-14);
}

int harmonic(int n_high, int n_low, const FieldConfig& f) { return n_high * f.n_high() + n_low * f.n_low(); }

}  // namespace

TEST_SUITE("magnetization") {

TEST_CASE("equilibrium magnetization") {
  ParticleSpec p;
  CHECK(equilibrium_magnetization(0.0, FieldConfig(6000, 1570, 0.0, 0.0), p, 300.0) == 0.0);

  const FieldConfig equal(6000, 1570, 1e-3, 1e-3);
  const double xi1 = xi_parameter(p, 1e-3, 300.0);
  CHECK(equilibrium_magnetization(0.0, equal, p, 300.0) ==
        doctest::Approx(p.saturation() * langevin(2.0 * xi1)).epsilon(1e-14));

  const double M = equilibrium_magnetization(0.0, kNominal, p, 300.0);
  CHECK(M == doctest::Approx(p.saturation() * langevin(xi_parameter(p, 2.34e-3, 300.0))).epsilon(1e-14));
  CHECK(M == doctest::Approx(7.534).epsilon(1e-3));

  const auto flipped = kNominal.with_phases(kPi, kPi);
  for (double t : {0.0, 1e-4, 3.3e-3, 0.071}) {
    CHECK(equilibrium_magnetization(t, flipped, p, 300.0) ==
          doctest::Approx(-equilibrium_magnetization(t, kNominal, p, 300.0)).epsilon(1e-12));
    CHECK(std::abs(equilibrium_magnetization(t, kNominal, p, 300.0)) < p.saturation());
  }
}

TEST_CASE("default truncation covers f_H + 6 f_L") {
  CHECK(default_n_max(kNominal) == 1542);
  const auto h = fourier_coefficients(kNominal, ParticleSpec{}, 300.0);
  CHECK(h.n_max == 1542);
  CHECK(h.lines.size() == 1542);
  for (int n = 1; n <= h.n_max; ++n) CHECK(h.lines[std::size_t(n - 1)].n == n);
}

TEST_CASE("coefficients are real for zero tone phases") {
  const auto h = fourier_coefficients(kNominal, ParticleSpec{}, 300.0);
  for (const auto& l : h.lines) CHECK(l.b == 0.0);
  CHECK(h.dc == 0.0);
}

TEST_CASE("coefficients against an independent quadrature") {
  const ParticleSpec p;
  const auto h = fourier_coefficients(kNominal, p, 300.0, 2000);
  const double ref = std::abs(h.line(harmonic(1, 0, kNominal)).a);
  for (auto [nh, nl] : {std::pair{1, 0}, {0, 1}, {0, 3}, {1, 2}, {1, -2}, {3, 0}, {1, 4}}) {
    const int n = harmonic(nh, nl, kNominal);
    CAPTURE(n);
    const double oracle = cosine_coefficient_oracle(kNominal, p, 300.0, n, 4000);
    CHECK(std::abs(h.line(n).a - oracle) < 1e-9 * ref);
  }
}

TEST_CASE("mixing lines carry the opposite sign to the fundamental") {
  const auto h = fourier_coefficients(kNominal, ParticleSpec{}, 300.0);
  CHECK(h.line(harmonic(1, 0, kNominal)).a > 0.0);
  CHECK(h.line(harmonic(1, 2, kNominal)).a < 0.0);
  CHECK(h.line(harmonic(1, -2, kNominal)).a < 0.0);
}

TEST_CASE("even-order intermodulation lines vanish") {
  const auto h = fourier_coefficients(kNominal, ParticleSpec{}, 300.0);
  const double ref = std::abs(h.line(harmonic(1, 0, kNominal)).a);
  for (auto [nh, nl] : {std::pair{1, 1}, {1, -1}, {2, 0}, {0, 2}, {1, 3}, {1, -3}, {2, 2}, {0, 4}, {1, 5}}) {
    const int n = harmonic(nh, nl, kNominal);
    CAPTURE(n);
    CHECK(std::abs(h.coefficient(n)) < 1e-10 * ref);
  }
}

TEST_CASE("linear regime keeps the field ratio") {
  const FieldConfig weak(6000, 1570, 0.36e-9, 1.98e-9);
  ParticleSpec p;
  REQUIRE(xi_parameter(p, weak.peak(), 300.0) < 1e-3);
  const auto h = fourier_coefficients(weak, p, 300.0);
  const double aH = h.line(weak.n_high()).a;
  const double aL = h.line(weak.n_low()).a;
  CHECK(rel_err(aH / aL, 0.36 / 1.98) < 1e-4);
  CHECK(std::abs(h.line(harmonic(1, 2, weak)).a) < 1e-5 * aH);
}

TEST_CASE("single tone harmonics against a direct quadrature") {
  const FieldConfig single(5000, 1570, 1.5e-3, 0.0);
  ParticleSpec p;
  const double xi = xi_parameter(p, 1.5e-3, 300.0);
  const auto h = fourier_coefficients(single, p, 300.0, 1600);
  const double a1 = h.line(single.n_high()).a;
  const double a3 = h.line(3 * single.n_high()).a;
  const double o1 = single_tone_oracle(xi, 1);
  const double o3 = single_tone_oracle(xi, 3);
  CHECK(rel_err(a1, p.saturation() * o1) < 1e-10);
  CHECK(rel_err(a3 / a1, o3 / o1) < 1e-9);
}

TEST_CASE("quadrature reports non-convergence") {
  QuadratureOptions opts;
  opts.max_nodes = 1024;
  CHECK_THROWS_AS(fourier_coefficients(kNominal, ParticleSpec{}, 300.0, 0, opts), ConvergenceError);
}

TEST_CASE("concentration scales every line") {
  ParticleSpec p;
  const auto h1 = fourier_coefficients(kNominal, p, 300.0);
  p.N_conc *= 2.0;
  const auto h2 = fourier_coefficients(kNominal, p, 300.0);
  p.N_conc *= 3.0;
  const auto h6 = fourier_coefficients(kNominal, p, 300.0);
  for (std::size_t i = 0; i < h1.lines.size(); ++i) {
    CHECK(h2.lines[i].a == 2.0 * h1.lines[i].a);
    CHECK(std::abs(h6.lines[i].a - 6.0 * h1.lines[i].a) <= 1e-14 * std::abs(h6.line(600).a));
  }
}

TEST_CASE("zero relaxation reproduces the equilibrium waveform") {
  const ParticleSpec p;
  const auto h = fourier_coefficients(kNominal, p, 300.0, 24999);
  const auto ts = spectral_magnetization(h, 0.0, kNominal, {500e3, 1, 0.0});
  const double peak = p.saturation();
  double worst = 0.0;
  for (std::size_t i = 0; i < ts.size(); i += 7) {
    worst = std::max(worst, std::abs(ts.samples[i] - equilibrium_magnetization(ts.time(i), kNominal, p, 300.0)));
  }
  CHECK(worst < 1e-9 * peak);
}

TEST_CASE("single line at the corner frequency") {
  HarmonicSet h;
  h.f_base = 1000.0;
  h.n_max = 1;
  h.lines = {{1, 1.0, 0.0, 1000.0}};
  const FieldConfig field(2000, 1000, 1e-3, 1e-3);
  const auto ts = spectral_magnetization(h, 1.0 / (kTwoPi * 1000.0), field, {100e3, 4, 0.0});
  const auto ph = extract_phasor(ts, 1000.0);
  CHECK(ph.amplitude == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(ph.phase == doctest::Approx(-kPi / 4.0).epsilon(1e-12));
}

TEST_CASE("each line lags by arctan(n ω τ)") {
  const auto h = fourier_coefficients(kNominal, ParticleSpec{}, 300.0, 2000);
  const double tau = 1.024e-5;
  const auto ts = spectral_magnetization(h, tau, kNominal, {500e3, 1, 0.0});
  const double wb = kTwoPi * kNominal.f_base();
  for (auto [nh, nl] : {std::pair{1, 0}, {0, 1}, {1, 2}, {1, -2}, {0, 3}, {3, 0}}) {
    const int n = harmonic(nh, nl, kNominal);
    const auto ph = extract_phasor(ts, n * kNominal.f_base(), kNominal.f_base());
    const double expected = wrap_phase(std::arg(h.coefficient(n)) - std::atan(n * wb * tau));
    CAPTURE(n);
    CHECK(std::abs(wrap_phase(ph.phase - expected)) < 1e-9);
    CHECK(ph.amplitude == doctest::Approx(std::abs(h.coefficient(n)) / std::hypot(1.0, n * wb * tau)).epsilon(1e-10));
  }
}

TEST_CASE("tone phases shift the intermodulation lines") {
  const ParticleSpec p;
  const double th = 0.4, tl = -0.25;
  const auto h0 = fourier_coefficients(kNominal, p, 300.0);
  const auto h1 = fourier_coefficients(kNominal.with_phases(th, tl), p, 300.0);
  for (auto [nh, nl] : {std::pair{1, 0}, {0, 1}, {1, 2}, {1, -2}, {0, 3}}) {
    const int n = harmonic(nh, nl, kNominal);
    const Complex expected = h0.coefficient(n) * std::polar(1.0, nh * th + nl * tl);
    CHECK(std::abs(h1.coefficient(n) - expected) < 1e-10 * std::abs(h0.coefficient(600)));
  }
}

TEST_CASE("relaxation integrator against the closed form") {
  const double tau = 2e-5, c = 3.5, dt = 1e-6;
  const auto m = integrate_relaxation([&](double) { return c; }, tau, 0.0, dt, 4, 400);
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(std::abs(m[i] - c * (1.0 - std::exp(-double(i) * dt / tau))) < 1e-10 * c);
  }
}

TEST_CASE("relaxation integrator tracks a sinusoid with the Debye lag") {
  const double tau = 1e-4, w = kTwoPi * 1000.0, dt = 1e-6;
  const std::size_t n = 20000;
  const auto m = integrate_relaxation([&](double t) { return std::cos(w * t); }, tau, 0.0, dt, 1, n);
  const auto r = debye_response(w, tau);
  for (std::size_t i = n - 1000; i < n; i += 37) {
    const double t = double(i) * dt;
    CHECK(std::abs(m[i] - r.attenuation * std::cos(w * t - r.phase)) < 1e-8);
  }
}

TEST_CASE("transient length") {
  CHECK(transient_periods(1e-5, 10.0) == 1);
  CHECK(transient_periods(1e-3, 2000.0) == 20);
  CHECK(transient_periods(0.05, 10.0) == 5);
}

TEST_CASE("quasi-static relaxation follows the equilibrium") {
  const FieldConfig fast(6000, 2000, 0.36e-3, 1.98e-3);
  const ParticleSpec p;
  const double tau = 1e-9;
  REQUIRE(kTwoPi * fast.f_high() * tau < 1e-4);
  const auto r = ode_magnetization(fast, p, 300.0, tau, {500e3, 1, 0.0});
  const auto s = r.steady();
  const double peak = p.saturation() * langevin(xi_parameter(p, fast.peak(), 300.0));
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    worst = std::max(worst, std::abs(s.samples[i] - equilibrium_magnetization(s.time(i), fast, p, 300.0)));
  }
  CHECK(worst < 1e-3 * peak);
}

TEST_CASE("time-domain and spectral models agree") {
  const FieldConfig fast(6000, 2000, 0.36e-3, 1.98e-3);
  const ParticleSpec p;
  const double tau = tau_particle(p, 300.0);
  const SamplingGrid grid{500e3, 2, 0.0};
  const auto ode = ode_magnetization(fast, p, 300.0, tau, grid).steady();
  auto g = grid;
  g.t0 = ode.t0;
  const auto spec = spectral_magnetization(fourier_coefficients(fast, p, 300.0), tau, fast, g);
  REQUIRE(ode.size() == spec.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ode.size(); ++i) {
    num += std::pow(ode.samples[i] - spec.samples[i], 2);
    den += spec.samples[i] * spec.samples[i];
  }
  CHECK(std::sqrt(num / den) < 1e-3);
}

TEST_CASE("integration step bound is enforced") {
  OdeOptions opts;
  opts.max_step = 1e-6;
  CHECK_THROWS_AS(ode_magnetization(kNominal, ParticleSpec{}, 300.0, 1e-5, {500e3, 1, 0.0}, opts), DomainError);
}

TEST_CASE("spectrum of a pure cosine") {
  TimeSeries ts;
  ts.sample_rate = 100e3;
  for (int i = 0; i < 1000; ++i) ts.samples.push_back(2.5 * std::cos(kTwoPi * 6000.0 * i / 100e3));
  const auto lines = magnetization_spectrum(ts, 100.0);
  int big = 0;
  for (const auto& l : lines) {
    if (l.normalized > 1e-12) {
      ++big;
      CHECK(l.frequency == 6000.0);
      CHECK(l.normalized == doctest::Approx(1.0));
      CHECK(l.amplitude == doctest::Approx(2.5));
    }
  }
  CHECK(big == 1);
  ts.samples.pop_back();
  CHECK_THROWS_AS(magnetization_spectrum(ts, 100.0), DomainError);
}

TEST_CASE("field configuration") {
  CHECK(kNominal.f_base_hz() == 10);
  CHECK(kNominal.n_high() == 600);
  CHECK(kNominal.n_low() == 157);
  CHECK(MixingLine::plus().frequency(kNominal) == 9140.0);
  CHECK(MixingLine::minus().frequency(kNominal) == 2860.0);
  CHECK(MixingLine::minus().harmonic(kNominal) == 286);
  CHECK_THROWS_AS(FieldConfig(1570, 6000, 1e-3, 1e-3), ConfigError);
  CHECK_THROWS_AS(FieldConfig(6000, 0, 1e-3, 1e-3), ConfigError);
  CHECK_THROWS_AS(FieldConfig(6000, 1570, -1e-3, 1e-3), ConfigError);
}

}  // TEST_SUITE
