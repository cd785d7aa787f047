#include "mnpt/physics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mnpt/constants.hpp"
#include "mnpt/error.hpp"

namespace mnpt {

namespace {

double sphere_volume(double d) { return kPi / 6.0 * d * d * d; }

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

// Physicists' Hermite nodes/weights for ∫exp(-x²)f(x)dx by Newton iteration
// on the orthonormal recurrence.
void gauss_hermite(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double pim4 = std::pow(kPi, -0.25);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(double(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(double(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace

double ParticleSpec::v_core() const { return sphere_volume(d_core); }
double ParticleSpec::v_hydro() const { return sphere_volume(d_hydro); }
double ParticleSpec::m_s() const { return moment ? *moment : Ms_bulk * v_core(); }

void ParticleSpec::validate() const {
  require_positive(d_core, "d_core");
  require_positive(d_hydro, "d_hydro");
  if (d_hydro < d_core) throw DomainError("d_hydro must be >= d_core");
  require_positive(K_aniso, "K_aniso");
  require_positive(m_s(), "m_s");
  require_positive(N_conc, "N_conc");
  require_positive(eta, "eta");
  require_positive(tau0, "tau0");
}

ParticleSpec ParticleSpec::with_coating(double d_core, double coating, ParticleSpec base) {
  if (coating < 0.0) throw DomainError("coating thickness must be >= 0");
  base.d_core = d_core;
  base.d_hydro = d_core + 2.0 * coating;
  return base;
}

ParticleSpec ParticleSpec::with_coating(double d_core, double coating) {
  return with_coating(d_core, coating, ParticleSpec{});
}

std::vector<SizeNode> size_quadrature(const SizeDistribution& dist) {
  require_positive(dist.median_d, "median_d");
  if (dist.kind == DistributionKind::Monodisperse) return {{dist.median_d, 1.0}};
  if (!(dist.sigma_log > 0.0)) throw DomainError("lognormal distribution requires sigma_log > 0");
  if (dist.n_quadrature < 1) throw DomainError("n_quadrature must be >= 1");

  std::vector<double> x, w;
  gauss_hermite(dist.n_quadrature, x, w);
  std::vector<SizeNode> nodes;
  nodes.reserve(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = dist.median_d * std::exp(std::sqrt(2.0) * dist.sigma_log * x[i]);
    nodes.push_back({d, w[i] / std::sqrt(kPi)});
    total += nodes.back().weight;
  }
  for (auto& n : nodes) n.weight /= total;
  return nodes;
}

ParticleSpec rescale_core(const ParticleSpec& p, double d_core) {
  require_positive(d_core, "d_core");
  ParticleSpec q = p;
  const double coating = 0.5 * (p.d_hydro - p.d_core);
  q.d_core = d_core;
  q.d_hydro = d_core + 2.0 * coating;
  if (p.moment) {
    const double r = d_core / p.d_core;
    q.moment = *p.moment * r * r * r;
  }
  return q;
}

double langevin(double xi) {
  const double ax = std::abs(xi);
  if (ax < 0.1) {
    const double x2 = xi * xi;
    // x/3 - x^3/45 + 2x^5/945 - x^7/4725 + 2x^9/93555
    return xi * (1.0 / 3.0 +
                 x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0 + x2 * (-1.0 / 4725.0 + x2 * (2.0 / 93555.0)))));
  }
  if (ax > 40.0) return std::copysign(1.0 - 1.0 / ax, xi);
  return 1.0 / std::tanh(xi) - 1.0 / xi;
}

double langevin_derivative(double xi) {
  const double ax = std::abs(xi);
  if (ax < 0.1) {
    const double x2 = xi * xi;
    return 1.0 / 3.0 + x2 * (-1.0 / 15.0 + x2 * (2.0 / 189.0 + x2 * (-1.0 / 675.0)));
  }
  if (ax > 350.0) return 1.0 / (xi * xi);
  const double s = std::sinh(xi);
  return 1.0 / (xi * xi) - 1.0 / (s * s);
}

double xi_parameter(const ParticleSpec& p, double B_amp, double T) {
  require_positive(T, "temperature");
  return p.m_s() * B_amp / (PhysicalConstants::k_B * T);
}

double tau_brownian(double d_hydro, double eta, double T) {
  require_positive(d_hydro, "d_hydro");
  require_positive(eta, "eta");
  require_positive(T, "temperature");
  return 3.0 * eta * sphere_volume(d_hydro) / (PhysicalConstants::k_B * T);
}

RelaxationTime tau_neel(double d_core, double K_aniso, double T, double tau0) {
  require_positive(d_core, "d_core");
  require_positive(K_aniso, "K_aniso");
  require_positive(T, "temperature");
  require_positive(tau0, "tau0");
  const double exponent = K_aniso * sphere_volume(d_core) / (PhysicalConstants::k_B * T);
  const double log_cap = std::log(kNeelCap / tau0);
  if (exponent >= log_cap) return {kNeelCap, true};
  return {tau0 * std::exp(exponent), false};
}

double tau_effective(double tau_B, RelaxationTime tau_N) {
  require_positive(tau_B, "tau_B");
  if (tau_N.saturated) return tau_B;
  require_positive(tau_N.seconds, "tau_N");
  const double lo = std::min(tau_B, tau_N.seconds);
  const double hi = std::max(tau_B, tau_N.seconds);
  return lo / (1.0 + lo / hi);
}

double tau_particle(const ParticleSpec& p, double T) {
  return tau_effective(tau_brownian(p.d_hydro, p.eta, T), tau_neel(p.d_core, p.K_aniso, T, p.tau0));
}

FieldCorrectionModel FieldCorrectionModel::empirical(double c, double p) {
  if (c < 0.0 || p <= 0.0) throw DomainError("empirical field correction needs c >= 0, p > 0");
  FieldCorrectionModel m;
  m.kind_ = Kind::Empirical;
  m.c_ = c;
  m.p_ = p;
  return m;
}

FieldCorrectionModel FieldCorrectionModel::custom(std::function<double(double)> factor) {
  FieldCorrectionModel m;
  m.kind_ = Kind::Custom;
  m.custom_ = std::move(factor);
  return m;
}

double FieldCorrectionModel::factor(double xi) const {
  switch (kind_) {
    case Kind::None:
      return 1.0;
    case Kind::Empirical:
      return 1.0 / std::sqrt(1.0 + c_ * std::pow(xi, p_));
    case Kind::Custom:
      return custom_(xi);
  }
  return 1.0;
}

double tau_field_corrected(double tau, double xi, const FieldCorrectionModel& model) {
  require_positive(tau, "tau");
  if (!(xi >= 0.0)) throw DomainError("xi must be >= 0");
  return tau * model.factor(xi);
}

DebyeResponse debye_response(double omega, double tau) {
  if (!(omega >= 0.0)) throw DomainError("omega must be >= 0");
  require_positive(tau, "tau");
  const double wt = omega * tau;
  return {1.0 / std::sqrt(1.0 + wt * wt), std::atan(wt)};
}

}  // namespace mnpt
