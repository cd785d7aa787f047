#pragma once

// Closed-form particle physics: Langevin statics, Brownian/Néel/effective
// relaxation times, the single-pole Debye response and field dependence of
// the relaxation time.

#include <functional>
#include <optional>
#include <vector>

namespace mnpt {

/// Geometry and magnetic properties of one particle population (SI units).
struct ParticleSpec {
  double d_core = 30e-9;       // m
  double d_hydro = 30e-9;      // m
  double K_aniso = 20e3;       // J/m^3
  double Ms_bulk = 4.8e5;      // A/m, used when `moment` is not given
  std::optional<double> moment;  // A·m^2 per particle, overrides Ms_bulk·V_core
  double N_conc = 1.5e18;      // 1/m^3
  double eta = 1e-3;           // Pa·s
  double tau0 = 1e-9;          // s, Néel attempt time

  double v_core() const;
  double v_hydro() const;
  double m_s() const;
  /// Saturation magnetization of the suspension, N·m_s (A/m).
  double saturation() const { return N_conc * m_s(); }

  /// Throws DomainError if any invariant is broken.
  void validate() const;

  /// Builds a spec with d_hydro = d_core + 2·coating.
  static ParticleSpec with_coating(double d_core, double coating, ParticleSpec base);
  static ParticleSpec with_coating(double d_core, double coating);
};

enum class DistributionKind { Monodisperse, Lognormal };

struct SizeDistribution {
  DistributionKind kind = DistributionKind::Monodisperse;
  double median_d = 30e-9;  // m, core diameter
  double sigma_log = 0.0;
  int n_quadrature = 1;
};

struct SizeNode {
  double diameter;
  double weight;
};

/// Number-weighted quadrature nodes over core diameter. Weights sum to one.
/// Lognormal uses Gauss–Hermite nodes in log-diameter.
std::vector<SizeNode> size_quadrature(const SizeDistribution& dist);

/// Particle at a different core diameter, keeping the coating thickness and,
/// for an explicit moment, scaling it with core volume.
ParticleSpec rescale_core(const ParticleSpec& p, double d_core);

/// L(x) = coth(x) - 1/x, with a series branch near zero.
double langevin(double xi);
/// dL/dx, used by the linear-response checks.
double langevin_derivative(double xi);

/// ξ = m_s·B/(k_B·T) for a field amplitude given as μ0·H in tesla.
double xi_parameter(const ParticleSpec& p, double B_amp, double T);

double tau_brownian(double d_hydro, double eta, double T);

struct RelaxationTime {
  double seconds;
  bool saturated = false;  // exponent overflowed; `seconds` holds the cap
};

inline constexpr double kNeelCap = 1e30;

RelaxationTime tau_neel(double d_core, double K_aniso, double T, double tau0);

/// Parallel combination of the two mechanisms. A saturated Néel time drops out.
double tau_effective(double tau_B, RelaxationTime tau_N);

/// τ_eff for a particle at temperature T (Brownian ∥ Néel).
double tau_particle(const ParticleSpec& p, double T);

class FieldCorrectionModel {
 public:
  enum class Kind { None, Empirical, Custom };

  /// Identity: τ(ξ) = τ.
  FieldCorrectionModel() = default;

  /// τ(ξ) = τ / sqrt(1 + c·ξ^p). Not a published law; an implementer-chosen
  /// smooth monotone shape for the shortening of τ_eff in strong fields.
  static FieldCorrectionModel empirical(double c = 0.126, double p = 1.72);

  /// Arbitrary factor g(ξ) with g(0) = 1, non-increasing; τ(ξ) = τ·g(ξ).
  static FieldCorrectionModel custom(std::function<double(double)> factor);

  Kind kind() const { return kind_; }
  double factor(double xi) const;

 private:
  Kind kind_ = Kind::None;
  double c_ = 0.0;
  double p_ = 1.0;
  std::function<double(double)> custom_;
};

double tau_field_corrected(double tau, double xi, const FieldCorrectionModel& model);

struct DebyeResponse {
  double attenuation;
  double phase;  // rad, lag in [0, π/2)
};

DebyeResponse debye_response(double omega, double tau);

}  // namespace mnpt
