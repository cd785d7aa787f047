"""Magnetic nanoparticle thermometry under mixing-frequency excitation."""

from ._core import (
    ConfigError,
    ConvergenceError,
    DomainError,
    Error,
    EstimationError,
    FieldConfig,
    IoError,
    ParticleSpec,
    check_plan,
    debye_response,
    estimate,
    figure,
    figure_ids,
    fourier_coefficients,
    langevin,
    phi_H_from_mixing,
    run_scenario,
    simulate_channels,
    tau_brownian,
    tau_from_phase,
    tau_particle,
    xi_parameter,
)

__all__ = [name for name in dir() if not name.startswith("_")]
