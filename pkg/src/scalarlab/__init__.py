"""Numerical laboratory for multi-dimensional scalar conservation laws.

Monotone finite-volume entropy solvers, genuine-nonlinearity measurement,
the kinetic lifting with its level-set energies, exponent algebra and
decay experiments for perturbed planar rarefaction waves.
"""
from .errors import ConfigurationError, DomainError, FitError, GeometryError, ScalarLabError
from .exponents import ExponentSet, bound_envelope, compute_exponents, compute_theta, gamma0, optimize_gamma
from .flux import FluxModel, NondegeneracyProfile, burgers, convex_power, custom_poly, eval_velocity, linear, nondegeneracy_profile
from .grid import Grid, SolutionField
from .harness import DecayReport, ExperimentConfig, contraction_audit, fit_rate, run_decay_experiment
from .initial import Bump, Constant, RarefactionPlusBump, Riemann, Table
from .kinetic import (BumpTest, KineticLevelData, degiorgi_sequence, entropy_dissipation_residual,
                      kinetic_function, level_set_integral, reconstruct_u, variation_bound_ratio)
from .solver import SolveConfig, numerical_flux, solve, step
from .waves import RarefactionWave, oleinik_ratio

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DomainError",
    "FitError",
    "GeometryError",
    "ScalarLabError",
    "ExponentSet",
    "bound_envelope",
    "compute_exponents",
    "compute_theta",
    "gamma0",
    "optimize_gamma",
    "FluxModel",
    "NondegeneracyProfile",
    "burgers",
    "convex_power",
    "custom_poly",
    "eval_velocity",
    "linear",
    "nondegeneracy_profile",
    "Grid",
    "SolutionField",
    "DecayReport",
    "ExperimentConfig",
    "contraction_audit",
    "fit_rate",
    "run_decay_experiment",
    "Bump",
    "Constant",
    "RarefactionPlusBump",
    "Riemann",
    "Table",
    "BumpTest",
    "KineticLevelData",
    "degiorgi_sequence",
    "entropy_dissipation_residual",
    "kinetic_function",
    "level_set_integral",
    "reconstruct_u",
    "variation_bound_ratio",
    "SolveConfig",
    "numerical_flux",
    "solve",
    "step",
    "RarefactionWave",
    "oleinik_ratio",
]
