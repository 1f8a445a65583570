"""Spectral solver for the 2-D Cahn-Hilliard gradient flow.

The package integrates the conserved gradient flow of the Ginzburg-Landau
energy on [-1,1]^2 with a stabilized, linear, diffusive Crank-Nicolson
two-step scheme in a Legendre-Galerkin space.  Every step solves one
constant-coefficient elliptic system by fast diagonalization, conserves the
spatial mean exactly, and (for suitable stabilization constants) dissipates
a discrete energy that is monitored at run time.  An adaptive step-size
controller and an experiment harness (convergence studies, stability scans,
adaptive-versus-uniform comparisons) sit on top of the core integrator.
"""

__version__ = "0.1.0"

from .adaptive import AdaptiveConfig, adaptive_run, adp, indicator
from .energy import EnergyRecord, energy_discrete, energy_eps, mass_mean
from .legendre import (
    Basis1D,
    GridField,
    QuadratureRule,
    SpectralField,
    galerkin_inner,
    gauss_legendre,
    legendre_deriv,
    legendre_eval,
    synthesize,
)
from .operators import (
    CompatibilityError,
    EigenFactorization,
    OperatorPair1D,
    StepFactor,
    apply_step_inverse,
    build_operators,
    hminus1_norm,
    norms,
    poisson_neumann,
    project_grid,
    simultaneous_diag,
)
from .potential import PotentialSpec, F, f, f_prime, lipschitz
from .scheme import (
    BlowUpError,
    RunResult,
    SchemeParams,
    StepState,
    first_step,
    run_uniform,
    sldcn_step,
)

__all__ = [
    "AdaptiveConfig",
    "Basis1D",
    "BlowUpError",
    "CompatibilityError",
    "EigenFactorization",
    "EnergyRecord",
    "F",
    "GridField",
    "OperatorPair1D",
    "PotentialSpec",
    "QuadratureRule",
    "RunResult",
    "SchemeParams",
    "SpectralField",
    "StepFactor",
    "StepState",
    "adaptive_run",
    "adp",
    "apply_step_inverse",
    "build_operators",
    "energy_discrete",
    "energy_eps",
    "f",
    "f_prime",
    "first_step",
    "galerkin_inner",
    "gauss_legendre",
    "hminus1_norm",
    "indicator",
    "legendre_deriv",
    "legendre_eval",
    "lipschitz",
    "mass_mean",
    "norms",
    "poisson_neumann",
    "project_grid",
    "run_uniform",
    "simultaneous_diag",
    "sldcn_step",
    "synthesize",
]
