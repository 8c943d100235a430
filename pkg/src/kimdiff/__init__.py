"""Measure-valued solutions of degenerate Kimura-type forward equations.

The interior density decays while probability mass accumulates in growing
point masses at the two absorbing endpoints; this package computes the
density, the endpoint masses, the fixation probability, the underlying
spectral data, conservation diagnostics, and large-time decay constants,
with an independent finite-difference solver for cross-validation.
"""

from .model import CoefficientModel, Fields, make_kimura
from .fixation import FixationProfile, backward_residual, fixation_profile
from .spectral import (
    SpectralBasis,
    bessel_comparison,
    build_basis,
    eigenvalue_growth,
    flux_identity_residuals,
    solve_eigenproblem,
    transform_eigenfunctions,
)
from .evolution import (
    ConservationReport,
    DecayDiagnostics,
    InitialMeasure,
    SolutionMeasure,
    SpectralCoefficients,
    boundary_masses,
    bump_density,
    conservation_residuals,
    decay_diagnostics,
    density_from_spec,
    ds_norm,
    evaluate_q,
    limit_masses,
    mass_cross_check,
    project_initial,
    radon_bound_constant,
    radon_distance_to_limit,
    solution_at,
    verify_weak_form,
)
from .fd import ComparisonRow, FdState, compare_with_spectral, evolve_fd

__version__ = "0.1.0"

__all__ = [
    "CoefficientModel",
    "Fields",
    "make_kimura",
    "FixationProfile",
    "fixation_profile",
    "backward_residual",
    "SpectralBasis",
    "solve_eigenproblem",
    "transform_eigenfunctions",
    "build_basis",
    "eigenvalue_growth",
    "flux_identity_residuals",
    "bessel_comparison",
    "InitialMeasure",
    "SpectralCoefficients",
    "SolutionMeasure",
    "ConservationReport",
    "DecayDiagnostics",
    "project_initial",
    "evaluate_q",
    "solution_at",
    "boundary_masses",
    "limit_masses",
    "mass_cross_check",
    "conservation_residuals",
    "ds_norm",
    "decay_diagnostics",
    "radon_distance_to_limit",
    "radon_bound_constant",
    "verify_weak_form",
    "bump_density",
    "density_from_spec",
    "FdState",
    "ComparisonRow",
    "evolve_fd",
    "compare_with_spectral",
]
