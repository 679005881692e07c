"""Reconstruction of time-dependent source factors in time-fractional
diffusion equations from single-point observations.

The package splits into:

* ``fraccalc``    discrete fractional-calculus operators and the
  Mittag-Leffler function
* ``forward``     L1 finite-difference and spectral-series solvers for the
  forward problems
* ``inverse``     the fixed-point reconstruction iteration
* ``diagnostics`` numerical counterparts of the supporting inequalities
* ``experiments`` config-driven experiment runner and CSV artifacts
* ``cli``         the ``fracsource`` command
"""

from .fraccalc import (
    FractionalOrder,
    MollifierSpec,
    caputo_derivative,
    convolve,
    mittag_leffler,
    mollify,
    rl_derivative,
    rl_integral,
)
from .forward import (
    SpaceGrid,
    SpaceTimeField,
    SpatialProfile,
    SpectralBasis,
    sine_bump_profile,
    probe,
    solve_homogeneous_l1,
    solve_homogeneous_spectral,
    solve_inhomogeneous_l1,
)
from .grids import TimeGrid, TimeSeries
from .inverse import (
    DivergenceError,
    IterationConfig,
    ReconstructionTrace,
    Variant,
    add_noise,
    caputo_of_data,
    reconstruct,
    residual_phi_sequence,
)
from .diagnostics import (
    RciInstance,
    RciReport,
    RciVariant,
    check_rci,
    compute_b_delta,
    duhamel_residual,
    random_rci_instance,
)
from .experiments import ExperimentConfig, RunSummary, run_experiment, sweep

__version__ = "0.1.0"

__all__ = [
    "TimeGrid",
    "TimeSeries",
    "FractionalOrder",
    "MollifierSpec",
    "rl_integral",
    "caputo_derivative",
    "rl_derivative",
    "mittag_leffler",
    "convolve",
    "mollify",
    "SpaceGrid",
    "SpatialProfile",
    "SpaceTimeField",
    "SpectralBasis",
    "sine_bump_profile",
    "solve_homogeneous_l1",
    "solve_homogeneous_spectral",
    "solve_inhomogeneous_l1",
    "probe",
    "Variant",
    "IterationConfig",
    "ReconstructionTrace",
    "DivergenceError",
    "reconstruct",
    "caputo_of_data",
    "residual_phi_sequence",
    "add_noise",
    "RciVariant",
    "RciInstance",
    "RciReport",
    "check_rci",
    "random_rci_instance",
    "compute_b_delta",
    "duhamel_residual",
    "ExperimentConfig",
    "RunSummary",
    "run_experiment",
    "sweep",
]
