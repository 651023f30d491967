"""Spectral solver for singular reaction-diffusion with fractional time and space.

``D_t^alpha u = -(-Delta)^s u + f(u)`` on boxes with zero Dirichlet data,
solved spectrally with exact Mittag-Leffler weights.
"""

__version__ = "0.1.0"

from .special_fn import mittag_leffler, wright
from .spectral import DomainSpec, FractionalParams, SpectralField, build_basis
from .reaction import ReactionSpec
from .solver import SolveConfig, Trajectory, QuenchReport, run, step, existence_horizon
from .quench import steady_solve, classify, critical_size, sweep

__all__ = ["mittag_leffler", "wright", "DomainSpec", "FractionalParams", "SpectralField",
           "build_basis", "ReactionSpec", "SolveConfig", "Trajectory", "QuenchReport", "run",
           "step", "existence_horizon", "steady_solve", "classify", "critical_size", "sweep"]
