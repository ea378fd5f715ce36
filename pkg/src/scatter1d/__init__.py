"""Partial-wave Lippmann-Schwinger scattering in one dimension.

Units are fixed by hbar^2 / 2m = 1, so E = k^2.
"""

__version__ = "0.1.0"

from .exceptions import (AnalyticOnlyError, GridCollisionError, ResolutionError,
                         ScatteringError, SingularSystemError)
from .lssolver import BoundState, HalfOffShellT, find_bound_states, solve_halfoffshell
from .observables import ScatteringReport, build_report, phase_shift
from .oracle import delta_closed_forms, numerov_bound_states, numerov_phase_shifts
from .potentials import PotentialModel, UnitSystem, evaluate
from .pwave import PartialWaveV, cosine_transform, v_partial
from .quadgrid import MomentumGrid, build_grid
from .rspace import WavefunctionProfile, green0, solve_wavefunction
from .sweep import convergence_study, scattering_report, sweep

__all__ = [
    "AnalyticOnlyError", "BoundState", "GridCollisionError", "HalfOffShellT", "MomentumGrid",
    "PartialWaveV", "PotentialModel", "ResolutionError", "ScatteringError", "ScatteringReport",
    "SingularSystemError", "UnitSystem", "WavefunctionProfile", "build_grid", "build_report",
    "convergence_study", "cosine_transform", "delta_closed_forms", "evaluate",
    "find_bound_states", "green0", "numerov_bound_states", "numerov_phase_shifts",
    "phase_shift", "scattering_report", "solve_halfoffshell", "solve_wavefunction", "sweep",
    "v_partial",
]
