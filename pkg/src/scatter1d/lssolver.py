"""Nystrom solution of the partial-wave Lippmann-Schwinger equation.

    t_L(q, k) = V_L(q, k) + (2/pi) int_0^inf dp V_L(q, p) t_L(p, k) / (k^2 - p^2 + i0)

is discretized on a tangent-mapped grid plus the on-shell point and solved
densely with partial pivoting.  Below threshold the same kernel is regular
and its Fredholm determinant locates bound states.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve
from scipy.linalg.lapack import get_lapack_funcs

from .exceptions import SingularSystemError
from .potentials import PotentialModel
from .pwave import partial_wave_matrix, v_partial
from .quadgrid import MomentumGrid, build_bound_grid, build_grid, regular_weights, singular_weights

CONDITION_WARN = 1e12
DEFAULT_N_GRID = 200
BISECT_TOL = 1e-10


@dataclass(frozen=True)
class HalfOffShellT:
    """Column t_L(p_j, k; k^2) of the outgoing-wave t-matrix.

    ``values[-1]`` is the on-shell element t_L(k, k).
    """

    L: int
    k: float
    grid: MomentumGrid
    values: np.ndarray
    condition: float
    residual: float

    @property
    def onshell(self) -> complex:
        return complex(self.values[-1])

    @property
    def momenta(self) -> np.ndarray:
        return self.grid.points

    def incoming(self) -> np.ndarray:
        """Incoming-wave column t^(-); the conjugate for real symmetric V_L."""
        return np.conj(self.values)

    def unitarity_residual(self) -> float:
        """|Im t(k,k) + |t(k,k)|^2 / k|."""
        t = self.onshell
        return abs(t.imag + abs(t) ** 2 / self.k)

    def halfshell_unitarity_residual(self) -> float:
        """max_q |Im t(q,k) + t(q,k) t^(-)(k,k) / k| over the off-shell nodes."""
        tq = self.values[:-1]
        return float(np.max(np.abs(tq.imag + tq * np.conj(self.onshell) / self.k)))


@dataclass(frozen=True)
class BoundState:
    L: int
    energy: float
    det_residual: float


def _lu_with_condition(A: np.ndarray):
    with warnings.catch_warnings():
        warnings.simplefilter("error", LinAlgWarning)
        try:
            lu, piv = lu_factor(A, check_finite=True)
        except (LinAlgWarning, ValueError, np.linalg.LinAlgError) as exc:
            raise SingularSystemError(f"LS matrix is singular: {exc}") from exc
    if np.any(lu.diagonal() == 0):
        raise SingularSystemError("LS matrix is exactly singular", condition=math.inf)
    gecon, = get_lapack_funcs(("gecon",), (lu,))
    anorm = np.linalg.norm(A, 1)
    rcond, info = gecon(lu, anorm, norm="1")
    condition = math.inf if rcond == 0 else 1.0 / rcond
    return (lu, piv), condition


def solve_halfoffshell(model: PotentialModel, L: int, k: float, n_grid: int = DEFAULT_N_GRID,
                       map_scale: float | None = None) -> HalfOffShellT:
    """Solve [1 - V_L Omega(k)] t = V_L(., k) for the half-off-shell column.

    Raises
    ------
    SingularSystemError
        When the dense system cannot be factorized.  A condition estimate
        above 1e12 only warns.
    """
    if not k > 0:
        raise ValueError("scattering solve needs k > 0")
    grid = build_grid(n_grid, map_scale, k)
    V = partial_wave_matrix(model, L, grid.points)
    omega = singular_weights(grid, k)
    A = np.eye(grid.n + 1, dtype=complex) - V * omega[None, :]
    rhs = V[:, -1].astype(complex)
    factors, condition = _lu_with_condition(A)
    if condition > CONDITION_WARN:
        warnings.warn(f"ill-conditioned LS system (cond ~ {condition:.2e}) at k={k}, L={L}",
                      RuntimeWarning, stacklevel=2)
    t = lu_solve(factors, rhs)
    scale = max(np.max(np.abs(rhs)), 1e-300)
    residual = float(np.max(np.abs(A @ t - rhs)) / scale) if np.any(rhs) else 0.0
    if not np.all(np.isfinite(t)):
        raise SingularSystemError(f"non-finite t-matrix at k={k}, L={L}", condition)
    return HalfOffShellT(L, float(k), grid, t, condition, residual)


def born_term(model: PotentialModel, L: int, q, qp):
    """First-order (Born) approximation t_L ~ V_L."""
    return v_partial(model, L, q, qp)


class BoundStateKernel:
    """Fredholm determinant of 1 - V_L G0(E) on a fixed grid for E < 0."""

    def __init__(self, model: PotentialModel, L: int, n_grid: int = 96, map_scale: float = 1.0):
        self.L = L
        self.grid = build_bound_grid(n_grid, map_scale)
        self.V = partial_wave_matrix(model, L, self.grid.nodes)
        self._identity = np.eye(self.grid.n)

    def matrix(self, E: float) -> np.ndarray:
        w = (2.0 / math.pi) * regular_weights(self.grid, E)
        return self._identity - self.V * w[None, :]

    def sign_logdet(self, E: float):
        return np.linalg.slogdet(self.matrix(E))

    def determinant(self, E: float) -> float:
        sign, logabs = self.sign_logdet(E)
        return float(sign * math.exp(logabs)) if np.isfinite(logabs) else 0.0


def find_bound_states(model: PotentialModel, L: int, E_min: float, E_max: float,
                      n_scan: int = 200, n_grid: int = 96,
                      map_scale: float | None = None) -> list:
    """Bracket sign changes of the determinant on [E_min, E_max] and bisect.

    Returns an empty list when no sign change is found.  Roots within 1% of
    the window edges trigger a warning, since states may lie just outside.
    """
    if not E_min < E_max < 0:
        raise ValueError("bound-state window must satisfy E_min < E_max < 0")
    if n_scan < 2:
        raise ValueError("n_scan must be at least 2")
    scale = max(1.0, math.sqrt(-E_min)) if map_scale is None else map_scale
    kernel = BoundStateKernel(model, L, n_grid, scale)
    energies = np.linspace(E_min, E_max, n_scan)
    signs = np.array([kernel.sign_logdet(E)[0] for E in energies])
    states = []
    width = E_max - E_min
    for i in np.nonzero(signs[:-1] * signs[1:] < 0)[0]:
        lo, hi = energies[i], energies[i + 1]
        s_lo = signs[i]
        while hi - lo > BISECT_TOL:
            mid = 0.5 * (lo + hi)
            s_mid = kernel.sign_logdet(mid)[0]
            if s_mid == 0:
                lo = hi = mid
                break
            if s_mid == s_lo:
                lo = mid
            else:
                hi = mid
        root = 0.5 * (lo + hi)
        if min(root - E_min, E_max - root) < 0.01 * width:
            warnings.warn(f"bound state at E={root:.6g} lies within 1% of the search window edge",
                          RuntimeWarning, stacklevel=2)
        states.append(BoundState(L, float(root), float(abs(kernel.determinant(root)))))
    return states
