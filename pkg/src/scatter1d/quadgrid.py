"""Momentum quadrature on the half-line and the pole-subtracted LS weights."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .exceptions import GridCollisionError

COLLISION_TOL = 1e-10
COLLISION_RETRIES = 5
COLLISION_FACTOR = 1.000001


def gauss_legendre(n: int):
    """Gauss-Legendre nodes and weights on [-1, 1], exact to degree 2n - 1."""
    n = int(n)
    if n < 1:
        raise ValueError("Gauss-Legendre rule needs at least one node")
    x, w = roots_legendre(n)
    return np.asarray(x, dtype=float), np.asarray(w, dtype=float)


@dataclass(frozen=True)
class MomentumGrid:
    """Tangent-mapped Gauss-Legendre grid with the on-shell point appended.

    ``nodes`` and ``weights`` hold the N quadrature points; ``points``
    additionally carries ``onshell_k`` as entry N (zero base weight).
    """

    nodes: np.ndarray
    weights: np.ndarray
    onshell_k: float
    map_scale: float

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def points(self) -> np.ndarray:
        return np.append(self.nodes, self.onshell_k)

    def integrate(self, func) -> float:
        """Plain quadrature of ``func`` over [0, inf) using the N nodes."""
        return float(np.sum(self.weights * func(self.nodes)))


def _tangent_map(n: int, scale: float):
    x, w = gauss_legendre(n)
    theta = math.pi * (x + 1.0) / 4.0
    nodes = scale * np.tan(theta)
    weights = scale * (math.pi / 4.0) * w / np.cos(theta) ** 2
    return nodes, weights


def build_grid(n: int, c: float | None = None, k: float = 1.0) -> MomentumGrid:
    """Map ``n`` Gauss-Legendre points to [0, inf) via p = c tan(pi (x+1)/4).

    ``c`` defaults to max(1, k).  If ``k`` lands within 1e-10 k of a node the
    scale is nudged by a factor 1.000001, at most five times.
    """
    if n < 8:
        raise ValueError("momentum grid needs n >= 8")
    if k <= 0:
        raise ValueError("on-shell momentum must be positive")
    scale = max(1.0, k) if c is None else float(c)
    if scale <= 0:
        raise ValueError("map scale must be positive")
    for _ in range(COLLISION_RETRIES + 1):
        nodes, weights = _tangent_map(n, scale)
        if np.min(np.abs(nodes - k)) >= COLLISION_TOL * k:
            return MomentumGrid(nodes, weights, float(k), scale)
        scale *= COLLISION_FACTOR
    raise GridCollisionError(
        f"on-shell k={k!r} collides with a grid node after {COLLISION_RETRIES} scale perturbations"
    )


def build_bound_grid(n: int, c: float = 1.0) -> MomentumGrid:
    """Grid for negative-energy kernels; there is no on-shell point to avoid."""
    if n < 8:
        raise ValueError("momentum grid needs n >= 8")
    nodes, weights = _tangent_map(n, float(c))
    return MomentumGrid(nodes, weights, math.nan, float(c))


def singular_weights(grid: MomentumGrid, k: float | None = None) -> np.ndarray:
    """Complex weights for (2/pi) int_0^inf g(p) / (k^2 - p^2 + i0) dp.

    Returns N + 1 weights; the last multiplies g(k).  The subtracted form
    uses PV int_0^inf dp / (k^2 - p^2) = 0, leaving the -i/k unitarity term
    on the on-shell entry.
    """
    k = grid.onshell_k if k is None else float(k)
    if not k > 0:
        raise ValueError("singular weights need k > 0; use regular_weights below threshold")
    regular = (2.0 / math.pi) * grid.weights / (k * k - grid.nodes ** 2)
    omega = np.empty(grid.n + 1, dtype=complex)
    omega[:-1] = regular
    omega[-1] = -np.sum(regular) - 1j / k
    return omega


def regular_weights(grid: MomentumGrid, E: float) -> np.ndarray:
    """Weights w_j / (E - p_j^2) for a strictly negative energy E."""
    if E >= 0:
        raise ValueError("regular weights require E < 0")
    return grid.weights / (E - grid.nodes ** 2)
