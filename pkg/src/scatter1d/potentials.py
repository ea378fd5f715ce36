"""Centrally symmetric potentials in reduced units (hbar^2 / 2m = 1).

Every model is a function of ``r = |x|``, so ``V(x) = V(-x)`` holds by
construction.  The delta potential is a distribution and is never sampled;
downstream modules treat it in closed form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .exceptions import AnalyticOnlyError

CUTOFF = 1e-12


class Kind(str, enum.Enum):
    DELTA = "delta"
    SQUARE_WELL = "square_well"
    GAUSSIAN = "gaussian"
    EXPONENTIAL = "exponential"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class PotentialModel:
    """Immutable description of a symmetric finite-range potential.

    Use the classmethod constructors rather than building instances directly.
    ``strength`` is lambda for the delta kind and the amplitude V0 otherwise;
    ``length`` is the half-width, Gaussian width or exponential decay range.
    ``range`` is the effective support radius R.
    """

    kind: Kind
    strength: float
    length: float = 0.0
    range: float = 0.0
    cutoff: float = CUTOFF
    r_samples: tuple = field(default=(), repr=False)
    v_samples: tuple = field(default=(), repr=False)

    @classmethod
    def delta(cls, strength: float) -> "PotentialModel":
        return cls(Kind.DELTA, float(strength))

    @classmethod
    def square_well(cls, depth: float, half_width: float) -> "PotentialModel":
        if half_width <= 0:
            raise ValueError("square well half-width must be positive")
        return cls(Kind.SQUARE_WELL, float(depth), float(half_width), float(half_width))

    @classmethod
    def gaussian(cls, amplitude: float, width: float, cutoff: float = CUTOFF) -> "PotentialModel":
        if width <= 0:
            raise ValueError("gaussian width must be positive")
        support = width * math.sqrt(-math.log(cutoff))
        return cls(Kind.GAUSSIAN, float(amplitude), float(width), support, cutoff)

    @classmethod
    def exponential(cls, amplitude: float, decay: float, cutoff: float = CUTOFF) -> "PotentialModel":
        if decay <= 0:
            raise ValueError("exponential decay range must be positive")
        support = -decay * math.log(cutoff)
        return cls(Kind.EXPONENTIAL, float(amplitude), float(decay), support, cutoff)

    @classmethod
    def tabulated(cls, r, v, cutoff: float = CUTOFF) -> "PotentialModel":
        """Potential sampled on an increasing radial grid starting at r = 0.

        The last sample defines the support radius and must already be below
        ``cutoff`` relative to the largest sample.
        """
        r = np.asarray(r, dtype=float)
        v = np.asarray(v, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size < 4:
            raise ValueError("tabulated potential needs matching 1-D arrays of >= 4 samples")
        if r[0] != 0.0 or np.any(np.diff(r) <= 0):
            raise ValueError("tabulated radii must start at 0 and increase strictly")
        scale = np.max(np.abs(v))
        if abs(v[-1]) > cutoff * max(scale, 1.0):
            raise ValueError(
                f"tabulated potential has |V(R)| = {abs(v[-1]):.3e} above cutoff {cutoff:.1e}"
            )
        return cls(Kind.TABULATED, float(scale), 0.0, float(r[-1]), cutoff,
                   tuple(r.tolist()), tuple(v.tolist()))

    @property
    def is_delta(self) -> bool:
        return self.kind is Kind.DELTA

    @property
    def is_compact(self) -> bool:
        return self.kind in (Kind.SQUARE_WELL, Kind.TABULATED)

    @property
    def breakpoints(self) -> tuple:
        """Radii in (0, R] where V or its derivatives jump."""
        if self.kind is Kind.SQUARE_WELL:
            return (self.length,)
        return ()

    def scaled(self, factor: float) -> "PotentialModel":
        """Return the same shape with every value multiplied by ``factor``."""
        if self.kind is Kind.TABULATED:
            return PotentialModel.tabulated(self.r_samples, np.asarray(self.v_samples) * factor,
                                            self.cutoff)
        return PotentialModel(self.kind, self.strength * factor, self.length, self.range,
                              self.cutoff)

    def pieces(self) -> list:
        """Smooth pieces ``(r_lo, r_hi, f)`` covering [0, inf).

        Each ``f`` is smooth on its closed interval and may be evaluated a
        little past its ends (needed for interface matching in ODE solvers).
        """
        if self.is_delta:
            raise AnalyticOnlyError("analytic-only potential: delta has no pointwise profile")
        if self.kind is Kind.SQUARE_WELL:
            v0 = self.strength
            return [
                (0.0, self.length, lambda r: np.full_like(np.asarray(r, dtype=float), v0)),
                (self.length, math.inf, lambda r: np.zeros_like(np.asarray(r, dtype=float))),
            ]
        return [(0.0, math.inf, self._smooth_profile())]

    def _smooth_profile(self) -> Callable:
        v0, ell = self.strength, self.length
        if self.kind is Kind.GAUSSIAN:
            return lambda r: v0 * np.exp(-(np.asarray(r, dtype=float) / ell) ** 2)
        if self.kind is Kind.EXPONENTIAL:
            return lambda r: v0 * np.exp(-np.abs(np.asarray(r, dtype=float)) / ell)
        if self.kind is Kind.TABULATED:
            interp = _tabulated_interpolant(self.r_samples, self.v_samples)
            rmax = self.range

            def profile(r):
                r = np.asarray(r, dtype=float)
                return np.where(r < rmax, interp(np.clip(r, 0.0, rmax)), 0.0)

            return profile
        raise AnalyticOnlyError(f"no smooth profile for kind {self.kind.value}")


_INTERPOLANTS: dict = {}


def _tabulated_interpolant(r_samples: tuple, v_samples: tuple) -> PchipInterpolator:
    key = (r_samples, v_samples)
    interp = _INTERPOLANTS.get(key)
    if interp is None:
        interp = PchipInterpolator(np.asarray(r_samples), np.asarray(v_samples), extrapolate=True)
        _INTERPOLANTS[key] = interp
    return interp


def evaluate(model: PotentialModel, r):
    """Pointwise value V(r) for r >= 0 (scalar or array).

    Raises
    ------
    AnalyticOnlyError
        For the delta kind.
    ValueError
        If any radius is negative.
    """
    if model.is_delta:
        raise AnalyticOnlyError("analytic-only potential: delta cannot be evaluated pointwise")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise ValueError("radius must be non-negative; evaluate V at r = |x|")
    if model.kind is Kind.SQUARE_WELL:
        out = np.where(r_arr < model.length, model.strength, 0.0)
    else:
        out = model._smooth_profile()(r_arr)
    if np.ndim(r) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class UnitSystem:
    """Conversions between physical units and reduced units hbar^2/(2m) = 1."""

    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.mass <= 0 or self.hbar <= 0:
            raise ValueError("mass and hbar must be positive")

    @property
    def _scale(self) -> float:
        return 2.0 * self.mass / self.hbar ** 2

    def to_reduced_strength(self, v0: float) -> float:
        return self._scale * v0

    def to_physical_strength(self, lam: float) -> float:
        return lam / self._scale

    def energy(self, k: float) -> float:
        """Physical energy hbar^2 k^2 / (2m) of wave number ``k``."""
        return k * k / self._scale

    def reduced_energy(self, energy: float) -> float:
        """k^2 corresponding to a physical energy (negative below threshold)."""
        return energy * self._scale

    def wavenumber(self, energy: float) -> float:
        if energy < 0:
            raise ValueError("wave number is only real for non-negative energies")
        return math.sqrt(self.reduced_energy(energy))

    def momentum(self, k: float) -> float:
        return self.hbar * k

    def delta_bound_energy(self, v0: float) -> float:
        """Physical bound-state energy -m v0^2 / (2 hbar^2); requires v0 < 0."""
        if v0 >= 0:
            raise ValueError("a delta potential binds only for negative strength")
        return -self.mass * v0 ** 2 / (2.0 * self.hbar ** 2)


def physical_units_bridge(m: float, hbar: float, v0: float) -> PotentialModel:
    """Delta potential of physical strength ``v0`` expressed with lambda = 2 m v0 / hbar^2."""
    units = UnitSystem(m, hbar)
    return PotentialModel.delta(units.to_reduced_strength(v0))
