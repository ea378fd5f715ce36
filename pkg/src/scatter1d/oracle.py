"""Reference results independent of the integral equations.

Two sources: the closed-form delta-potential results, and a Numerov
integration of  u'' = (V(r) - k^2) u  outward from r = 0 with even
(u = 1, u' = 0) or odd (u = 0, u' = 1) initial data.  Jumps of V are placed on
grid nodes and crossed by matching u and u' with a fourth-order derivative
formula, so the scheme keeps its O(h^4) global accuracy on piecewise-smooth
potentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ResolutionError
from .potentials import PotentialModel

DEFAULT_STEP = 1e-3
MIN_REGION_STEPS = 32
RICHARDSON_TOL = 1e-8


@dataclass(frozen=True)
class OracleResult:
    source: str
    k: float
    delta0: float
    delta1: float
    R: float
    T: float
    sigma_tot: float
    bound_energies: list = field(default_factory=list)
    richardson_gap: float = 0.0


def _rt_sigma(delta0: float, delta1: float):
    gap = delta0 - delta1
    return math.sin(gap) ** 2, math.cos(gap) ** 2, 2.0 * (math.sin(delta0) ** 2 + math.sin(delta1) ** 2)


def delta_closed_forms(lam: float, k: float) -> OracleResult:
    """Phase shift, R, T, sigma_tot and bound state of V = lam delta(x)."""
    if not k > 0:
        raise ValueError("closed forms need k > 0")
    delta0 = math.atan(-lam / (2.0 * k))
    R = lam ** 2 / (lam ** 2 + 4.0 * k ** 2)
    T = 4.0 * k ** 2 / (lam ** 2 + 4.0 * k ** 2)
    sigma = 2.0 * lam ** 2 / (lam ** 2 + 4.0 * k ** 2)
    bound = [-lam ** 2 / 4.0] if lam < 0 else []
    return OracleResult("analytic-delta", float(k), delta0, 0.0, R, T, sigma, bound)


def _regions(model: PotentialModel, r_end: float, step: float, k2: float):
    """Split [0, r_end] into (a, b, n_steps, f) with f = V - k^2 smooth on [a, b].

    Inside the support the step is ``step``; beyond R it stretches to
    ``step / k`` for k < 1 so the count per wavelength stays fixed.
    """
    if model.is_delta:
        raise ValueError("Numerov needs a pointwise potential; use a narrow square well for delta")
    k = math.sqrt(abs(k2))
    outer_step = step / min(1.0, k) if k > 0 else step
    cuts = []
    for lo, hi, piece in model.pieces():
        hi = min(hi, r_end)
        if hi <= lo:
            continue
        if lo < model.range < hi:
            cuts.append((lo, model.range, piece))
            cuts.append((model.range, hi, piece))
        else:
            cuts.append((lo, hi, piece))
    regions = []
    for lo, hi, piece in cuts:
        h = outer_step if lo >= model.range else step
        n = max(MIN_REGION_STEPS, math.ceil((hi - lo) / h))
        regions.append((lo, hi, n, _shifted(piece, k2)))
    return regions


def _shifted(piece, k2):
    return lambda r: np.asarray(piece(r), dtype=float) - k2


def _derivative(u_prev, u_next, f_prev, f_next, h):
    """Fourth-order u' at the central node from its two neighbours."""
    return ((1.0 - h * h * f_next / 6.0) * u_next - (1.0 - h * h * f_prev / 6.0) * u_prev) / (2.0 * h)


def _start_from(u0, du0, f_m, f_0, f_p, h):
    """Virtual value u_-1 consistent with (u, u') at a node.

    Solves the Numerov step together with the derivative formula.
    """
    a_m, a_p = 1.0 - h * h * f_m / 12.0, 1.0 - h * h * f_p / 12.0
    b_m, b_p = 1.0 - h * h * f_m / 6.0, 1.0 - h * h * f_p / 6.0
    rhs1 = 2.0 * (1.0 + 5.0 * h * h * f_0 / 12.0) * u0
    rhs2 = 2.0 * h * du0
    det = a_m * b_p + a_p * b_m
    return (rhs1 * b_p - a_p * rhs2) / det


def _march(u_m, u0, fv, h):
    """Numerov recursion; ``fv`` holds f on the nodes a - h, a, ..., b + h.

    Written in summed-difference form on w = (1 - h^2 f / 12) u, so roundoff
    accumulates in the increments rather than in O(1) second differences.
    """
    c = (1.0 - h * h * fv / 12.0).tolist()
    hf = (h * h * fv).tolist()
    w_prev, w = c[0] * u_m, c[1] * u0
    step = w - w_prev
    u = [u_m, u0]
    for i in range(1, len(c) - 1):
        step += hf[i] * u[i]
        w += step
        u.append(w / c[i + 1])
    return np.array(u)


def numerov_radial(model: PotentialModel, L: int, k2: float, r_end: float, step: float = DEFAULT_STEP):
    """Integrate the parity-L regular solution from 0 to ``r_end``.

    Returns ``(r, u, du_end)``: node radii, values and the derivative at
    ``r_end``.  ``k2`` may be negative (bound-state shooting).
    """
    if L not in (0, 1):
        raise ValueError("parity index L must be 0 or 1")
    radii, values = [], []
    u0 = du = None
    for idx, (a, b, n, f) in enumerate(_regions(model, r_end, step, k2)):
        h = (b - a) / n
        r = a + h * np.arange(-1, n + 2)
        if idx == 0:
            fv = f(np.abs(r))
            u0, du0 = (1.0, 0.0) if L == 0 else (0.0, 1.0)
            u_m = _start_from(u0, du0, fv[0], fv[1], fv[2], h)
        else:
            fv = f(r)
            u_m = _start_from(u0, du, fv[0], fv[1], fv[2], h)
        u = _march(u_m, u0, fv, h)
        du = _derivative(u[-3], u[-1], fv[-3], fv[-1], h)
        u0 = u[-2]
        skip = 1 if idx == 0 else 2
        radii.append(r[skip:-1])
        values.append(u[skip:-1])
    return np.concatenate(radii), np.concatenate(values), du


def _phase_from_matching(L: int, k: float, r: float, u: float, du: float) -> float:
    if L == 0:
        # u = A cos(k r + delta)
        phase = math.atan2(-du, k * u) - k * r
    else:
        # u = A sin(k r + delta)
        phase = math.atan2(k * u, du) - k * r
    return (phase + 0.5 * math.pi) % math.pi - 0.5 * math.pi


def matching_radius(model: PotentialModel, k: float) -> float:
    return model.range + 2.0 * math.pi / k


def numerov_phase(model: PotentialModel, L: int, k: float, step: float = DEFAULT_STEP) -> float:
    r_m = matching_radius(model, k)
    r, u, du = numerov_radial(model, L, k * k, r_m, step)
    return _phase_from_matching(L, k, r[-1], u[-1], du)


def numerov_phase_shifts(model: PotentialModel, k: float, step: float = DEFAULT_STEP,
                         tol: float = RICHARDSON_TOL, bound_window=None) -> OracleResult:
    """Even and odd phase shifts from direct integration of the Schrodinger equation.

    Each phase is computed with ``step`` and ``step / 2``; the finer value is
    kept after Richardson extrapolation. A disagreement above ``tol``
    raises :class:`ResolutionError`.
    """
    if not k > 0:
        raise ValueError("phase shifts need k > 0")
    deltas, gap = [], 0.0
    for L in (0, 1):
        coarse = numerov_phase(model, L, k, step)
        fine = numerov_phase(model, L, k, 0.5 * step)
        diff = (fine - coarse + 0.5 * math.pi) % math.pi - 0.5 * math.pi
        gap = max(gap, abs(diff))
        deltas.append(fine + diff / 15.0)
    if gap > tol:
        raise ResolutionError(f"Numerov phases change by {gap:.2e} rad on step halving at k={k}")
    R, T, sigma = _rt_sigma(*deltas)
    bound = []
    if bound_window is not None:
        bound = sorted(numerov_bound_states(model, L, *bound_window, step=step)
                       for L in (0, 1))
        bound = sorted(e for states in bound for e in states)
    return OracleResult("numerov", float(k), deltas[0], deltas[1], R, T, sigma, bound, gap)


def _bound_mismatch(model: PotentialModel, L: int, E: float, r_m: float, step: float) -> float:
    kappa = math.sqrt(-E)
    r, u, du = numerov_radial(model, L, E, r_m, step)
    norm = math.hypot(u[-1] * kappa, du)
    return (du + kappa * u[-1]) / norm


def numerov_bound_states(model: PotentialModel, L: int, E_min: float, E_max: float,
                         n_scan: int = 200, step: float = DEFAULT_STEP,
                         tol: float = 1e-10) -> list:
    """Shooting: energies where the outward solution matches exp(-kappa r) beyond R."""
    if not E_min < E_max < 0:
        raise ValueError("bound-state window must satisfy E_min < E_max < 0")
    r_m = model.range + 1.0
    energies = np.linspace(E_min, E_max, n_scan)
    values = [_bound_mismatch(model, L, E, r_m, step) for E in energies]
    roots = []
    for i in range(n_scan - 1):
        if values[i] == 0.0:
            roots.append(float(energies[i]))
            continue
        if values[i] * values[i + 1] < 0:
            lo, hi, f_lo = energies[i], energies[i + 1], values[i]
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                f_mid = _bound_mismatch(model, L, mid, r_m, step)
                if f_mid * f_lo > 0:
                    lo, f_lo = mid, f_mid
                else:
                    hi = mid
            roots.append(float(0.5 * (lo + hi)))
    return roots


def narrow_well(lam: float, width: float) -> PotentialModel:
    """Square well of full width ``width`` and area ``lam``; tends to lam delta(x)."""
    return PotentialModel.square_well(lam / width, 0.5 * width)
