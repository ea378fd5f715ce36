"""Configuration-space route: free Green's function and the coordinate LS equation.

The kernel G0(x, x') = -(s i / 2k) exp(s i k |x - x'|), s = +1 (outgoing) or -1
(incoming), is semi-separable.  The integral over supp(V) = [-R, R] is split
at x into the parts left and right of x; each part is integrated exactly
against the panel-wise Legendre interpolant of the smooth factor
exp(-+ s i k x') V psi, which keeps the Nystrom system spectrally accurate
despite the kink of G0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import eval_legendre

from .exceptions import ResolutionError, SingularSystemError
from .potentials import PotentialModel, evaluate
from .quadgrid import gauss_legendre

PANEL_ORDER = 16
PANELS_PER_WAVELENGTH = 2
RESOLUTION_TOL = 1e-7

OUTGOING = 1
INCOMING = -1


def _branch_sign(branch) -> int:
    if branch in (OUTGOING, "+", "outgoing"):
        return OUTGOING
    if branch in (INCOMING, "-", "incoming"):
        return INCOMING
    raise ValueError(f"unknown branch {branch!r}; use '+' or '-'")


def green0(x, xp, k: float, branch="+"):
    """G0^(+-)(x, x') = -+ (i / 2k) exp(+- i k |x - x'|)."""
    if k == 0:
        raise ValueError("free Green's function is undefined at k = 0")
    s = _branch_sign(branch)
    dist = np.abs(np.asarray(x, dtype=float) - np.asarray(xp, dtype=float))
    out = -s * 0.5j / k * np.exp(s * 1j * k * dist)
    return complex(out) if np.ndim(out) == 0 else out


def _cumulative_reference(t, nodes, weights) -> np.ndarray:
    """Q[i, j] = int_{-1}^{t_i} l_j(s) ds for the Lagrange basis on ``nodes``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    m = nodes.size
    n = np.arange(m)
    coeff = (2 * n[None, :] + 1) / 2.0 * weights[:, None] * eval_legendre(n[None, :], nodes[:, None])
    integ = np.empty((t.size, m))
    integ[:, 0] = t + 1.0
    for order in range(1, m):
        integ[:, order] = (eval_legendre(order + 1, t) - eval_legendre(order - 1, t)) / (2 * order + 1)
    return integ @ coeff.T


@dataclass(frozen=True)
class _Panels:
    edges: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    ref_nodes: np.ndarray
    ref_weights: np.ndarray

    @property
    def order(self) -> int:
        return self.ref_nodes.size

    def cumulative(self, x) -> np.ndarray:
        """Rows of weights for int_{edges[0]}^{x} h(x') dx' from nodal h values."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros((x.size, self.nodes.size))
        m = self.order
        panel = np.clip(np.searchsorted(self.edges, x, side="right") - 1, 0, self.edges.size - 2)
        below = x <= self.edges[0]
        above = x >= self.edges[-1]
        inner = ~(below | above)
        out[above] = self.weights
        for p in np.unique(panel[inner]):
            rows = np.nonzero(inner & (panel == p))[0]
            a, b = self.edges[p], self.edges[p + 1]
            half = 0.5 * (b - a)
            t = (x[rows] - 0.5 * (a + b)) / half
            out[np.ix_(rows, np.arange(p * m))] = self.weights[:p * m]
            out[rows, p * m:(p + 1) * m] = half * _cumulative_reference(t, self.ref_nodes,
                                                                        self.ref_weights)
        return out


def _build_panels(model: PotentialModel, k: float, n_panels: int | None, order: int) -> _Panels:
    R = model.range
    cuts = sorted({0.0, *[b for b in model.breakpoints if b < R], *[-b for b in model.breakpoints if b < R]})
    cuts = [-R] + [c for c in cuts if -R < c < R] + [R]
    if n_panels is None:
        r_probe = np.linspace(0.0, R, 257)
        vmax = float(np.max(np.abs(evaluate(model, r_probe))))
        k_local = math.sqrt(k * k + vmax)
        per_length = PANELS_PER_WAVELENGTH * k_local / (2.0 * math.pi)
        counts = [max(2, math.ceil(per_length * (b - a))) for a, b in zip(cuts[:-1], cuts[1:])]
    else:
        counts = [max(1, round(n_panels * (b - a) / (2 * R))) for a, b in zip(cuts[:-1], cuts[1:])]
    edges = np.concatenate([np.linspace(a, b, c + 1)[:-1] for (a, b), c in
                            zip(zip(cuts[:-1], cuts[1:]), counts)] + [np.array([R])])
    xg, wg = gauss_legendre(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * xg).ravel()
    weights = (half[:, None] * wg).ravel()
    return _Panels(edges, nodes, weights, xg, wg)


@dataclass(frozen=True)
class WavefunctionProfile:
    """Scattering solution psi_k^(+-) sampled on ``x``.

    The interior Nystrom data (``nodes``, ``weights``, ``source`` = V psi at
    the nodes) allow evaluation anywhere through the integral representation.
    """

    k: float
    x: np.ndarray
    psi: np.ndarray
    branch: int
    model: PotentialModel = field(repr=False)
    nodes: np.ndarray = field(repr=False, default=None)
    weights: np.ndarray = field(repr=False, default=None)
    source: np.ndarray = field(repr=False, default=None)
    panels: _Panels = field(repr=False, default=None)
    psi_origin: complex = 0.0

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        k, s = self.k, self.branch
        plane = np.exp(1j * k * x)
        if self.model.is_delta:
            return plane + self.model.strength * green0(x, 0.0, k, s) * self.psi_origin
        if self.nodes is None:
            return plane
        left = self.panels.cumulative(x.ravel())
        right = self.weights[None, :] - left
        pref = -s * 0.5j / k
        xs = x.ravel()
        inward = left @ (np.exp(-s * 1j * k * self.nodes) * self.source)
        outward = right @ (np.exp(s * 1j * k * self.nodes) * self.source)
        psi = plane.ravel() + pref * (np.exp(s * 1j * k * xs) * inward
                                      + np.exp(-s * 1j * k * xs) * outward)
        return psi.reshape(x.shape)

    def rows(self):
        """(x, Re psi, Im psi, |psi|^2) tuples for CSV export."""
        for xi, p in zip(self.x, self.psi):
            yield float(xi), float(p.real), float(p.imag), float(abs(p) ** 2)


def _default_xgrid(model: PotentialModel, k: float) -> np.ndarray:
    span = 3.0 * max(model.range, 2.0 * math.pi / k if model.is_delta else model.range)
    n = max(201, int(math.ceil(10 * 2 * span * k / (2 * math.pi))) | 1)
    return np.linspace(-span, span, n)


def _nystrom(model: PotentialModel, k: float, s: int, panels: _Panels):
    x = panels.nodes
    V = evaluate(model, np.abs(x))
    left = panels.cumulative(x)
    right = panels.weights[None, :] - left
    pref = -s * 0.5j / k
    e_in = np.exp(s * 1j * k * x)
    kernel = pref * (e_in[:, None] * left * np.conj(e_in)[None, :]
                     + np.conj(e_in)[:, None] * right * e_in[None, :]) * V[None, :]
    A = np.eye(x.size) - kernel
    phi = np.exp(1j * k * x)
    try:
        psi = np.linalg.solve(A, phi)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"singular coordinate-space system at k={k}") from exc
    return psi, V * psi


def solve_wavefunction(model: PotentialModel, k: float, x_grid=None, branch="+",
                       n_panels: int | None = None, order: int = PANEL_ORDER,
                       check_resolution: bool = True) -> WavefunctionProfile:
    """Solve psi = phi + G0 V psi on supp(V) and sample it on ``x_grid``.

    With ``check_resolution`` the interior solve is repeated with twice the
    panels and the forward/backward amplitudes must agree to 1e-7
    (relative), otherwise :class:`ResolutionError` is raised.
    """
    if not k > 0:
        raise ValueError("coordinate-space solve needs k > 0")
    s = _branch_sign(branch)
    x_grid = _default_xgrid(model, k) if x_grid is None else np.asarray(x_grid, dtype=float)
    if model.is_delta:
        psi0 = 1.0 / (1.0 - model.strength * green0(0.0, 0.0, k, s))
        profile = WavefunctionProfile(k, x_grid, np.empty(0, complex), s, model, psi_origin=psi0)
        return _with_samples(profile)
    if model.strength == 0.0:
        return _with_samples(WavefunctionProfile(k, x_grid, np.empty(0, complex), s, model))
    panels = _build_panels(model, k, n_panels, order)
    psi_nodes, source = _nystrom(model, k, s, panels)
    profile = WavefunctionProfile(k, x_grid, np.empty(0, complex), s, model,
                                  panels.nodes, panels.weights, source, panels)
    if check_resolution:
        finer = _build_panels(model, k, 2 * (panels.edges.size - 1), order)
        _, fine_source = _nystrom(model, k, s, finer)
        fine = WavefunctionProfile(k, x_grid, np.empty(0, complex), s, model,
                                   finer.nodes, finer.weights, fine_source, finer)
        coarse_amp = np.array([amplitude_from_wavefunction(profile, model, e)[0] for e in (1, -1)])
        fine_amp = np.array([amplitude_from_wavefunction(fine, model, e)[0] for e in (1, -1)])
        scale = max(np.max(np.abs(fine_amp)), 1e-300)
        gap = float(np.max(np.abs(coarse_amp - fine_amp)) / scale)
        if gap > RESOLUTION_TOL:
            raise ResolutionError(f"coordinate-space amplitudes change by {gap:.2e} on "
                                  f"panel doubling at k={k}; raise n_panels")
    return _with_samples(profile)


def _with_samples(profile: WavefunctionProfile) -> WavefunctionProfile:
    object.__setattr__(profile, "psi", profile.evaluate(profile.x))
    return profile


def amplitude_from_wavefunction(profile: WavefunctionProfile, model: PotentialModel, eps: int):
    """(f, f~) in direction ``eps`` from the defining integrals over V psi."""
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    k, s = profile.k, profile.branch
    if model.is_delta:
        integral = model.strength * profile.psi_origin
    elif profile.nodes is None:
        integral = 0.0
    else:
        phase = np.exp(-s * 1j * eps * k * profile.nodes)
        integral = np.sum(profile.weights * phase * profile.source)
    f = -s * 0.5 * integral
    f_alt = -s * 0.5j / k * integral
    return complex(f), complex(f_alt)


def asymptotic_residual(profile: WavefunctionProfile, f_plus: complex, f_minus: complex,
                        n_points: int = 64) -> float:
    """max |psi - [exp(ikx) + (i/k) f(eps) exp(+- i k r)]| over 2R <= |x| <= 3R."""
    span = profile.model.range if profile.model.range > 0 else 1.0
    r = np.linspace(2.0 * span, 3.0 * span, n_points)
    x = np.concatenate([r, -r])
    k, s = profile.k, profile.branch
    f = np.where(x > 0, f_plus, f_minus)
    expected = np.exp(1j * k * x) + 1j / k * f * np.exp(s * 1j * k * np.abs(x))
    return float(np.max(np.abs(profile.evaluate(x) - expected)))
