"""Momentum-space potential matrix elements, full and parity-projected.

With ``C(Q) = int_0^inf V(r) cos(Q r) dr`` the parity components follow from
the product-to-sum identities

    <q|V_0|q'> = [C(q - q') + C(q + q')] / 2
    <q|V_1|q'> = [C(q - q') - C(q + q')] / 2

and the plane-wave element is ``<eps q|V|q'> = 2 C(q' + eps q)``.  Closed
forms of C exist for every kind except tabulated profiles, which go
through radial Gauss-Legendre quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .potentials import Kind, PotentialModel, _tabulated_interpolant, evaluate
from .quadgrid import gauss_legendre

NODES_PER_PERIOD = 10
PANEL_NODES = 32
TABULATED_PANEL_NODES = 4
MIN_RADIAL_NODES = 64
_CHUNK = 2_000_000

ANALYTIC_KINDS = (Kind.DELTA, Kind.SQUARE_WELL, Kind.GAUSSIAN, Kind.EXPONENTIAL)


def radial_rule(model: PotentialModel, qmax: float, lo: float = 0.0, hi: float | None = None):
    """Composite Gauss-Legendre rule on [lo, hi] honouring breakpoints.

    The node count resolves ``cos(qmax r)`` with at least
    ``NODES_PER_PERIOD`` nodes per period, never fewer than 64 in total.
    Tabulated potentials are piecewise cubic, so every sample radius is a
    breakpoint and each interval gets short low-order panels.
    """
    hi = model.range if hi is None else hi
    if model.kind is Kind.TABULATED:
        inner = [b for b in model.r_samples if lo < b < hi]
        order = TABULATED_PANEL_NODES
    else:
        inner = [b for b in model.breakpoints if lo < b < hi]
        order = PANEL_NODES
    cuts = np.array([lo] + inner + [hi])
    spans = np.diff(cuts)
    needed = np.maximum(MIN_RADIAL_NODES * spans / (hi - lo),
                        NODES_PER_PERIOD * qmax * spans / (2.0 * math.pi))
    panels = np.maximum(1, np.ceil(needed / order).astype(int))
    edges = np.concatenate([np.linspace(a, b, n + 1)[:-1] for a, b, n in
                            zip(cuts[:-1], cuts[1:], panels)] + [cuts[-1:]])
    xg, wg = gauss_legendre(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + half[:, None] * xg).ravel(), (half[:, None] * wg).ravel()


def _closed_cosine_transform(model: PotentialModel, Q: np.ndarray) -> np.ndarray:
    v0, ell = model.strength, model.length
    if model.kind is Kind.DELTA:
        return np.full(Q.shape, 0.5 * v0)
    if model.kind is Kind.SQUARE_WELL:
        return v0 * ell * np.sinc(Q * ell / math.pi)
    if model.kind is Kind.GAUSSIAN:
        return v0 * 0.5 * math.sqrt(math.pi) * ell * np.exp(-0.25 * (Q * ell) ** 2)
    if model.kind is Kind.EXPONENTIAL:
        return v0 * ell / (1.0 + (Q * ell) ** 2)
    raise ValueError(f"no closed-form transform for {model.kind.value}")


def _quadrature_cosine_transform(model: PotentialModel, Q: np.ndarray) -> np.ndarray:
    flat = Q.ravel()
    out = np.empty(flat.size)
    if flat.size == 0:
        return out.reshape(Q.shape)
    order = np.argsort(flat)
    sorted_q = flat[order]
    # Bin by octave so small momenta do not pay for the largest one.
    bins = np.floor(np.log2(np.maximum(sorted_q, 1.0))).astype(int)
    start = 0
    result = np.empty(flat.size)
    while start < sorted_q.size:
        stop = np.searchsorted(bins, bins[start], side="right")
        qs = sorted_q[start:stop]
        r, w = radial_rule(model, qs[-1])
        wv = w * evaluate(model, r)
        step = max(1, _CHUNK // r.size)
        for i in range(0, qs.size, step):
            chunk = qs[i:i + step]
            result[start + i:start + i + chunk.size] = np.cos(np.outer(chunk, r)) @ wv
        start = stop
    out[order] = result
    return out.reshape(Q.shape)


def _piecewise_cubic_transform(model: PotentialModel, Q: np.ndarray) -> np.ndarray:
    """Exact transform of the tabulated cubic interpolant.

    On each interval, with p1..p3 the derivatives of the cubic p,
    int p cos(Q r) dr = p sin/Q + p1 cos/Q^2 - p2 sin/Q^3 - p3 cos/Q^4 between
    the ends.  These terms cancel badly when Q h is small, so momenta with
    Q h < 2 use the radial rule instead.
    """
    interp = _tabulated_interpolant(model.r_samples, model.v_samples)
    c = interp.c
    r = np.asarray(model.r_samples)
    h = np.diff(r)
    # Interval ends share sample points, so collect the jump of each term there.
    jumps = np.zeros((4, r.size))
    left = (c[3], c[2], 2 * c[1], 6 * c[0])
    right = (c[0] * h ** 3 + c[1] * h ** 2 + c[2] * h + c[3],
             3 * c[0] * h ** 2 + 2 * c[1] * h + c[2],
             6 * c[0] * h + 2 * c[1],
             6 * c[0])
    for d in range(4):
        jumps[d, 1:] += right[d]
        jumps[d, :-1] -= left[d]
    flat = Q.ravel()
    out = np.empty(flat.size)
    small = flat * np.max(h) < 2.0
    if np.any(small):
        out[small] = _quadrature_cosine_transform(model, flat[small])
    big = np.nonzero(~small)[0]
    step = max(1, _CHUNK // r.size)
    for i in range(0, big.size, step):
        idx = big[i:i + step]
        q = flat[idx]
        phase = np.outer(q, r)
        sn, cs = np.sin(phase), np.cos(phase)
        out[idx] = (sn @ jumps[0] / q + cs @ jumps[1] / q ** 2
                    - sn @ jumps[2] / q ** 3 - cs @ jumps[3] / q ** 4)
    return out.reshape(Q.shape)


def cosine_transform(model: PotentialModel, Q, method: str = "auto") -> np.ndarray:
    """``int_0^inf V(r) cos(Q r) dr``; even in Q.

    ``method`` is ``"closed"``, ``"quadrature"``, ``"piecewise"`` (tabulated
    only) or ``"auto"`` (closed form when one exists, else piecewise).
    """
    Q = np.abs(np.asarray(Q, dtype=float))
    if method == "auto":
        method = "closed" if model.kind in ANALYTIC_KINDS else "piecewise"
    if method == "closed":
        return _closed_cosine_transform(model, Q)
    if method == "quadrature":
        if model.is_delta:
            return _closed_cosine_transform(model, Q)
        return _quadrature_cosine_transform(model, Q)
    if method == "piecewise":
        if model.kind is not Kind.TABULATED:
            raise ValueError("piecewise transform applies to tabulated potentials only")
        return _piecewise_cubic_transform(model, Q)
    raise ValueError(f"unknown method {method!r}")


def v_full(model: PotentialModel, q, qp):
    """Plane-wave element <q|V|q'> = int exp(-i q x) V(x) exp(i q' x) dx.

    Evaluated by direct Gauss-Legendre quadrature over [-R, R] (the delta
    kind sifts to lambda).  The result is real for symmetric real V.
    """
    q = np.asarray(q, dtype=float)
    qp = np.asarray(qp, dtype=float)
    shift = qp - q
    if model.is_delta:
        out = np.full(np.broadcast(q, qp).shape, model.strength)
    else:
        r, w = radial_rule(model, float(np.max(np.abs(shift), initial=0.0)))
        x = np.concatenate([-r[::-1], r])
        wx = np.concatenate([w[::-1], w]) * evaluate(model, np.abs(x))
        out = np.cos(np.multiply.outer(shift, x)) @ wx
    return float(out) if out.ndim == 0 else out


def _check_momenta(*momenta):
    for m in momenta:
        if np.any(np.asarray(m) < 0):
            raise ValueError("partial-wave momenta must be non-negative moduli")


def _check_parity(L):
    if L not in (0, 1):
        raise ValueError("parity index L must be 0 (even) or 1 (odd)")


def v_partial(model: PotentialModel, L: int, q, qp, method: str = "auto"):
    """Parity-projected element <q|V_L|q'> for non-negative momenta.

    ``method="quadrature"`` integrates the defining product
    ``cos(q r) V(r) cos(q' r)`` (``sin`` for L = 1) over [0, R] directly and
    shares no code with the transform route; tests use it as an oracle.
    """
    _check_parity(L)
    _check_momenta(q, qp)
    q = np.asarray(q, dtype=float)
    qp = np.asarray(qp, dtype=float)
    if method == "quadrature" and not model.is_delta:
        qmax = float(np.max(q, initial=0.0) + np.max(qp, initial=0.0))
        r, w = radial_rule(model, qmax)
        wv = w * evaluate(model, r)
        trig = np.cos if L == 0 else np.sin
        a = trig(np.multiply.outer(q, r))
        b = trig(np.multiply.outer(qp, r))
        out = np.sum(a * b * wv, axis=-1)
    else:
        sign = 1.0 if L == 0 else -1.0
        out = 0.5 * (cosine_transform(model, q - qp, method)
                     + sign * cosine_transform(model, q + qp, method))
    return float(out) if np.ndim(out) == 0 else out


def partial_wave_matrix(model: PotentialModel, L: int, points: np.ndarray) -> np.ndarray:
    """Real symmetric matrix <p_i|V_L|p_j> on a set of momentum points."""
    _check_parity(L)
    p = np.asarray(points, dtype=float)
    _check_momenta(p)
    iu, ju = np.triu_indices(p.size)
    sign = 1.0 if L == 0 else -1.0
    upper = 0.5 * (cosine_transform(model, np.abs(p[iu] - p[ju]))
                   + sign * cosine_transform(model, p[iu] + p[ju]))
    mat = np.empty((p.size, p.size))
    mat[iu, ju] = upper
    mat[ju, iu] = upper
    return mat


def parity_reconstruction_check(model: PotentialModel, eps: int, q, qp) -> float:
    """|<eps q|V|q'> - 2 sum_L eps^L <q|V_L|q'>| with q, q' >= 0."""
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    full = v_full(model, eps * np.asarray(q, dtype=float), qp)
    partial = 2.0 * (v_partial(model, 0, q, qp) + eps * v_partial(model, 1, q, qp))
    return float(np.max(np.abs(full - partial)))


@dataclass(frozen=True)
class PartialWaveV:
    """Callable parity component of the potential in momentum space."""

    model: PotentialModel
    L: int

    def __post_init__(self):
        _check_parity(self.L)

    @property
    def analytic(self) -> bool:
        return self.model.kind in ANALYTIC_KINDS

    def __call__(self, q, qp):
        return v_partial(self.model, self.L, q, qp)

    def matrix(self, points) -> np.ndarray:
        return partial_wave_matrix(self.model, self.L, points)
