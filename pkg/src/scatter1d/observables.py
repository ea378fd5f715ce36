"""Phase shifts, amplitudes, cross sections and optical-theorem residuals.

Conventions: t_L(k, k) = -k exp(i delta_L) sin(delta_L), S_L = exp(2 i delta_L),
f(eps) = k sum_L eps^L exp(i delta_L) sin(delta_L) and f~(eps) = (i/k) f(eps).
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

UNITARITY_FLAG = 1e-3
RELATIVE_FLOOR = 1e-6


@dataclass(frozen=True)
class ChannelResult:
    L: int
    k: float
    t_onshell: complex
    delta: float
    S: complex

    @property
    def partial_amplitude(self) -> complex:
        """f_L = k exp(i delta_L) sin(delta_L)."""
        return self.k * cmath.exp(1j * self.delta) * math.sin(self.delta)

    def reconstructed_t(self) -> complex:
        return -self.partial_amplitude


def phase_shift(t_onshell: complex, k: float, L: int = 0) -> ChannelResult:
    """delta_L = arg(1 - 2 i t / k) / 2 on the principal branch (-pi/2, pi/2]."""
    if not k > 0:
        raise ValueError("phase shift needs k > 0")
    t = complex(t_onshell)
    S = 1.0 - 2j * t / k
    if abs(abs(S) - 1.0) > UNITARITY_FLAG:
        warnings.warn(f"non-unitary input: |S| - 1 = {abs(S) - 1.0:.3e} at k={k}",
                      RuntimeWarning, stacklevel=2)
    delta = 0.5 * cmath.phase(S)
    if delta <= -0.5 * math.pi:
        delta += math.pi
    return ChannelResult(L, float(k), t, delta, S)


def channel_from_phase(delta: float, k: float, L: int = 0) -> ChannelResult:
    t = -k * cmath.exp(1j * delta) * math.sin(delta)
    return ChannelResult(L, float(k), t, float(delta), cmath.exp(2j * delta))


def unwrap_phases(deltas) -> np.ndarray:
    """Shift each phase by multiples of pi so neighbours differ by < pi/2."""
    out = np.array(deltas, dtype=float)
    for i in range(1, out.size):
        jump = out[i] - out[i - 1]
        out[i] -= math.pi * round(jump / math.pi)
    return out


def align_phase(delta: float, reference: float) -> float:
    """Representative of ``delta`` modulo pi closest to ``reference``."""
    return delta - math.pi * round((delta - reference) / math.pi)


def _pair(channels):
    by_L = {c.L: c for c in channels}
    if set(by_L) != {0, 1} or len(channels) != 2:
        raise ValueError("need exactly one L=0 and one L=1 channel")
    c0, c1 = by_L[0], by_L[1]
    if not math.isclose(c0.k, c1.k, rel_tol=1e-14, abs_tol=0.0):
        raise ValueError(f"channels evaluated at different k: {c0.k} vs {c1.k}")
    return c0, c1


def amplitudes(channels) -> tuple:
    """(f(+), f(-)) from an L=0/L=1 channel pair."""
    c0, c1 = _pair(channels)
    f0, f1 = c0.partial_amplitude, c1.partial_amplitude
    return f0 + f1, f0 - f1


def amplitudes_from_t(t0: complex, t1: complex) -> tuple:
    """(f(+), f(-)) directly from on-shell t via <eps k|t|k> = -2 f(eps)."""
    return -(t0 + t1), -(t0 - t1)


def alt_amplitudes(f_plus: complex, f_minus: complex, k: float) -> tuple:
    """Amplitudes in the convention carrying the extra factor i/k."""
    return 1j * f_plus / k, 1j * f_minus / k


@dataclass(frozen=True)
class ScatteringReport:
    k: float
    delta0: float
    delta1: float
    f_plus: complex
    f_minus: complex
    ft_plus: complex
    ft_minus: complex
    sigma_plus: float
    sigma_minus: float
    sigma_tot: float
    sigma_tot_phase: float
    R: float
    T: float
    optical_residual_13: float
    optical_residual_14: float
    unitarity_residual: float
    condition_estimate: float = float("nan")

    @property
    def energy(self) -> float:
        return self.k * self.k

    @property
    def sigma_mismatch(self) -> float:
        return abs(self.sigma_tot - self.sigma_tot_phase)

    def relative_optical_residuals(self):
        if self.sigma_tot <= RELATIVE_FLOOR:
            return None
        return (self.optical_residual_13 / self.sigma_tot,
                self.optical_residual_14 / self.sigma_tot)

    def as_dict(self) -> dict:
        return asdict(self)


def cross_sections_and_RT(f_plus: complex, f_minus: complex, k: float) -> dict:
    """sigma_eps = |f(eps)|^2 / k^2, their sum, and R, T probabilities."""
    if not k > 0:
        raise ValueError("cross sections need k > 0")
    sigma_plus = abs(f_plus) ** 2 / k ** 2
    sigma_minus = abs(f_minus) ** 2 / k ** 2
    return {
        "sigma_plus": sigma_plus,
        "sigma_minus": sigma_minus,
        "sigma_tot": sigma_plus + sigma_minus,
        "T": abs(1.0 + 1j * f_plus / k) ** 2,
        "R": abs(1j * f_minus / k) ** 2,
    }


def optical_residuals(report: ScatteringReport) -> tuple:
    """Residuals of sigma_tot = (2/k) Im f(+) and sigma_tot = -2 Re f~(+)."""
    res_13 = abs(report.sigma_tot - 2.0 / report.k * report.f_plus.imag)
    res_14 = abs(report.sigma_tot + 2.0 * report.ft_plus.real)
    return res_13, res_14


def build_report(c0: ChannelResult, c1: ChannelResult, condition: float = float("nan"),
                 unitarity: float | None = None) -> ScatteringReport:
    """Assemble every observable at one momentum from the two channels.

    Amplitudes come from the stored on-shell t, not from the phases, so the
    optical-theorem and R + T residuals measure the unitarity of t itself.
    """
    k = c0.k
    _pair((c0, c1))
    f_plus, f_minus = amplitudes_from_t(c0.t_onshell, c1.t_onshell)
    ft_plus, ft_minus = alt_amplitudes(f_plus, f_minus, k)
    xs = cross_sections_and_RT(f_plus, f_minus, k)
    sigma_phase = 2.0 * (math.sin(c0.delta) ** 2 + math.sin(c1.delta) ** 2)
    if unitarity is None:
        unitarity = max(abs(c.t_onshell.imag + abs(c.t_onshell) ** 2 / k) for c in (c0, c1))
    draft = ScatteringReport(k, c0.delta, c1.delta, f_plus, f_minus, ft_plus, ft_minus,
                             xs["sigma_plus"], xs["sigma_minus"], xs["sigma_tot"], sigma_phase,
                             xs["R"], xs["T"], 0.0, 0.0, float(unitarity), float(condition))
    res_13, res_14 = optical_residuals(draft)
    return ScatteringReport(**{**asdict(draft), "optical_residual_13": res_13,
                               "optical_residual_14": res_14})
