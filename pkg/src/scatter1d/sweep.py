"""Energy sweeps: solve both parity channels per momentum and collect reports."""

from __future__ import annotations

import dataclasses
import functools
import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .lssolver import DEFAULT_N_GRID, solve_halfoffshell
from .observables import ScatteringReport, build_report, phase_shift, unwrap_phases
from .potentials import PotentialModel

THREADS_ENV = "SCATTER1D_THREADS"
CONVERGED = 1e-14


def momenta(k_min: float, k_max: float, n_k: int, spacing: str = "linear") -> np.ndarray:
    if not k_min > 0:
        raise ValueError("k_min must be positive")
    if n_k < 1:
        raise ValueError("n_k must be at least 1")
    if n_k == 1:
        return np.array([float(k_min)])
    if k_max < k_min:
        raise ValueError("k_max must not be below k_min")
    if spacing == "linear":
        return np.linspace(k_min, k_max, n_k)
    if spacing == "log":
        return np.geomspace(k_min, k_max, n_k)
    raise ValueError(f"unknown spacing {spacing!r}")


@functools.lru_cache(maxsize=4096)
def scattering_report(model: PotentialModel, k: float, n_grid: int = DEFAULT_N_GRID,
                      map_scale: float | None = None) -> ScatteringReport:
    """Solve L = 0 and L = 1 at momentum ``k`` and derive every observable."""
    channels, conditions, unitarity = [], [], []
    for L in (0, 1):
        ht = solve_halfoffshell(model, L, k, n_grid, map_scale)
        channels.append(phase_shift(ht.onshell, k, L))
        conditions.append(ht.condition)
        unitarity.append(ht.unitarity_residual())
    return build_report(channels[0], channels[1], max(conditions), max(unitarity))


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if raw:
        try:
            value = int(raw)
        except ValueError as exc:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
        if value < 0:
            raise ValueError(f"{THREADS_ENV} must be non-negative")
        if value > 0:
            return value
    return min(4, os.cpu_count() or 1)


def sweep(model: PotentialModel, ks, n_grid: int = DEFAULT_N_GRID,
          map_scale: float | None = None, threads: int | None = None) -> list:
    """Reports sorted by k, with phase shifts unwrapped along the sweep."""
    ks = sorted(float(k) for k in ks)
    workers = thread_count() if threads is None else max(1, threads)

    def one(k):
        return scattering_report(model, k, n_grid, map_scale)

    if workers == 1 or len(ks) == 1:
        reports = [one(k) for k in ks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(one, ks))
    d0 = unwrap_phases([r.delta0 for r in reports])
    d1 = unwrap_phases([r.delta1 for r in reports])
    return [dataclasses.replace(r, delta0=float(a), delta1=float(b))
            for r, a, b in zip(reports, d0, d1)]


def convergence_study(model: PotentialModel, k: float, n_list, map_scale: float | None = None):
    """Phase shifts per grid size and their distance from the richest grid.

    Returns ``(rows, monotone)`` where each row is
    ``(n_grid, delta0, delta1, |d delta0|, |d delta1|)`` and ``monotone``
    tells whether both distances shrink strictly with n (distances below
    1e-14 count as converged).
    """
    n_list = [int(n) for n in n_list]
    if len(n_list) < 3:
        raise ValueError("convergence study needs at least three grid sizes")
    if any(b <= a for a, b in zip(n_list[:-1], n_list[1:])):
        raise ValueError("grid sizes must increase strictly")
    reports = [scattering_report(model, float(k), n, map_scale) for n in n_list]
    ref = reports[-1]

    def gap(a, b):
        return abs((a - b + 0.5 * math.pi) % math.pi - 0.5 * math.pi)

    rows = [(n, r.delta0, r.delta1, gap(r.delta0, ref.delta0), gap(r.delta1, ref.delta1))
            for n, r in zip(n_list, reports)]
    monotone = True
    for col in (3, 4):
        diffs = [row[col] for row in rows[:-1]]
        for a, b in zip(diffs[:-1], diffs[1:]):
            if not (b < a or max(a, b) < CONVERGED):
                monotone = False
    return rows, monotone
