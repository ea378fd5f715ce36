import math

import numpy as np
import pytest

from scatter1d.potentials import PotentialModel
from scatter1d.sweep import THREADS_ENV, convergence_study, momenta, scattering_report, sweep, thread_count

WELL = PotentialModel.square_well(-4.0, 1.0)


def test_momenta_spacing():
    assert np.allclose(momenta(1.0, 3.0, 3), [1.0, 2.0, 3.0])
    assert np.allclose(momenta(1.0, 100.0, 3, "log"), [1.0, 10.0, 100.0])
    assert np.array_equal(momenta(0.5, 9.0, 1), [0.5])
    for args in ((0.0, 1.0, 3), (1.0, 2.0, 0), (2.0, 1.0, 3)):
        with pytest.raises(ValueError):
            momenta(*args)
    with pytest.raises(ValueError):
        momenta(1.0, 2.0, 3, "cubic")


def test_sweep_sorted_and_thread_independent():
    ks = [2.0, 0.5, 1.0, 3.5]
    serial = sweep(WELL, ks, 64, threads=1)
    parallel = sweep(WELL, ks, 64, threads=4)
    assert [r.k for r in serial] == sorted(ks)
    assert serial == parallel


def test_sweep_unwraps_phases():
    # a deep well: delta0 grows past pi/2 at low energy
    deep = PotentialModel.square_well(-30.0, 1.0)
    reports = sweep(deep, np.linspace(0.2, 6.0, 40), 128, threads=1)
    d0 = np.array([r.delta0 for r in reports])
    assert np.all(np.abs(np.diff(d0)) < math.pi / 2)


def test_thread_count(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert thread_count() == 3
    monkeypatch.setenv(THREADS_ENV, "0")
    assert 1 <= thread_count() <= 4
    monkeypatch.delenv(THREADS_ENV)
    assert 1 <= thread_count() <= 4
    for bad in ("x", "-1"):
        monkeypatch.setenv(THREADS_ENV, bad)
        with pytest.raises(ValueError):
            thread_count()


def test_delta_convergence_is_exact():
    rows, monotone = convergence_study(PotentialModel.delta(2.0), 1.0, [32, 64, 128])
    assert monotone
    assert all(r[3] < 1e-14 and r[4] == 0.0 for r in rows)


def test_square_well_convergence_is_monotone():
    rows, monotone = convergence_study(WELL, 1.0, [32, 64, 128, 256, 512])
    assert monotone
    assert [r[0] for r in rows] == [32, 64, 128, 256, 512]


def test_convergence_validation():
    with pytest.raises(ValueError):
        convergence_study(WELL, 1.0, [32, 64])
    with pytest.raises(ValueError):
        convergence_study(WELL, 1.0, [64, 32, 128])


def test_report_cache_returns_same_object():
    assert scattering_report(WELL, 1.25, 64) is scattering_report(WELL, 1.25, 64)
