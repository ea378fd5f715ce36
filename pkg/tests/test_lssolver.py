import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import brentq

from scatter1d.lssolver import (BoundStateKernel, born_term, find_bound_states,
                                solve_halfoffshell)
from scatter1d.potentials import PotentialModel
from scatter1d.pwave import v_partial

WELL = PotentialModel.square_well(-4.0, 1.0)
GAUSS = PotentialModel.gaussian(-2.0, 1.0)


def exact_well_phases(v0, a, k):
    """Matched interior/exterior solutions of the square well."""
    q = math.sqrt(k * k - v0)
    d0 = math.atan(q * math.tan(q * a) / k) - k * a
    d1 = math.atan(k * math.tan(q * a) / q) - k * a
    wrap = lambda d: (d + 0.5 * math.pi) % math.pi - 0.5 * math.pi
    return wrap(d0), wrap(d1)


def phase(t, k):
    d = 0.5 * np.angle(1 - 2j * t / k)
    return (d + 0.5 * math.pi) % math.pi - 0.5 * math.pi


def wrapped_gap(a, b):
    return abs((a - b + 0.5 * math.pi) % math.pi - 0.5 * math.pi)


@pytest.mark.parametrize("n", [8, 16, 64, 200, 334])
def test_delta_onshell_is_grid_independent(n):
    assert abs(solve_halfoffshell(PotentialModel.delta(2.0), 0, 1.0, n).onshell - (1 - 1j) / 2) < 1e-12


def test_odd_grid_with_node_on_shell_stays_unitary():
    # odd n puts the middle node at p = c = k; the nudged scale leaves it 1e-6 k away
    with pytest.warns(RuntimeWarning, match="ill-conditioned"):
        sol = solve_halfoffshell(PotentialModel.delta(2.0), 0, 1.0, 333)
    assert sol.grid.map_scale != 1.0
    assert abs(sol.onshell - (1 - 1j) / 2) < 1e-8
    assert sol.unitarity_residual() < 1e-12


@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=0.05, max_value=10))
def test_delta_closed_form(lam, k):
    sol = solve_halfoffshell(PotentialModel.delta(lam), 0, k, 32)
    expected = 1j * k * lam / 2 / (1j * k - lam / 2)
    assert np.max(np.abs(sol.values - expected)) < 1e-12 * max(1.0, abs(expected))
    assert np.all(solve_halfoffshell(PotentialModel.delta(lam), 1, k, 32).values == 0)


def test_zero_potential_gives_zero_t():
    for model in (PotentialModel.square_well(0.0, 1.0), PotentialModel.gaussian(0.0, 1.0)):
        for L in (0, 1):
            assert np.all(solve_halfoffshell(model, L, 1.3, 32).values == 0)


@pytest.mark.parametrize("k", [0.3, 1.0, 2.5, 4.9])
def test_square_well_phases_against_matching(k):
    exact = exact_well_phases(-4.0, 1.0, k)
    for L in (0, 1):
        t = solve_halfoffshell(WELL, L, k, 600).onshell
        assert wrapped_gap(phase(t, k), exact[L]) < 2e-6


@pytest.mark.parametrize("model", [WELL, GAUSS, PotentialModel.exponential(-1.0, 0.5)])
@pytest.mark.parametrize("k", [0.2, 1.0, 3.0])
@pytest.mark.parametrize("L", [0, 1])
def test_onshell_and_halfshell_unitarity(model, k, L):
    sol = solve_halfoffshell(model, L, k, 200)
    assert sol.unitarity_residual() < 1e-10
    assert sol.halfshell_unitarity_residual() < 1e-6
    assert sol.residual < 1e-12
    assert np.array_equal(sol.incoming(), np.conj(sol.values))


def test_smooth_potential_converges_monotonically():
    ts = [solve_halfoffshell(GAUSS, 0, 1.0, n).onshell for n in (16, 32, 64, 128)]
    diffs = [abs(a - b) for a, b in zip(ts[:-1], ts[1:])]
    assert diffs[0] > diffs[1] > diffs[2]
    assert diffs[-1] < 1e-10


@pytest.mark.parametrize("L", [0, 1])
def test_born_limit(L):
    k = 1.2
    remainders = []
    for alpha in (1e-2, 1e-3, 1e-4):
        t = solve_halfoffshell(GAUSS.scaled(alpha), L, k, 96).onshell
        remainders.append(abs(t - alpha * v_partial(GAUSS, L, k, k)) / alpha ** 2)
    assert max(remainders) < 10 * min(remainders)


def test_born_term_is_linear():
    assert born_term(PotentialModel.delta(2.0), 0, 0.3, 0.4) == 1.0
    assert born_term(WELL.scaled(3.0), 0, 0.5, 1.1) == pytest.approx(3 * born_term(WELL, 0, 0.5, 1.1), rel=1e-14)
    assert born_term(WELL, 0, 1.0, 1.0) == v_partial(WELL, 0, 1.0, 1.0)


def test_delta_t_is_momentum_independent():
    vals = solve_halfoffshell(PotentialModel.delta(-1.5), 0, 0.7, 64).values
    assert np.ptp(vals.real) < 1e-14 and np.ptp(vals.imag) < 1e-14


def test_invalid_momentum():
    with pytest.raises(ValueError):
        solve_halfoffshell(WELL, 0, 0.0)


def test_delta_bound_state():
    states = find_bound_states(PotentialModel.delta(-2.0), 0, -10.0, -1e-4)
    assert len(states) == 1 and abs(states[0].energy + 1.0) < 1e-8
    assert find_bound_states(PotentialModel.delta(-2.0), 1, -10.0, -1e-4) == []
    assert find_bound_states(PotentialModel.delta(2.0), 0, -10.0, -1e-4) == []
    assert find_bound_states(PotentialModel.square_well(0.0, 1.0), 0, -10.0, -1e-4) == []


@given(st.floats(min_value=-6.0, max_value=-0.1))
def test_delta_bound_energy_any_strength(lam):
    E = -lam ** 2 / 4
    states = find_bound_states(PotentialModel.delta(lam), 0, 4 * E, 0.25 * E)
    assert len(states) == 1 and states[0].energy == pytest.approx(E, abs=1e-8)


def test_square_well_levels():
    # V0 = -4, a = 1: q^2 + kappa^2 = 4; even q tan q = kappa, odd -q cot q = kappa
    q_even = brentq(lambda q: q * math.tan(q) - math.sqrt(4 - q * q), 0.1, math.pi / 2 - 1e-9)
    q_odd = brentq(lambda q: -q / math.tan(q) - math.sqrt(4 - q * q), math.pi / 2 + 1e-9, 2.0 - 1e-12)
    even = find_bound_states(WELL, 0, -3.99, -0.01, n_grid=256)
    odd = find_bound_states(WELL, 1, -3.99, -0.01, n_grid=256)
    assert len(even) == 1 and len(odd) == 1
    assert even[0].energy == pytest.approx(q_even ** 2 - 4, abs=1e-4)
    assert odd[0].energy == pytest.approx(q_odd ** 2 - 4, abs=1e-4)


def test_bound_state_kernel_determinant_sign():
    kernel = BoundStateKernel(PotentialModel.delta(-2.0), 0)
    assert kernel.determinant(-2.0) > 0 > kernel.determinant(-0.5)


def test_edge_root_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        find_bound_states(PotentialModel.delta(-2.0), 0, -1.005, -0.5)
    assert any("window edge" in str(w.message) for w in caught)


def test_invalid_window():
    with pytest.raises(ValueError):
        find_bound_states(WELL, 0, -1.0, 0.5)
