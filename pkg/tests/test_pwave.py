import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from scatter1d.potentials import PotentialModel, evaluate
from scatter1d.pwave import (PartialWaveV, cosine_transform, parity_reconstruction_check,
                             partial_wave_matrix, v_full, v_partial)

WELL = PotentialModel.square_well(-4.0, 1.0)
GAUSS = PotentialModel.gaussian(-2.0, 1.0)
EXPO = PotentialModel.exponential(1.5, 0.8)
MODELS = [WELL, GAUSS, EXPO]

momentum = st.floats(min_value=0.0, max_value=12.0, allow_nan=False)


def _tabulated_gaussian():
    r = np.linspace(0.0, 6.0, 601)
    v = -2.0 * np.exp(-r ** 2)
    v[-1] = 0.0
    return PotentialModel.tabulated(r, v)


def _quad_partial(model, L, q, qp):
    trig = math.cos if L == 0 else math.sin
    f = lambda r: trig(q * r) * evaluate(model, r) * trig(qp * r)
    if model.r_samples:
        # piecewise cubic: integrate sample interval by sample interval
        edges = model.r_samples
    else:
        edges = (0.0, *model.breakpoints, model.range)
        edges = sorted(set(e for e in edges if e <= model.range))
    return sum(integrate.quad(f, a, b, limit=200, epsabs=1e-14, epsrel=1e-12)[0]
               for a, b in zip(edges[:-1], edges[1:]))


def test_full_element_examples():
    assert v_full(PotentialModel.delta(3.0), 1.2, -0.4) == 3.0
    assert v_full(WELL, 0.0, 0.0) == pytest.approx(2 * -4.0 * 1.0, abs=1e-13)
    assert v_full(WELL, 1.0, 0.0) == pytest.approx(-8.0 * math.sin(1.0), abs=1e-13)


def test_delta_partial_waves():
    delta = PotentialModel.delta(2.0)
    assert v_partial(delta, 0, 0.3, 5.0) == 1.0
    assert v_partial(delta, 1, 0.3, 5.0) == 0.0


@pytest.mark.parametrize("model", MODELS)
def test_odd_wave_vanishes_at_zero_momentum(model):
    assert v_partial(model, 1, 0.0, 2.3) == pytest.approx(0.0, abs=1e-15)


def test_square_well_closed_form():
    q, qp, v0, a = 1.7, 0.6, -4.0, 1.0
    expected = 0.5 * v0 * (math.sin((q - qp) * a) / (q - qp) + math.sin((q + qp) * a) / (q + qp))
    assert v_partial(WELL, 0, q, qp) == pytest.approx(expected, abs=1e-14)
    # coincident momenta take the limit a
    assert v_partial(WELL, 0, 2.0, 2.0) == pytest.approx(0.5 * v0 * (a + math.sin(4.0) / 4.0), abs=1e-14)


@pytest.mark.parametrize("model", MODELS + [_tabulated_gaussian()])
@pytest.mark.parametrize("L", [0, 1])
@pytest.mark.parametrize("q,qp", [(0.0, 0.0), (0.7, 1.3), (2.0, 2.0), (5.5, 0.2), (9.0, 11.0)])
def test_partial_wave_against_adaptive_quadrature(model, L, q, qp):
    expected = _quad_partial(model, L, q, qp)
    assert v_partial(model, L, q, qp) == pytest.approx(expected, abs=1e-11)
    assert v_partial(model, L, q, qp, method="quadrature") == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("model", [GAUSS, EXPO])
def test_closed_transform_matches_radial_quadrature(model):
    Q = np.linspace(0.0, 30.0, 61)
    closed = cosine_transform(model, Q, method="closed")
    quad = cosine_transform(model, Q, method="quadrature")
    assert np.max(np.abs(closed - quad)) < 1e-11


def test_tabulated_tracks_analytic_gaussian():
    tab = _tabulated_gaussian()
    Q = np.linspace(0.0, 8.0, 17)
    assert np.max(np.abs(cosine_transform(tab, Q) - cosine_transform(GAUSS, Q))) < 1e-5


@pytest.mark.parametrize("model", MODELS)
def test_half_line_equals_full_line_form(model):
    q, qp = 1.1, 2.4
    f = lambda x: 0.5 * math.cos(q * x) * evaluate(model, abs(x)) * math.cos(qp * x)
    pts = [-b for b in model.breakpoints] + [0.0] + list(model.breakpoints)
    full, _ = integrate.quad(f, -model.range, model.range, points=pts, limit=500, epsabs=1e-14)
    assert v_partial(model, 0, q, qp) == pytest.approx(full, abs=1e-12)


@given(st.sampled_from(MODELS), st.sampled_from([0, 1]), momentum, momentum)
def test_kernel_symmetry(model, L, q, qp):
    assert v_partial(model, L, q, qp) == pytest.approx(v_partial(model, L, qp, q), abs=1e-12)


@given(st.sampled_from(MODELS), st.sampled_from([1, -1]), momentum, momentum)
def test_parity_reconstruction(model, eps, q, qp):
    assert parity_reconstruction_check(model, eps, q, qp) < 1e-10


def test_parity_reconstruction_examples():
    delta = PotentialModel.delta(2.0)
    assert parity_reconstruction_check(delta, 1, 0.4, 0.9) == 0.0
    assert parity_reconstruction_check(delta, -1, 0.4, 0.9) == 0.0
    for eps in (1, -1):
        assert parity_reconstruction_check(WELL, eps, 0.7, 1.3) < 1e-10


def test_matrix_is_symmetric_and_matches_elements():
    p = np.array([0.1, 0.5, 1.0, 3.0, 7.0])
    for L in (0, 1):
        mat = partial_wave_matrix(GAUSS, L, p)
        assert np.array_equal(mat, mat.T)
        assert mat[1, 3] == pytest.approx(v_partial(GAUSS, L, 0.5, 3.0), abs=1e-15)


def test_callable_wrapper():
    pw = PartialWaveV(WELL, 0)
    assert pw.analytic
    assert pw(0.3, 0.4) == v_partial(WELL, 0, 0.3, 0.4)
    assert not PartialWaveV(_tabulated_gaussian(), 1).analytic
    with pytest.raises(ValueError):
        PartialWaveV(WELL, 2)


def test_argument_validation():
    with pytest.raises(ValueError):
        v_partial(WELL, 0, -1.0, 1.0)
    with pytest.raises(ValueError):
        v_partial(WELL, 3, 1.0, 1.0)
    with pytest.raises(ValueError):
        cosine_transform(WELL, 1.0, method="spline")
