import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from scatter1d.lssolver import solve_halfoffshell
from scatter1d.observables import (align_phase, alt_amplitudes, amplitudes, amplitudes_from_t,
                                   build_report, channel_from_phase, cross_sections_and_RT,
                                   optical_residuals, phase_shift, unwrap_phases)
from scatter1d.potentials import PotentialModel

phase = st.floats(min_value=-1.5707963, max_value=1.5707963, allow_nan=False)
momentum = st.floats(min_value=0.01, max_value=20.0)


def delta_report(k=1.0, lam=2.0):
    model = PotentialModel.delta(lam)
    c0 = phase_shift(solve_halfoffshell(model, 0, k, 32).onshell, k, 0)
    c1 = phase_shift(solve_halfoffshell(model, 1, k, 32).onshell, k, 1)
    return build_report(c0, c1)


def test_no_scattering():
    ch = phase_shift(0.0, 1.0)
    assert ch.delta == 0.0 and ch.S == 1.0


def test_delta_phase_shift():
    ch = phase_shift((1 - 1j) / 2, 1.0)
    assert ch.delta == pytest.approx(-math.pi / 4, abs=1e-15)
    assert math.tan(ch.delta) == pytest.approx(-1.0, abs=1e-14)


def test_resonance():
    ch = phase_shift(-1j * 1.5, 1.5)
    assert ch.S == pytest.approx(-1.0)
    assert ch.delta == pytest.approx(math.pi / 2)


def test_phase_edges_of_branch():
    assert phase_shift(channel_from_phase(-math.pi / 2, 1.0).t_onshell, 1.0).delta == pytest.approx(math.pi / 2)


def test_non_unitary_input_warns():
    with pytest.warns(RuntimeWarning, match="non-unitary"):
        phase_shift(0.3, 1.0)


@given(phase, momentum)
def test_phase_round_trip(delta, k):
    assume(abs(delta) < math.pi / 2 - 1e-9)
    ch = phase_shift(channel_from_phase(delta, k).t_onshell, k)
    assert ch.delta == pytest.approx(delta, abs=1e-12)


def test_amplitude_examples():
    zero = [channel_from_phase(0.0, 1.0, 0), channel_from_phase(0.0, 1.0, 1)]
    assert amplitudes(zero) == (0, 0)
    pair = [channel_from_phase(-math.pi / 4, 1.0, 0), channel_from_phase(0.0, 1.0, 1)]
    fp, fm = amplitudes(pair)
    assert fp == pytest.approx(-(1 - 1j) / 2, abs=1e-15) and fm == pytest.approx(fp)
    # cross-check against (i/k) f = (lam/2) / (ik - lam/2), lam = 2
    assert 1j * fp == pytest.approx(1.0 / (1j - 1.0), abs=1e-15)
    odd_only = [channel_from_phase(0.0, 2.0, 0), channel_from_phase(0.4, 2.0, 1)]
    fp, fm = amplitudes(odd_only)
    assert fp == pytest.approx(-fm)


def test_amplitudes_need_a_matched_pair():
    c = channel_from_phase(0.1, 1.0, 0)
    with pytest.raises(ValueError):
        amplitudes([c, c])
    with pytest.raises(ValueError):
        amplitudes([c, channel_from_phase(0.1, 2.0, 1)])


def test_alt_amplitude_examples():
    assert alt_amplitudes(0, 0, 1.0) == (0, 0)
    ftp, _ = alt_amplitudes(-(1 - 1j) / 2, -(1 - 1j) / 2, 1.0)
    assert ftp == pytest.approx(-(1 + 1j) / 2)
    assert ftp.real == pytest.approx(-0.5)


@given(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False), momentum)
def test_alt_amplitude_modulus(f, k):
    assert abs(alt_amplitudes(f, f, k)[0]) == pytest.approx(abs(f) / k, rel=1e-14, abs=1e-300)


def test_cross_section_examples():
    xs = cross_sections_and_RT(-(1 - 1j) / 2, -(1 - 1j) / 2, 1.0)
    assert xs["R"] == pytest.approx(0.5) and xs["T"] == pytest.approx(0.5)
    assert xs["sigma_tot"] == pytest.approx(1.0)
    free = cross_sections_and_RT(0, 0, 2.0)
    assert (free["R"], free["T"], free["sigma_tot"]) == (0, 1, 0)
    rep = build_report(channel_from_phase(math.pi / 2, 1.0, 0), channel_from_phase(0.0, 1.0, 1))
    assert rep.sigma_tot == pytest.approx(2.0) and rep.sigma_tot_phase == pytest.approx(2.0)


def test_delta_optical_residuals():
    rep = delta_report()
    assert rep.f_plus.imag == pytest.approx(0.5)
    assert rep.ft_plus.real == pytest.approx(-0.5)
    assert optical_residuals(rep) == pytest.approx((0.0, 0.0), abs=1e-14)
    assert rep.R == pytest.approx(0.5) and rep.T == pytest.approx(0.5) and rep.sigma_tot == pytest.approx(1.0)
    assert rep.energy == 1.0


def test_zero_potential_residuals():
    rep = build_report(channel_from_phase(0.0, 1.3, 0), channel_from_phase(0.0, 1.3, 1))
    assert optical_residuals(rep) == (0.0, 0.0)
    assert rep.relative_optical_residuals() is None


@given(phase, phase, momentum)
def test_report_identities(d0, d1, k):
    rep = build_report(channel_from_phase(d0, k, 0), channel_from_phase(d1, k, 1))
    assert rep.R + rep.T == pytest.approx(1.0, abs=1e-12)
    assert rep.optical_residual_13 < 1e-12 and rep.optical_residual_14 < 1e-12
    assert rep.sigma_mismatch < 1e-12
    assert rep.R == pytest.approx(math.sin(d0 - d1) ** 2, abs=1e-12)


def test_shared_phases_reproduce_solver_amplitudes():
    well = PotentialModel.square_well(-4.0, 1.0)
    k = 1.7
    t0 = solve_halfoffshell(well, 0, k).onshell
    t1 = solve_halfoffshell(well, 1, k).onshell
    from_t = amplitudes_from_t(t0, t1)
    from_phase = amplitudes([phase_shift(t0, k, 0), phase_shift(t1, k, 1)])
    assert np.allclose(from_t, from_phase, atol=1e-12)
    # <eps k|t|k> = -2 f(eps)
    assert from_t[0] == pytest.approx(-(t0 + t1))


def test_unwrap_and_align():
    raw = [1.4, -1.5, -1.3, 1.55]
    out = unwrap_phases(raw)
    assert np.all(np.abs(np.diff(out)) < math.pi / 2)
    assert np.allclose((out - raw) / math.pi, np.round((out - raw) / math.pi))
    assert align_phase(-1.5, 1.6) == pytest.approx(-1.5 + math.pi)
    assert align_phase(0.2, 0.1) == 0.2


def test_as_dict_round_trip():
    rep = delta_report(0.5)
    assert rep.as_dict()["k"] == 0.5 and set(rep.as_dict()) >= {"R", "T", "f_plus"}
