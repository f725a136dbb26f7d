from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from crowpair import pair_flux as pf
from crowpair.model import RingGeometry, WaveguideParams

NO_TPA = WaveguideParams(tpa_beta0=0.0)


def test_design_point_validation():
    with pytest.raises(ValueError):
        pf.DesignPoint(0.5, 5)
    with pytest.raises(ValueError):
        pf.DesignPoint(2.0, 0)
    with pytest.raises(ValueError):
        pf.DesignPoint(2.0, 5, -1.0)
    assert pf.DesignPoint(50.0, 25).kappa == 0.02


# --- bandwidth ------------------------------------------------------------------


def test_bandwidth_full_coupling(geom):
    assert pf.bandwidth(geom, 1.0, 4) == pytest.approx(geom.fsr / 4, rel=1e-15)


def test_bandwidth_example(geom):
    assert pf.bandwidth(geom, 0.02, 25) == pytest.approx(1.19e9, rel=5e-3)
    assert pf.bandwidth(geom, 0.02, 25) == pytest.approx(oracles.eq7_hz(geom.fsr, 0.02, 25), rel=1e-15)


@given(st.floats(1e-3, 1.0), st.integers(1, 200))
def test_bandwidth_halves_with_double_n(kappa, n):
    geom = RingGeometry()
    assert pf.bandwidth(geom, kappa, 2 * n) == pytest.approx(pf.bandwidth(geom, kappa, n) / 2, rel=1e-14)


@pytest.mark.parametrize("kappa", [0.0, -0.1, 1.1])
def test_bandwidth_rejects_kappa(geom, kappa):
    with pytest.raises(ValueError):
        pf.bandwidth(geom, kappa, 5)


# --- gamma_eff ------------------------------------------------------------------


def test_gamma_eff_waveguide_limit():
    assert pf.gamma_eff(1, 1, 1, 200.0) == 200.0


def test_gamma_eff_example():
    assert pf.gamma_eff(50, 50, 50, 200.0) == pytest.approx(2.55e5, rel=1e-15)


@given(st.floats(1, 100), st.floats(1, 100), st.floats(1, 100), st.floats(1.0, 2.0))
def test_gamma_eff_monotone(ss, si, sp, f):
    base = pf.gamma_eff(ss, si, sp, 1.0)
    assert pf.gamma_eff(ss * f, si, sp, 1.0) >= base
    assert pf.gamma_eff(ss, si * f, sp, 1.0) >= base
    assert pf.gamma_eff(ss, si, sp * f, 1.0) >= base


def test_gamma_eff_rejects_subunity():
    with pytest.raises(ValueError):
        pf.gamma_eff(0.5, 1, 1, 200.0)


# --- lengths and TPA ---------------------------------------------------------------


@given(st.floats(0.0, 1e4), st.floats(1e-7, 1e-2))
def test_effective_length_bounded(alpha, length):
    assert pf.effective_length(alpha, length) <= length


@given(st.floats(1e-12, 1e-3))
def test_effective_length_lossless_limit(x):
    length = 1e-4
    assert pf.effective_length(x / length, length) == pytest.approx(length, rel=max(1e-6, x))
    assert pf.effective_length(0.0, length) == length


def test_tpa_off_limit(wg):
    pbar, anl = pf.tpa_correction(NO_TPA, 50.0, 1e-3, 2e-4, 1.5e-4)
    assert pbar * 2e-4 == pytest.approx(1e-3 * 1.5e-4, rel=1e-15)
    assert anl == 0.0


def test_zero_power_analytic(wg):
    assert pf.tpa_correction(wg, 50.0, 0.0, 2e-4, 1.5e-4) == (0.0, 0.0)


@given(st.floats(1, 100), st.floats(1e-6, 1.0))
def test_tpa_reduces_power(s, p):
    wg = WaveguideParams()
    length, leff = 3e-4, 2e-4
    pbar, _ = pf.tpa_correction(wg, s, p, length, leff)
    assert pbar < p * leff / length


def test_tpa_negative_power(wg):
    with pytest.raises(ValueError):
        pf.tpa_correction(wg, 2.0, -1.0, 1.0, 1.0)


def test_effective_power_example(wg, geom):
    rep = pf.flux_eq6(pf.DesignPoint(50, 25), wg, geom)
    assert rep.effective_power == pytest.approx(0.78e-3, rel=0.01)
    assert rep.effective_power == pytest.approx(oracles.eq6_hand(50, 25)["pbar"], rel=1e-12)


# --- flux -------------------------------------------------------------------------


def test_flux_zero_power(wg, geom):
    assert pf.flux_eq6(pf.DesignPoint(50, 25, 0.0), wg, geom).flux_eq6 == 0.0


@pytest.mark.parametrize("tpa", [True, False])
def test_flux_matches_hand_evaluation(wg, geom, tpa):
    for s, n in [(50, 25), (10, 3), (2, 1), (100, 50)]:
        rep = pf.flux_eq6(pf.DesignPoint(s, n), wg, geom, tpa_in_exponent=tpa)
        hand = oracles.eq6_hand(s, n, tpa_exponent=tpa)
        assert rep.flux_eq6 == pytest.approx(hand["flux"], rel=1e-10)
        assert rep.bandwidth_hz == pytest.approx(hand["dnu"], rel=1e-12)
        assert rep.effective_length == pytest.approx(hand["leff"], rel=1e-12)


def test_geometric_length_exact(wg, geom):
    rep = pf.flux_eq6(pf.DesignPoint(20, 7), wg, geom)
    assert rep.geometric_length == 7 * np.pi * geom.radius


def test_flux_example_within_factor_two(wg, geom):
    f = pf.flux_eq6(pf.DesignPoint(50, 25), wg, geom).flux_eq6
    assert 2e6 <= f <= 8e6


@given(st.floats(1e-5, 1e-2), st.floats(0.1, 10.0))
def test_quadratic_power_law_without_tpa(p, c):
    geom = RingGeometry()
    f1 = pf.flux_eq6(pf.DesignPoint(20, 10, p), NO_TPA, geom).flux_eq6
    f2 = pf.flux_eq6(pf.DesignPoint(20, 10, c * p), NO_TPA, geom).flux_eq6
    assert f2 / f1 == pytest.approx(c * c, rel=1e-12)


def test_power_gamma_rescaling_invariance(geom):
    c = 3.7
    wg2 = WaveguideParams(gamma0=200.0 / c, tpa_beta0=0.0)
    f1 = pf.flux_eq6(pf.DesignPoint(30, 8, 1e-3), NO_TPA, geom).flux_eq6
    f2 = pf.flux_eq6(pf.DesignPoint(30, 8, c * 1e-3), wg2, geom).flux_eq6
    assert f2 == pytest.approx(f1, rel=1e-12)


def test_tpa_exponent_sensitivity(wg, geom):
    p = pf.DesignPoint(50, 25)
    with_exp = pf.flux_eq6(p, wg, geom).flux_eq6
    without = pf.flux_eq6(p, wg, geom, tpa_in_exponent=False).flux_eq6
    assert with_exp < without < 1.5 * with_exp


def test_multiphoton_metric(wg, geom):
    value, low = pf.multiphoton_metric(pf.DesignPoint(50, 25), wg, geom)
    assert value == pytest.approx(0.08, rel=0.05)
    assert low
    assert pf.multiphoton_metric(pf.DesignPoint(50, 25, 0.0), wg, geom) == (0.0, True)


@given(st.floats(1e-6, 1e-2), st.floats(1.01, 10.0))
def test_multiphoton_metric_monotone_in_power(p, f):
    wg, geom = WaveguideParams(), RingGeometry()
    a, _ = pf.multiphoton_metric(pf.DesignPoint(40, 10, p), wg, geom)
    b, _ = pf.multiphoton_metric(pf.DesignPoint(40, 10, p * f), wg, geom)
    assert b > a


# --- CMT comparison -------------------------------------------------------------------


def test_apodized_system_matches_point(wg, geom):
    sys = pf.apodized_system(pf.DesignPoint(20, 6), wg, geom)
    assert sys.n_rings == 6
    np.testing.assert_allclose(sys.signal.coupling, 0.05 / geom.round_trip_time)


@pytest.mark.parametrize("s,n", [(10, 2), (50, 25), (100, 30)])
def test_cmt_flux_within_factor_two(wg, geom, s, n):
    p = pf.DesignPoint(s, n)
    ratio = pf.flux_eq6(p, wg, geom).flux_eq6 / pf.cmt_flux(p, wg, geom)
    assert abs(math.log2(ratio)) <= 1


def test_cmt_flux_quadratic_in_power(wg, geom):
    lo = pf.cmt_flux(pf.DesignPoint(20, 5, 1e-3), wg, geom)
    hi = pf.cmt_flux(pf.DesignPoint(20, 5, 2e-3), wg, geom)
    assert hi / lo == pytest.approx(4.0, rel=1e-4)


# --- sweep ------------------------------------------------------------------------


def test_default_s_values():
    s = pf.default_s_values()
    assert len(s) == 60 and s[0] == pytest.approx(2.0) and s[-1] == pytest.approx(100.0)


def test_sweep_empty_rejected(wg, geom):
    with pytest.raises(ValueError):
        pf.sweep([], [1], wg, geom)


def test_sweep_records_failures_and_continues(wg, geom):
    res = pf.sweep([0.5, 10.0], [1, 2], wg, geom)
    assert len(res.failures) == 2
    assert all("S=0.5" in f for f in res.failures)
    assert res.reports[0] == (None, None)
    assert np.all(np.isfinite(res.flux_matrix()[1]))
    assert np.all(np.isnan(res.flux_matrix()[0]))


def test_sweep_nopt_is_argmax(wg, geom):
    res = pf.sweep([5.0, 50.0], range(1, 51), wg, geom)
    fm = res.flux_matrix()
    for i in range(2):
        assert res.n_opt[i] == res.n_values[np.argmax(fm[i])]
    assert res.n_opt[1] == 25


def test_flux_decreases_beyond_nopt(wg, geom):
    res = pf.sweep(pf.default_s_values(), range(1, 51), wg, geom)
    fm = res.flux_matrix()
    for i, nopt in enumerate(res.n_opt):
        tail = fm[i, nopt - 1:]
        assert np.all(np.diff(tail) < 0)


def test_maximum_towards_single_resonator_corner(wg, geom):
    res = pf.sweep(pf.default_s_values(), range(1, 51), wg, geom)
    fm = res.flux_matrix()
    assert np.max(fm) > 10e6
    i, j = np.unravel_index(np.argmax(fm), fm.shape)
    # largest S, small N
    assert i == len(res.s_values) - 1 and res.n_values[j] < 25


def test_sweep_thread_independence(wg, geom):
    s = np.geomspace(10, 100, 5)
    a = pf.sweep(s, [2, 7, 20], wg, geom, with_cmt=True, threads=1)
    b = pf.sweep(s, [2, 7, 20], wg, geom, with_cmt=True, threads=4)
    assert np.array_equal(a.flux_matrix("cmt"), b.flux_matrix("cmt"))
    assert np.array_equal(a.flux_matrix(), b.flux_matrix())
    assert np.array_equal(a.n_opt, b.n_opt)


@settings(max_examples=20, deadline=None)
@given(st.floats(1, 100), st.integers(1, 60))
def test_flux_nonnegative(s, n):
    assert pf.flux_eq6(pf.DesignPoint(s, n), WaveguideParams(), RingGeometry()).flux_eq6 >= 0
