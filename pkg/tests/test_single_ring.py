from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from crowpair import single_ring as sr
from crowpair.errors import NumericalError
from crowpair.model import RateSet


def _spec(chi=1e7, ws=0.0, wi=0.0, wp=0.0, rates=None):
    rates = rates or RateSet(1.0e9, 2.0e9, 3.0e9)
    return sr.SingleRingSpec(rates, ws, wi, wp, chi)


def test_requires_single_ring():
    with pytest.raises(ValueError, match="N=1"):
        sr.SingleRingSpec(RateSet(1e9, 1e9, 1e9, [1e9]))


def test_zero_chi_gives_zero():
    spec = _spec(chi=0.0)
    assert np.all(sr.psd(spec, np.linspace(-1e10, 1e10, 11), 0.0) == 0)
    assert sr.flux(spec) == 0.0


def test_on_resonance_value():
    spec = _spec()
    tau = 1.0 / spec.total_rate
    mu4 = (2 * 2e9) * (2 * 3e9)
    assert sr.psd(spec, 0.0, 0.0) == pytest.approx(mu4 * 1e14 * tau**2 * tau**2, rel=1e-14)


def test_half_width_detuning():
    spec = _spec()
    g = spec.total_rate
    assert sr.psd(spec, g, 0.0) / sr.psd(spec, 0.0, 0.0) == pytest.approx(0.5, rel=1e-14)


def test_doubling_chi_quadruples_flux():
    assert sr.flux(_spec(chi=2e7)) / sr.flux(_spec(chi=1e7)) == pytest.approx(4.0, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(0.0, 5e9), st.floats(1e8, 5e9), st.floats(1e8, 5e9),
    st.floats(-5e10, 5e10), st.floats(-5e10, 5e10), st.floats(-5e10, 5e10),
)
def test_flux_matches_residue_integral(gl, ge1, ge2, ws, wi, wp):
    spec = sr.SingleRingSpec(RateSet(gl, ge1, ge2), ws, wi, wp, 3e6)
    g = spec.total_rate
    expect = spec.coupling_product * abs(spec.chi) ** 2 * oracles.lorentz_product_integral(g, g, ws, 2 * wp - wi) / (2 * math.pi)
    assert sr.flux(spec) == pytest.approx(expect, rel=1e-6)


@given(st.floats(-3e10, 3e10), st.floats(-3e10, 3e10), st.floats(-1e10, 1e10))
def test_exchange_symmetry(ws, wi, omega):
    spec = _spec(ws=omega, wi=omega)
    a = sr.psd(spec, ws, wi)
    b = sr.psd(spec, 2 * omega - wi, 2 * omega - ws)
    assert a == pytest.approx(b, rel=1e-12)


def test_quadratic_power_law():
    # chi proportional to P gives F proportional to P^2
    base = sr.flux(_spec(chi=1e6))
    for c in (0.5, 3.0, 10.0):
        assert sr.flux(_spec(chi=c * 1e6)) / base == pytest.approx(c**2, rel=1e-6)


def test_quadrature_failure_is_reported(monkeypatch):
    monkeypatch.setattr(sr, "QUAD_TARGET", -1.0)
    with pytest.raises(NumericalError, match="did not converge"):
        sr.flux(_spec())
