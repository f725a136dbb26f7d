"""Closed-form biphoton spectrum and flux of one ring between two buses.

To first order in the nonlinear rate the output pair density is a product of
two Lorentzians,

    sigma(w_s, w_i) = mu1^2 mu2^2 |chi|^2
                      / (|1/tau - i(w_s - W_s)|^2 |1/tau + i(w_i - W_i)|^2),

with 1/tau = 1/tau_l + 1/tau_e1 + 1/tau_e2. The A, B, C, D input-output
coefficients of the full single-ring solution are folded into this form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import NumericalError
from .model import RateSet

QUAD_EPSREL = 1e-10
QUAD_TARGET = 1e-6


@dataclass(frozen=True)
class SingleRingSpec:
    """
    Parameters
    ----------
    rates : RateSet
        Must describe a single ring (no inter-ring rates).
    omega_s, omega_i, omega_p : float
        Signal, idler and pump resonance offsets [rad/s]. In cw operation the
        idler frequency follows from w_s + w_i = 2 omega_p.
    chi : complex
        Pump-induced nonlinear rate [rad/s]. Only |chi| enters the density.
    """

    rates: RateSet
    omega_s: float = 0.0
    omega_i: float = 0.0
    omega_p: float = 0.0
    chi: complex = 0.0

    def __post_init__(self) -> None:
        if self.rates.n_rings != 1:
            raise ValueError(f"single ring needs N=1 rates, got N={self.rates.n_rings}")

    @property
    def total_rate(self) -> float:
        """1/tau, the amplitude damping rate [rad/s]."""
        return float(self.rates.damping()[0])

    @property
    def coupling_product(self) -> float:
        """mu1^2 mu2^2."""
        return 4.0 * self.rates.external_in * self.rates.external_out


def psd(spec: SingleRingSpec, ws, wi) -> np.ndarray:
    """Pair spectral density at signal ``ws`` and idler ``wi`` [rad/s offsets]."""
    g = spec.total_rate
    ws = np.asarray(ws, dtype=float)
    wi = np.asarray(wi, dtype=float)
    den_s = g**2 + (ws - spec.omega_s) ** 2
    den_i = g**2 + (wi - spec.omega_i) ** 2
    return spec.coupling_product * abs(spec.chi) ** 2 / (den_s * den_i)


def cw_psd(spec: SingleRingSpec, ws) -> np.ndarray:
    """Density along the cw energy-conservation line w_i = 2 omega_p - w_s."""
    ws = np.asarray(ws, dtype=float)
    return psd(spec, ws, 2.0 * spec.omega_p - ws)


def flux(spec: SingleRingSpec) -> float:
    """
    Total cw signal flux F = (1/2pi) int sigma dw_s [pairs/s].

    Adaptive Gauss-Kronrod quadrature over a core interval of at least +-20
    linewidths around both Lorentzian peaks, plus the two infinite tails.

    Raises
    ------
    NumericalError
        If the estimated relative error exceeds 1e-6.
    """
    if spec.chi == 0:
        return 0.0
    g = spec.total_rate
    peak_s = spec.omega_s
    peak_i = 2.0 * spec.omega_p - spec.omega_i
    scale = float(cw_psd(spec, peak_s))

    def f(u):
        # integrand in linewidth units, w = peak_s + g u
        return float(cw_psd(spec, peak_s + g * u)) / scale

    pts = sorted({0.0, (peak_i - peak_s) / g})
    lo, hi = pts[0] - 20.0, pts[-1] + 20.0
    core, err_core = integrate.quad(f, lo, hi, points=pts, epsabs=0.0, epsrel=QUAD_EPSREL, limit=400)
    tail_abs = QUAD_EPSREL * core
    left, err_l = integrate.quad(f, -np.inf, lo, epsabs=tail_abs, epsrel=QUAD_EPSREL, limit=200)
    right, err_r = integrate.quad(f, hi, np.inf, epsabs=tail_abs, epsrel=QUAD_EPSREL, limit=200)
    total = core + left + right
    err = err_core + err_l + err_r
    if not math.isfinite(total) or total <= 0 or err > QUAD_TARGET * total:
        raise NumericalError(
            f"single-ring flux quadrature did not converge: value={total * scale:.6g}, "
            f"relative error estimate={err / max(total, 1e-300):.3g}"
        )
    return total * scale * g / (2.0 * np.pi)
