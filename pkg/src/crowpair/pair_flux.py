"""Closed-form pair flux of a slow-light chain and the (S, N) design sweep.

For a chain of N rings (geometric length L = N pi R) with slowing factor S,

    F = dnu * (gamma_eff * Pbar * L)^2 * exp(-alpha L)

with the Bloch eigenmode linewidth dnu = (1/N)(2 FSR/pi) asin|kappa|,
gamma_eff = sqrt(S_s S_i)(S_p + 1)/2 gamma0, alpha = S alpha_wg + alpha_nl and
the TPA-limited effective power Pbar. The TPA coefficient scales as S^2 beta0.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import crow_cmt
from .model import DeviceSpec, RingGeometry, WaveguideParams
from .synth import ProfileRequest, generate

MULTIPHOTON_THRESHOLD = 0.1


@dataclass(frozen=True)
class DesignPoint:
    """Slowing factor S, ring count N and pump power P [W]."""

    slowing: float
    n_rings: int
    pump_power: float = 1e-3

    def __post_init__(self) -> None:
        if not self.slowing >= 1:
            raise ValueError(f"S must be >= 1, got {self.slowing}")
        if self.n_rings < 1:
            raise ValueError(f"N must be >= 1, got {self.n_rings}")
        if not self.pump_power >= 0:
            raise ValueError("pump power must be non-negative")

    @property
    def kappa(self) -> float:
        return 1.0 / self.slowing


@dataclass(frozen=True)
class FluxReport:
    """Pair flux and intermediates for one design point. Units: Hz, W, m, 1/m."""

    point: DesignPoint
    flux_eq6: float
    bandwidth_hz: float
    gamma_eff: float
    effective_power: float
    geometric_length: float
    effective_length: float
    alpha_used: float
    alpha_nl: float
    flux_cmt: float | None = None

    @property
    def multiphoton_metric(self) -> float:
        return self.gamma_eff * self.effective_power * self.geometric_length

    @property
    def low_multiphoton(self) -> bool:
        return self.multiphoton_metric < MULTIPHOTON_THRESHOLD


def bandwidth(geom: RingGeometry, kappa: float, n_rings: int) -> float:
    """Bloch eigenmode linewidth (1/N)(2 FSR/pi) asin|kappa| [Hz]."""
    if not 0 < kappa <= 1:
        raise ValueError(f"|kappa| must lie in (0, 1], got {kappa}")
    if n_rings < 1:
        raise ValueError("n_rings must be >= 1")
    return (2.0 * geom.fsr / np.pi) * math.asin(kappa) / n_rings


def gamma_eff(s_s: float, s_i: float, s_p: float, gamma0: float) -> float:
    """sqrt(S_s S_i) (S_p + 1)/2 gamma0."""
    if min(s_s, s_i, s_p) < 1:
        raise ValueError("slowing factors must be >= 1")
    return math.sqrt(s_s * s_i) * (s_p + 1.0) / 2.0 * gamma0


def effective_length(alpha: float, length: float) -> float:
    """(1 - exp(-alpha L))/alpha, equal to L when alpha = 0."""
    x = alpha * length
    return length if x == 0 else min(length, -math.expm1(-x) / alpha)


def tpa_correction(wg: WaveguideParams, slowing: float, power: float, length: float, leff: float) -> tuple[float, float]:
    """
    Effective power Pbar [W] and the extra TPA loss alpha_nl [1/m].

    Pbar = ln(1 + b P L_eff)/(b L) with b = S^2 beta0 / A_eff, and
    alpha_nl = 2 (Pbar/A_eff) S^2 beta0. Without TPA, Pbar L = P L_eff.
    """
    if power < 0:
        raise ValueError("power must be non-negative")
    beta = slowing**2 * wg.tpa_beta0
    b = beta / wg.effective_area
    x = b * power * leff
    if x == 0:
        pbar = power * leff / length
    else:
        pbar = math.log1p(x) / (b * length)
    return pbar, 2.0 * pbar / wg.effective_area * beta


def flux_eq6(point: DesignPoint, wg: WaveguideParams, geom: RingGeometry, tpa_in_exponent: bool = True) -> FluxReport:
    """
    Closed-form pair flux for a degenerate apodized chain (S_s = S_i = S_p = S).

    The linear loss S alpha_wg sets L_eff. TPA lowers the effective power and,
    with ``tpa_in_exponent``, also adds alpha_nl to the exponential loss.
    """
    s, n = point.slowing, point.n_rings
    length = n * np.pi * geom.radius
    alpha_lin = s * wg.loss_per_m
    leff = effective_length(alpha_lin, length)
    pbar, alpha_nl = tpa_correction(wg, s, point.pump_power, length, leff)
    alpha = alpha_lin + (alpha_nl if tpa_in_exponent else 0.0)
    dnu = bandwidth(geom, point.kappa, n)
    geff = gamma_eff(s, s, s, wg.gamma0)
    f = dnu * (geff * pbar * length) ** 2 * math.exp(-alpha * length)
    return FluxReport(point, f, dnu, geff, pbar, length, leff, alpha, alpha_nl)


def multiphoton_metric(point: DesignPoint, wg: WaveguideParams, geom: RingGeometry) -> tuple[float, bool]:
    """gamma_eff Pbar L and whether it is below 0.1."""
    rep = flux_eq6(point, wg, geom)
    return rep.multiphoton_metric, rep.low_multiphoton


def apodized_system(point: DesignPoint, wg: WaveguideParams, geom: RingGeometry) -> crow_cmt.CmtSystem:
    prof = generate(ProfileRequest("apodized", point.n_rings, kappa=point.kappa))
    return crow_cmt.CmtSystem.from_device(DeviceSpec(wg, geom, prof))


def cmt_flux(point: DesignPoint, wg: WaveguideParams, geom: RingGeometry, rtol: float = 1e-5) -> float:
    """
    Coupled-mode flux of the matched apodized chain, pumped at band centre.

    The signal is collected through a flat filter one eigenmode linewidth wide
    centred on the pump, the same bandwidth the closed form assumes.
    """
    sys = crow_cmt.with_pump(apodized_system(point, wg, geom), 0.0, point.pump_power)
    dnu = bandwidth(geom, point.kappa, point.n_rings)
    return crow_cmt.cw_flux(sys, 0.0, half_window=np.pi * dnu, rtol=rtol)


@dataclass(frozen=True)
class SweepResult:
    """Flux reports on an S x N grid (row per S) with the optimum N per S."""

    s_values: np.ndarray
    n_values: np.ndarray
    reports: tuple[tuple[FluxReport | None, ...], ...]
    n_opt: np.ndarray
    failures: tuple[str, ...] = field(default=())

    def flux_matrix(self, which: str = "eq6") -> np.ndarray:
        out = np.full((len(self.s_values), len(self.n_values)), np.nan)
        for i, row in enumerate(self.reports):
            for j, r in enumerate(row):
                if r is None:
                    continue
                v = r.flux_eq6 if which == "eq6" else r.flux_cmt
                if v is not None:
                    out[i, j] = v
        return out


def default_s_values(steps: int = 60, s_min: float = 2.0, s_max: float = 100.0) -> np.ndarray:
    return np.geomspace(s_min, s_max, steps)


def sweep(
    s_values: Sequence[float],
    n_values: Sequence[int],
    wg: WaveguideParams,
    geom: RingGeometry,
    pump_power: float = 1e-3,
    with_cmt: bool = False,
    threads: int = 1,
) -> SweepResult:
    """
    Evaluate the closed form (and optionally the CMT flux) on the S x N grid.

    Points are evaluated by an ordered parallel map, so results do not depend
    on ``threads``. A failing point is recorded and left empty.
    """
    s_values = np.asarray(s_values, dtype=float)
    n_values = np.asarray(n_values, dtype=int)
    if s_values.size == 0 or n_values.size == 0:
        raise ValueError("sweep ranges must be non-empty")
    tasks = [(float(s), int(n)) for s in s_values for n in n_values]

    def run(task):
        s, n = task
        try:
            p = DesignPoint(s, n, pump_power)
            rep = flux_eq6(p, wg, geom)
            if with_cmt:
                rep = FluxReport(**{**rep.__dict__, "flux_cmt": cmt_flux(p, wg, geom)})
            return rep, None
        except (ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
            return None, f"S={s:.17g} N={n}: {type(exc).__name__}: {exc}"

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(run, tasks))
    else:
        results = [run(t) for t in tasks]

    nn = len(n_values)
    rows = tuple(tuple(r[0] for r in results[i * nn:(i + 1) * nn]) for i in range(len(s_values)))
    failures = tuple(r[1] for r in results if r[1] is not None)
    n_opt = np.zeros(len(s_values), dtype=int)
    for i, row in enumerate(rows):
        fl = [r.flux_eq6 if r is not None else -np.inf for r in row]
        n_opt[i] = n_values[int(np.argmax(fl))]
    return SweepResult(s_values, n_values, rows, n_opt, failures)
