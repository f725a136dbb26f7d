"""Coupling-profile generators and random-profile Monte Carlo.

Filter kinds map a doubly terminated low-pass ladder prototype g_0..g_{N+1}
onto coupled-mode rates for a 3 dB angular bandwidth B,

    k_m       = B / (2 sqrt(g_m g_{m+1}))
    1/tau_e1  = B / (2 g_0 g_1)
    1/tau_e2  = B / (2 g_N g_{N+1})

and then back to transfer-matrix magnitudes with |kappa| = k T_c and
|kappa_e|^2 = 2 T_c / tau_e. Only the product B T_c = 2 pi B_hz / FSR appears,
so profiles are specified by a fractional bandwidth (3 dB width over FSR).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .model import CouplingProfile

KINDS = ("uniform", "apodized", "butterworth", "bessel", "random", "explicit")

# Unit-delay Bessel ladder prototypes (1 ohm terminations), from
# scripts/generate_bessel_table.py, with the 3 dB angular frequency of each.
BESSEL_G = {
    2: (1.57735026919, 0.42264973081),
    3: (1.2550242719, 0.5527864045, 0.192189323599),
    4: (1.05982303451, 0.511616939772, 0.318141438502, 0.110418587219),
    5: (0.930298712544, 0.457703004075, 0.331221729563, 0.208963662591, 0.0718128912257),
    6: (0.837659160694, 0.411572474329, 0.315819865691, 0.236426932761, 0.148032318194, 0.0504892483324),
    7: (0.767653742158, 0.37441343762, 0.294413498251, 0.237830364312, 0.177825927577, 0.110406099955,
        0.0374569301268),
    8: (0.712540839991, 0.34455696169, 0.273460705385, 0.229668101306, 0.18668054403, 0.138671449151,
        0.0855168003414, 0.0289045981056),
    9: (0.667772357639, 0.320277748192, 0.254702713774, 0.21839622949, 0.185923413154, 0.150596966098,
        0.111149947204, 0.0681934311835, 0.0229871932654),
    10: (0.630503590971, 0.300222962657, 0.238395156977, 0.206633628401, 0.180823993865, 0.153945341245,
         0.124042389334, 0.091060638528, 0.0556506027236, 0.0187216952972),
}
BESSEL_W3DB = {
    2: 1.36165412872, 3: 1.75567236868, 4: 2.1139176749, 5: 2.42741070215, 6: 2.7033950612,
    7: 2.95172214704, 8: 3.17961723751, 9: 3.39169313891, 10: 3.59098059457,
}


def butterworth_g(n: int) -> np.ndarray:
    """g_k = 2 sin((2k-1) pi / 2n), k = 1..n, for a 3 dB cutoff of 1 rad/s."""
    if n < 1:
        raise ValueError("order must be >= 1")
    k = np.arange(1, n + 1)
    return 2.0 * np.sin((2 * k - 1) * np.pi / (2 * n))


def bessel_g(n: int) -> np.ndarray:
    """Bessel ladder g-values rescaled to a 3 dB cutoff of 1 rad/s."""
    if n not in BESSEL_G:
        raise ValueError(f"Bessel prototypes are tabulated for N = 2..10, got {n}")
    return np.array(BESSEL_G[n]) * BESSEL_W3DB[n]


@dataclass(frozen=True)
class ProfileRequest:
    """
    Parameters
    ----------
    kind : str
        One of uniform, apodized, butterworth, bessel, random, explicit.
    n_rings : int
    kappa : float
        Base inter-ring |kappa|. For the filter kinds the largest inter-ring
        coupler is set to this value unless ``fractional_bandwidth`` is given,
        lowered if needed so that neither bus coupler exceeds 1.
    fractional_bandwidth : float, optional
        Filter kinds only: 3 dB bandwidth divided by the FSR.
    seed : int
        Random kind: 64-bit seed.
    sample_index : int
        Random kind: substream index.
    values : sequence of float
        Explicit kind: all N+1 magnitudes (input, inter-ring..., output).
    """

    kind: str
    n_rings: int
    kappa: float = 0.3
    fractional_bandwidth: float | None = None
    seed: int = 0
    sample_index: int = 0
    values: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}; expected one of {KINDS}")
        if self.n_rings < 1:
            raise ValueError("n_rings must be >= 1")
        if self.kind in ("uniform", "apodized", "butterworth", "bessel") and not 0 < self.kappa <= 1:
            raise ValueError(f"kappa must lie in (0, 1], got {self.kappa}")
        if self.fractional_bandwidth is not None and not self.fractional_bandwidth > 0:
            raise ValueError("fractional_bandwidth must be positive")
        if self.kind == "random" and not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.kind == "explicit":
            if self.values is None:
                raise ValueError("explicit profile needs values")
            if len(self.values) != self.n_rings + 1:
                raise ValueError(f"explicit profile needs N+1 = {self.n_rings + 1} values, got {len(self.values)}")


def substream(seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for sample ``index``; independent of evaluation order."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def _filter_profile(g: np.ndarray, req: ProfileRequest) -> CouplingProfile:
    n = req.n_rings
    inter_unit = 1.0 / (2.0 * np.sqrt(g[:-1] * g[1:]))  # |kappa| per unit B T_c
    if req.fractional_bandwidth is not None:
        x = 2.0 * np.pi * req.fractional_bandwidth
    else:
        # largest inter-ring coupler at the base |kappa|, capped so the bus couplers stay <= 1
        x = min(req.kappa / inter_unit.max(), g[0], g[n - 1])
    inter = x * inter_unit
    ke_in = math.sqrt(x / g[0])
    ke_out = math.sqrt(x / g[n - 1])
    if max(ke_in, ke_out, inter.max()) > 1.0:
        raise ValueError("requested bandwidth needs coupling magnitudes above 1")
    return CouplingProfile(tuple(inter), ke_in, ke_out)


def generate(req: ProfileRequest) -> CouplingProfile:
    """Build the coupling profile described by ``req``."""
    n, k = req.n_rings, req.kappa
    if req.kind == "uniform":
        return CouplingProfile((k,) * (n - 1), k, k)
    if req.kind == "apodized":
        ke = math.sqrt(2.0 * k)
        if ke > 1.0:
            raise ValueError(f"matched boundary sqrt(2|kappa|) exceeds 1 for |kappa|={k}; need |kappa| <= 0.5")
        return CouplingProfile((k,) * (n - 1), ke, ke)
    if req.kind in ("butterworth", "bessel"):
        if n < 2:
            raise ValueError(f"{req.kind} profile needs N >= 2")
        g = butterworth_g(n) if req.kind == "butterworth" else bessel_g(n)
        return _filter_profile(g, req)
    if req.kind == "random":
        draws = 1.0 - substream(req.seed, req.sample_index).random(n + 1)  # uniform on (0, 1]
        return CouplingProfile(tuple(draws[1:-1]), float(draws[0]), float(draws[-1]))
    vals = tuple(float(v) for v in req.values)
    return CouplingProfile(vals[1:-1], vals[0], vals[-1])


@dataclass(frozen=True)
class McResult:
    """Schmidt-number distribution over random profiles."""

    k_values: np.ndarray
    profiles: tuple[CouplingProfile, ...]
    n_failed: int
    failures: tuple[str, ...] = field(default=())

    @property
    def valid(self) -> np.ndarray:
        return self.k_values[np.isfinite(self.k_values)]

    def summary(self) -> dict:
        v = self.valid
        if v.size == 0:
            return {"n_samples": len(self.k_values), "n_failed": self.n_failed}
        q1, med, q3 = np.quantile(v, [0.25, 0.5, 0.75])
        return {
            "n_samples": int(len(self.k_values)),
            "n_failed": int(self.n_failed),
            "min": float(v.min()),
            "q1": float(q1),
            "median": float(med),
            "q3": float(q3),
            "max": float(v.max()),
        }

    @property
    def argmin_profile(self) -> CouplingProfile:
        return self.profiles[int(np.nanargmin(self.k_values))]

    @property
    def argmax_profile(self) -> CouplingProfile:
        return self.profiles[int(np.nanargmax(self.k_values))]


def mc_ensemble(
    n_samples: int,
    n_rings: int,
    seed: int,
    evaluate: Callable[[CouplingProfile], float],
    threads: int = 1,
) -> McResult:
    """
    Draw ``n_samples`` random profiles and evaluate K for each.

    Sample i always uses substream i, and results are collected in sample
    order, so the output does not depend on ``threads``. Failing samples are
    recorded as NaN and counted.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    profiles = tuple(generate(ProfileRequest("random", n_rings, seed=seed, sample_index=i)) for i in range(n_samples))

    def run(p: CouplingProfile):
        try:
            return float(evaluate(p)), None
        except (ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
            return math.nan, f"{type(exc).__name__}: {exc}"

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(run, profiles))
    else:
        results = [run(p) for p in profiles]
    ks = np.array([r[0] for r in results])
    fails = tuple(f"sample {i}: {r[1]}" for i, r in enumerate(results) if r[1] is not None)
    return McResult(ks, profiles, len(fails), fails)


def reversed_profile(p: CouplingProfile) -> CouplingProfile:
    return CouplingProfile(tuple(reversed(p.inter_ring)), p.boundary_out, p.boundary_in)


def is_symmetric(p: CouplingProfile, rtol: float = 1e-12) -> bool:
    a = p.as_array()
    return bool(np.allclose(a, a[::-1], rtol=rtol, atol=0.0))


def profile_from_values(values: Sequence[float]) -> CouplingProfile:
    vals = tuple(float(v) for v in values)
    if len(vals) < 2:
        raise ValueError("need at least the two boundary couplers")
    return CouplingProfile(vals[1:-1], vals[0], vals[-1])
