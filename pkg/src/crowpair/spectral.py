"""Pump envelopes, Schmidt decomposition, eigenmode filtering and the band comb.

Pulsed pumping uses the separable approximation: the pair amplitude is the cw
transfer element times a two-photon pump function of w_s + w_i - 2 w_p, with
the nonlinear rates fixed by the peak pump power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.signal import find_peaks

from . import crow_cmt
from .crow_cmt import CmtSystem, JsaMatrix, SpectralGrid
from .model import CouplingProfile, DeviceSpec

GAUSSIAN_TBP = 2.0 * math.log(2.0) / math.pi  # intensity FWHM product of a transform-limited Gaussian
PUMP_MODES = ("cw", "gaussian")


@dataclass(frozen=True)
class PumpSpec:
    """
    Parameters
    ----------
    mode : {"cw", "gaussian"}
    power : float
        cw power or pulse peak power [W].
    center : float
        Pump offset from its carrier [rad/s].
    fwhm_duration : float
        Intensity FWHM of the pulse [s]; gaussian mode only.
    """

    mode: str = "gaussian"
    power: float = 1e-3
    center: float = 0.0
    fwhm_duration: float = 10e-12

    def __post_init__(self) -> None:
        if self.mode not in PUMP_MODES:
            raise ValueError(f"pump mode must be one of {PUMP_MODES}, got {self.mode!r}")
        if not self.power >= 0:
            raise ValueError("pump power must be non-negative")
        if self.mode == "gaussian" and not self.fwhm_duration > 0:
            raise ValueError("pulse FWHM must be positive")

    @property
    def spectral_fwhm_hz(self) -> float:
        """Intensity FWHM of the pump spectrum [Hz]."""
        if self.mode == "cw":
            return 0.0
        return GAUSSIAN_TBP / self.fwhm_duration

    @property
    def sigma_hz(self) -> float:
        """sigma of the amplitude spectrum exp(-nu^2 / 2 sigma^2) [Hz]."""
        return self.spectral_fwhm_hz / (2.0 * math.sqrt(math.log(2.0)))


def pump_envelope(pump: PumpSpec, nu, resolution_hz: float = 0.0) -> np.ndarray:
    """
    Peak-normalised pump amplitude at offset ``nu`` [Hz].

    Gaussian: exp(-nu^2 / 2 sigma^2), whose square has the transform-limited
    FWHM 0.441/T. cw: 1 where |nu| <= resolution_hz/2 and 0 elsewhere, a
    delta resolved on the caller's grid.
    """
    nu = np.asarray(nu, dtype=float)
    if pump.mode == "cw":
        return (np.abs(nu) <= 0.5 * resolution_hz * (1 + 1e-9)).astype(float)
    return np.exp(-(nu**2) / (2.0 * pump.sigma_hz**2))


def two_photon_envelope(pump: PumpSpec, nu, resolution_hz: float = 0.0) -> np.ndarray:
    """
    Pump weight of a pair with total detuning ``nu`` = nu_s + nu_i - 2 nu_p [Hz].

    Two pump photons are annihilated, so the weight is the self-convolution of
    the pump amplitude, exp(-nu^2 / 4 sigma^2) for a Gaussian, peak-normalised.
    """
    nu = np.asarray(nu, dtype=float)
    if pump.mode == "cw":
        return pump_envelope(pump, nu, resolution_hz)
    return np.exp(-(nu**2) / (4.0 * pump.sigma_hz**2))


# --- Schmidt decomposition --------------------------------------------------------


@dataclass(frozen=True)
class SchmidtResult:
    """Normalised Schmidt eigenvalues (descending) and K = 1/sum(lambda^2)."""

    eigenvalues: np.ndarray
    k: float
    n_modes: int

    @property
    def purity(self) -> float:
        return 1.0 / self.k


def _values(jsa) -> np.ndarray:
    return jsa.values if isinstance(jsa, JsaMatrix) else np.asarray(jsa)


def schmidt(jsa, threshold: float = 1e-14) -> SchmidtResult:
    """
    Schmidt decomposition of the complex amplitude by SVD.

    ``n_modes`` counts eigenvalues above ``threshold``. Accepts a JsaMatrix
    or a plain 2-D array.
    """
    a = _values(jsa)
    if a.ndim != 2:
        raise ValueError("amplitude must be a 2-D matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("amplitude contains non-finite values")
    s = np.linalg.svd(a, compute_uv=False)
    total = float(np.sum(s**2))
    if total == 0.0:
        raise ValueError("no biphoton amplitude")
    lam = s**2 / total
    lam.setflags(write=False)
    return SchmidtResult(lam, float(1.0 / np.sum(lam**2)), int(np.count_nonzero(lam > threshold)))


def schmidt_diagnostics(jsa) -> dict:
    """K from the complex amplitude, from |A| (flat phase) and from the JSI matrix."""
    a = _values(jsa)
    return {
        "k_amplitude": schmidt(a).k,
        "k_flat_phase": schmidt(np.abs(a)).k,
        "k_intensity": schmidt(np.abs(a) ** 2).k,
    }


def filter_mask(jsa: JsaMatrix, center_s: float, center_i: float, width_hz: float) -> np.ndarray:
    """Rectangular pass-band |w - center| <= pi width_hz on both axes."""
    if not width_hz > 0:
        raise ValueError("filter width must be positive")
    h = np.pi * width_hz
    ms = np.abs(jsa.ws - center_s) <= h
    mi = np.abs(jsa.wi - center_i) <= h
    return ms[:, None] & mi[None, :]


def filtered_schmidt(jsa: JsaMatrix, center_s: float, center_i: float, width_hz: float) -> SchmidtResult:
    """
    K after flat filters of full width ``width_hz`` on signal and idler.

    Centres are angular offsets on the JSA axes. The amplitude outside the
    windows is zeroed and the remainder renormalised.

    Raises
    ------
    ValueError
        If no amplitude passes the filters.
    """
    mask = filter_mask(jsa, center_s, center_i, width_hz)
    a = np.where(mask, jsa.values, 0.0)
    norm = math.sqrt(float(np.sum(np.abs(a) ** 2)))
    if norm == 0.0:
        raise ValueError("empty filter pass-band")
    return schmidt(a / norm)


def device_jsa(
    dev: DeviceSpec,
    pump: PumpSpec,
    points: int = 256,
    span_factor: float = 1.5,
    solver: str = "fast",
    grid: SpectralGrid | None = None,
) -> JsaMatrix:
    """Pump the device, then sample its JSA (default grid centred on the pump)."""
    sys = crow_cmt.with_pump(CmtSystem.from_device(dev), pump.center, pump.power)
    if grid is None:
        grid = SpectralGrid.around_band(sys, points, span_factor, pump.center)
    envelope = None
    if pump.mode == "gaussian":
        def envelope(dw):
            return two_photon_envelope(pump, dw / (2.0 * np.pi))
    return crow_cmt.jsa_grid(
        sys, grid, envelope, pump.center, solver,
        metadata={"pump_mode": pump.mode, "pump_power_w": pump.power, "pump_fwhm_s": pump.fwhm_duration},
    )


# --- comb --------------------------------------------------------------------


@dataclass(frozen=True)
class DispersionModel:
    """
    Band-to-band dispersion.

    Band b (carrier b FSR away from the pump) has its ring resonances shifted
    by ``band_shift * b^2`` [rad/s] and every coupler magnitude scaled by
    1 + ``coupler_slope`` * (2 pi b FSR), i.e. ``coupler_slope`` is the
    fractional change of |kappa| per rad/s. Magnitudes are clamped to (0, 1].
    """

    band_shift: float = 0.0
    coupler_slope: float = 0.0

    @classmethod
    def per_band(cls, fsr_hz: float, shift_hz: float = -2e9, growth: float = 0.1) -> "DispersionModel":
        """Shift ``shift_hz`` b^2 and fractional coupler growth ``growth`` per band."""
        return cls(2.0 * np.pi * shift_hz, growth / (2.0 * np.pi * fsr_hz))

    def resonance_shift(self, band: int) -> float:
        return self.band_shift * band**2

    def coupler_factor(self, band: int, fsr_hz: float) -> float:
        return 1.0 + self.coupler_slope * 2.0 * np.pi * fsr_hz * band


def _clamp(k: float, warnings: list, band: int) -> float:
    if 0.0 < k <= 1.0:
        return k
    warnings.append(f"band {band}: |kappa|={k:.6g} clamped into (0, 1]")
    return min(max(k, 1e-12), 1.0)


def band_device(dev: DeviceSpec, disp: DispersionModel, band: int, warnings: list | None = None) -> DeviceSpec:
    """Device seen by band ``band``: scaled couplers and shifted resonances."""
    warnings = [] if warnings is None else warnings
    fsr = dev.geometry.fsr
    f = disp.coupler_factor(band, fsr)
    p = dev.profile
    shift = disp.resonance_shift(band)
    prof = CouplingProfile(
        tuple(_clamp(k * f, warnings, band) for k in p.inter_ring),
        _clamp(p.boundary_in * f, warnings, band),
        _clamp(p.boundary_out * f, warnings, band),
        signal_offsets=tuple(np.asarray(p.signal_offsets) + shift),
        idler_offsets=tuple(np.asarray(p.idler_offsets) + shift),
        pump_offsets=tuple(np.asarray(p.pump_offsets) + shift),
    )
    return replace(dev, profile=prof)


def pair_system(dev: DeviceSpec, disp: DispersionModel, band: int, pump: PumpSpec, warnings: list | None = None) -> CmtSystem:
    """Signal in band +b, idler in band -b, pumped in band 0."""
    sig = CmtSystem.from_device(band_device(dev, disp, band, warnings))
    idl = CmtSystem.from_device(band_device(dev, disp, -band, warnings))
    pmp = crow_cmt.with_pump(CmtSystem.from_device(band_device(dev, disp, 0, warnings)), pump.center, pump.power)
    return replace(pmp, signal=sig.signal, idler=idl.idler)


def edge_center_ratio(spectrum: np.ndarray, axis: np.ndarray, rel_floor: float = 1e-6) -> float:
    """Smaller outermost peak height over the height of the peak nearest the axis centre."""
    pk, _ = find_peaks(spectrum)
    pk = pk[spectrum[pk] > rel_floor * spectrum.max()]
    if pk.size == 0:
        raise ValueError("no peaks found")
    mid = 0.5 * (axis[0] + axis[-1])
    center = spectrum[pk[np.argmin(np.abs(axis[pk] - mid))]]
    return float(min(spectrum[pk[0]], spectrum[pk[-1]]) / center)


@dataclass(frozen=True)
class CombResult:
    """
    Per-band linear spectra and per-band-pair two-photon spectra.

    ``detuning`` [rad/s] is measured from each band's carrier. For pair b the
    signal sits at +detuning in band +b and the idler at -detuning in band -b.
    """

    bands: tuple[int, ...]
    detuning: np.ndarray
    transmission: dict
    passband_hz: dict
    two_photon: dict
    peak_ratio: dict
    jsi: dict
    warnings: tuple[str, ...] = field(default=())


def comb(
    dev: DeviceSpec,
    disp: DispersionModel,
    pump: PumpSpec,
    bands: Sequence[int] = (-2, -1, 0, 1, 2),
    points: int = 20001,
    jsi_points: int = 128,
    span_factor: float = 1.5,
) -> CombResult:
    """
    Multi-band spectra of a device with band-dependent couplers and resonances.

    The two-photon spectrum of pair b is the cw pair density along the signal
    detuning. JSI grids are returned for pairs b = 1 and b = 2 when present.
    """
    bands = tuple(int(b) for b in bands)
    if sorted(bands) != sorted(-b for b in bands):
        raise ValueError("band list must be symmetric around the pump band")
    warnings: list[str] = []
    base = CmtSystem.from_device(band_device(dev, disp, 0, warnings))
    half = 0.5 * span_factor * max(
        crow_cmt.band_full_width(CmtSystem.from_device(band_device(dev, disp, b, warnings))) for b in bands
    )
    det = np.linspace(-half, half, points)

    trans, widths = {}, {}
    for b in bands:
        sys_b = CmtSystem.from_device(band_device(dev, disp, b, warnings))
        trans[b] = crow_cmt.transmission(sys_b, det)[1]
        lo, hi = crow_cmt.passband(sys_b)
        widths[b] = (hi - lo) / (2.0 * np.pi)

    two, ratios, jsis = {}, {}, {}
    for b in sorted({abs(b) for b in bands}):
        ps = pair_system(dev, disp, b, pump, warnings)
        spec = crow_cmt.cw_density(ps, det, pump.center)
        two[b] = spec
        ratios[b] = edge_center_ratio(spec, det)
        if b in (1, 2):
            grid = SpectralGrid.around_band(base, jsi_points, span_factor, pump.center)
            env = None
            if pump.mode == "gaussian":
                def env(dw):
                    return two_photon_envelope(pump, dw / (2.0 * np.pi))
            jsis[b] = crow_cmt.jsa_grid(ps, grid, env, pump.center, metadata={"band_pair": b})
    return CombResult(bands, det, trans, widths, two, ratios, jsis, tuple(dict.fromkeys(warnings)))
