"""Physical parameters of silicon microring devices and derived coupled-mode rates.

All lengths are SI (m), rates are angular (rad/s) and frequencies reported to
users are in Hz. Lab-unit helpers convert the usual dB/cm, cm/GW and um^2 inputs.

The coupled-mode rates follow the tight-binding mapping of a ring chain:

    loss          1/tau_l   = alpha * v_g / 2
    bus coupler   1/tau_e   = |kappa_e|^2 / (2 T_c)
    ring-to-ring  kappa_rate = |kappa| / T_c

With these, a chain of uniform |kappa| has a tight-binding band of full width
4 |kappa| / T_c, which is the small-|kappa| limit of the exact transfer-matrix
band (4 / T_c) asin|kappa|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as C_VACUUM
from scipy.constants import hbar

DB_TO_NEPER_POWER = math.log(10.0) / 10.0


def db_per_cm_to_per_m(loss_db_per_cm: float) -> float:
    """Power attenuation in dB/cm -> power attenuation coefficient in 1/m."""
    return loss_db_per_cm * DB_TO_NEPER_POWER * 100.0


def per_m_to_db_per_cm(alpha_per_m: float) -> float:
    return alpha_per_m / (DB_TO_NEPER_POWER * 100.0)


def cm_per_gw_to_m_per_w(beta_cm_per_gw: float) -> float:
    return beta_cm_per_gw * 1e-2 / 1e9


@dataclass(frozen=True)
class WaveguideParams:
    """
    Waveguide constants shared by every ring of a device.

    Parameters
    ----------
    group_index : float
        n_g, dimensionless. Not stated for the reference silicon wire; 4.1 is
        typical at 1.55 um.
    loss_per_m : float
        Linear power loss coefficient alpha [1/m]. Zero means lossless.
    gamma0 : float
        Kerr nonlinear parameter [1/(W m)].
    tpa_beta0 : float
        Two-photon absorption coefficient [m/W]. Zero disables TPA.
    effective_area : float
        Mode area [m^2]. Only the TPA correction uses it.
    wavelength : float
        Reference (pump) wavelength [m].
    """

    group_index: float = 4.1
    loss_per_m: float = db_per_cm_to_per_m(1.0)
    gamma0: float = 200.0
    tpa_beta0: float = cm_per_gw_to_m_per_w(0.75)
    effective_area: float = 0.1e-12
    wavelength: float = 1.55e-6

    def __post_init__(self) -> None:
        for name in ("group_index", "gamma0", "effective_area", "wavelength"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("loss_per_m", "tpa_beta0"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")

    @classmethod
    def from_lab_units(
        cls,
        ng: float = 4.1,
        alpha_db_per_cm: float = 1.0,
        gamma0_w_m: float = 200.0,
        beta0_cm_gw: float = 0.75,
        aeff_um2: float = 0.1,
        lambda_nm: float = 1550.0,
    ) -> "WaveguideParams":
        return cls(
            group_index=ng,
            loss_per_m=db_per_cm_to_per_m(alpha_db_per_cm),
            gamma0=gamma0_w_m,
            tpa_beta0=cm_per_gw_to_m_per_w(beta0_cm_gw),
            effective_area=aeff_um2 / 1e12,
            wavelength=lambda_nm / 1e9,
        )

    @property
    def group_velocity(self) -> float:
        return C_VACUUM / self.group_index

    @property
    def angular_frequency(self) -> float:
        return 2 * np.pi * C_VACUUM / self.wavelength


@dataclass(frozen=True)
class RingGeometry:
    """Circular ring of radius ``radius`` [m] with group index ``group_index``."""

    radius: float = 5e-6
    group_index: float = 4.1

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if not self.group_index > 0:
            raise ValueError(f"group_index must be positive, got {self.group_index}")

    @classmethod
    def for_waveguide(cls, radius: float, wg: WaveguideParams) -> "RingGeometry":
        return cls(radius=radius, group_index=wg.group_index)

    @property
    def round_trip_length(self) -> float:
        return 2 * np.pi * self.radius

    @property
    def round_trip_time(self) -> float:
        """T_c = 2 pi R n_g / c [s]."""
        return self.round_trip_length * self.group_index / C_VACUUM

    @property
    def fsr(self) -> float:
        """Free spectral range [Hz], the inverse of the round-trip time."""
        return 1.0 / self.round_trip_time


def _as_offsets(values, n: int, name: str) -> tuple[float, ...]:
    if values is None:
        return (0.0,) * n
    out = tuple(float(v) for v in values)
    if len(out) != n:
        raise ValueError(f"{name} needs {n} entries, got {len(out)}")
    return out


@dataclass(frozen=True)
class CouplingProfile:
    """
    Transfer-matrix field coupling magnitudes of an N-ring chain.

    ``inter_ring`` holds the N-1 ring-to-ring couplers, ``boundary_in`` couples
    ring 1 to the input bus and ``boundary_out`` ring N to the output bus. Every
    magnitude lies in (0, 1]. Resonance offsets (rad/s) are per ring for the
    signal, idler and pump modes, relative to the mode carriers.
    """

    inter_ring: tuple[float, ...]
    boundary_in: float
    boundary_out: float
    signal_offsets: tuple[float, ...] | None = None
    idler_offsets: tuple[float, ...] | None = None
    pump_offsets: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        inter = tuple(float(k) for k in self.inter_ring)
        object.__setattr__(self, "inter_ring", inter)
        for k in inter + (self.boundary_in, self.boundary_out):
            if not 0.0 < k <= 1.0:
                raise ValueError(f"coupling magnitudes must lie in (0, 1], got {k}")
        n = len(inter) + 1
        object.__setattr__(self, "signal_offsets", _as_offsets(self.signal_offsets, n, "signal_offsets"))
        object.__setattr__(self, "idler_offsets", _as_offsets(self.idler_offsets, n, "idler_offsets"))
        object.__setattr__(self, "pump_offsets", _as_offsets(self.pump_offsets, n, "pump_offsets"))

    @property
    def n_rings(self) -> int:
        return len(self.inter_ring) + 1

    def as_array(self) -> np.ndarray:
        """All N+1 couplers in chain order: input, inter-ring..., output."""
        return np.array((self.boundary_in,) + self.inter_ring + (self.boundary_out,))


@dataclass(frozen=True)
class RateSet:
    """Coupled-mode rates in rad/s. ``inter_ring`` has N-1 entries."""

    loss_rate: float
    external_in: float
    external_out: float
    inter_ring: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self) -> None:
        inter = np.asarray(self.inter_ring, dtype=float)
        inter.setflags(write=False)
        object.__setattr__(self, "inter_ring", inter)
        if self.loss_rate < 0 or self.external_in < 0 or self.external_out < 0 or np.any(inter < 0):
            raise ValueError("rates must be non-negative")

    @property
    def n_rings(self) -> int:
        return len(self.inter_ring) + 1

    @property
    def mu_in(self) -> float:
        """Input coupling coefficient, mu^2 = 2 / tau_e1."""
        return math.sqrt(2.0 * self.external_in)

    @property
    def mu_out(self) -> float:
        return math.sqrt(2.0 * self.external_out)

    def damping(self) -> np.ndarray:
        """Per-ring total amplitude damping rate (loss plus bus coupling)."""
        g = np.full(self.n_rings, self.loss_rate)
        g[0] += self.external_in
        g[-1] += self.external_out
        return g


def derive_rates(wg: WaveguideParams, geom: RingGeometry, prof: CouplingProfile) -> RateSet:
    tc = geom.round_trip_time
    return RateSet(
        loss_rate=wg.loss_per_m * wg.group_velocity / 2.0,
        external_in=prof.boundary_in**2 / (2.0 * tc),
        external_out=prof.boundary_out**2 / (2.0 * tc),
        inter_ring=np.asarray(prof.inter_ring) / tc,
    )


@dataclass(frozen=True)
class DeviceSpec:
    """Everything needed to build the coupled-mode system of one device."""

    waveguide: WaveguideParams
    geometry: RingGeometry
    profile: CouplingProfile

    def __post_init__(self) -> None:
        if not math.isclose(self.geometry.group_index, self.waveguide.group_index):
            raise ValueError("ring geometry and waveguide disagree on group index")

    @property
    def n_rings(self) -> int:
        return self.profile.n_rings

    def rates(self) -> RateSet:
        return derive_rates(self.waveguide, self.geometry, self.profile)


# --- quality factors and single-ring scaling -------------------------------


def q_loaded(a_rt: float, tau: float, geom: RingGeometry, wg: WaveguideParams) -> float:
    """
    Loaded Q of a ring side-coupled to a bus.

    ``a_rt`` is the round-trip amplitude transmission exp(-alpha L / 2) and
    ``tau`` the through-coupling amplitude sqrt(1 - |kappa|^2).
    """
    x = a_rt * tau
    if not 0.0 < x < 1.0:
        raise ValueError("gain or lossless-uncoupled ring: Q undefined (need 0 < a_rt*tau < 1)")
    length = geom.round_trip_length
    return math.pi * math.sqrt(x) / (1.0 - x) * geom.group_index * length / wg.wavelength


def round_trip_amplitude(wg: WaveguideParams, geom: RingGeometry) -> float:
    return math.exp(-wg.loss_per_m * geom.round_trip_length / 2.0)


def q_intrinsic(wg: WaveguideParams) -> float:
    """Loss-limited Q = 2 pi n_g / (lambda alpha)."""
    if wg.loss_per_m == 0:
        raise ValueError("infinite Q: lossless waveguide")
    return 2 * math.pi * wg.group_index / (wg.wavelength * wg.loss_per_m)


def q_coupling_limited(wg: WaveguideParams, geom: RingGeometry, kappa: float) -> float:
    """Coupling-limited Q = 2 pi n_g / (lambda |kappa|^2 / L), proportional to R."""
    if kappa == 0:
        raise ValueError("infinite Q: zero coupling")
    return 2 * math.pi * wg.group_index / (wg.wavelength * kappa**2 / geom.round_trip_length)


def idler_power_single_ring(wg: WaveguideParams, geom: RingGeometry, q: float, pump_power: float) -> float:
    """Spontaneously generated idler power [W] of a single ring pumped with ``pump_power``."""
    if not q > 0:
        raise ValueError("Q must be positive")
    if pump_power < 0:
        raise ValueError("pump power must be non-negative")
    r = geom.radius
    vg = wg.group_velocity
    wp = wg.angular_frequency
    return (
        (wg.gamma0 * 2 * np.pi * r) ** 2
        * (q * vg / (wp * np.pi * r)) ** 3
        * (hbar * wp * vg / (4 * np.pi * r))
        * pump_power**2
    )


def slowing_factor(kappa: float) -> float:
    """Slowing factor of an apodized chain at band centre, S = 1/|kappa|."""
    if not 0.0 < kappa <= 1.0:
        raise ValueError(f"|kappa| must lie in (0, 1], got {kappa}")
    return 1.0 / kappa
