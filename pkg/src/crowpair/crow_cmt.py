"""Frequency-domain coupled-mode engine for an N-ring chain.

The signal and idler ring amplitudes obey

    [ M_s(w_s)   C      ] [a_s ]   [ -i mu1 b_s,in  ]
    [ C^dagger   M_i(w_i) ] [a_i*] = [  i mu1 b_i,in* ]

with tridiagonal

    M_s[m, m]   = G_m - i (w_s - W_s,m)       M_s[m, m+1] = -i k_m
    M_i[m, m]   = G_m + i (w_i - W_i,m)       M_i[m, m+1] = +i k_m

where G_m is the amplitude damping (loss, plus the bus couplers on rings 1 and
N) and k_m the inter-ring rate. C = diag(-i chi_m) couples the two blocks. All
frequencies are angular offsets from the signal, idler and pump carriers.

The pair amplitude is mu1 mu2 T[N, N+1] where T is the inverse of the block
matrix. The fast solver keeps the first order in C,

    T[N, N+1] ~ -(M_s^-1 C M_i^-1)[N, 1],

which is what the perturbative biphoton state requires. The full solver inverts
the 2N x 2N matrix and so includes the O(chi^3) self-consistent terms.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from ._linalg import solve_tridiagonal, unit_rhs
from .errors import NumericalError
from .model import DeviceSpec, RateSet

SOLVERS = ("fast", "full")
MIN_POINTS_PER_LINEWIDTH = 8
_FULL_CHUNK_ELEMENTS = 4_000_000


def _frozen(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ModeChain:
    """
    Linear chain seen by one optical mode (signal, idler or pump).

    ``damping`` holds G_m [rad/s] per ring, ``coupling`` the N-1 inter-ring
    rates and ``offsets`` the ring resonance offsets W_m.
    """

    damping: np.ndarray
    coupling: np.ndarray
    offsets: np.ndarray
    mu_in: float
    mu_out: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "damping", _frozen(self.damping))
        object.__setattr__(self, "coupling", _frozen(self.coupling))
        object.__setattr__(self, "offsets", _frozen(self.offsets))
        n = len(self.damping)
        if n < 1 or len(self.coupling) != n - 1 or len(self.offsets) != n:
            raise ValueError("inconsistent chain dimensions")
        if np.any(self.damping < 0) or not np.any(self.damping > 0):
            raise ValueError("damping must be non-negative with at least one lossy or bus-coupled ring")

    @classmethod
    def from_rates(cls, rates: RateSet, offsets=None) -> "ModeChain":
        n = rates.n_rings
        off = np.zeros(n) if offsets is None else np.asarray(offsets, dtype=float)
        return cls(rates.damping(), rates.inter_ring, off, rates.mu_in, rates.mu_out)

    @property
    def n_rings(self) -> int:
        return len(self.damping)

    def diagonal(self, w) -> np.ndarray:
        """Signal-type diagonal G - i(w - W), shape (B, N)."""
        w = np.atleast_1d(np.asarray(w, dtype=float))
        return self.damping[None, :] - 1j * (w[:, None] - self.offsets[None, :])

    def matrix(self, w: float) -> np.ndarray:
        """Dense signal-type block at one frequency."""
        m = np.diag(self.diagonal(w)[0])
        idx = np.arange(self.n_rings - 1)
        m[idx, idx + 1] = -1j * self.coupling
        m[idx + 1, idx] = -1j * self.coupling
        return m

    def solve(self, w, index: int) -> np.ndarray:
        """Columns M(w)^-1 e_index for every w, shape (B, N). M is complex symmetric."""
        d = self.diagonal(w)
        off = -1j * self.coupling[None, :]
        return solve_tridiagonal(off, d, off, unit_rhs(d.shape[0], self.n_rings, index))

    def hamiltonian(self) -> np.ndarray:
        """H with M(w) = H - i w I."""
        return self.matrix(0.0)


@dataclass(frozen=True)
class CmtSystem:
    """
    Immutable coupled-mode description of a device.

    ``chi`` holds the complex per-ring nonlinear rates and ``nl_coefficient`` is
    gamma0 v_g / T_c, which converts pump field squared (J) to chi (rad/s).
    """

    signal: ModeChain
    idler: ModeChain
    pump: ModeChain
    nl_coefficient: float
    round_trip_time: float
    chi: np.ndarray = field(default=None)

    def __post_init__(self) -> None:
        n = self.signal.n_rings
        if self.idler.n_rings != n or self.pump.n_rings != n:
            raise ValueError("signal, idler and pump chains differ in length")
        chi = np.zeros(n, dtype=complex) if self.chi is None else np.asarray(self.chi, dtype=complex)
        if chi.shape != (n,):
            raise ValueError(f"chi needs {n} entries")
        object.__setattr__(self, "chi", _frozen(chi, complex))

    @classmethod
    def from_device(cls, dev: DeviceSpec) -> "CmtSystem":
        rates = dev.rates()
        p = dev.profile
        wg = dev.waveguide
        tc = dev.geometry.round_trip_time
        return cls(
            signal=ModeChain.from_rates(rates, p.signal_offsets),
            idler=ModeChain.from_rates(rates, p.idler_offsets),
            pump=ModeChain.from_rates(rates, p.pump_offsets),
            nl_coefficient=wg.gamma0 * wg.group_velocity / tc,
            round_trip_time=tc,
        )

    @property
    def n_rings(self) -> int:
        return self.signal.n_rings

    def with_chi(self, chi) -> "CmtSystem":
        return replace(self, chi=np.asarray(chi, dtype=complex))

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for chain in (self.signal, self.idler, self.pump):
            for a in (chain.damping, chain.coupling, chain.offsets):
                h.update(np.ascontiguousarray(a).tobytes())
            h.update(np.array([chain.mu_in, chain.mu_out]).tobytes())
        h.update(np.array([self.nl_coefficient, self.round_trip_time]).tobytes())
        h.update(np.ascontiguousarray(self.chi).tobytes())
        return h.hexdigest()[:16]


# --- blocks -----------------------------------------------------------------


def signal_block(sys: CmtSystem, ws: float) -> np.ndarray:
    return sys.signal.matrix(ws)


def idler_block(sys: CmtSystem, wi: float) -> np.ndarray:
    return np.conj(sys.idler.matrix(wi))


def nonlinear_block(sys: CmtSystem) -> np.ndarray:
    return np.diag(-1j * sys.chi)


def full_matrix(sys: CmtSystem, ws: float, wi: float) -> np.ndarray:
    c = nonlinear_block(sys)
    return np.block([[signal_block(sys, ws), c], [c.conj().T, idler_block(sys, wi)]])


# --- pump -------------------------------------------------------------------


@dataclass(frozen=True)
class PumpState:
    """Steady-state pump field per ring and the resulting nonlinear rates."""

    amplitudes: np.ndarray
    chi: np.ndarray
    power: float
    detuning: float

    @property
    def energies(self) -> np.ndarray:
        """Stored pump energy per ring [J]."""
        return np.abs(self.amplitudes) ** 2


def pump_steady_state(sys: CmtSystem, wp: float, power: float) -> PumpState:
    """
    Linear pump response at offset ``wp`` for input power ``power`` [W].

    Solves M_p(wp) a_p = -i mu1 sqrt(P) e_1 and sets chi_m = (gamma0 v_g/T_c) a_p,m^2.
    The complex square keeps the pump phase, which the degenerate process
    imprints twice on the pair.
    """
    if power < 0:
        raise ValueError("pump power must be non-negative")
    col = sys.pump.solve([wp], 0)[0]
    a = -1j * sys.pump.mu_in * math.sqrt(power) * col
    if not np.all(np.isfinite(a)):
        raise NumericalError("singular pump system")
    return PumpState(amplitudes=a, chi=sys.nl_coefficient * a**2, power=float(power), detuning=float(wp))


def with_pump(sys: CmtSystem, wp: float, power: float) -> CmtSystem:
    return sys.with_chi(pump_steady_state(sys, wp, power).chi)


def intensity_enhancement(sys: CmtSystem, wp: float, power: float) -> np.ndarray:
    """
    Per-ring pump energy relative to the bus energy over one ring's path.

    The reference is P T_c / 2: light advances half a circumference per ring,
    the same per-ring length that enters L = N pi R. For an apodized chain at
    band centre this ratio equals the slowing factor.
    """
    if power <= 0:
        raise ValueError("power must be positive")
    st = pump_steady_state(sys, wp, power)
    return st.energies / (power * sys.round_trip_time / 2.0)


# --- transfer elements ---------------------------------------------------------


@dataclass(frozen=True)
class TElements:
    """Entries of the inverse block matrix at (N,1), (N,N+1), (2N,1), (2N,N+1)."""

    t_n_1: np.ndarray
    t_n_np1: np.ndarray
    t_2n_1: np.ndarray
    t_2n_np1: np.ndarray


def _check_solver(solver: str) -> None:
    if solver not in SOLVERS:
        raise ValueError(f"solver must be one of {SOLVERS}, got {solver!r}")


def _full_columns(sys: CmtSystem, ws: np.ndarray, wi: np.ndarray) -> np.ndarray:
    """A^-1 [e_1, e_N+1] for each (ws, wi) pair, shape (B, 2N, 2)."""
    n = sys.n_rings
    b = ws.size
    out = np.empty((b, 2 * n, 2), dtype=complex)
    c = np.diag(-1j * sys.chi)
    idx = np.arange(n - 1)
    chunk = max(1, _FULL_CHUNK_ELEMENTS // (4 * n * n))
    rhs = np.zeros((2 * n, 2), dtype=complex)
    rhs[0, 0] = 1.0
    rhs[n, 1] = 1.0
    for start in range(0, b, chunk):
        sl = slice(start, min(start + chunk, b))
        m = ws[sl].size
        a = np.zeros((m, 2 * n, 2 * n), dtype=complex)
        ds = sys.signal.diagonal(ws[sl])
        di = np.conj(sys.idler.diagonal(wi[sl]))
        a[:, np.arange(n), np.arange(n)] = ds
        a[:, n + np.arange(n), n + np.arange(n)] = di
        a[:, idx, idx + 1] = -1j * sys.signal.coupling
        a[:, idx + 1, idx] = -1j * sys.signal.coupling
        a[:, n + idx, n + idx + 1] = 1j * sys.idler.coupling
        a[:, n + idx + 1, n + idx] = 1j * sys.idler.coupling
        a[:, :n, n:] = c
        a[:, n:, :n] = c.conj().T
        out[sl] = np.linalg.solve(a, np.broadcast_to(rhs, (m, 2 * n, 2)))
    return out


def t_elements(sys: CmtSystem, ws, wi, solver: str = "fast") -> TElements:
    """
    Transfer elements at paired frequencies ``ws[k]``, ``wi[k]`` (broadcast).

    ``solver="full"`` inverts the 2N x 2N block matrix. ``solver="fast"`` uses
    four tridiagonal solves and keeps the leading order in C for each element.
    """
    _check_solver(solver)
    ws, wi = np.broadcast_arrays(np.asarray(ws, dtype=float), np.asarray(wi, dtype=float))
    shape = ws.shape
    ws = ws.ravel()
    wi = wi.ravel()
    n = sys.n_rings
    if solver == "full":
        x = _full_columns(sys, ws, wi)
        vals = (x[:, n - 1, 0], x[:, n - 1, 1], x[:, 2 * n - 1, 0], x[:, 2 * n - 1, 1])
    else:
        s_row_n = sys.signal.solve(ws, n - 1)  # (M_s^-1)[N, m]
        s_col_1 = sys.signal.solve(ws, 0)  # (M_s^-1)[m, 1]
        i_row_n = np.conj(sys.idler.solve(wi, n - 1))  # (M_i^-1)[N, m]
        i_col_1 = np.conj(sys.idler.solve(wi, 0))  # (M_i^-1)[m, 1]
        c = -1j * sys.chi
        vals = (
            s_col_1[:, n - 1],
            -np.sum(s_row_n * c * i_col_1, axis=1),
            -np.sum(i_row_n * np.conj(c) * s_col_1, axis=1),
            i_col_1[:, n - 1],
        )
    return TElements(*(v.reshape(shape) for v in vals))


def pair_amplitude(sys: CmtSystem, ws, wi, solver: str = "fast") -> np.ndarray:
    """mu1 mu2 T[N, N+1] at paired frequencies (broadcast)."""
    t = t_elements(sys, ws, wi, solver).t_n_np1
    return sys.signal.mu_in * sys.signal.mu_out * t


def pair_amplitude_grid(sys: CmtSystem, ws_axis, wi_axis, solver: str = "fast") -> np.ndarray:
    """mu1 mu2 T[N, N+1] on the outer grid, shape (len(ws_axis), len(wi_axis))."""
    _check_solver(solver)
    ws_axis = np.asarray(ws_axis, dtype=float)
    wi_axis = np.asarray(wi_axis, dtype=float)
    mu = sys.signal.mu_in * sys.signal.mu_out
    if solver == "full":
        wsg, wig = np.meshgrid(ws_axis, wi_axis, indexing="ij")
        return mu * t_elements(sys, wsg, wig, "full").t_n_np1
    n = sys.n_rings
    y = sys.signal.solve(ws_axis, n - 1)
    z = np.conj(sys.idler.solve(wi_axis, 0))
    return -mu * np.einsum("jm,m,km->jk", y, -1j * sys.chi, z)


# --- spectral grid and JSA ---------------------------------------------------------


def band_full_width(sys: CmtSystem) -> float:
    """
    Angular width of the signal transmission band [rad/s].

    Spread of the Bloch eigenfrequencies plus one full linewidth of the widest
    pole, so that N=1 gives the Lorentzian FWHM.
    """
    lam = np.linalg.eigvals(sys.signal.hamiltonian())
    return float(np.ptp(lam.imag) + 2.0 * np.max(lam.real))


@dataclass(frozen=True)
class SpectralGrid:
    """Signal and idler axes [rad/s offsets], each strictly increasing."""

    ws: np.ndarray
    wi: np.ndarray

    def __post_init__(self) -> None:
        for name in ("ws", "wi"):
            a = _frozen(getattr(self, name))
            if a.ndim != 1 or a.size < 2 or np.any(np.diff(a) <= 0):
                raise ValueError(f"{name} must be a strictly increasing axis with >= 2 points")
            object.__setattr__(self, name, a)

    @classmethod
    def around_band(
        cls, sys: CmtSystem, points: int = 256, span_factor: float = 1.5, pump_detuning: float = 0.0
    ) -> "SpectralGrid":
        """Square grid spanning ``span_factor`` band widths, centred on the pump."""
        if points < 2 or span_factor <= 0:
            raise ValueError("grid needs points >= 2 and positive span")
        half = 0.5 * span_factor * band_full_width(sys)
        ax = np.linspace(-half, half, points)
        return cls(pump_detuning + ax, pump_detuning + ax)

    @property
    def step_s(self) -> float:
        return float(self.ws[1] - self.ws[0])

    @property
    def step_i(self) -> float:
        return float(self.wi[1] - self.wi[0])


@dataclass(frozen=True)
class JsaMatrix:
    """Complex pair amplitude A[j, k] at signal ws[j] and idler wi[k]."""

    ws: np.ndarray
    wi: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        SpectralGrid(self.ws, self.wi)
        vals = _frozen(self.values, complex)
        if vals.shape != (len(self.ws), len(self.wi)):
            raise ValueError("JSA values do not match the axes")
        object.__setattr__(self, "ws", _frozen(self.ws))
        object.__setattr__(self, "wi", _frozen(self.wi))
        object.__setattr__(self, "values", vals)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def replace_values(self, values, **meta) -> "JsaMatrix":
        md = dict(self.metadata)
        md.update(meta)
        return JsaMatrix(self.ws, self.wi, values, md)


def cw_weight(grid: SpectralGrid, pump_detuning: float = 0.0) -> np.ndarray:
    """
    Grid-resolved energy-conservation delta for a cw pump.

    Weight 1 on cells with |w_s + w_i - 2 w_p| <= step_i / 2, else 0. Summing
    |A|^2 dw_s / 2pi over the grid then gives the cw flux.
    """
    mismatch = grid.ws[:, None] + grid.wi[None, :] - 2.0 * pump_detuning
    return (np.abs(mismatch) <= 0.5 * grid.step_i * (1 + 1e-9)).astype(float)


def jsa_grid(
    sys: CmtSystem,
    grid: SpectralGrid,
    envelope: Callable[[np.ndarray], np.ndarray] | None = None,
    pump_detuning: float = 0.0,
    solver: str = "fast",
    metadata: dict | None = None,
) -> JsaMatrix:
    """
    Sample A = mu1 mu2 T[N, N+1](w_s, w_i) E(w_s + w_i - 2 w_p) on ``grid``.

    ``envelope`` maps the two-photon detuning [rad/s] to a complex weight. None
    selects a cw pump, represented by :func:`cw_weight`. A warning is added to
    the metadata when the grid has fewer than 8 points per narrowest linewidth.
    """
    amp = pair_amplitude_grid(sys, grid.ws, grid.wi, solver)
    if envelope is None:
        weight = cw_weight(grid, pump_detuning)
        pump_kind = "cw"
    else:
        detune = grid.ws[:, None] + grid.wi[None, :] - 2.0 * pump_detuning
        weight = np.asarray(envelope(detune))
        pump_kind = "pulsed"
    md = {"device_hash": sys.fingerprint(), "solver": solver, "pump": pump_kind, "warnings": []}
    narrowest = 2.0 * float(np.min(np.linalg.eigvals(sys.signal.hamiltonian()).real))
    ppl = narrowest / max(grid.step_s, grid.step_i)
    md["points_per_linewidth"] = ppl
    if ppl < MIN_POINTS_PER_LINEWIDTH:
        md["warnings"].append(
            f"grid too coarse: {ppl:.2f} points per narrowest linewidth (< {MIN_POINTS_PER_LINEWIDTH})"
        )
    if metadata:
        md.update(metadata)
    return JsaMatrix(grid.ws, grid.wi, amp * weight, md)


def cw_flux_from_grid(jsa: JsaMatrix) -> float:
    """(1/2pi) sum |A|^2 dw_s for a cw JSA built with :func:`cw_weight`."""
    dws = float(jsa.ws[1] - jsa.ws[0])
    return float(np.sum(jsa.intensity) * dws / (2.0 * np.pi))


# --- linear response ------------------------------------------------------------


def transmission(sys: CmtSystem, w) -> tuple[np.ndarray, np.ndarray]:
    """Through transmission t = -mu1 mu2 [M_s^-1]_{N,1} and |t|^2 (chi ignored)."""
    w = np.atleast_1d(np.asarray(w, dtype=float))
    col = sys.signal.solve(w, 0)
    t = -sys.signal.mu_in * sys.signal.mu_out * col[:, -1]
    return t, np.abs(t) ** 2


def reflection(sys: CmtSystem, w) -> tuple[np.ndarray, np.ndarray]:
    """
    Input-port reflection r = 1 - mu1^2 [M_s^-1]_{1,1} and |r|^2.

    Direct bus transmission minus the ring re-emission; with this sign choice a
    lossless chain satisfies |t|^2 + |r|^2 = 1.
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    col = sys.signal.solve(w, 0)
    r = 1.0 - sys.signal.mu_in**2 * col[:, 0]
    return r, np.abs(r) ** 2


def group_delay(sys: CmtSystem, w) -> np.ndarray:
    """d arg(t)/dw [s], from t' = -mu1 mu2 i [M_s^-2]_{N,1}."""
    w = np.atleast_1d(np.asarray(w, dtype=float))
    col = sys.signal.solve(w, 0)
    d = sys.signal.diagonal(w)
    off = -1j * sys.signal.coupling[None, :]
    col2 = solve_tridiagonal(off, d, off, col)
    return np.imag(1j * col2[:, -1] / col[:, -1])


@dataclass(frozen=True)
class EigenMode:
    """
    One Bloch eigenmode of the signal chain.

    ``center`` is the angular offset [rad/s]. ``fwhm_hz`` is the transmission
    linewidth 1/(pi tau_g) from the group delay at the mode centre, which is
    the FWHM of an isolated Lorentzian and stays meaningful when neighbouring
    modes overlap. ``pole_fwhm_hz`` is twice the pole damping over 2 pi.
    ``resolved`` is False when the pole width exceeds the spacing to the
    nearest neighbour.
    """

    center: float
    fwhm_hz: float
    pole_fwhm_hz: float
    resolved: bool


def eigenmode_linewidths(sys: CmtSystem) -> list[EigenMode]:
    """Bloch modes of the signal chain sorted by centre frequency."""
    lam = np.linalg.eigvals(sys.signal.hamiltonian())
    order = np.argsort(lam.imag)
    centers = lam.imag[order]
    half = lam.real[order]
    tau = group_delay(sys, centers)
    modes = []
    for k, (c, g, tg) in enumerate(zip(centers, half, tau)):
        pole = g / np.pi
        fwhm = 1.0 / (np.pi * tg) if tg > 0 else pole
        gaps = [abs(centers[j] - c) for j in (k - 1, k + 1) if 0 <= j < len(centers)]
        resolved = (not gaps) or 2.0 * g < min(gaps)
        modes.append(EigenMode(float(c), float(fwhm), float(pole), bool(resolved)))
    return modes


def mid_band_mode(modes: list[EigenMode], center: float = 0.0) -> EigenMode:
    return min(modes, key=lambda m: abs(m.center - center))


def passband(sys: CmtSystem, points: int = 8001) -> tuple[float, float]:
    """Outermost half-maximum crossings of |t|^2 [rad/s], linearly interpolated."""
    half = band_full_width(sys)
    w = np.linspace(-half, half, points) + float(np.mean(sys.signal.offsets))
    _, p = transmission(sys, w)
    level = 0.5 * p.max()
    above = np.nonzero(p >= level)[0]
    i0, i1 = above[0], above[-1]
    if i0 == 0 or i1 == len(w) - 1:
        raise NumericalError("passband edge outside the evaluation window")

    def cross(a, b):
        return w[a] + (level - p[a]) * (w[b] - w[a]) / (p[b] - p[a])

    return float(cross(i0 - 1, i0)), float(cross(i1, i1 + 1))


def ripple_db(sys: CmtSystem, fraction: float = 0.5, points: int = 8001) -> float:
    """Peak-to-valley |t|^2 in dB over the central ``fraction`` of the passband."""
    lo, hi = passband(sys)
    mid = 0.5 * (lo + hi)
    h = 0.5 * fraction * (hi - lo)
    _, p = transmission(sys, np.linspace(mid - h, mid + h, points))
    return float(10.0 * np.log10(p.max() / p.min()))


# --- cw flux --------------------------------------------------------------------


def cw_density(sys: CmtSystem, ws, pump_detuning: float = 0.0, solver: str = "fast") -> np.ndarray:
    """Pair density |mu1 mu2 T|^2 along w_i = 2 w_p - w_s."""
    ws = np.asarray(ws, dtype=float)
    return np.abs(pair_amplitude(sys, ws, 2.0 * pump_detuning - ws, solver)) ** 2


def cw_flux(
    sys: CmtSystem,
    pump_detuning: float = 0.0,
    half_window: float | None = None,
    rtol: float = 1e-6,
    solver: str = "fast",
    max_points: int = 2**21 + 1,
) -> float:
    """
    Signal flux (1/2pi) int sigma dw_s over |w_s - w_p| <= ``half_window``.

    ``half_window`` defaults to the whole band plus 20 linewidths of margin.
    Composite Simpson on a uniform grid, doubled until successive estimates
    agree to ``rtol``.
    """
    lam = np.linalg.eigvals(sys.signal.hamiltonian())
    narrow = 2.0 * float(np.min(lam.real))
    if half_window is None:
        half_window = 0.5 * band_full_width(sys) + 20.0 * float(np.max(lam.real)) + abs(pump_detuning)
    if half_window <= 0:
        raise ValueError("half_window must be positive")
    n = int(2 ** math.ceil(math.log2(max(16.0, 2.0 * half_window / (narrow / 8.0))))) + 1
    prev = None
    while n <= max_points:
        w = pump_detuning + np.linspace(-half_window, half_window, n)
        f = cw_density(sys, w, pump_detuning, solver)
        h = w[1] - w[0]
        val = h / 3.0 * (f[0] + f[-1] + 4.0 * f[1:-1:2].sum() + 2.0 * f[2:-1:2].sum()) / (2.0 * np.pi)
        if prev is not None and abs(val - prev) <= rtol * abs(val):
            return float(val)
        if val == 0.0 and prev == 0.0:
            return 0.0
        prev = val
        n = 2 * n - 1
    raise NumericalError(f"cw flux did not converge to rtol={rtol} within {max_points} points")
