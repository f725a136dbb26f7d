"""Strict TOML run configuration.

Every key is optional; omitted keys take the defaults below, which describe
the reference silicon device (R = 5 um, 1 dB/cm, gamma0 = 200 /W/m,
beta0 = 0.75 cm/GW, 1 mW pump). Unknown sections or keys are errors.

Input units follow lab conventions (um, dB/cm, mW, ps); output files are SI.
"""

from __future__ import annotations

import math
import re
from dataclasses import asdict, dataclass, field, fields

import tomli
import tomli_w

from .errors import ConfigError
from .model import CouplingProfile, DeviceSpec, RingGeometry, WaveguideParams
from .synth import KINDS, ProfileRequest, generate
from .spectral import PUMP_MODES, DispersionModel, PumpSpec

# Values the source parameter set does not state; echoed in run metadata.
ASSUMED_DEFAULTS = ("waveguide.ng", "waveguide.aeff_um2")


def _pos(x) -> bool:
    return x > 0


def _nonneg(x) -> bool:
    return x >= 0


def _unit(x) -> bool:
    return 0 < x <= 1


def _any(x) -> bool:
    return True


@dataclass(frozen=True)
class WaveguideSection:
    ng: float = 4.1
    alpha_db_per_cm: float = 1.0
    gamma0_w_m: float = 200.0
    beta0_cm_gw: float = 0.75
    aeff_um2: float = 0.1
    lambda_nm: float = 1550.0


@dataclass(frozen=True)
class RingSection:
    radius_um: float = 5.0
    n_rings: int = 5


@dataclass(frozen=True)
class CouplingSection:
    kind: str = "uniform"
    kappa: float = 0.3
    fractional_bandwidth: float | None = None
    values: tuple[float, ...] | None = None
    seed: int = 0


@dataclass(frozen=True)
class PumpSection:
    mode: str = "gaussian"
    power_mw: float = 1.0
    fwhm_ps: float = 10.0
    detuning_hz: float = 0.0


@dataclass(frozen=True)
class GridSection:
    points: int = 256
    span_factor: float = 1.5


@dataclass(frozen=True)
class SweepSection:
    s_min: float = 2.0
    s_max: float = 100.0
    s_steps: int = 60
    n_min: int = 1
    n_max: int = 50
    with_cmt: bool = False


@dataclass(frozen=True)
class DispersionSection:
    shift_hz: float = -2e9
    growth_per_band: float = 0.1
    max_band: int = 2


@dataclass(frozen=True)
class McSection:
    samples: int = 200


@dataclass(frozen=True)
class RunConfig:
    waveguide: WaveguideSection = field(default_factory=WaveguideSection)
    ring: RingSection = field(default_factory=RingSection)
    coupling: CouplingSection = field(default_factory=CouplingSection)
    pump: PumpSection = field(default_factory=PumpSection)
    grid: GridSection = field(default_factory=GridSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    dispersion: DispersionSection = field(default_factory=DispersionSection)
    mc: McSection = field(default_factory=McSection)

    # --- builders ---------------------------------------------------------

    def waveguide_params(self) -> WaveguideParams:
        w = self.waveguide
        return WaveguideParams.from_lab_units(w.ng, w.alpha_db_per_cm, w.gamma0_w_m, w.beta0_cm_gw, w.aeff_um2, w.lambda_nm)

    def geometry(self) -> RingGeometry:
        return RingGeometry(self.ring.radius_um * 1e-6, self.waveguide.ng)

    def profile_request(self, n_rings: int | None = None, seed: int | None = None) -> ProfileRequest:
        c = self.coupling
        return ProfileRequest(
            kind=c.kind,
            n_rings=self.ring.n_rings if n_rings is None else n_rings,
            kappa=c.kappa,
            fractional_bandwidth=c.fractional_bandwidth,
            seed=c.seed if seed is None else seed,
            values=c.values,
        )

    def profile(self, seed: int | None = None) -> CouplingProfile:
        return generate(self.profile_request(seed=seed))

    def device(self, seed: int | None = None) -> DeviceSpec:
        return DeviceSpec(self.waveguide_params(), self.geometry(), self.profile(seed))

    def pump_spec(self) -> PumpSpec:
        p = self.pump
        return PumpSpec(p.mode, p.power_mw * 1e-3, 2 * math.pi * p.detuning_hz, p.fwhm_ps * 1e-12)

    def dispersion_model(self) -> DispersionModel:
        d = self.dispersion
        return DispersionModel.per_band(self.geometry().fsr, d.shift_hz, d.growth_per_band)


_SECTIONS = {f.name: f.default_factory for f in fields(RunConfig)}

_RULES = {
    "waveguide": {
        "ng": (float, _pos), "alpha_db_per_cm": (float, _nonneg), "gamma0_w_m": (float, _pos),
        "beta0_cm_gw": (float, _nonneg), "aeff_um2": (float, _pos), "lambda_nm": (float, _pos),
    },
    "ring": {"radius_um": (float, _pos), "n_rings": (int, lambda n: 1 <= n <= 512)},
    "coupling": {
        "kind": (str, lambda k: k in KINDS), "kappa": (float, _unit), "fractional_bandwidth": (float, _pos),
        "values": (list, lambda v: len(v) >= 2 and all(0 < x <= 1 for x in v)), "seed": (int, lambda s: 0 <= s < 2**64),
    },
    "pump": {
        "mode": (str, lambda m: m in PUMP_MODES), "power_mw": (float, _nonneg), "fwhm_ps": (float, _pos),
        "detuning_hz": (float, _any),
    },
    "grid": {"points": (int, lambda n: n >= 2), "span_factor": (float, _pos)},
    "sweep": {
        "s_min": (float, lambda s: s >= 1), "s_max": (float, lambda s: s >= 1), "s_steps": (int, _pos),
        "n_min": (int, _pos), "n_max": (int, _pos), "with_cmt": (bool, _any),
    },
    "dispersion": {"shift_hz": (float, _any), "growth_per_band": (float, _any), "max_band": (int, _pos)},
    "mc": {"samples": (int, _pos)},
}


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    lines = text.splitlines()
    pat_sec = re.compile(rf"^\s*\[\s*{re.escape(section)}\s*\]")
    in_sec = False
    for i, line in enumerate(lines, 1):
        if pat_sec.match(line):
            if key is None:
                return i
            in_sec = True
            continue
        if in_sec and re.match(r"^\s*\[", line):
            in_sec = False
        if in_sec and re.match(rf"^\s*{re.escape(key)}\s*=", line):
            return i
    return None


def _where(text: str, section: str, key: str | None = None) -> str:
    ln = _line_of(text, section, key)
    name = section if key is None else f"{section}.{key}"
    return f"{name} (line {ln})" if ln else name


def _coerce(value, typ, where: str):
    if typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        v = float(value)
        if not math.isfinite(v):
            raise ConfigError(f"{where}: value must be finite")
        return v
    if typ is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if typ is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true or false, got {value!r}")
        return value
    if typ is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    if typ is list:
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected an array, got {value!r}")
        return tuple(_coerce(v, float, where) for v in value)
    raise AssertionError(typ)


def parse_config(text: str) -> RunConfig:
    """
    Parse and validate TOML text into a RunConfig.

    Raises
    ------
    ConfigError
        On malformed TOML, unknown sections or keys, wrong types or
        out-of-range values. The message names the key and its line.
    """
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    sections = {}
    for sec, body in raw.items():
        if sec not in _SECTIONS:
            raise ConfigError(f"unknown section [{sec}] at {_where(text, sec)}")
        if not isinstance(body, dict):
            raise ConfigError(f"{sec}: expected a table")
        rules = _RULES[sec]
        vals = {}
        for key, value in body.items():
            where = _where(text, sec, key)
            if key not in rules:
                raise ConfigError(f"unknown key {where}")
            typ, ok = rules[key]
            v = _coerce(value, typ, where)
            if not ok(v):
                raise ConfigError(f"{where}: value {value!r} out of range")
            vals[key] = v
        sections[sec] = _SECTIONS[sec]().__class__(**vals)
    cfg = RunConfig(**sections)
    _cross_check(cfg, text)
    return cfg


def _cross_check(cfg: RunConfig, text: str) -> None:
    s, c = cfg.sweep, cfg.coupling
    if s.s_max < s.s_min:
        raise ConfigError(f"{_where(text, 'sweep', 's_max')}: s_max must be >= s_min")
    if s.n_max < s.n_min:
        raise ConfigError(f"{_where(text, 'sweep', 'n_max')}: n_max must be >= n_min")
    if c.kind == "explicit":
        if c.values is None:
            raise ConfigError("coupling.values: required for kind = 'explicit'")
        if len(c.values) != cfg.ring.n_rings + 1:
            raise ConfigError(
                f"{_where(text, 'coupling', 'values')}: needs n_rings + 1 = {cfg.ring.n_rings + 1} entries"
            )
    try:
        cfg.profile()
    except ValueError as exc:
        raise ConfigError(f"coupling: {exc}") from exc


def config_dict(cfg: RunConfig) -> dict:
    """Plain nested dict with None entries removed (TOML has no null)."""
    out = {}
    for sec, body in asdict(cfg).items():
        out[sec] = {k: (list(v) if isinstance(v, tuple) else v) for k, v in body.items() if v is not None}
    return out


def dump_config(cfg: RunConfig) -> str:
    return tomli_w.dumps(config_dict(cfg))


def profile_section(profile: CouplingProfile) -> str:
    """A [coupling] table reproducing ``profile`` as an explicit list."""
    return tomli_w.dumps({"coupling": {"kind": "explicit", "values": [float(v) for v in profile.as_array()]}})
