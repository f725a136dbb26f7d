"""Command-line front end.

    crowpair SUBCOMMAND [--config PATH] --out PATH [--format csv|json]
             [--seed U64] [--threads N] [--plot-data] [--solver full|fast]

Subcommands: single-ring, transmission, jsi, schmidt, flux-sweep, comb, mc,
synth. Every run also writes ``<out>.meta.json`` (config echo, version, seed,
wall time). The primary outputs are deterministic; the metadata file is not,
because it records wall time.

Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from importlib import metadata
from pathlib import Path

import numpy as np

from . import crow_cmt, pair_flux, single_ring, spectral, synth
from .config import ASSUMED_DEFAULTS, RunConfig, config_dict, parse_config, profile_section
from .errors import ConfigError, NumericalError
from .model import DeviceSpec
from .serialize import csv_text, json_text, matrix_plot_text, matrix_text, plot_text

SUBCOMMANDS = ("single-ring", "transmission", "jsi", "schmidt", "flux-sweep", "comb", "mc", "synth")
SWEEP_HEADER = (
    "S", "N", "kappa", "L_m", "Leff_m", "dnu_hz", "gamma_eff", "pbar_w",
    "flux_eq6_hz", "flux_cmt_hz", "metric_gPL", "is_nopt",
)
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4
TWO_PI = 2.0 * np.pi


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


class Outputs:
    """Collects artifacts so that all writes happen from one place at the end."""

    def __init__(self, out: Path):
        self.out = out
        self.files: dict[Path, str] = {}
        self.results: dict = {}
        self.warnings: list[str] = []

    def main(self, text: str) -> None:
        self.files[self.out] = text

    def extra(self, suffix: str, text: str) -> None:
        self.files[self.out.with_name(self.out.name + suffix)] = text


# --- subcommands ------------------------------------------------------------------


def _table(o: Outputs, args, header, rows, payload: dict | None = None) -> None:
    rows = list(rows)
    if args.format == "json":
        body = {"columns": list(header), "rows": rows}
        if payload:
            body.update(payload)
        o.main(json_text(body))
    else:
        o.main(csv_text(header, rows))
    if args.plot_data:
        o.extra(".dat", plot_text(header, rows))


def cmd_single_ring(cfg: RunConfig, args, o: Outputs) -> None:
    dev = DeviceSpec(cfg.waveguide_params(), cfg.geometry(), synth.generate(cfg.profile_request(n_rings=1, seed=args.seed)))
    p = cfg.pump_spec()
    st = crow_cmt.pump_steady_state(crow_cmt.CmtSystem.from_device(dev), p.center, p.power)
    prof = dev.profile
    spec = single_ring.SingleRingSpec(
        dev.rates(), prof.signal_offsets[0], prof.idler_offsets[0], p.center, complex(st.chi[0])
    )
    f = single_ring.flux(spec)
    half = 20.0 * spec.total_rate
    ws = p.center + np.linspace(-half, half, cfg.grid.points)
    wi = 2.0 * p.center - ws
    sig = single_ring.psd(spec, ws, wi)
    o.results.update({"flux_hz": f, "total_rate_rad_s": spec.total_rate, "chi_rad_s": abs(spec.chi)})
    _table(o, args, ("ws_hz", "wi_hz", "sigma"), zip(ws / TWO_PI, wi / TWO_PI, sig), {"flux_hz": f})


def cmd_transmission(cfg: RunConfig, args, o: Outputs) -> None:
    sys_ = crow_cmt.CmtSystem.from_device(cfg.device(args.seed))
    half = 0.5 * cfg.grid.span_factor * crow_cmt.band_full_width(sys_)
    w = np.linspace(-half, half, max(cfg.grid.points, 2))
    t, pt = crow_cmt.transmission(sys_, w)
    _, pr = crow_cmt.reflection(sys_, w)
    tau = crow_cmt.group_delay(sys_, w)
    modes = crow_cmt.eigenmode_linewidths(sys_)
    mode_info = [
        {"center_hz": m.center / TWO_PI, "fwhm_hz": m.fwhm_hz, "pole_fwhm_hz": m.pole_fwhm_hz, "resolved": m.resolved}
        for m in modes
    ]
    o.results["eigenmodes"] = mode_info
    _table(
        o, args, ("omega_hz", "t_re", "t_im", "transmission", "reflection", "group_delay_s"),
        zip(w / TWO_PI, t.real, t.imag, pt, pr, tau), {"eigenmodes": mode_info},
    )


def _jsa(cfg: RunConfig, args) -> crow_cmt.JsaMatrix:
    return spectral.device_jsa(
        cfg.device(args.seed), cfg.pump_spec(), cfg.grid.points, cfg.grid.span_factor, args.solver
    )


def cmd_jsi(cfg: RunConfig, args, o: Outputs) -> None:
    jsa = _jsa(cfg, args)
    o.warnings.extend(jsa.metadata.get("warnings", []))
    vals = jsa.values if args.amplitude else jsa.intensity
    if args.format == "json":
        body = {"ws_hz": jsa.ws / TWO_PI, "wi_hz": jsa.wi / TWO_PI}
        if args.amplitude:
            body.update({"re": vals.real, "im": vals.imag})
        else:
            body["jsi"] = vals
        o.main(json_text(body))
    else:
        o.main(matrix_text(jsa.ws / TWO_PI, jsa.wi / TWO_PI, vals, amplitude=args.amplitude))
    if args.plot_data:
        o.extra(".dat", matrix_plot_text(jsa.ws / TWO_PI, jsa.wi / TWO_PI, jsa.intensity))


def cmd_schmidt(cfg: RunConfig, args, o: Outputs) -> None:
    jsa = _jsa(cfg, args)
    o.warnings.extend(jsa.metadata.get("warnings", []))
    res = spectral.schmidt(jsa)
    diag = spectral.schmidt_diagnostics(jsa)
    geom = cfg.geometry()
    prof = cfg.profile(args.seed)
    kmax = max(prof.inter_ring) if prof.inter_ring else prof.boundary_in
    width = pair_flux.bandwidth(geom, min(kmax, 1.0), prof.n_rings)
    center = cfg.pump_spec().center
    filt = spectral.filtered_schmidt(jsa, center, center, width)
    summary = {
        "K": res.k,
        "n_modes": res.n_modes,
        "k_flat_phase": diag["k_flat_phase"],
        "k_intensity": diag["k_intensity"],
        "k_filtered_mid_mode": filt.k,
        "filter_width_hz": width,
    }
    o.results.update(summary)
    if args.format == "json":
        o.main(json_text({**summary, "eigenvalues": res.eigenvalues}))
    else:
        rows = [(k, v) for k, v in summary.items()] + [(f"lambda_{i}", v) for i, v in enumerate(res.eigenvalues)]
        o.main(csv_text(("quantity", "value"), rows))
        if args.plot_data:
            o.extra(".dat", plot_text(("index", "lambda"), enumerate(res.eigenvalues)))


def sweep_rows(res: pair_flux.SweepResult):
    for i, row in enumerate(res.reports):
        for j, r in enumerate(row):
            s, n = res.s_values[i], res.n_values[j]
            if r is None:
                yield (s, n, 1.0 / s) + ("",) * 8 + (0,)
                continue
            yield (
                s, n, r.point.kappa, r.geometric_length, r.effective_length, r.bandwidth_hz, r.gamma_eff,
                r.effective_power, r.flux_eq6, "" if r.flux_cmt is None else r.flux_cmt, r.multiphoton_metric,
                int(n == res.n_opt[i]),
            )


def cmd_flux_sweep(cfg: RunConfig, args, o: Outputs) -> None:
    s = cfg.sweep
    res = pair_flux.sweep(
        pair_flux.default_s_values(s.s_steps, s.s_min, s.s_max),
        np.arange(s.n_min, s.n_max + 1),
        cfg.waveguide_params(),
        cfg.geometry(),
        cfg.pump.power_mw * 1e-3,
        with_cmt=s.with_cmt,
        threads=args.threads,
    )
    o.warnings.extend(res.failures)
    o.results["n_opt"] = {f"{sv:.17g}": int(n) for sv, n in zip(res.s_values, res.n_opt)}
    o.results["max_flux_eq6_hz"] = float(np.nanmax(res.flux_matrix("eq6")))
    _table(o, args, SWEEP_HEADER, sweep_rows(res), {"n_opt": o.results["n_opt"], "failures": list(res.failures)})


def cmd_comb(cfg: RunConfig, args, o: Outputs) -> None:
    mb = cfg.dispersion.max_band
    bands = tuple(range(-mb, mb + 1))
    r = spectral.comb(cfg.device(args.seed), cfg.dispersion_model(), cfg.pump_spec(), bands,
                      points=max(cfg.grid.points, 2), jsi_points=cfg.grid.points, span_factor=cfg.grid.span_factor)
    o.warnings.extend(r.warnings)
    pairs = sorted(r.two_photon)
    header = ("detuning_hz",) + tuple(f"t_band{b}" for b in bands) + tuple(f"pairs_band{b}" for b in pairs)
    cols = [r.detuning / TWO_PI] + [r.transmission[b] for b in bands] + [r.two_photon[b] for b in pairs]
    summary = {
        "passband_hz": {str(b): r.passband_hz[b] for b in bands},
        "edge_center_ratio": {str(b): r.peak_ratio[b] for b in pairs},
    }
    o.results.update(summary)
    _table(o, args, header, zip(*cols), summary)
    for b, jsa in sorted(r.jsi.items()):
        o.extra(f".pair{b}.jsi", matrix_text(jsa.ws / TWO_PI, jsa.wi / TWO_PI, jsa.intensity))
        if args.plot_data:
            o.extra(f".pair{b}.dat", matrix_plot_text(jsa.ws / TWO_PI, jsa.wi / TWO_PI, jsa.intensity))


def cmd_mc(cfg: RunConfig, args, o: Outputs) -> None:
    wg, geom, pump = cfg.waveguide_params(), cfg.geometry(), cfg.pump_spec()

    def evaluate(prof):
        jsa = spectral.device_jsa(DeviceSpec(wg, geom, prof), pump, cfg.grid.points, cfg.grid.span_factor, args.solver)
        return spectral.schmidt(jsa).k

    res = synth.mc_ensemble(cfg.mc.samples, cfg.ring.n_rings, args.seed, evaluate, args.threads)
    o.warnings.extend(res.failures)
    summary = res.summary()
    if res.valid.size:
        summary["argmin_profile"] = list(res.argmin_profile.as_array())
        summary["argmax_profile"] = list(res.argmax_profile.as_array())
    o.results.update(summary)
    n = cfg.ring.n_rings
    header = ("sample", "K", "kappa_in") + tuple(f"kappa_{m}_{m + 1}" for m in range(1, n)) + ("kappa_out",)
    rows = [(i, "" if not math.isfinite(k) else k, *p.as_array()) for i, (k, p) in enumerate(zip(res.k_values, res.profiles))]
    _table(o, args, header, rows, {"summary": summary})


def cmd_synth(cfg: RunConfig, args, o: Outputs) -> None:
    prof = cfg.profile(args.seed)
    n = prof.n_rings
    names = ["in"] + [f"{m}_{m + 1}" for m in range(1, n)] + ["out"]
    vals = prof.as_array()
    o.results["profile"] = list(vals)
    if args.format == "toml":
        o.main(profile_section(prof))
    else:
        _table(o, args, ("coupler", "kappa"), zip(names, vals), {"symmetric": synth.is_symmetric(prof)})


HANDLERS = {
    "single-ring": cmd_single_ring,
    "transmission": cmd_transmission,
    "jsi": cmd_jsi,
    "schmidt": cmd_schmidt,
    "flux-sweep": cmd_flux_sweep,
    "comb": cmd_comb,
    "mc": cmd_mc,
    "synth": cmd_synth,
}


# --- entry point -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crowpair", description="Photon-pair generation in coupled microring devices.")
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", type=Path, help="TOML config; defaults apply when omitted")
    ap.add_argument("--out", type=Path, required=True, help="primary output file")
    ap.add_argument("--format", choices=("csv", "json", "toml"), default="csv",
                    help="table format (toml only for synth); jsi writes a matrix file unless json")
    ap.add_argument("--seed", type=int, default=None, help="unsigned 64-bit seed (random profiles, mc)")
    ap.add_argument("--threads", type=int, default=None, help="worker threads (env CROWPAIR_THREADS)")
    ap.add_argument("--plot-data", action="store_true", help="also write gnuplot-ready .dat companions")
    ap.add_argument("--solver", choices=crow_cmt.SOLVERS, default="fast")
    ap.add_argument("--amplitude", action="store_true", help="jsi: write complex amplitude instead of intensity")
    return ap


def _fail(code: int, kind: str, msg: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": msg}) + "\n")
    return code


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
    except OSError as exc:
        return _fail(EXIT_IO, "io", f"cannot read config: {exc}")
    try:
        cfg = parse_config(text)
        if args.seed is None:
            args.seed = cfg.coupling.seed
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        if args.threads is None:
            env = os.environ.get("CROWPAIR_THREADS", "1")
            try:
                args.threads = int(env)
            except ValueError as exc:
                raise ConfigError(f"CROWPAIR_THREADS must be an integer, got {env!r}") from exc
        if args.threads < 1:
            raise ConfigError("thread count must be >= 1")
        if args.format == "toml" and args.subcommand != "synth":
            raise ConfigError("--format toml is only available for synth")
        o = Outputs(args.out)
        HANDLERS[args.subcommand](cfg, args, o)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "config", str(exc))
    except NumericalError as exc:
        return _fail(EXIT_NUMERICAL, "numerical", str(exc))
    except (ValueError, np.linalg.LinAlgError, ArithmeticError) as exc:
        return _fail(EXIT_NUMERICAL if isinstance(exc, (np.linalg.LinAlgError, ArithmeticError)) else EXIT_CONFIG,
                     type(exc).__name__, str(exc))
    meta = {
        "subcommand": args.subcommand,
        "version": _version(),
        "seed": args.seed,
        "threads": args.threads,
        "solver": args.solver,
        "format": args.format,
        "config": config_dict(cfg),
        "assumed_defaults": [k for k in ASSUMED_DEFAULTS if _is_default(cfg, k)],
        "results": o.results,
        "warnings": o.warnings,
        "outputs": sorted(str(p) for p in o.files),
        "wall_time_s": time.perf_counter() - t0,
    }
    o.extra(".meta.json", json_text(meta))
    try:
        for path, body in o.files.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(body, encoding="utf-8")
    except OSError as exc:
        return _fail(EXIT_IO, "io", str(exc))
    return EXIT_OK


def _is_default(cfg: RunConfig, dotted: str) -> bool:
    sec, key = dotted.split(".")
    section = getattr(cfg, sec)
    return getattr(section, key) == getattr(type(section)(), key)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
