"""Command-line entry point: ``leoirs {time-sweep|lv-sweep|m-sweep|eval}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import geo
from .beamform import InfeasibleGeometryError, bilinear_objective
from .config import ConfigError, parse_config
from .estimator import METHODS, make_method
from .sim import (
    Scene,
    SimulationConfig,
    SweepRecord,
    improvement_stats,
    run_lv_sweep,
    run_m_sweep,
    run_time_sweep,
)

FORMAT_VERSION = "leoirs-csv/1"
DEFAULT_SEED = 20240601

log = logging.getLogger("leoirs")


@dataclass(frozen=True)
class RunManifest:
    config_path: Optional[Path]
    command: str
    out_dir: Path
    seed: int = DEFAULT_SEED
    methods: Optional[tuple] = None
    time: Optional[float] = None
    format_version: str = FORMAT_VERSION


def _fmt(x: float) -> str:
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.9g}"


def write_records(path: Path, records: Sequence[SweepRecord], x_name: str, methods: Sequence[str],
                  manifest: RunManifest) -> None:
    cols = [x_name, "scenario", *[f"snr_db_{m}" for m in methods],
            "eta_deg", "phi_tilde_in_deg", "phi_tilde_out_deg"]
    lines = [f"# {manifest.format_version} command={manifest.command} seed={manifest.seed}",
             ",".join(cols)]
    for r in records:
        row = [_fmt(r.x), r.scenario, *[_fmt(r.snr_db.get(m, np.nan)) for m in methods],
               _fmt(np.rad2deg(r.eta)), _fmt(np.rad2deg(r.phi_tilde_in)),
               _fmt(np.rad2deg(r.phi_tilde_out))]
        lines.append(",".join(row))
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _status(records: Sequence[SweepRecord]) -> int:
    return 0 if any(not r.flagged for r in records) else 1


def _load(manifest: RunManifest) -> SimulationConfig:
    return parse_config(manifest.config_path) if manifest.config_path else SimulationConfig()


def cmd_time_sweep(manifest: RunManifest) -> int:
    cfg = _load(manifest)
    methods = manifest.methods or cfg.methods
    records = run_time_sweep(cfg, methods)
    write_records(manifest.out_dir / "time-sweep.csv", records, "t_s", methods, manifest)
    for name in methods:
        if name == "proposed" or "proposed" not in methods:
            continue
        for scen in ("I", "II"):
            st = improvement_stats(records, "proposed", name, scen)
            if st["count"]:
                log.info("scenario %s: proposed vs %s: mean %.2f dB, peak %.2f dB",
                         scen, name, st["mean_db"], st["peak_db"])
    return _status(records)


def cmd_lv_sweep(manifest: RunManifest) -> int:
    cfg = _load(manifest)
    methods = manifest.methods or cfg.methods
    records_all = []
    for sat in cfg.lv_satellites:
        records = run_lv_sweep(cfg, sat, methods=methods)
        methods_used = [m for m in methods if m in records[0].snr_db] if records else list(methods)
        tag = sat if isinstance(sat, str) else f"{sat[0]:g}_{sat[1]:g}"
        write_records(manifest.out_dir / f"lv-sweep-{tag}.csv", records, "l_v_m", methods_used, manifest)
        records_all.extend(records)
    return _status(records_all)


def cmd_m_sweep(manifest: RunManifest) -> int:
    cfg = _load(manifest)
    methods = manifest.methods or cfg.m_methods
    records = run_m_sweep(cfg, methods=methods)
    write_records(manifest.out_dir / "m-sweep.csv", records, "m", methods, manifest)
    return _status(records)


def _complex_list(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v)]


def cmd_eval(manifest: RunManifest, stream=None) -> int:
    """Solve one snapshot and print a JSON summary.

    The snapshot is the orbit position at ``manifest.time`` or, without a
    time, the configured high-elevation satellite position. The seed drives a
    random-design comparison reported as ``random_search_margin_db``.
    """
    stream = sys.stdout if stream is None else stream
    cfg = _load(manifest)
    methods = manifest.methods or cfg.methods
    scene = Scene(cfg)
    if manifest.time is not None:
        orbit = cfg.orbit
        pos = geo.propagate_orbit(orbit, manifest.time)
        sat_frame = geo.frame_from_velocity(pos, geo.orbit_velocity(orbit, manifest.time))
    else:
        sat_frame = scene.satellite_frame(cfg.m_satellite)
    geometry = scene.geometry(sat_frame)
    summary = {"format": manifest.format_version, "seed": manifest.seed,
               "scenario": "II" if geometry.direct else "I",
               "angles_deg": {k: list(getattr(geometry, k).degrees()) for k in
                              ("irs_from_sat", "irs_to_gu", "sat_to_gu", "gu_from_sat")},
               "distances_m": {"sat_irs": geometry.d_si, "irs_gu": geometry.d_ig,
                               "sat_gu": geometry.d_sg},
               "snr_db": {}}
    ok = False
    for name in methods:
        est = make_method(name, cfg.system, cfg.power_dbw, cfg.noise_dbw)
        try:
            est.fit(geometry)
        except InfeasibleGeometryError as exc:
            summary["snr_db"][name] = None
            summary.setdefault("errors", {})[name] = str(exc)
            continue
        ok = True
        summary["snr_db"][name] = est.snr_db_ if np.isfinite(est.snr_db_) else None
        if name == "proposed":
            sol = est.solution_
            summary["solution"] = {
                "eta_deg": float(np.rad2deg(sol.eta)), "rho_rad": sol.rho,
                "objective": est.objective_,
                "beta_eff": est.gain_.beta_eff, "pattern": est.gain_.pattern,
                "w_s": _complex_list(sol.w_s), "w_g": _complex_list(sol.w_g),
                "theta": _complex_list(sol.theta),
            }
            summary["random_search_margin_db"] = _random_margin(est, manifest.seed)
    json.dump(summary, stream, indent=2, sort_keys=False, allow_nan=False)
    stream.write("\n")
    return 0 if ok else 1


def _random_margin(est, seed: int, n: int = 256) -> Optional[float]:
    """dB margin of the fitted beams over ``n`` random unit-norm beam pairs.

    ``None`` when either side has zero gain.
    """
    rng = np.random.default_rng(seed)
    h_best = 0.0
    X = est.channel_
    n_g, n_s = X.shape
    for _ in range(n):
        w_g = rng.standard_normal(n_g) + 1j * rng.standard_normal(n_g)
        w_s = rng.standard_normal(n_s) + 1j * rng.standard_normal(n_s)
        h_best = max(h_best, bilinear_objective(X, w_g / np.linalg.norm(w_g), w_s / np.linalg.norm(w_s)))
    if h_best == 0 or est.objective_ == 0:
        return None
    return float(10 * np.log10(est.objective_ / h_best))


COMMANDS = {
    "time-sweep": cmd_time_sweep,
    "lv-sweep": cmd_lv_sweep,
    "m-sweep": cmd_m_sweep,
    "eval": cmd_eval,
}


def get_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leoirs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, required=True, help="YAML config (empty file = defaults)")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--methods", type=lambda s: tuple(x.strip() for x in s.split(",") if x.strip()),
                       default=None, help="comma-separated design names")
        if name == "eval":
            p.add_argument("--time", type=float, default=None, help="orbit time in seconds")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = get_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.seed < 0:
        print("error: --seed must be non-negative", file=sys.stderr)
        return 2
    manifest = RunManifest(args.config, args.command, args.out, args.seed, args.methods,
                           getattr(args, "time", None))
    try:
        if manifest.methods:
            unknown = [m for m in manifest.methods if m not in METHODS]
            if unknown:
                raise ConfigError(f"unknown method(s): {', '.join(unknown)}")
        return COMMANDS[args.command](manifest)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
