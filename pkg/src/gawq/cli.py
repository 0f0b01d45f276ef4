"""Command-line entry point: ``gawq <command> [options]``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .aah import eigensystem
from .analysis import (
    butterfly_assemble,
    center_band_window,
    default_delta_grid,
    find_dips,
    localization_sweep,
)
from .chain import build_aah_matrix, build_effective_model, derive_couplings, markov_validity
from .config import load_config, parse_config
from .exceptions import GawqError
from .io import (
    RunManifest,
    write_aah,
    write_butterfly,
    write_csv,
    write_dips,
    write_localization,
    write_modes,
    write_spectrum,
)
from .modes import decompose
from .scattering import amplitudes, eom_oracle, spectrum

log = logging.getLogger("gawq")

COMMANDS = ("spectrum", "modes", "butterfly", "localization", "loss", "oracle-check")

# quarter-flux chain used when no --config is given
DEFAULT_DOCUMENT = {"n": 30, "gamma": 1.0, "delta": 0.1, "v0": "2J", "beta": "1/4"}

MAX_INVALID_FRACTION = 0.01
ORACLE_TOLERANCE = 1e-8


def _threads(requested):
    env = os.environ.get("GAWQ_THREADS")
    if env:
        return max(1, int(env))
    if requested:
        return max(1, requested)
    return os.cpu_count() or 1


def _grid(cfg, opts):
    points = opts["delta_points"] or 1500
    if opts["delta_min"] is None and opts["delta_max"] is None:
        return default_delta_grid(cfg, points)
    default = default_delta_grid(cfg, 2)
    lo = default[0] if opts["delta_min"] is None else opts["delta_min"]
    hi = default[-1] if opts["delta_max"] is None else opts["delta_max"]
    return np.linspace(lo, hi, points)


def _run_spectrum(cfg, opts, out):
    grid = spectrum(build_effective_model(cfg), _grid(cfg, opts))
    modes = decompose(build_effective_model(cfg))
    eig = eigensystem(build_aah_matrix(cfg))
    dips = find_dips(grid, opts["threshold"])
    files = [
        write_spectrum(out / "spectrum.csv", grid),
        write_modes(out / "modes.csv", modes),
        write_dips(out / "dips.csv", dips),
        write_aah(out / "aah.csv", eig),
    ]
    return files, float(np.mean(grid.invalid))


def _run_modes(cfg, opts, out):
    modes = decompose(build_effective_model(cfg))
    return [write_modes(out / "modes.csv", modes)], 0.0


def _run_butterfly(cfg, opts, out):
    grid = _grid(cfg.replace(varphi=0.0), opts)
    bmap = butterfly_assemble(cfg, opts["beta_count"], grid, threads=opts["threads"])
    return [write_butterfly(out / "butterfly.csv", bmap)], bmap.invalid_fraction


def _run_localization(cfg, opts, out):
    J = derive_couplings(cfg).J
    v0 = np.linspace(opts["v0_min"], opts["v0_max"], opts["v0_points"]) * J
    reports = localization_sweep(cfg, v0, threads=opts["threads"])
    return [write_localization(out / "localization.csv", reports)], 0.0


def _run_loss(cfg, opts, out):
    gamma = derive_couplings(cfg).gamma_mean
    if opts["delta_min"] is None and opts["delta_max"] is None:
        lo, hi = center_band_window(cfg)
        grid = np.linspace(lo, hi, opts["delta_points"] or 1500)
    else:
        grid = _grid(cfg, opts)
    columns, invalid = [], 0.0
    for g0 in opts["gamma0_values"]:
        s = spectrum(build_effective_model(cfg.replace(gamma0=g0 * gamma)), grid)
        columns.append(s.T)
        invalid = max(invalid, float(np.mean(s.invalid)))
    header = ["delta"] + [f"T_gamma0={g0!r}" for g0 in opts["gamma0_values"]]
    path = write_csv(out / "loss.csv", header, zip(grid, *columns))
    return [path], invalid


def _run_oracle_check(cfg, opts, out):
    model = build_effective_model(cfg)
    grid = _grid(cfg, opts)
    rows, worst = [], 0.0
    for d in grid:
        sol = eom_oracle(cfg, d)
        t, r = amplitudes(model, d)
        et, er = abs(sol.t - t), abs(sol.r - r)
        worst = max(worst, et, er)
        rows.append((d, et, er))
    path = write_csv(out / "oracle_check.csv", ["delta", "t_error", "r_error"], rows)
    print(f"max |oracle - direct| = {worst:.3e} (limit {ORACLE_TOLERANCE:g})")
    return [path], 0.0 if worst < ORACLE_TOLERANCE else 1.0


RUNNERS = {
    "spectrum": _run_spectrum,
    "modes": _run_modes,
    "butterfly": _run_butterfly,
    "localization": _run_localization,
    "loss": _run_loss,
    "oracle-check": _run_oracle_check,
}


def run(command, config, options, out_dir):
    """Execute ``command`` and write its CSVs plus ``manifest.json``.

    Returns ``(exit_status, manifest)``. The status is non-zero when more
    than 1% of rows or points were invalid (or the oracle check failed).
    """
    if command not in RUNNERS:
        raise ValueError(f"unknown command {command!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = parse_config(config)
    report = markov_validity(cfg)
    if report.ok is False:
        warnings.warn(f"Markov condition violated: N*gamma/omega_a = {report.ratio:.3g}")
    started = time.perf_counter()
    files, bad_fraction = RUNNERS[command](cfg, options, out)
    manifest = RunManifest(
        command=command,
        config=cfg.to_dict(),
        options={k: v for k, v in options.items() if k != "threads"},
        outputs=[str(Path(f).name) for f in files],
        version=__version__,
        duration_s=time.perf_counter() - started,
    )
    manifest.write(out / "manifest.json")
    status = 0 if bad_fraction <= MAX_INVALID_FRACTION else 1
    if command == "oracle-check":
        status = int(bad_fraction > 0)
    return status, manifest


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser():
    parser = argparse.ArgumentParser(prog="gawq", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON or YAML chain config")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("--delta-min", type=float)
    common.add_argument("--delta-max", type=float)
    common.add_argument("--delta-points", type=int)
    common.add_argument("--beta-count", type=int, default=299)
    common.add_argument("--v0-min", type=float, default=0.0, help="in units of J")
    common.add_argument("--v0-max", type=float, default=8.0, help="in units of J")
    common.add_argument("--v0-points", type=int, default=81)
    common.add_argument("--gamma0-values", type=_floats, default=[0.0, 1e-3, 1e-2],
                        help="comma separated, in units of gamma")
    common.add_argument("--threads", type=int, default=0, help="default: all cores")
    common.add_argument("--threshold", type=float, default=0.995, help="dip threshold")
    common.add_argument("-v", "--verbose", action="store_true")

    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    rerun = sub.add_parser("rerun", help="re-execute a manifest.json")
    rerun.add_argument("manifest", type=Path)
    rerun.add_argument("--out", type=Path, required=True)
    rerun.add_argument("--threads", type=int, default=0)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING)
    try:
        if args.command == "rerun":
            manifest = RunManifest.load(args.manifest)
            options = dict(manifest.options, threads=_threads(args.threads))
            status, _ = run(manifest.command, manifest.config, options, args.out)
            return status
        cfg = load_config(args.config) if args.config else parse_config(DEFAULT_DOCUMENT)
        options = {
            "delta_min": args.delta_min,
            "delta_max": args.delta_max,
            "delta_points": args.delta_points,
            "beta_count": args.beta_count,
            "v0_min": args.v0_min,
            "v0_max": args.v0_max,
            "v0_points": args.v0_points,
            "gamma0_values": list(args.gamma0_values),
            "threshold": args.threshold,
            "threads": _threads(args.threads),
        }
        status, _ = run(args.command, cfg.to_dict(), options, args.out)
        return status
    except (GawqError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
