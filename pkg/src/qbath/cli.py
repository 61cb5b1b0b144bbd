"""Command-line interface.

Subcommands: quantum-run, lindblad-check, qome-compare, classical-run, sweep,
friction-dump.  Exit codes: 0 success, 2 configuration error, 3 numerical
failure, 4 partial sweep failure.
"""

import argparse
import json
import os
import sys

from .errors import (
    ConfigError,
    ConvergenceFailure,
    InvalidModel,
    OffBisector,
    TraceDrift,
)
from .config import load_config
from .reporting import write_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_PARTIAL = 4


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--model", help="model kind tag")
    parser.add_argument("--dt", type=float, help="time step")
    parser.add_argument("--steps", type=int, help="number of steps")
    parser.add_argument("--dim", type=int, help="truncation dimension")
    parser.add_argument("--seed", type=int, help="RNG seed (classical runs)")
    parser.add_argument("--initial", help="initial condition: gibbs, f=<x>, or s=<n>")
    parser.add_argument("--no-plot", action="store_true", help="skip figure rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbath",
        description="Thermal-bath dynamics: quantum master equations, "
        "complete-positivity checks, thermodynamic diagnostics, and "
        "classical Langevin ensembles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("quantum-run", "lindblad-check", "qome-compare", "classical-run"):
        p = sub.add_parser(name)
        _add_common(p)
    p = sub.add_parser("sweep")
    _add_common(p)
    p.add_argument("--axis", choices=("model", "f", "s"), required=True)
    p.add_argument("--values", help="comma-separated axis values (defaults per axis)")
    p.add_argument("--jobs", type=int, default=4)
    p = sub.add_parser("friction-dump")
    _add_common(p)
    p.add_argument(
        "--operator",
        choices=("theta_p", "theta_q", "xi_p", "xi_q"),
        default="theta_p",
    )
    p.add_argument(
        "--route",
        choices=("spectral", "sylvester", "bernoulli", "closed-form"),
        default="spectral",
    )
    return parser


def _config_from(args) -> "RunConfig":
    overrides = {
        "model": args.model,
        "dt": args.dt,
        "steps": args.steps,
        "dim": args.dim,
        "rng_seed": args.seed,
        "initial": args.initial,
    }
    return load_config(args.config, overrides)


def _cmd_quantum_run(args) -> int:
    from . import runner

    cfg = _config_from(args)
    result = runner.run_quantum(cfg)
    path = os.path.join(args.out, "quantum_run.csv")
    runner.write_quantum_csv(result, path)
    runner.print_summary(result.summary)
    print(f"wrote {path}")
    if not args.no_plot:
        from .plots import plot_quantum_run

        png = os.path.splitext(path)[0] + ".png"
        plot_quantum_run(result, png)
        print(f"wrote {png}")
    return EXIT_OK


def _cmd_lindblad_check(args) -> int:
    from . import runner

    cfg = _config_from(args)
    rows, boundary = runner.run_lindblad_grid(cfg)
    path = os.path.join(args.out, "lindblad_check.csv")
    write_csv(path, runner.LINDBLAD_HEADER, rows, config=cfg.effective_dict(),
              precision=cfg.emit_precision)
    bpath = os.path.join(args.out, "lindblad_boundary.csv")
    write_csv(bpath, ["xi", "x", "y_lower", "y_upper"], boundary,
              config=cfg.effective_dict(), precision=cfg.emit_precision)
    print(f"wrote {path}")
    print(f"wrote {bpath}")
    if not args.no_plot:
        from .plots import plot_lindblad_region

        png = os.path.splitext(path)[0] + ".png"
        plot_lindblad_region(rows, boundary, png)
        print(f"wrote {png}")
    return EXIT_OK


def _cmd_qome_compare(args) -> int:
    from . import runner

    cfg = _config_from(args)
    report = runner.run_qome_compare(cfg)
    for key, value in report.items():
        print(f"{key} = {value:.12g}")
    return EXIT_OK


def _cmd_classical_run(args) -> int:
    from . import runner

    cfg = _config_from(args)
    run, rows, stationary, balance = runner.run_classical(cfg)
    path = os.path.join(args.out, "classical_run.csv")
    write_csv(path, runner.CLASSICAL_HEADER, rows, config=cfg.effective_dict(),
              precision=cfg.emit_precision)
    print(f"res_p2 = {stationary.res_p2:.6g} +- {stationary.se_p2:.3g}")
    print(f"res_q2 = {stationary.res_q2:.6g} +- {stationary.se_q2:.3g}")
    print(f"res_equi_r = {stationary.res_equi_r:.6g} +- {stationary.se_equi_r:.3g}")
    print(f"first_law_residual = {balance.residual:.6g} +- {balance.stderr:.3g}")
    print(f"wrote {path}")
    if not args.no_plot:
        from .plots import plot_classical_run

        png = os.path.splitext(path)[0] + ".png"
        plot_classical_run(run, rows, png)
        print(f"wrote {png}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    from . import runner

    cfg = _config_from(args)
    values = None
    if args.values:
        values = [v.strip() for v in args.values.split(",") if v.strip()]
        if args.axis == "f":
            values = [float(v) for v in values]
        elif args.axis == "s":
            values = [int(v) for v in values]
    plot = None
    if not args.no_plot:
        from .plots import plot_quantum_run

        plot = plot_quantum_run
    manifest = runner.run_sweep(cfg, args.out, args.axis, values=values, jobs=args.jobs, plot=plot)
    print(json.dumps({"failures": manifest["failures"], "cells": len(manifest["cells"])}))
    print(f"wrote {os.path.join(args.out, 'manifest.json')}")
    return EXIT_PARTIAL if manifest["failures"] else EXIT_OK


def _cmd_friction_dump(args) -> int:
    from . import runner

    cfg = _config_from(args)
    matrix = runner.friction_operator(cfg, args.operator, args.route)
    path = os.path.join(args.out, f"friction_{args.operator}_{args.route}.csv")
    runner.friction_csv(matrix, path, cfg, extra={"operator": args.operator, "route": args.route})
    print(f"wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "quantum-run": _cmd_quantum_run,
    "lindblad-check": _cmd_lindblad_check,
    "qome-compare": _cmd_qome_compare,
    "classical-run": _cmd_classical_run,
    "sweep": _cmd_sweep,
    "friction-dump": _cmd_friction_dump,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, OffBisector, InvalidModel) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TraceDrift, ConvergenceFailure, OverflowError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
