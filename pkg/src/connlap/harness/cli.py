"""Command line entry point: ``connlap {spectrum,converge,check,mesh}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..errors import DegenerateMetricError, InvalidInputError, NumericalFailureError
from ..geometry import mesh_report, preset_circle, preset_torus
from .checks import SUITES, run_checks
from .config import PRESETS, load_config
from .experiments import run_convergence, run_spectrum

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CONVERGENCE = 0, 1, 2, 3


def _levels(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad level list {text!r}") from exc


def _experiment_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--preset", choices=PRESETS)
    p.add_argument("--levels", type=_levels, help="comma-separated n values")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--degree", type=int)
    p.add_argument("--num-eigs", dest="num_eigs", type=int)
    p.add_argument("--quad-order", dest="quad_order", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="connlap", description="Discrete magnetic and connection Laplacians")
    sub = parser.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("spectrum", help="solve one refinement level")
    _experiment_args(sp)
    sp.add_argument("--n", type=int, help="level to solve (default: first configured level)")
    _experiment_args(sub.add_parser("converge", help="refinement sweep against the analytic spectrum"))
    cp = sub.add_parser("check", help="run invariant suites")
    cp.add_argument("--suite", choices=SUITES + ("all",), default="all")
    mp = sub.add_parser("mesh", help="print mesh statistics for a preset")
    mp.add_argument("--preset", choices=PRESETS, default="circle")
    mp.add_argument("--n", type=int, required=True)
    mp.add_argument("--out")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _overrides(args) -> dict:
    keys = ("preset", "levels", "alpha", "beta", "theta", "degree", "num_eigs", "quad_order", "out", "format")
    return {k: getattr(args, k) for k in keys}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        if args.command == "check":
            report = run_checks(args.suite)
            sys.stdout.write(report.text())
            return EXIT_OK if report.passed else EXIT_CONVERGENCE
        if args.command == "mesh":
            if args.n is None or args.n < 3:
                raise InvalidInputError("mesh needs --n >= 3")
            G = preset_torus(args.n) if args.preset == "torus" else preset_circle(args.n)
            _emit(json.dumps({"preset": args.preset, "n": args.n, **mesh_report(G).as_dict()}, indent=2) + "\n",
                  args.out)
            return EXIT_OK
        cfg = load_config(args.config, _overrides(args))
        if args.command == "spectrum":
            result = run_spectrum(cfg, args.n)
            _emit(result.render(), cfg.out)
            return EXIT_OK
        result = run_convergence(cfg)
        _emit(result.render(), cfg.out)
        return EXIT_OK if result.passed else EXIT_CONVERGENCE
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DegenerateMetricError, NumericalFailureError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
