"""Command-line front end.

Usage: ``drivestyle <subcommand> [--config FILE] [overrides...]``. Results
are printed as JSON on stdout; failures print ``{"error": ..., "message":
..., "exit_code": ...}`` on stderr and exit with 2 (configuration), 3 (data)
or 4 (numerical failure).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import DriveStyleError
from .pipeline import COMMANDS, ENGINES, FILTERS, OUTPUT_ENV, PipelineConfig, run_pipeline
from .clustering import METHODS


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (default: the shipped config)")
    common.add_argument("--output-dir", help=f"output directory (overrides ${OUTPUT_ENV})")
    common.add_argument("--trajectories", action="append", metavar="CSV",
                        help="trajectory CSV; repeat for several files")
    common.add_argument("--judgments", metavar="CSV")
    common.add_argument("--rulebase", metavar="CSV")
    common.add_argument("--filter", action="append", choices=FILTERS, dest="filters")
    common.add_argument("--engine", action="append", choices=ENGINES, dest="engines")
    common.add_argument("--window-seconds", type=float)
    common.add_argument("--unit-mode", choices=("kmh", "ms"))
    common.add_argument("--owa-a", type=float)
    common.add_argument("--owa-b", type=float)
    common.add_argument("--owa-n", type=int)
    common.add_argument("--aggregation", choices=("owa", "median"))
    common.add_argument("--method", action="append", choices=METHODS, dest="methods",
                        help="clustering method; repeat for several")
    common.add_argument("--k", type=int)
    common.add_argument("--no-standardize", action="store_true")
    common.add_argument("--seed", type=int)

    p = argparse.ArgumentParser(prog="drivestyle",
                                description="Driving-style classification pipeline")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=(fn.__doc__ or "").strip().splitlines()[0]
                       if fn.__doc__ else None)
    return p


def _apply_overrides(cfg: PipelineConfig, a: argparse.Namespace) -> PipelineConfig:
    # paths given on the command line are relative to the working directory
    if a.trajectories:
        cfg.trajectories = tuple(str(Path(p).resolve()) for p in a.trajectories)
    if a.judgments:
        cfg.judgments = str(Path(a.judgments).resolve())
    if a.rulebase:
        cfg.rulebase = str(Path(a.rulebase).resolve())
    if a.filters:
        cfg.filters = tuple(a.filters)
    if a.engines:
        cfg.engines = tuple(a.engines)
    if a.window_seconds is not None:
        cfg.window_seconds = a.window_seconds
    if a.unit_mode:
        cfg.unit_mode = a.unit_mode
    for key in ("a", "b", "n"):
        v = getattr(a, f"owa_{key}")
        if v is not None:
            cfg.owa = {**cfg.owa, key: v}
    if a.aggregation:
        cfg.aggregation = a.aggregation
    if a.methods:
        cfg.clustering = {**cfg.clustering, "methods": list(a.methods)}
    if a.k is not None:
        cfg.clustering = {**cfg.clustering, "k": a.k}
    if a.no_standardize:
        cfg.clustering = {**cfg.clustering, "standardize": False}
    if a.seed is not None:
        cfg.seed = a.seed
    return cfg


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _apply_overrides(PipelineConfig.load(args.config), args)
        cfg.output_flag = args.output_dir
        result = run_pipeline(args.command, cfg)
    except DriveStyleError as exc:
        _fail(exc, exc.exit_code)
        return exc.exit_code
    except OSError as exc:
        _fail(exc, 3)
        return 3
    json.dump(result, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _fail(exc: Exception, code: int) -> None:
    json.dump({"error": type(exc).__name__, "message": str(exc), "exit_code": code}, sys.stderr)
    sys.stderr.write("\n")


if __name__ == "__main__":
    sys.exit(main())
