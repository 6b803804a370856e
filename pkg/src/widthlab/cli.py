"""Command line entry point: ``widthlab <command> [options]``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .lab import (COMMAND_STAGES, EXIT_CONFIG, ConfigError, RunConfig, load_config,
                  parse_families, parse_tolerance, run)
from .surface import EllipsoidParams


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value file; flags override it")
    common.add_argument("--surface", help="ellipsoid coefficients a1,a2,a3")
    common.add_argument("--level", type=int, help="icosphere subdivision level for contouring")
    common.add_argument("--budget", type=int, help="mass evaluations per sweepout scan")
    common.add_argument("--seed", type=int)
    common.add_argument("--families", help="sweepout families to scan, e.g. 1-8 or 1,4")
    common.add_argument("--out", type=Path, help="artifact directory")
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                        help="tolerance override (repeatable)")
    common.add_argument("-v", "--verbose", action="store_true")
    p = argparse.ArgumentParser(prog="widthlab", description="Width and index experiments on near-round ellipsoids.")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "scan": "sup-mass scans of the polynomial sweepout families",
        "cone-check": "cone density, mass growth and first variation identities",
        "network-check": "junction classification and network stationarity fixtures",
        "index": "index and nullity of the principal geodesics and their double covers",
        "widths": "candidate table, width assignment and index-bound counterexample",
        "all": "scans, index table, candidates, widths and counterexample",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return p


def config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    try:
        surface = EllipsoidParams.parse(args.surface) if args.surface else None
        families = parse_families(args.families) if args.families else None
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    tol = dict(parse_tolerance(t) for t in args.tol)
    return cfg.with_overrides(surface=surface, level=args.level, budget=args.budget,
                              seed=args.seed, families=families, out=args.out, tolerances=tol)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"widthlab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    code, report = run(cfg, COMMAND_STAGES[args.command])
    summary = {name: st["status"] for name, st in report["stages"].items()}
    print(json.dumps({"out": str(cfg.out), "exit_code": code, "stages": summary}, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
