"""Command-line entry point.

    magnusim run fig1    [--config PATH] [--out DIR] [--format csv|json] [--seeds ...]
    magnusim run scaling [--config PATH] [--out DIR] [--format csv|json]

Without ``--config`` the built-in defaults run (the n=12 disordered XY
comparison, or the bundled scaling studies).  Exits nonzero if any report
row failed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .experiments import (
    ExperimentConfig,
    default_fig1_config,
    default_scaling_config,
    emit,
    run_fig1,
    run_scaling,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="magnusim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run an experiment and emit a report")
    run_sub = run_p.add_subparsers(dest="experiment", required=True)
    for name in ("fig1", "scaling"):
        p = run_sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON experiment config")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seeds", type=int, nargs="+", help="override the seed list")
    return parser


def _load_config(args) -> ExperimentConfig:
    if args.config is not None:
        config = ExperimentConfig.from_dict(json.loads(args.config.read_text()))
    elif args.experiment == "fig1":
        config = default_fig1_config()
    else:
        config = default_scaling_config()
    if args.seeds:
        config = dataclasses.replace(
            config, model=dataclasses.replace(config.model, seeds=tuple(args.seeds))
        )
    return config


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    config = _load_config(args)
    if args.experiment == "fig1":
        report = run_fig1(config)
    else:
        report = run_scaling(config)
    paths = emit(report, args.format, args.out, stem=args.experiment)
    for path in paths:
        print(f"wrote {path}")
    for key, value in sorted(report.summary.items()):
        print(f"{key}: {json.dumps(value, sort_keys=True, default=str)}")
    if report.errors:
        for err in report.errors:
            print(f"row failed: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
