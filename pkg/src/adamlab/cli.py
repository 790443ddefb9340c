"""Command-line entry point.

Subcommands map to the canned experiments; each accepts --config (JSON
overrides merged onto the experiment's defaults), --out, --seed, and
--format. Exit codes: 0 all assertions passed, 1 an experiment-level
assertion failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .harness import (
    ExperimentConfig,
    default_config_for,
    emit,
    merge_config,
    run_experiment,
)
from .theory import ConstraintViolation

COMMANDS = {
    "fig3": "Fig3",
    "thm2-diverge": "Thm2Divergence",
    "thm2-slow": "Thm2Slow",
    "compare": "AdamVsGd",
    "lemmas": "LemmaSuite",
    "custom": "Custom",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adamlab",
        description="Reshuffled-Adam experiments on non-uniformly smooth finite sums",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        p = sub.add_parser(cmd, help=f"run the {COMMANDS[cmd]} experiment")
        p.add_argument("--config", type=str, default=None, help="JSON config overrides")
        p.add_argument("--out", type=str, default=None, help="output directory (default: out)")
        p.add_argument("--seed", type=int, default=None, help="replace the seed list with one seed")
        p.add_argument("--format", type=str, choices=("csv", "json"), default=None)
    return parser


def load_config(command: str, args: argparse.Namespace) -> ExperimentConfig:
    config = default_config_for(COMMANDS[command])
    if args.config is not None:
        with open(args.config) as fh:
            overrides = json.load(fh)
        if not isinstance(overrides, dict):
            raise ValueError("config file must hold a JSON object")
        overrides.setdefault("experiment", COMMANDS[command])
        if overrides["experiment"] != COMMANDS[command]:
            raise ValueError(
                f"config experiment {overrides['experiment']!r} does not match subcommand"
            )
        config = merge_config(config, overrides)
    if args.seed is not None:
        if args.seed < 0:
            raise ValueError("--seed must be >= 0")
        config.seeds = [args.seed]
    if args.format is not None:
        config.format = args.format
    if args.out is not None:
        config.out_dir = args.out
    config.validate()
    return config


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.command, args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        result = run_experiment(config)
    except (ConstraintViolation, ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out_root = config.out_dir or "out"
    paths = emit(result, out_root, config.format)
    conclusions = result.report["conclusions"]
    print(f"experiment: {config.experiment}")
    for key in sorted(conclusions):
        print(f"  {key}: {conclusions[key]}")
    print(f"wrote {len(paths)} files under {out_root}/{config.experiment}")
    if not result.ok:
        print("assertion failure: see report.json conclusions", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
