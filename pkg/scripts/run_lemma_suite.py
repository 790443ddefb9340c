#!/usr/bin/env python3
"""Audit the per-step update bounds over a momentum/decay-rate grid.

Each run checks |m|/(sqrt(nu)+xi) <= C1 and the virtual-iterate gap bounds
|u - w| <= C2 eta_k against the recorded step stream; the sweep must finish
with zero violations.
"""

import argparse

from adamlab.harness import default_lemma_suite_config, emit, merge_config, run_experiment


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out", help="output root directory")
    ap.add_argument("--epochs", type=int, default=None, help="override epoch budget T")
    args = ap.parse_args(argv)

    overrides = {"T": args.epochs} if args.epochs is not None else {}
    result = run_experiment(merge_config(default_lemma_suite_config(), overrides))
    emit(result, args.out)

    con = result.report["conclusions"]
    for key in sorted(con):
        print(f"{key}: {con[key]}")
    return 0 if result.ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
