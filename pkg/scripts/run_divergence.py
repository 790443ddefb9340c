#!/usr/bin/env python3
"""Exercise the adversarial two-piece landscape on both sides of eta_star.

Part one: step sizes at and above the threshold must blow up at the doubling
rate. Part two: step sizes below it keep the gradient norm pinned above
epsilon until the slow-progress horizon.
"""

import argparse

from adamlab.harness import (
    default_thm2_diverge_config,
    default_thm2_slow_config,
    emit,
    merge_config,
    run_experiment,
)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out", help="output root directory")
    ap.add_argument("--budget", type=int, default=None, help="override step budget T")
    ap.add_argument(
        "--part", choices=("diverge", "slow", "both"), default="both",
        help="which side of the threshold to run",
    )
    args = ap.parse_args(argv)

    overrides = {"T": args.budget} if args.budget is not None else {}
    ok = True
    if args.part in ("diverge", "both"):
        result = run_experiment(merge_config(default_thm2_diverge_config(), overrides))
        emit(result, args.out)
        con = result.report["construction"]
        print(f"eta_star = {con['eta_star']:.6g}, epsilon = {con['epsilon']:.6g}")
        for key in sorted(result.report["conclusions"]):
            print(f"diverge/{key}: {result.report['conclusions'][key]}")
        ok = ok and result.ok
    if args.part in ("slow", "both"):
        result = run_experiment(merge_config(default_thm2_slow_config(), overrides))
        emit(result, args.out)
        print(f"slow_horizon = {result.report['construction']['slow_horizon']}")
        for key in sorted(result.report["conclusions"]):
            print(f"slow/{key}: {result.report['conclusions'][key]}")
        ok = ok and result.ok
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
