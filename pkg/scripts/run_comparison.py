#!/usr/bin/env python3
"""Race reshuffled Adam against plain GD on the adversarial landscape.

Every GD step size on a log-spaced grid around eta_star either diverges or
stalls above epsilon; Adam with an admissible beta2 crosses the epsilon floor
inside the epoch budget.
"""

import argparse

from adamlab.harness import default_comparison_config, emit, merge_config, run_experiment


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out", help="output root directory")
    ap.add_argument("--adam-epochs", type=int, default=None)
    ap.add_argument("--gd-steps", type=int, default=None)
    args = ap.parse_args(argv)

    overrides = {}
    if args.gd_steps is not None:
        overrides.setdefault("options", {})["gd_steps"] = args.gd_steps
    if args.adam_epochs is not None:
        adam = dict(default_comparison_config().options["adam"])
        adam["epochs"] = args.adam_epochs
        overrides.setdefault("options", {})["adam"] = adam

    result = run_experiment(merge_config(default_comparison_config(), overrides))
    emit(result, args.out)

    for run in result.report["runs"]:
        if run.get("algo") == "gd":
            print(f"{run['run_id']}: {run['verdict']}")
    con = result.report["conclusions"]
    for key in sorted(con):
        print(f"{key}: {con[key]}")
    return 0 if result.ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
