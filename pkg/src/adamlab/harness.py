"""Experiment drivers and deterministic artifact emission.

Five canned experiments plus a pass-through custom mode:

* ``Fig3`` -- reshuffled Adam on the ten-component counterexample across a
  beta2 grid; verifies the gradient-size floor at short second-moment memory
  and the monotone improvement as beta2 -> 1.
* ``Thm2Divergence`` -- gradient descent at and above the blow-up threshold
  on the two-piece landscape; audits per-step sqrt(2) growth of |x|.
* ``Thm2Slow`` -- gradient descent below the threshold; audits the epsilon
  gradient floor before the slow-progress horizon.
* ``AdamVsGd`` -- the head-to-head: every GD step size either diverges or
  stalls, while Adam reaches an epsilon-small gradient within budget.
* ``LemmaSuite`` -- per-step audits of the update-magnitude and momentum-gap
  bounds across a hyperparameter grid.

Emission is byte-deterministic: runs are sorted by run id, JSON is written
with sorted keys, and no timestamps appear anywhere.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

from .landscapes import from_spec, lowerbound_objective, to_spec, zhang_counterexample
from .optimizers import (
    AdamParams,
    STATUS_COMPLETED,
    STATUS_DIVERGED,
    Trajectory,
    adam_run,
    export_trajectory_csv,
    gd_run,
    tail_mean_grad_norm,
    trajectory_summary,
)
from .probes import affine_noise_fit, check_bounded_update, check_u_gap
from .rng import ALGORITHM_ID
from .theory import (
    ProblemConstants,
    compute_constants,
    gamma_threshold,
    theorem2_construction,
)

PACKAGE_VERSION = "0.1.0"

EXPERIMENTS = ("Fig3", "Thm2Divergence", "Thm2Slow", "AdamVsGd", "LemmaSuite", "Custom")

HALF_LOG2 = 0.5 * math.log(2.0)


@dataclass
class ExperimentConfig:
    experiment: str
    objective: Optional[dict] = None
    seeds: list[int] = field(default_factory=lambda: [1, 2, 3])
    T: int = 10_000
    format: str = "csv"
    out_dir: Optional[str] = None
    options: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be 'csv' or 'json'")
        if self.T < 0:
            raise ValueError("T must be >= 0")
        if not self.seeds:
            raise ValueError("need at least one seed")
        if any(s < 0 for s in self.seeds):
            raise ValueError("seeds must be >= 0")

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "objective": self.objective,
            "seeds": list(self.seeds),
            "T": self.T,
            "format": self.format,
            "out_dir": self.out_dir,
            "options": self.options,
        }

    @staticmethod
    def from_dict(d: dict) -> "ExperimentConfig":
        base = ExperimentConfig(experiment=d.get("experiment", "Custom"))
        return merge_config(base, d)


def merge_config(base: ExperimentConfig, overrides: dict) -> ExperimentConfig:
    """Shallow-merge a config dict onto a default: top-level fields replace,
    ``options`` merges key by key."""
    out = ExperimentConfig(
        experiment=overrides.get("experiment", base.experiment),
        objective=overrides.get("objective", base.objective),
        seeds=list(overrides.get("seeds", base.seeds)),
        T=overrides.get("T", base.T),
        format=overrides.get("format", base.format),
        out_dir=overrides.get("out_dir", base.out_dir),
        options={**base.options, **overrides.get("options", {})},
    )
    out.validate()
    return out


# ---------------------------------------------------------------------------
# default configs


def default_fig3_config() -> ExperimentConfig:
    return ExperimentConfig(
        experiment="Fig3",
        objective=to_spec(zhang_counterexample()),
        seeds=[1, 2, 3],
        T=10_000,
        options={
            "beta1": 0.9,
            "beta2_grid": [0.9, 0.99, 0.999],
            "eta1": 0.1,
            "xi": 1e-8,
            "schedule": "Diminishing",
            "init_mode": "PaperTheory",
            "x0": [-2.0],
            "tail_frac": 0.1,
            "grad_floor": 1e-4,
        },
    )


def _default_construction() -> dict:
    return {"L0": 1.0, "L1": 1.0, "M": 100.0, "f_bar": 199.0}


def default_thm2_diverge_config() -> ExperimentConfig:
    return ExperimentConfig(
        experiment="Thm2Divergence",
        seeds=[0],
        T=10_000,
        options={
            "construction": _default_construction(),
            "eta_multipliers": [1.0, 1.05, 2.0],
            "steps": 50,
            "growth_tol": 1e-9,
            "min_checks_per_run": 3,
            "min_checks_total": 10,
        },
    )


def default_thm2_slow_config() -> ExperimentConfig:
    return ExperimentConfig(
        experiment="Thm2Slow",
        seeds=[0],
        T=10_000,
        options={
            "construction": _default_construction(),
            "eta_multipliers": [0.1, 0.5, 0.99],
            "steps": 10_000,
            "complete_multipliers": [0.1, 0.5],
        },
    )


def default_comparison_config() -> ExperimentConfig:
    return ExperimentConfig(
        experiment="AdamVsGd",
        seeds=[1],
        T=10_000,
        options={
            "construction": _default_construction(),
            "gd_eta_multipliers": [0.25, 0.5, 1.0, 2.0, 4.0],
            "gd_steps": 10_000,
            "adam": {
                "beta1": 0.9,
                "beta2": 0.999,
                "eta1": 0.5,
                "xi": 1e-8,
                "epochs": 4000,
                "schedule": "Diminishing",
                "init_mode": "PaperTheory",
            },
        },
    )


def default_lemma_suite_config() -> ExperimentConfig:
    return ExperimentConfig(
        experiment="LemmaSuite",
        objective=to_spec(zhang_counterexample()),
        seeds=[1],
        T=1000,
        options={
            "beta1_grid": [0.0, 0.5, 0.9],
            "beta2_grid": [0.99, 0.999],
            "eta1_grid": [0.01, 0.1],
            "schedules": ["Diminishing", "Constant"],
            "xi": 1e-8,
            "init_mode": "PaperTheory",
            "x0": [-2.0],
        },
    )


def default_config_for(experiment: str) -> ExperimentConfig:
    table = {
        "Fig3": default_fig3_config,
        "Thm2Divergence": default_thm2_diverge_config,
        "Thm2Slow": default_thm2_slow_config,
        "AdamVsGd": default_comparison_config,
        "LemmaSuite": default_lemma_suite_config,
    }
    if experiment == "Custom":
        return ExperimentConfig(experiment="Custom", seeds=[1], T=100)
    if experiment not in table:
        raise ValueError(f"unknown experiment {experiment!r}")
    return table[experiment]()


# ---------------------------------------------------------------------------
# result container


@dataclass
class ExperimentResult:
    report: dict
    trajectories: dict[str, Trajectory]
    plot_tables: dict[str, list[dict]]

    @property
    def ok(self) -> bool:
        return bool(self.report["conclusions"].get("all_ok", False))


def _environment() -> dict:
    return {
        "package": "adamlab",
        "version": PACKAGE_VERSION,
        "rng": ALGORITHM_ID,
        "python": f"{sys.version_info.major}.{sys.version_info.minor}",
    }


def _base_report(config: ExperimentConfig) -> dict:
    echo = config.to_dict()
    echo["out_dir"] = None  # reports are location-independent
    return {
        "experiment": config.experiment,
        "config": echo,
        "environment": _environment(),
        "runs": [],
        "conclusions": {},
    }


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# Fig3


def run_fig3(config: ExperimentConfig) -> ExperimentResult:
    config.validate()
    opt = config.options
    obj = from_spec(config.objective)
    report = _base_report(config)
    trajectories: dict[str, Trajectory] = {}
    rows: list[dict] = []
    tails: dict[tuple[float, int], float] = {}

    grid = sorted(opt["beta2_grid"])
    seeds = sorted(config.seeds)
    for b2 in grid:
        for seed in seeds:
            params = AdamParams(
                beta1=opt["beta1"],
                beta2=b2,
                eta1=opt["eta1"],
                xi=opt["xi"],
                schedule=opt["schedule"],
                epochs=config.T,
                init_mode=opt["init_mode"],
                seed=seed,
                record_steps=False,
            )
            traj = adam_run(obj, opt["x0"], params)
            rid = f"b2={b2!r}-seed={seed}"
            trajectories[rid] = traj
            tail = tail_mean_grad_norm(traj, opt["tail_frac"])
            tails[(b2, seed)] = tail
            report["runs"].append(
                {
                    "run_id": rid,
                    "beta2": b2,
                    "seed": seed,
                    "status": traj.status,
                    "tail_mean_grad_norm": tail,
                    "summary": trajectory_summary(traj),
                }
            )
            for s in traj.epochs:
                rows.append(
                    {"run_id": rid, "k": s.k, "grad_norm": s.grad_norm, "beta2": b2, "seed": seed}
                )

    floor = opt["grad_floor"]
    b2_low = grid[0]
    floor_ok = {s: tails[(b2_low, s)] > floor for s in seeds}
    order_ok = {
        s: all(tails[(a, s)] > tails[(b, s)] for a, b in zip(grid, grid[1:]))
        for s in seeds
    }
    completed = all(t.status == STATUS_COMPLETED for t in trajectories.values())
    report["conclusions"] = {
        "floor_value": floor,
        "lowest_beta2": b2_low,
        "floor_ok_per_seed": {str(s): floor_ok[s] for s in seeds},
        "ordering_ok_per_seed": {str(s): order_ok[s] for s in seeds},
        "all_completed": completed,
        "all_ok": completed and all(floor_ok.values()) and all(order_ok.values()),
    }
    report["runs"].sort(key=lambda r: r["run_id"])
    rows.sort(key=lambda r: (r["run_id"], r["k"]))
    return ExperimentResult(report, trajectories, {"grad_norms": rows})


# ---------------------------------------------------------------------------
# Thm2 (both modes share the setup)


def _growth_ratios(traj: Trajectory) -> list[float]:
    """log |x_{j+1}| - log |x_j| along the first coordinate, including the
    final post-step iterate (possibly infinite)."""
    xs = [s.w0[0] for s in traj.epochs]
    if traj.status != STATUS_COMPLETED:
        # completed runs already end with the closing boundary snapshot
        xs.append(traj.final_w[0])
    out = []
    for a, b in zip(xs, xs[1:]):
        la = math.log(abs(a)) if a != 0.0 else -math.inf
        lb = math.log(abs(b)) if b != 0.0 else -math.inf
        out.append(lb - la)
    return out


def run_thm2(config: ExperimentConfig) -> ExperimentResult:
    config.validate()
    opt = config.options
    c = opt["construction"]
    con = theorem2_construction(L0=c["L0"], L1=c["L1"], T=config.T, M=c["M"], f_bar=c["f_bar"])
    obj = lowerbound_objective(c["L0"], c["L1"], con.epsilon)
    w0 = [con.x0, con.y0]
    diverge_mode = config.experiment == "Thm2Divergence"

    report = _base_report(config)
    report["construction"] = {
        "epsilon": con.epsilon,
        "x0": con.x0,
        "y0": con.y0,
        "eta_star": con.eta_star,
        "slow_horizon": con.slow_horizon,
        "axis_gap": con.axis_gap,
        "detail": con.detail,
    }
    trajectories: dict[str, Trajectory] = {}
    rows: list[dict] = []

    total_checks = 0
    all_growth_ok = True
    per_run_counts: dict[str, int] = {}
    floor_ok_all = True
    complete_ok = True

    for mult in sorted(opt["eta_multipliers"]):
        eta1 = mult * con.eta_star
        traj = gd_run(
            obj, w0, eta1, steps=opt["steps"], schedule="Diminishing", record_steps=True
        )
        rid = f"eta_mult={mult!r}"
        trajectories[rid] = traj
        entry = {
            "run_id": rid,
            "eta_mult": mult,
            "eta1": eta1,
            "status": traj.status,
            "summary": trajectory_summary(traj),
        }
        for s in traj.epochs:
            rows.append(
                {
                    "run_id": rid,
                    "k": s.k,
                    "x": s.w0[0],
                    "y": s.w0[1],
                    "grad_norm": s.grad_norm,
                    "eta_mult": mult,
                }
            )
        if diverge_mode:
            ratios = _growth_ratios(traj)
            tol = opt["growth_tol"]
            ok = all(r >= HALF_LOG2 - tol for r in ratios)
            entry["growth_ratios"] = ratios
            entry["growth_ok"] = ok
            entry["growth_checks"] = len(ratios)
            entry["diverged"] = traj.status == STATUS_DIVERGED
            total_checks += len(ratios)
            per_run_counts[rid] = len(ratios)
            all_growth_ok = all_growth_ok and ok and traj.status == STATUS_DIVERGED
        else:
            horizon = con.slow_horizon
            checked = [s.grad_norm for s in traj.epochs if s.k < horizon]
            fl = bool(checked) and min(checked) >= con.epsilon
            entry["floor_ok"] = fl
            entry["checked_before_horizon"] = len(checked)
            entry["min_grad_before_horizon"] = min(checked) if checked else None
            floor_ok_all = floor_ok_all and fl
            if mult in opt.get("complete_multipliers", []):
                done = traj.status == STATUS_COMPLETED
                entry["completed_as_expected"] = done
                complete_ok = complete_ok and done
        report["runs"].append(entry)

    if diverge_mode:
        per_run_ok = all(v >= opt["min_checks_per_run"] for v in per_run_counts.values())
        report["conclusions"] = {
            "total_growth_checks": total_checks,
            "min_checks_total": opt["min_checks_total"],
            "per_run_counts": per_run_counts,
            "all_growth_ok": all_growth_ok,
            "all_ok": all_growth_ok
            and per_run_ok
            and total_checks >= opt["min_checks_total"],
        }
    else:
        horizon_in_window = 100 <= con.slow_horizon < config.T
        report["conclusions"] = {
            "slow_horizon": con.slow_horizon,
            "horizon_in_window": horizon_in_window,
            "floor_ok_all": floor_ok_all,
            "completions_ok": complete_ok,
            "all_ok": floor_ok_all and complete_ok and horizon_in_window,
        }
    report["runs"].sort(key=lambda r: r["run_id"])
    rows.sort(key=lambda r: (r["run_id"], r["k"]))
    return ExperimentResult(report, trajectories, {"iterates": rows})


# ---------------------------------------------------------------------------
# Adam vs GD


def run_comparison(config: ExperimentConfig) -> ExperimentResult:
    config.validate()
    opt = config.options
    c = opt["construction"]
    con = theorem2_construction(L0=c["L0"], L1=c["L1"], T=config.T, M=c["M"], f_bar=c["f_bar"])
    obj = lowerbound_objective(c["L0"], c["L1"], con.epsilon)
    w0 = [con.x0, con.y0]

    report = _base_report(config)
    report["construction"] = {
        "epsilon": con.epsilon,
        "eta_star": con.eta_star,
        "slow_horizon": con.slow_horizon,
        "x0": con.x0,
        "y0": con.y0,
    }
    trajectories: dict[str, Trajectory] = {}
    rows: list[dict] = []

    gd_all_stuck = True
    for mult in sorted(opt["gd_eta_multipliers"]):
        eta1 = mult * con.eta_star
        traj = gd_run(
            obj, w0, eta1, steps=opt["gd_steps"], schedule="Diminishing", record_steps=False
        )
        rid = f"gd-eta_mult={mult!r}"
        trajectories[rid] = traj
        diverged = traj.status == STATUS_DIVERGED
        before = [s.grad_norm for s in traj.epochs if s.k < con.slow_horizon]
        stuck = bool(before) and min(before) >= con.epsilon
        verdict = "diverged" if diverged else ("stuck" if stuck else "progressed")
        gd_all_stuck = gd_all_stuck and verdict in ("diverged", "stuck")
        report["runs"].append(
            {
                "run_id": rid,
                "algo": "gd",
                "eta_mult": mult,
                "eta1": eta1,
                "status": traj.status,
                "verdict": verdict,
                "min_grad_before_horizon": min(before) if before else None,
                "summary": trajectory_summary(traj),
            }
        )
        for s in traj.epochs:
            rows.append({"run_id": rid, "k": s.k, "grad_norm": s.grad_norm})

    a = opt["adam"]
    gamma = gamma_threshold(D1=1.0, n=1, d=2, beta1=a["beta1"])
    params = AdamParams(
        beta1=a["beta1"],
        beta2=a["beta2"],
        eta1=a["eta1"],
        xi=a["xi"],
        schedule=a["schedule"],
        epochs=a["epochs"],
        init_mode=a["init_mode"],
        seed=sorted(config.seeds)[0],
        record_steps=False,
    )
    traj = adam_run(obj, w0, params)
    rid = "adam"
    trajectories[rid] = traj
    crossing = None
    for s in traj.epochs:
        if s.grad_norm < con.epsilon:
            crossing = s.k
            break
    adam_ok = traj.status == STATUS_COMPLETED and crossing is not None
    report["runs"].append(
        {
            "run_id": rid,
            "algo": "adam",
            "status": traj.status,
            "beta2_admissible": a["beta2"] > gamma,
            "gamma": gamma,
            "first_epsilon_crossing": crossing,
            "budget_epochs": a["epochs"],
            "summary": trajectory_summary(traj),
        }
    )
    for s in traj.epochs:
        rows.append({"run_id": rid, "k": s.k, "grad_norm": s.grad_norm})

    report["conclusions"] = {
        "epsilon": con.epsilon,
        "gd_all_stuck_or_diverged": gd_all_stuck,
        "adam_reached_epsilon": adam_ok,
        "adam_crossing_epoch": crossing,
        "beta2_admissible": a["beta2"] > gamma,
        "all_ok": gd_all_stuck and adam_ok and a["beta2"] > gamma,
    }
    report["runs"].sort(key=lambda r: r["run_id"])
    rows.sort(key=lambda r: (r["run_id"], r["k"]))
    return ExperimentResult(report, trajectories, {"grad_norms": rows})


# ---------------------------------------------------------------------------
# lemma suite


def run_lemma_suite(config: ExperimentConfig) -> ExperimentResult:
    config.validate()
    opt = config.options
    obj = from_spec(config.objective)
    report = _base_report(config)
    trajectories: dict[str, Trajectory] = {}

    # envelope fit once: problem-level constants for the constant pipeline
    lo, hi = opt.get("fit_range", (-3.0, 3.0))
    pts = [[lo + (hi - lo) * i / 100.0] * obj.d for i in range(101)]
    fit = affine_noise_fit(obj, pts)
    L0c, L1c = obj.known_L0_L1 if obj.known_L0_L1 else (0.0, 0.0)
    w0 = opt["x0"]
    f_gap = obj.value(w0) - (obj.known_min if obj.known_min is not None else 0.0)
    pc = ProblemConstants(
        L0=L0c, L1=L1c, D0=fit.D0_hat, D1=fit.D1_hat, n=obj.n, d=obj.d, f_gap=f_gap
    )
    report["problem_constants"] = {
        "L0": pc.L0, "L1": pc.L1, "D0": pc.D0, "D1": pc.D1, "f_gap": pc.f_gap,
    }

    combos = sorted(
        itertools.product(
            opt["beta1_grid"], opt["beta2_grid"], opt["eta1_grid"], opt["schedules"]
        )
    )
    total_violations = 0
    max_ratio = 0.0
    for beta1, beta2, eta1, schedule in combos:
        if beta1 * beta1 >= beta2:
            continue
        params = AdamParams(
            beta1=beta1,
            beta2=beta2,
            eta1=eta1,
            xi=opt["xi"],
            schedule=schedule,
            epochs=config.T,
            init_mode=opt["init_mode"],
            seed=sorted(config.seeds)[0],
            record_steps=True,
        )
        traj = adam_run(obj, w0, params)
        tc = compute_constants(beta1, beta2, obj.n, obj.d, eta1, pc, include_gamma=False)
        rep_b = check_bounded_update(traj, tc)
        rep_u = check_u_gap(traj, tc)
        rid = f"b1={beta1!r}-b2={beta2!r}-eta={eta1!r}-{schedule}"
        trajectories[rid] = traj
        total_violations += rep_b.violation_count + rep_u.violation_count
        max_ratio = max(max_ratio, rep_b.max_ratio, rep_u.max_ratio)
        report["runs"].append(
            {
                "run_id": rid,
                "beta1": beta1,
                "beta2": beta2,
                "eta1": eta1,
                "schedule": schedule,
                "status": traj.status,
                "C1": tc.C1,
                "C2": tc.C2,
                "bounded_update": {
                    "checked": rep_b.checked,
                    "violations": rep_b.violation_count,
                    "max_ratio": rep_b.max_ratio,
                },
                "u_gap": {
                    "checked": rep_u.checked,
                    "violations": rep_u.violation_count,
                    "max_ratio": rep_u.max_ratio,
                },
            }
        )

    completed = all(t.status == STATUS_COMPLETED for t in trajectories.values())
    report["conclusions"] = {
        "total_violations": total_violations,
        "max_ratio": max_ratio,
        "runs": len(trajectories),
        "all_completed": completed,
        "all_ok": completed and total_violations == 0,
    }
    report["runs"].sort(key=lambda r: r["run_id"])
    return ExperimentResult(report, trajectories, {})


# ---------------------------------------------------------------------------
# custom


def run_custom(config: ExperimentConfig) -> ExperimentResult:
    config.validate()
    opt = config.options
    if config.objective is None:
        raise ValueError("custom experiment needs an objective spec")
    obj = from_spec(config.objective)
    algo = opt.get("algo", "adam")
    w0 = opt.get("x0", [0.0] * obj.d)
    report = _base_report(config)
    trajectories: dict[str, Trajectory] = {}

    statuses = []
    for seed in sorted(config.seeds):
        if algo == "adam":
            p = opt.get("adam", {})
            params = AdamParams(
                beta1=p.get("beta1", 0.9),
                beta2=p.get("beta2", 0.999),
                eta1=p.get("eta1", 0.1),
                xi=p.get("xi", 1e-8),
                schedule=p.get("schedule", "Diminishing"),
                epochs=config.T,
                init_mode=p.get("init_mode", "PaperTheory"),
                seed=seed,
                record_steps=opt.get("record_steps", False),
            )
            traj = adam_run(obj, w0, params)
        elif algo in ("gd", "clipped_gd"):
            p = opt.get("gd", {})
            traj = gd_run(
                obj,
                w0,
                p.get("eta1", 0.1),
                steps=config.T,
                schedule=p.get("schedule", "Diminishing"),
                clip_threshold=p.get("clip_threshold") if algo == "clipped_gd" else None,
                record_steps=opt.get("record_steps", False),
            )
        else:
            raise ValueError(f"unknown algo {algo!r}")
        rid = f"{algo}-seed={seed}"
        trajectories[rid] = traj
        statuses.append(traj.status)
        report["runs"].append(
            {"run_id": rid, "seed": seed, "status": traj.status, "summary": trajectory_summary(traj)}
        )

    ok = True
    if opt.get("require_completed", True):
        ok = all(s == STATUS_COMPLETED for s in statuses)
    report["conclusions"] = {"statuses": sorted(set(statuses)), "all_ok": ok}
    report["runs"].sort(key=lambda r: r["run_id"])
    return ExperimentResult(report, trajectories, {})


RUNNERS = {
    "Fig3": run_fig3,
    "Thm2Divergence": run_thm2,
    "Thm2Slow": run_thm2,
    "AdamVsGd": run_comparison,
    "LemmaSuite": run_lemma_suite,
    "Custom": run_custom,
}


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    config.validate()
    return RUNNERS[config.experiment](config)


# ---------------------------------------------------------------------------
# emission


def _dump_json(payload: dict, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _dump_table(rows: list[dict], path_base: str, fmt: str) -> str:
    if fmt == "json":
        path = path_base + ".json"
        with open(path, "w") as fh:
            json.dump(rows, fh, sort_keys=True, indent=2)
            fh.write("\n")
        return path
    path = path_base + ".csv"
    if rows:
        cols = sorted(rows[0].keys())
        lines = [",".join(cols)]
        for r in rows:
            lines.append(",".join(_fmt(r[c]) if isinstance(r[c], float) else str(r[c]) for c in cols))
    else:
        lines = [""]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def emit(result: ExperimentResult, out_root: str, fmt: Optional[str] = None) -> list[str]:
    """Write report.json, per-run trajectory.csv + summary.json, and plot
    tables under <out_root>/<experiment>/. Returns the written paths.
    Bytes depend only on the result (no clocks, no environment noise beyond
    the version echo)."""
    fmt = fmt or result.report["config"].get("format", "csv")
    exp_dir = os.path.join(out_root, result.report["experiment"])
    os.makedirs(exp_dir, exist_ok=True)
    written: list[str] = []

    report_path = os.path.join(exp_dir, "report.json")
    _dump_json(result.report, report_path)
    written.append(report_path)

    for rid in sorted(result.trajectories):
        traj = result.trajectories[rid]
        run_dir = os.path.join(exp_dir, rid)
        os.makedirs(run_dir, exist_ok=True)
        tpath = os.path.join(run_dir, "trajectory.csv")
        export_trajectory_csv(traj, tpath)
        written.append(tpath)
        spath = os.path.join(run_dir, "summary.json")
        _dump_json(trajectory_summary(traj), spath)
        written.append(spath)

    for name in sorted(result.plot_tables):
        rows = result.plot_tables[name]
        written.append(_dump_table(rows, os.path.join(exp_dir, name), fmt))
    return written
