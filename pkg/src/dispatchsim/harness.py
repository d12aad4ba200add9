"""Experiment orchestration: fixed-budget sweeps, day-by-day spread,
two-stage tuning, and policy comparison reports.

Every sweep keeps the cluster budget n*mu pinned at lam*E[Y]/rho0, with the
moments estimated from the trace actually offered (after transforms), so the
realized average load matches the target utilization.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Union

import numpy as np

from . import workload as wl
from .metrics import BoxplotStats, boxplot_stats, summarize
from .models import ClusterParams, PhiVariant, mean_response
from .sim import ClusterSpec, SingleStage, TwoStage, run_sim
from .workload import WorkloadTrace, estimate_moments

BUDGET_RTOL = 1e-9


class UnstableConfigError(ValueError):
    """A configuration whose target utilization is not in (0, 1)."""


def default_n_list(low: int = 2, high: int = 1000, points: int = 12) -> tuple[int, ...]:
    """Log-spaced server counts, deduplicated after rounding."""
    values = np.unique(np.rint(np.geomspace(low, high, points)).astype(int))
    return tuple(int(v) for v in values)


# -- transforms --------------------------------------------------------------

_TRANSFORM_OPS = {"shuffle_iat", "shuffle_cpu", "strip_outliers", "job_level_view"}


def apply_transforms(trace: WorkloadTrace, steps, seed: int = 0) -> WorkloadTrace:
    """Apply an ordered list of transform steps, each a dict with an "op" key.

    Stochastic steps draw their seeds deterministically from the given seed
    and their position in the list.
    """
    steps = list(steps)
    step_seeds = np.random.SeedSequence(seed).generate_state(max(len(steps), 1))
    for i, step in enumerate(steps):
        step = dict(step)
        op = step.pop("op", None)
        s = int(step.pop("seed", step_seeds[i]))
        if op == "shuffle_iat":
            _reject_keys(op, step)
            trace = wl.shuffle_iat(trace, seed=s)
        elif op == "shuffle_cpu":
            level = step.pop("level", "task")
            _reject_keys(op, step)
            trace = wl.shuffle_cpu(trace, seed=s, level=level)
        elif op == "strip_outliers":
            q = float(step.pop("q", 0.999))
            _reject_keys(op, step)
            trace = wl.strip_outliers(trace, q=q)
        elif op == "job_level_view":
            _reject_keys(op, step)
            trace = wl.job_level_view(trace)
        else:
            raise ValueError(f"unknown transform op {op!r}")
    return trace


def _reject_keys(op: str, leftovers: dict) -> None:
    if leftovers:
        raise ValueError(f"transform {op!r}: unknown keys {sorted(leftovers)}")


# -- sweep --------------------------------------------------------------------

@dataclass(frozen=True)
class SweepPlan:
    n_list: tuple[int, ...] = field(default_factory=default_n_list)
    rho0: float = 0.8
    policies: tuple[str, ...] = ("RR", "JIQ", "LWL")
    granularity: str = "job"
    variant: PhiVariant = "canonical"
    seeds: tuple[int, ...] = (0,)
    transforms: tuple = ()
    transform_seed: int = 0
    include_model: bool = True

    def __post_init__(self):
        if not self.n_list or min(self.n_list) < 1:
            raise ValueError("n_list must be non-empty with values >= 1")
        if not self.seeds:
            raise ValueError("need at least one seed")
        if not self.policies:
            raise ValueError("need at least one policy")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_list"] = list(self.n_list)
        d["policies"] = list(self.policies)
        d["seeds"] = list(self.seeds)
        d["transforms"] = [dict(t) for t in self.transforms]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SweepPlan":
        d = dict(d)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown sweep plan keys {sorted(unknown)}")
        for key in ("n_list", "policies", "seeds", "transforms"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


@dataclass(frozen=True)
class SweepRow:
    n: int
    policy: str
    granularity: str
    seed: int
    mean_response: float
    mean_slowdown: float
    p_idle: float
    model_mean_response: float | None
    phi_variant: str
    theta: float | None
    n1: int | None
    n2: int | None
    realized_util: float


SWEEP_CSV_HEADER = ("n,policy,granularity,seed,mean_response,mean_slowdown,"
                    "p_idle,model_mean_response,phi_variant,theta,n1,n2,realized_util")


@dataclass
class SweepTable:
    rows: list[SweepRow]
    metadata: dict

    def to_csv(self, dest: Union[str, Path]) -> None:
        lines = [SWEEP_CSV_HEADER]
        for r in self.rows:
            lines.append(",".join([
                str(r.n), r.policy, r.granularity, str(r.seed),
                repr(r.mean_response), repr(r.mean_slowdown), repr(r.p_idle),
                "" if r.model_mean_response is None else repr(r.model_mean_response),
                r.phi_variant,
                "" if r.theta is None else repr(r.theta),
                "" if r.n1 is None else str(r.n1),
                "" if r.n2 is None else str(r.n2),
                repr(r.realized_util),
            ]))
        Path(dest).write_text("\n".join(lines) + "\n")

    def write_metadata(self, dest: Union[str, Path]) -> None:
        Path(dest).write_text(json.dumps(self.metadata, indent=2, sort_keys=True) + "\n")


def _plan_hash(plan_dict: dict) -> str:
    return hashlib.sha256(
        json.dumps(plan_dict, sort_keys=True).encode()).hexdigest()[:16]


def _simulate_point(args):
    trace, spec = args
    return summarize(run_sim(trace, spec))


def _run_points(trace, specs, workers: int):
    if workers <= 1:
        return [_simulate_point((trace, s)) for s in specs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_simulate_point, ((trace, s) for s in specs)))


def run_sweep(trace: WorkloadTrace, plan: SweepPlan, workers: int = 1) -> SweepTable:
    """Simulate every (n, policy, seed) point of the plan at fixed budget.

    Transforms are applied once up front; moments are re-estimated from the
    transformed trace and drive both server sizing and the attached model
    predictions. Results come back in deterministic plan order.
    """
    if not 0 < plan.rho0 < 1:
        raise UnstableConfigError(f"target utilization {plan.rho0} not in (0, 1)")
    transformed = apply_transforms(trace, plan.transforms, plan.transform_seed)
    moments = estimate_moments(transformed)
    budget = moments.lam * moments.mean_y / plan.rho0   # n*mu, constant

    specs, keys = [], []
    for n in plan.n_list:
        mu = budget / n
        for policy in plan.policies:
            for seed in plan.seeds:
                specs.append(ClusterSpec(SingleStage(n), policy, mu,
                                         plan.granularity, seed))
                keys.append((n, policy, seed))
    summaries = _run_points(transformed, specs, workers)

    model: dict[tuple[int, str], float] = {}
    if plan.include_model and plan.granularity == "job":
        for n in plan.n_list:
            params = ClusterParams.from_moments(moments, plan.rho0, n)
            for policy in plan.policies:
                model[(n, policy)] = mean_response(params, policy, plan.variant)

    rows = [
        SweepRow(
            n=n, policy=policy, granularity=plan.granularity, seed=seed,
            mean_response=s.mean_response, mean_slowdown=s.mean_slowdown,
            p_idle=s.p_idle_at_arrival,
            model_mean_response=model.get((n, policy)),
            phi_variant=plan.variant, theta=None, n1=None, n2=None,
            realized_util=s.realized_utilization,
        )
        for (n, policy, seed), s in zip(keys, summaries)
    ]
    plan_dict = plan.to_dict()
    metadata = {
        "trace_label": transformed.label,
        "transforms": plan_dict["transforms"],
        "moments": asdict(moments),
        "budget_n_mu": budget,
        "plan": plan_dict,
        "plan_hash": _plan_hash(plan_dict),
    }
    return SweepTable(rows=rows, metadata=metadata)


# -- day-by-day spread ----------------------------------------------------------

@dataclass
class SpreadResult:
    stats: dict[tuple[str, int], BoxplotStats]   # (policy, n) -> spread over days
    n_days: int
    metadata: dict

    def to_csv(self, dest: Union[str, Path]) -> None:
        lines = ["policy,n,median,q1,q3,min,max,n_days"]
        for (policy, n), b in sorted(self.stats.items()):
            lines.append(",".join([policy, str(n), repr(b.median), repr(b.q1),
                                   repr(b.q3), repr(b.min), repr(b.max),
                                   str(self.n_days)]))
        Path(dest).write_text("\n".join(lines) + "\n")


def per_day_spread(trace: WorkloadTrace, plan: SweepPlan, workers: int = 1) -> SpreadResult:
    """Run the sweep once per day window and box-plot per-day mean responses.

    Empty day windows are skipped with a warning; per-day values average the
    plan's seeds.
    """
    span = float(trace.arrivals[-1])
    n_windows = int(np.ceil(span / wl.DAY_SECONDS)) or 1
    if n_windows < 2:
        raise ValueError("trace must span at least 2 day windows")
    per_day: dict[tuple[str, int], list[float]] = {}
    n_days = 0
    for d in range(n_windows):
        try:
            day = wl.day_window(trace, d)
        except wl.TraceError:
            warnings.warn(f"day {d}: empty window, skipped")
            continue
        n_days += 1
        table = run_sweep(day, plan, workers=workers)
        acc: dict[tuple[str, int], list[float]] = {}
        for r in table.rows:
            acc.setdefault((r.policy, r.n), []).append(r.mean_response)
        for key, values in acc.items():
            per_day.setdefault(key, []).append(float(np.mean(values)))
    if n_days == 0:
        raise wl.TraceError("all day windows are empty")
    stats = {key: boxplot_stats(values) for key, values in per_day.items()}
    return SpreadResult(stats=stats, n_days=n_days,
                        metadata={"trace_label": trace.label, "n_days": n_days,
                                  "plan": plan.to_dict()})


# -- two-stage tuning -------------------------------------------------------------

DEFAULT_THETA_QUANTILES = (0.10, 0.20, 0.30, 0.40, 0.50, 0.60, 0.70, 0.80, 0.90, 0.99)


def default_n1_grid(n_total: int) -> tuple[int, ...]:
    raw = [int(np.ceil(n_total / 10)), int(np.ceil(n_total / 4)),
           int(np.ceil(n_total / 2)), int(np.ceil(3 * n_total / 4)), n_total - 1]
    return tuple(sorted({max(1, min(v, n_total - 1)) for v in raw}))


@dataclass(frozen=True)
class TunePlan:
    n_total: int
    rho0: float = 0.8
    theta_quantiles: tuple[float, ...] = DEFAULT_THETA_QUANTILES
    n1_grid: tuple[int, ...] = ()
    seeds: tuple[int, ...] = (0,)

    def __post_init__(self):
        if self.n_total < 2:
            raise ValueError("two-stage tuning needs n_total >= 2")
        if not self.theta_quantiles or not self.seeds:
            raise ValueError("theta_quantiles and seeds must be non-empty")
        if self.n1_grid and not all(1 <= v < self.n_total for v in self.n1_grid):
            raise ValueError("n1 values must be in [1, n_total)")

    def resolved_n1_grid(self) -> tuple[int, ...]:
        return self.n1_grid or default_n1_grid(self.n_total)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["theta_quantiles"] = list(self.theta_quantiles)
        d["n1_grid"] = list(self.n1_grid)
        d["seeds"] = list(self.seeds)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TunePlan":
        d = dict(d)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown tune plan keys {sorted(unknown)}")
        for key in ("theta_quantiles", "n1_grid", "seeds"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


@dataclass
class TuneResult:
    best_n1: int
    best_theta: float
    best_theta_quantile: float
    best_mean_response: float
    table: SweepTable


def tune_two_stage(trace: WorkloadTrace, plan: TunePlan, workers: int = 1) -> TuneResult:
    """Grid-search (n1, theta) for the two-stage round-robin cluster.

    Thresholds come from task-demand quantiles of the trace; the winner
    minimizes mean job response averaged over seeds, ties broken by smaller
    theta then smaller n1.
    """
    if not 0 < plan.rho0 < 1:
        raise UnstableConfigError(f"target utilization {plan.rho0} not in (0, 1)")
    moments = estimate_moments(trace)
    mu = moments.lam * moments.mean_y / (plan.n_total * plan.rho0)
    n1_grid = plan.resolved_n1_grid()

    specs, keys = [], []
    for q in plan.theta_quantiles:
        theta = wl.quantile_task_cpu(trace, q)
        for n1 in n1_grid:
            topo = TwoStage(n1=n1, n2=plan.n_total - n1, theta=theta)
            for seed in plan.seeds:
                specs.append(ClusterSpec(topo, "RR", mu, "task", seed))
                keys.append((q, theta, n1, seed))
    summaries = _run_points(trace, specs, workers)

    rows = []
    grid_means: dict[tuple[float, float, int], list[float]] = {}
    for (q, theta, n1, seed), s in zip(keys, summaries):
        rows.append(SweepRow(
            n=plan.n_total, policy="RR", granularity="task", seed=seed,
            mean_response=s.mean_response, mean_slowdown=s.mean_slowdown,
            p_idle=s.p_idle_at_arrival, model_mean_response=None,
            phi_variant="canonical", theta=theta, n1=n1, n2=plan.n_total - n1,
            realized_util=s.realized_utilization,
        ))
        grid_means.setdefault((q, theta, n1), []).append(s.mean_response)

    best_key, best_value = None, None
    for (q, theta, n1), values in grid_means.items():
        value = float(np.mean(values))
        cand = (value, theta, n1)
        if best_value is None or cand < best_value:
            best_value = cand
            best_key = (q, theta, n1)
    q, theta, n1 = best_key
    plan_dict = plan.to_dict()
    metadata = {
        "trace_label": trace.label,
        "moments": asdict(moments),
        "plan": plan_dict,
        "plan_hash": _plan_hash(plan_dict),
        "best": {"n1": n1, "n2": plan.n_total - n1, "theta": theta,
                 "theta_quantile": q, "mean_response": best_value[0]},
    }
    return TuneResult(best_n1=n1, best_theta=theta, best_theta_quantile=q,
                      best_mean_response=best_value[0],
                      table=SweepTable(rows=rows, metadata=metadata))


# -- policy comparison --------------------------------------------------------------

@dataclass
class PolicyComparison:
    ranking_by_n: dict[int, list[str]]          # policies best-first at each n
    best_n: dict[str, int]                      # minimizing n per policy
    crossovers: list[tuple[str, str, int, int]]  # (a, b, n_before, n_after)

    def render(self) -> str:
        lines = ["policy ranking by n (best first):"]
        for n in sorted(self.ranking_by_n):
            lines.append(f"  n={n}: {' < '.join(self.ranking_by_n[n])}")
        lines.append("minimizing n per policy:")
        for policy in sorted(self.best_n):
            lines.append(f"  {policy}: n={self.best_n[policy]}")
        if self.crossovers:
            lines.append("ranking crossovers:")
            for a, b, n0, n1 in self.crossovers:
                lines.append(f"  {a} overtakes {b} between n={n0} and n={n1}")
        else:
            lines.append("no ranking crossovers on the common grid")
        return "\n".join(lines)


def compare_policies(table: SweepTable) -> PolicyComparison:
    """Descriptive comparison of policies over the common n grid of a sweep."""
    means: dict[tuple[str, int], list[float]] = {}
    for r in table.rows:
        means.setdefault((r.policy, r.n), []).append(r.mean_response)
    policies = sorted({p for p, _ in means})
    if len(policies) < 2:
        raise ValueError("nothing to compare: table covers fewer than 2 policies")
    grids = [{n for p, n in means if p == policy} for policy in policies]
    common = sorted(set.intersection(*grids))
    if not common:
        raise ValueError("policies share no common n grid")

    value = {(p, n): float(np.mean(v)) for (p, n), v in means.items()}
    ranking = {n: sorted(policies, key=lambda p: value[(p, n)]) for n in common}
    best_n = {p: min(common, key=lambda n: value[(p, n)]) for p in policies}
    crossovers = []
    for i in range(len(common) - 1):
        n0, n1 = common[i], common[i + 1]
        for a_idx in range(len(policies)):
            for b_idx in range(a_idx + 1, len(policies)):
                a, b = policies[a_idx], policies[b_idx]
                before = value[(a, n0)] - value[(b, n0)]
                after = value[(a, n1)] - value[(b, n1)]
                if before > 0 >= after:
                    crossovers.append((a, b, n0, n1))
                elif before <= 0 < after:
                    crossovers.append((b, a, n0, n1))
    return PolicyComparison(ranking_by_n=ranking, best_n=best_n, crossovers=crossovers)
