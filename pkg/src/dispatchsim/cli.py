"""Command-line front end.

Commands: analyze, transform, synth, simulate, model, sweep, spread, tune,
report. Experiment commands are driven by YAML config files with strict
schemas; unknown keys are rejected. Exit codes: 0 success, 2 config/usage
error, 3 data error, 4 unstable configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from . import harness, models, report, sim, workload as wl
from .harness import SweepPlan, TunePlan, UnstableConfigError
from .metrics import summarize

SEED_ENV_VAR = "DISPATCHSIM_SEED"


class UsageError(ValueError):
    pass


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV_VAR, "0"))


def _load_config(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        cfg = yaml.safe_load(fh)
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path} must be a mapping")
    return cfg


def _pop_keys(cfg: dict, context: str, allowed: set[str]) -> None:
    unknown = set(cfg) - allowed
    if unknown:
        raise UsageError(f"{context}: unknown keys {sorted(unknown)}")


def _load_trace(path) -> wl.WorkloadTrace:
    return wl.parse_trace(path)


# -- analyze -------------------------------------------------------------------

def cmd_analyze(args) -> int:
    trace = _load_trace(args.trace)
    if args.day is not None:
        trace = wl.day_window(trace, args.day)
    moments = wl.estimate_moments(trace)
    y = np.sort(trace.total_demands)[::-1]
    top_k = max(1, trace.n_jobs // 1000)
    top_share = float(y[:top_k].sum() / y.sum())
    single_frac = float(np.mean(trace.task_counts == 1))
    lines = [
        f"trace: {trace.label}",
        f"jobs: {trace.n_jobs}",
        f"tasks: {trace.n_tasks}",
        f"single_task_fraction: {single_frac:.4f}",
        f"lambda_jobs_per_s: {moments.lam:.6g}",
        f"iat_cov: {moments.c_a:.6g}",
        f"mean_job_cpu_s: {moments.mean_y:.6g}",
        f"job_cpu_cov: {moments.c_y:.6g}",
        f"top_0.1pct_load_share: {top_share:.4f}",
    ]
    for q in (0.99, 0.999, 0.9999):
        lines.append(f"job_cpu_quantile_{q}: {wl.nearest_rank(trace.total_demands, q):.6g}")
    print("\n".join(lines))
    return 0


# -- transform -------------------------------------------------------------------

class _TransformFlag(argparse.Action):
    """Append (op, value) preserving the order flags appear on the command line."""

    def __call__(self, parser, namespace, values, option_string=None):
        namespace.transforms.append((self.dest, values))


def cmd_transform(args) -> int:
    steps = []
    job_level = False
    for op, value in args.transforms:
        if op == "job_level":
            steps.append({"op": "job_level_view"})
            job_level = True
        elif op == "shuffle_iat":
            steps.append({"op": "shuffle_iat"})
        elif op == "shuffle_cpu":
            if value == "job" and not job_level:
                raise UsageError("--shuffle-cpu job requires --job-level first")
            steps.append({"op": "shuffle_cpu", "level": value})
        elif op == "strip_outliers":
            steps.append({"op": "strip_outliers", "q": value})
    trace = _load_trace(args.trace)
    out = harness.apply_transforms(trace, steps, seed=args.seed)
    wl.write_trace(out, args.output)
    print(f"{trace.n_jobs} jobs in, {out.n_jobs} jobs out -> {args.output} "
          f"[{out.label}]")
    return 0


# -- synth -------------------------------------------------------------------

def cmd_synth(args) -> int:
    if args.config:
        spec = wl.synthspec_from_dict(_load_config(args.config))
    else:
        if args.preset is None or args.duration is None:
            raise UsageError("synth needs either --config or --preset with --duration")
        spec = wl.preset_spec(args.preset, duration=args.duration, seed=args.seed)
    trace = wl.generate_synthetic(spec)
    wl.write_trace(trace, args.output)
    print(f"{trace.n_jobs} jobs, {trace.n_tasks} tasks -> {args.output} [{trace.label}]")
    return 0


# -- simulate -------------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    _pop_keys(cfg, "simulate config",
              {"trace", "policy", "granularity", "n", "two_stage", "rho0", "mu",
               "seed", "transforms", "out", "summary_out"})
    if "trace" not in cfg or "out" not in cfg:
        raise UsageError("simulate config needs trace and out")
    trace = _load_trace(cfg["trace"])
    trace = harness.apply_transforms(trace, cfg.get("transforms", ()),
                                     seed=int(cfg.get("seed", _default_seed())))

    if "two_stage" in cfg:
        ts = dict(cfg["two_stage"])
        _pop_keys(ts, "two_stage", {"n1", "n2", "theta", "theta_quantile"})
        theta = (wl.quantile_task_cpu(trace, float(ts["theta_quantile"]))
                 if "theta_quantile" in ts else float(ts["theta"]))
        topo = sim.TwoStage(n1=int(ts["n1"]), n2=int(ts["n2"]), theta=theta)
    elif "n" in cfg:
        topo = sim.SingleStage(int(cfg["n"]))
    else:
        raise UsageError("simulate config needs n or a two_stage block")

    if "mu" in cfg:
        mu = float(cfg["mu"])
    else:
        rho0 = float(cfg.get("rho0", 0.8))
        if not 0 < rho0 < 1:
            raise UnstableConfigError(f"target utilization {rho0} not in (0, 1)")
        m = wl.estimate_moments(trace)
        n = topo.n if isinstance(topo, sim.SingleStage) else topo.n1 + topo.n2
        mu = m.lam * m.mean_y / (n * rho0)

    spec = sim.ClusterSpec(
        topology=topo,
        policy=cfg.get("policy", "RR"),
        mu=mu,
        granularity=cfg.get("granularity", "job"),
        seed=int(cfg.get("seed", _default_seed())),
    )
    output = sim.run_sim(trace, spec)
    output.to_csv(cfg["out"])
    summary_path = cfg.get("summary_out", str(Path(cfg["out"]).with_suffix(".json")))
    output.write_summary(summary_path)
    s = summarize(output)
    print(f"mean_response: {s.mean_response:.6g}")
    print(f"mean_slowdown: {s.mean_slowdown:.6g}")
    print(f"p_idle_at_arrival: {s.p_idle_at_arrival:.6g}")
    print(f"records -> {cfg['out']}, summary -> {summary_path}")
    return 0


# -- model -------------------------------------------------------------------

MODEL_CSV_HEADER = "n,policy,model_mean_response,phi_variant"


def cmd_model(args) -> int:
    if args.config:
        cfg = _load_config(args.config)
        _pop_keys(cfg, "model config",
                  {"lam", "c_a", "mean_y", "c_y", "rho0", "n_list", "policies",
                   "variant", "out"})
    else:
        cfg = {}
    lam = float(cfg.get("lam", args.lam if args.lam is not None else 0))
    c_a = float(cfg.get("c_a", args.c_a))
    mean_y = float(cfg.get("mean_y", args.mean_y if args.mean_y is not None else 0))
    c_y = float(cfg.get("c_y", args.c_y))
    rho0 = float(cfg.get("rho0", args.rho0))
    n_list = cfg.get("n_list") or args.n_list
    policies = cfg.get("policies") or args.policies
    variant = cfg.get("variant", args.variant)
    out = cfg.get("out", args.out)
    if lam <= 0 or mean_y <= 0:
        raise UsageError("model needs positive lam and mean_y "
                         "(inline flags or config keys)")
    if not n_list:
        raise UsageError("model needs a non-empty n_list")
    if not 0 < rho0 < 1:
        raise UnstableConfigError(f"target utilization {rho0} not in (0, 1)")

    moments = wl.WorkloadMoments(lam=lam, c_a=c_a, mean_y=mean_y, c_y=c_y,
                                 n_jobs=0, n_tasks=0)
    lines = [MODEL_CSV_HEADER]
    for policy in policies:
        for n, er in models.model_curve(moments, rho0, list(n_list), policy, variant):
            lines.append(f"{n},{policy},{er!r},{variant}")
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text)
        print(f"model curve -> {out}")
    else:
        sys.stdout.write(text)
    return 0


# -- sweep / spread / tune -----------------------------------------------------

def _plan_from_config(cfg: dict) -> SweepPlan:
    keys = set(SweepPlan.__dataclass_fields__)
    return SweepPlan.from_dict({k: v for k, v in cfg.items() if k in keys})


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    allowed = set(SweepPlan.__dataclass_fields__) | {"trace", "out", "metadata_out"}
    _pop_keys(cfg, "sweep config", allowed)
    if "trace" not in cfg or "out" not in cfg:
        raise UsageError("sweep config needs trace and out")
    trace = _load_trace(cfg["trace"])
    table = harness.run_sweep(trace, _plan_from_config(cfg), workers=args.jobs)
    table.to_csv(cfg["out"])
    meta = cfg.get("metadata_out", str(Path(cfg["out"]).with_suffix(".meta.json")))
    table.write_metadata(meta)
    print(f"{len(table.rows)} rows -> {cfg['out']}, metadata -> {meta}")
    return 0


def cmd_spread(args) -> int:
    cfg = _load_config(args.config)
    allowed = set(SweepPlan.__dataclass_fields__) | {"trace", "out"}
    _pop_keys(cfg, "spread config", allowed)
    if "trace" not in cfg or "out" not in cfg:
        raise UsageError("spread config needs trace and out")
    trace = _load_trace(cfg["trace"])
    result = harness.per_day_spread(trace, _plan_from_config(cfg), workers=args.jobs)
    result.to_csv(cfg["out"])
    print(f"{result.n_days} day windows -> {cfg['out']}")
    return 0


def cmd_tune(args) -> int:
    cfg = _load_config(args.config)
    allowed = set(TunePlan.__dataclass_fields__) | {"trace", "out", "best_out"}
    _pop_keys(cfg, "tune config", allowed)
    if "trace" not in cfg or "out" not in cfg:
        raise UsageError("tune config needs trace and out")
    trace = _load_trace(cfg["trace"])
    plan = TunePlan.from_dict(
        {k: v for k, v in cfg.items() if k in TunePlan.__dataclass_fields__})
    result = harness.tune_two_stage(trace, plan, workers=args.jobs)
    result.table.to_csv(cfg["out"])
    best_path = cfg.get("best_out", str(Path(cfg["out"]).with_suffix(".best.json")))
    Path(best_path).write_text(
        json.dumps(result.table.metadata["best"], indent=2, sort_keys=True) + "\n")
    print(f"best: n1={result.best_n1}, n2={plan.n_total - result.best_n1}, "
          f"theta={result.best_theta:.6g} "
          f"(quantile {result.best_theta_quantile}), "
          f"mean_response={result.best_mean_response:.6g}")
    print(f"grid -> {cfg['out']}, best -> {best_path}")
    return 0


# -- report -------------------------------------------------------------------

def cmd_report(args) -> int:
    if not args.sweep and not args.spread:
        raise UsageError("report needs --sweep and/or --spread CSV inputs")
    written = []
    for path in args.sweep or ():
        written += report.render_sweep_figures(path, args.out_dir)
    for path in args.spread or ():
        written += report.render_spread_figure(path, args.out_dir)
    for p in written:
        print(f"figure -> {p}")
    return 0


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dispatchsim",
        description="Trace-driven simulation and analytic models for "
                    "dispatching policies over FCFS server clusters.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="print dataset statistics for a trace")
    p.add_argument("trace")
    p.add_argument("--day", type=int, default=None,
                   help="restrict to day window [d*86400, (d+1)*86400)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("transform", help="apply trace transforms in flag order")
    p.add_argument("trace")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.set_defaults(transforms=[])
    p.add_argument("--job-level", dest="job_level", action=_TransformFlag, nargs=0,
                   help="collapse each job to a single task of its total demand")
    p.add_argument("--shuffle-iat", dest="shuffle_iat", action=_TransformFlag,
                   nargs=0, help="permute inter-arrival times")
    p.add_argument("--shuffle-cpu", dest="shuffle_cpu", action=_TransformFlag,
                   choices=("job", "task"), help="permute CPU demands")
    p.add_argument("--strip-outliers", dest="strip_outliers", action=_TransformFlag,
                   type=float, metavar="Q",
                   help="drop jobs above the Q nearest-rank demand quantile")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("synth", help="generate a synthetic trace")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--config", help="YAML synthesis spec")
    p.add_argument("--preset", choices=("mm1", "calibrated", "monster"))
    p.add_argument("--duration", type=float, help="trace horizon in seconds")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("simulate", help="run one simulation from a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("model", help="evaluate analytic mean-response curves")
    p.add_argument("--config")
    p.add_argument("--lam", type=float, help="job arrival rate")
    p.add_argument("--c-a", type=float, default=1.0)
    p.add_argument("--mean-y", type=float, help="mean job demand")
    p.add_argument("--c-y", type=float, default=1.0)
    p.add_argument("--rho0", type=float, default=0.8)
    p.add_argument("--n-list", type=lambda s: [int(v) for v in s.split(",")],
                   default=None, metavar="N1,N2,...")
    p.add_argument("--policies", type=lambda s: s.split(","), default=None,
                   metavar="RR,JIQ,LWL")
    p.add_argument("--variant", choices=("canonical", "as_written"),
                   default="canonical")
    p.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_model)

    for name, fn, help_text in (
        ("sweep", cmd_sweep, "run a fixed-budget n-sweep from a config file"),
        ("spread", cmd_spread, "per-day sweep spread from a config file"),
        ("tune", cmd_tune, "grid-search the two-stage (n1, theta) parameters"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True)
        p.add_argument("--jobs", type=int, default=1,
                       help="max concurrent simulation workers")
        p.set_defaults(func=fn)

    p = sub.add_parser("report", help="render figures from result CSVs")
    p.add_argument("--sweep", action="append", metavar="CSV")
    p.add_argument("--spread", action="append", metavar="CSV")
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnstableConfigError as exc:
        print(f"error: unstable configuration: {exc}", file=sys.stderr)
        return 4
    except (wl.TraceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, TypeError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
