"""Render figures from sweep and spread CSV outputs.

Figures follow the usual convention for these experiments: solid lines for
analytic model curves, markers joined by dashed lines for simulation
results, log-scaled server-count axis.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

POLICY_STYLE = {
    "RR": dict(color="tab:red", marker="o"),
    "JIQ": dict(color="tab:green", marker="s"),
    "LWL": dict(color="tab:blue", marker="^"),
}


def _style(policy: str) -> dict:
    return POLICY_STYLE.get(policy, dict(color="tab:gray", marker="x"))


def _read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _sweep_series(rows: list[dict], column: str):
    """Per-policy (n -> mean over seeds) for one numeric column."""
    acc: dict[str, dict[int, list[float]]] = defaultdict(lambda: defaultdict(list))
    for row in rows:
        if row.get(column, "") == "":
            continue
        acc[row["policy"]][int(row["n"])].append(float(row[column]))
    out = {}
    for policy, by_n in acc.items():
        ns = sorted(by_n)
        out[policy] = (ns, [float(np.mean(by_n[n])) for n in ns])
    return out

def render_sweep_figures(sweep_csv, out_dir=None) -> list[Path]:
    """Write response-time, slowdown, and idle-probability figures for a sweep."""
    sweep_csv = Path(sweep_csv)
    out_dir = Path(out_dir) if out_dir else sweep_csv.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = _read_csv(sweep_csv)
    if not rows:
        raise ValueError(f"no rows in {sweep_csv}")
    stem = sweep_csv.stem
    written = []

    sim = _sweep_series(rows, "mean_response")
    model = _sweep_series(rows, "model_mean_response")
    fig, ax = plt.subplots(figsize=(6, 4))
    for policy, (ns, ys) in sorted(sim.items()):
        st = _style(policy)
        ax.plot(ns, ys, linestyle="--", label=f"{policy} (sim)", **st)
        if policy in model:
            mns, mys = model[policy]
            ax.plot(mns, mys, linestyle="-", color=st["color"],
                    label=f"{policy} (model)")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("number of servers n")
    ax.set_ylabel("mean job response time [s]")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    path = out_dir / f"{stem}_response.png"
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    for column, ylabel, suffix, logy in (
        ("mean_slowdown", "mean job slowdown", "slowdown", True),
        ("p_idle", "P(at least one idle server at arrival)", "pidle", False),
    ):
        series = _sweep_series(rows, column)
        fig, ax = plt.subplots(figsize=(6, 4))
        for policy, (ns, ys) in sorted(series.items()):
            ax.plot(ns, ys, linestyle="--", label=policy, **_style(policy))
        ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel("number of servers n")
        ax.set_ylabel(ylabel)
        ax.legend()
        ax.grid(True, which="both", alpha=0.3)
        path = out_dir / f"{stem}_{suffix}.png"
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        written.append(path)
    return written


def render_spread_figure(spread_csv, out_dir=None) -> list[Path]:
    """Box plots of per-day mean response per server count, one panel per policy."""
    spread_csv = Path(spread_csv)
    out_dir = Path(out_dir) if out_dir else spread_csv.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = _read_csv(spread_csv)
    if not rows:
        raise ValueError(f"no rows in {spread_csv}")
    policies = sorted({r["policy"] for r in rows})
    fig, axes = plt.subplots(1, len(policies), figsize=(4 * len(policies), 4),
                             squeeze=False, sharey=True)
    for ax, policy in zip(axes[0], policies):
        sub = sorted((int(r["n"]), r) for r in rows if r["policy"] == policy)
        boxes = [
            {"med": float(r["median"]), "q1": float(r["q1"]), "q3": float(r["q3"]),
             "whislo": float(r["min"]), "whishi": float(r["max"]),
             "label": str(n), "fliers": []}
            for n, r in sub
        ]
        ax.bxp(boxes, showfliers=False,
               medianprops=dict(color="gold", linewidth=2))
        ax.set_yscale("log")
        ax.set_title(policy)
        ax.set_xlabel("number of servers n")
        ax.grid(True, axis="y", alpha=0.3)
    axes[0][0].set_ylabel("mean job response time [s]")
    path = out_dir / f"{spread_csv.stem}_boxplot.png"
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return [path]
