"""Aggregation of per-job simulation outcomes into summary statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sim import SimOutput
from .workload import nearest_rank

RESPONSE_PERCENTILES = (0.5, 0.9, 0.99)


@dataclass(frozen=True)
class Summary:
    mean_response: float
    mean_slowdown: float
    p_idle_at_arrival: float
    response_percentiles: dict[float, float]
    n_jobs: int
    realized_utilization: float                  # over all servers
    realized_utilization_per_stage: tuple[float, ...]


@dataclass(frozen=True)
class BoxplotStats:
    median: float
    q1: float
    q3: float
    min: float
    max: float

    def __post_init__(self):
        if not self.min <= self.q1 <= self.median <= self.q3 <= self.max:
            raise ValueError("boxplot quartiles out of order")


def summarize(output: SimOutput) -> Summary:
    """Arithmetic means over all jobs plus idle probability and realized load."""
    if len(output.job_ids) == 0:
        raise ValueError("no job records to summarize")
    resp = output.responses
    spec = output.spec
    end = output.sim_end_time
    stage_n = ((spec.topology.n,) if not hasattr(spec.topology, "n1")
               else (spec.topology.n1, spec.topology.n2))
    per_stage = tuple(
        busy / (n * end) if end > 0 else 0.0
        for busy, n in zip(output.busy_times, stage_n)
    )
    total_busy = sum(output.busy_times)
    return Summary(
        mean_response=float(np.mean(resp)),
        mean_slowdown=float(np.mean(output.slowdowns)),
        p_idle_at_arrival=float(np.mean(output.arrival_idle_observations)),
        response_percentiles={q: nearest_rank(resp, q) for q in RESPONSE_PERCENTILES},
        n_jobs=len(output.job_ids),
        realized_utilization=total_busy / (spec.n_servers * end) if end > 0 else 0.0,
        realized_utilization_per_stage=per_stage,
    )


def boxplot_stats(values) -> BoxplotStats:
    """Nearest-rank quartiles plus range, for day-by-day spread plots."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("empty value list")
    return BoxplotStats(
        median=nearest_rank(values, 0.5),
        q1=nearest_rank(values, 0.25),
        q3=nearest_rank(values, 0.75),
        min=float(values.min()),
        max=float(values.max()),
    )
