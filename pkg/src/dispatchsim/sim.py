"""Discrete-event simulation of a dispatcher feeding FCFS server clusters.

Because servers are FCFS, never idle while work is queued, and dispatch is
instantaneous, each server is fully described by its drain time: the
wall-clock instant at which it would empty. Assigning a unit of demand z at
time t updates drain = max(drain, t) + z/mu, and the unit completes at the
new drain time. Unfinished work at time t is max(drain - t, 0). The engine
walks arrivals in order; the only future events that must interleave with
arrivals are two-stage migrations, kept in a heap.

Simultaneous events are ordered completion-before-arrival, then by stable
sequence number. All randomness comes from one per-run generator seeded by
the cluster spec.
"""

from __future__ import annotations

import csv
import heapq
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .workload import WorkloadTrace

SLOWDOWN_TOL = 1e-9


@dataclass(frozen=True)
class SingleStage:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least 1 server, got n={self.n}")


@dataclass(frozen=True)
class TwoStage:
    """Stage-1 servers time out units at theta seconds of reference demand;
    units exceeding it restart from scratch in stage 2."""

    n1: int
    n2: int
    theta: float

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError(f"both stages need servers, got n1={self.n1}, n2={self.n2}")
        if self.theta <= 0:
            raise ValueError(f"threshold must be positive, got {self.theta}")


Topology = Union[SingleStage, TwoStage]


@dataclass(frozen=True)
class ClusterSpec:
    topology: Topology
    policy: str          # RR | JIQ | LWL; two-stage supports RR only
    mu: float            # server speed in reference-server units, identical across servers
    granularity: str     # "job" | "task"
    seed: int = 0

    def __post_init__(self):
        if self.policy not in ("RR", "JIQ", "LWL"):
            raise ValueError(f"unknown policy {self.policy!r}")
        if self.granularity not in ("job", "task"):
            raise ValueError(f"unknown granularity {self.granularity!r}")
        if self.mu <= 0:
            raise ValueError(f"server rate must be positive, got {self.mu}")
        if isinstance(self.topology, TwoStage):
            if self.policy != "RR":
                raise ValueError("the two-stage cluster dispatches round-robin only")
            if self.granularity != "task":
                raise ValueError("the two-stage cluster operates on tasks only")

    @property
    def n_servers(self) -> int:
        t = self.topology
        return t.n if isinstance(t, SingleStage) else t.n1 + t.n2


@dataclass(frozen=True)
class JobRecord:
    job_id: str
    arrival: float
    completion: float
    total_demand: float
    response: float
    slowdown: float


@dataclass
class SimOutput:
    """Per-job outcomes of one run, columnar, plus run-level counters."""

    spec: ClusterSpec
    job_ids: list[str]
    arrivals: np.ndarray
    completions: np.ndarray
    total_demands: np.ndarray
    arrival_idle_observations: np.ndarray   # bool, one per job arrival
    event_count: int
    sim_end_time: float
    busy_times: tuple[float, ...]           # wall-clock service rendered per stage

    @property
    def responses(self) -> np.ndarray:
        return self.completions - self.arrivals

    @property
    def slowdowns(self) -> np.ndarray:
        return self.responses / (self.total_demands / self.spec.mu)

    @property
    def records(self) -> list[JobRecord]:
        resp, slow = self.responses, self.slowdowns
        return [
            JobRecord(self.job_ids[i], float(self.arrivals[i]), float(self.completions[i]),
                      float(self.total_demands[i]), float(resp[i]), float(slow[i]))
            for i in range(len(self.job_ids))
        ]

    def to_csv(self, dest: Union[str, Path, io.IOBase]) -> None:
        own = isinstance(dest, (str, Path))
        fh = open(dest, "w", encoding="utf-8", newline="") if own else dest
        try:
            w = csv.writer(fh)
            w.writerow(["job_id", "arrival", "completion", "response", "slowdown"])
            resp, slow = self.responses, self.slowdowns
            for i in range(len(self.job_ids)):
                w.writerow([self.job_ids[i], repr(float(self.arrivals[i])),
                            repr(float(self.completions[i])), repr(float(resp[i])),
                            repr(float(slow[i]))])
        finally:
            if own:
                fh.close()

    def summary_dict(self) -> dict:
        """Side-channel run summary (serialized as JSON next to the CSV)."""
        spec, topo = self.spec, self.spec.topology
        return {
            "policy": spec.policy,
            "granularity": spec.granularity,
            "n": spec.n_servers,
            "mu": spec.mu,
            "seed": spec.seed,
            "theta": topo.theta if isinstance(topo, TwoStage) else None,
            "n1": topo.n1 if isinstance(topo, TwoStage) else None,
            "n2": topo.n2 if isinstance(topo, TwoStage) else None,
            "event_count": self.event_count,
            "p_idle": float(np.mean(self.arrival_idle_observations)),
            "sim_end_time": self.sim_end_time,
        }

    def write_summary(self, dest: Union[str, Path]) -> None:
        Path(dest).write_text(json.dumps(self.summary_dict(), indent=2) + "\n")


# -- dispatchers -------------------------------------------------------------

class RoundRobin:
    """Cyclic dispatch: the k-th unit (k from 0) goes to server k mod n."""

    def __init__(self, n: int):
        self.n = n
        self.count = 0

    def advance(self, drain: np.ndarray, now: float) -> None:
        pass

    def select_server(self, drain: np.ndarray, now: float,
                      rng: np.random.Generator) -> int:
        k = self.count % self.n
        self.count += 1
        return k


class LeastWorkLeft:
    """Anticipative dispatch to the server with least unfinished work,
    ties broken uniformly at random."""

    def __init__(self, n: int):
        self.n = n

    def advance(self, drain: np.ndarray, now: float) -> None:
        pass

    def select_server(self, drain: np.ndarray, now: float,
                      rng: np.random.Generator) -> int:
        backlog = np.maximum(drain - now, 0.0)
        ties = np.flatnonzero(backlog == backlog.min())
        if ties.size == 1:
            return int(ties[0])
        return int(ties[rng.integers(ties.size)])


class JoinIdleQueue:
    """One idle bit per server, set by zero-latency idle notifications.

    Assignment goes to a uniformly random idle server (clearing its bit) or,
    with no bit set, to a uniformly random server.
    """

    def __init__(self, n: int):
        self.n = n
        self.idle = np.ones(n, dtype=bool)   # all servers start empty
        self.messages = 0

    def advance(self, drain: np.ndarray, now: float) -> None:
        # servers whose drain time has passed went busy -> idle since the
        # last dispatch instant and each sends one notification
        for k in np.flatnonzero((drain <= now) & ~self.idle):
            jiq_idle_notify(self, int(k))

    def select_server(self, drain: np.ndarray, now: float,
                      rng: np.random.Generator) -> int:
        idle = np.flatnonzero(self.idle)
        if idle.size:
            k = int(idle[rng.integers(idle.size)])
            self.idle[k] = False
            return k
        return int(rng.integers(self.n))


def jiq_idle_notify(state: JoinIdleQueue, server: int) -> None:
    """Record a busy -> idle transition; double notification is an engine bug."""
    if state.idle[server]:
        raise RuntimeError(f"idle bit for server {server} already set")
    state.idle[server] = True
    state.messages += 1


Dispatcher = Union[RoundRobin, LeastWorkLeft, JoinIdleQueue]

_DISPATCHERS = {"RR": RoundRobin, "LWL": LeastWorkLeft, "JIQ": JoinIdleQueue}


def make_dispatcher(policy: str, n: int) -> Dispatcher:
    return _DISPATCHERS[policy](n)


# -- engine -------------------------------------------------------------------

def run_sim(trace: WorkloadTrace, spec: ClusterSpec) -> SimOutput:
    """Simulate the cluster on the trace until every unit has completed.

    At job granularity each job is one unit of its total demand; at task
    granularity its tasks are dispatched one by one in task-index order at
    the arrival instant, with dispatcher state updated between consecutive
    assignments. The idle observation for a job is sampled immediately
    before its first assignment.
    """
    if isinstance(spec.topology, TwoStage):
        return _run_two_stage(trace, spec)
    return _run_single_stage(trace, spec)


def _run_single_stage(trace: WorkloadTrace, spec: ClusterSpec) -> SimOutput:
    n, mu = spec.topology.n, spec.mu
    rng = np.random.default_rng(spec.seed)
    dispatcher = make_dispatcher(spec.policy, n)
    drain = np.zeros(n)
    arrivals = trace.arrivals
    n_jobs = trace.n_jobs
    completions = np.empty(n_jobs)
    idle_obs = np.empty(n_jobs, dtype=bool)
    job_level = spec.granularity == "job"
    totals = trace.total_demands
    offsets = trace.task_offsets
    demands = trace.task_demands
    n_units = 0

    for i in range(n_jobs):
        t = arrivals[i]
        dispatcher.advance(drain, t)
        idle_obs[i] = bool((drain <= t).any())
        units = (totals[i],) if job_level else demands[offsets[i]:offsets[i + 1]]
        cmax = 0.0
        for z in units:
            k = dispatcher.select_server(drain, t, rng)
            d = (drain[k] if drain[k] > t else t) + z / mu
            drain[k] = d
            if d > cmax:
                cmax = d
        completions[i] = cmax
        n_units += len(units)

    work = float(np.sum(demands) / mu)
    return SimOutput(
        spec=spec,
        job_ids=list(trace.job_ids),
        arrivals=arrivals.copy(),
        completions=completions,
        total_demands=totals.copy(),
        arrival_idle_observations=idle_obs,
        event_count=2 * n_units,            # one dispatch + one completion per unit
        sim_end_time=float(drain.max()),
        busy_times=(work,),
    )


def _run_two_stage(trace: WorkloadTrace, spec: ClusterSpec) -> SimOutput:
    topo = spec.topology
    mu, theta = spec.mu, topo.theta
    rng = np.random.default_rng(spec.seed)
    rr1 = RoundRobin(topo.n1)
    rr2 = RoundRobin(topo.n2)
    drain1 = np.zeros(topo.n1)
    drain2 = np.zeros(topo.n2)
    arrivals = trace.arrivals
    n_jobs = trace.n_jobs
    completions = np.zeros(n_jobs)
    idle_obs = np.empty(n_jobs, dtype=bool)
    offsets, demands = trace.task_offsets, trace.task_demands

    pending: list[tuple[float, int, int, float]] = []   # (time, seq, job, demand)
    seq = 0
    migrations = 0
    busy2 = 0.0

    def dispatch_stage2(mig_time: float, job: int, z: float) -> None:
        nonlocal busy2
        k = rr2.select_server(drain2, mig_time, rng)
        d = (drain2[k] if drain2[k] > mig_time else mig_time) + z / mu
        drain2[k] = d
        busy2 += z / mu
        if d > completions[job]:
            completions[job] = d

    for i in range(n_jobs):
        t = arrivals[i]
        # migrations due by now happen first (completion before arrival on ties)
        while pending and pending[0][0] <= t:
            mt, _, job, z = heapq.heappop(pending)
            dispatch_stage2(mt, job, z)
        idle_obs[i] = bool((drain1 <= t).any() or (drain2 <= t).any())
        for z in demands[offsets[i]:offsets[i + 1]]:
            k = rr1.select_server(drain1, t, rng)
            slice1 = (z if z <= theta else theta) / mu
            d = (drain1[k] if drain1[k] > t else t) + slice1
            drain1[k] = d
            if z <= theta:
                if d > completions[i]:
                    completions[i] = d
            else:
                heapq.heappush(pending, (d, seq, i, z))
                seq += 1
                migrations += 1

    while pending:
        mt, _, job, z = heapq.heappop(pending)
        dispatch_stage2(mt, job, z)

    busy1 = float(np.sum(np.minimum(demands, theta)) / mu)
    return SimOutput(
        spec=spec,
        job_ids=list(trace.job_ids),
        arrivals=arrivals.copy(),
        completions=completions,
        total_demands=trace.total_demands.copy(),
        arrival_idle_observations=idle_obs,
        event_count=2 * trace.n_tasks + 2 * migrations,
        sim_end_time=float(max(drain1.max(), drain2.max())),
        busy_times=(busy1, busy2),
    )
