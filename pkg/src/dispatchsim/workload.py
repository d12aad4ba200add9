"""Workload traces: ingestion, transforms, summary statistics, synthesis.

A trace is stored columnar: one arrival time per job and a flat array of
per-task CPU demands (seconds on a reference unit-capacity server), indexed
by per-job offsets. Traces are immutable by convention; every transform
returns a new trace.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, Union

import numpy as np

DAY_SECONDS = 86400.0

TOTAL_DEMAND_RTOL = 1e-9


class TraceError(ValueError):
    """Invalid trace content or an operation applied to an unsuitable trace."""


class MalformedRowError(TraceError):
    """A CSV row that cannot be parsed or violates the row contract."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class TaskDemand:
    job_id: str
    task_index: int
    cpu_demand: float


@dataclass(frozen=True)
class Job:
    job_id: str
    arrival_time: float
    tasks: tuple[TaskDemand, ...]

    @property
    def total_demand(self) -> float:
        return float(sum(t.cpu_demand for t in self.tasks))


@dataclass
class WorkloadTrace:
    """Jobs sorted by non-decreasing arrival time (input order kept on ties)."""

    job_ids: list[str]
    arrivals: np.ndarray       # (n_jobs,) float64, seconds since origin
    task_demands: np.ndarray   # (n_tasks,) float64, concatenated in job order
    task_offsets: np.ndarray   # (n_jobs + 1,) int64
    origin_time: float = 0.0
    label: str = ""
    _total_demands: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.arrivals = np.asarray(self.arrivals, dtype=np.float64)
        self.task_demands = np.asarray(self.task_demands, dtype=np.float64)
        self.task_offsets = np.asarray(self.task_offsets, dtype=np.int64)
        if self.n_jobs == 0:
            raise TraceError("empty trace")
        if len(self.job_ids) != self.n_jobs or len(self.task_offsets) != self.n_jobs + 1:
            raise TraceError("inconsistent trace arrays")
        if self.task_offsets[0] != 0 or self.task_offsets[-1] != len(self.task_demands):
            raise TraceError("task offsets do not cover the demand array")
        if np.any(np.diff(self.task_offsets) < 1):
            raise TraceError("every job needs at least one task")
        if not np.all(np.isfinite(self.task_demands)) or np.any(self.task_demands <= 0):
            raise TraceError("task cpu demands must be positive and finite")
        if np.any(self.arrivals < 0) or not np.all(np.isfinite(self.arrivals)):
            raise TraceError("arrival times must be non-negative and finite")
        if np.any(np.diff(self.arrivals) < 0):
            raise TraceError("jobs must be sorted by arrival time")

    # -- accessors ---------------------------------------------------------

    @property
    def n_jobs(self) -> int:
        return len(self.arrivals)

    @property
    def n_tasks(self) -> int:
        return len(self.task_demands)

    @property
    def task_counts(self) -> np.ndarray:
        return np.diff(self.task_offsets)

    @property
    def total_demands(self) -> np.ndarray:
        """Per-job total CPU demand (sum over tasks), cached."""
        if self._total_demands is None:
            self._total_demands = np.add.reduceat(self.task_demands, self.task_offsets[:-1])
        return self._total_demands

    def job_tasks(self, i: int) -> np.ndarray:
        return self.task_demands[self.task_offsets[i]:self.task_offsets[i + 1]]

    def job(self, i: int) -> Job:
        jid = self.job_ids[i]
        tasks = tuple(
            TaskDemand(jid, k, float(z)) for k, z in enumerate(self.job_tasks(i))
        )
        return Job(jid, float(self.arrivals[i]), tasks)

    def jobs(self) -> Iterator[Job]:
        return (self.job(i) for i in range(self.n_jobs))

    def relabeled(self, note: str) -> "WorkloadTrace":
        new = self.label + " | " + note if self.label else note
        return replace(self, label=new, _total_demands=self._total_demands)


@dataclass(frozen=True)
class WorkloadMoments:
    """First/second-moment summary of a trace at the job level."""

    lam: float      # mean job arrival rate, jobs/second
    c_a: float      # COV of job inter-arrival times
    mean_y: float   # mean job total demand, seconds
    c_y: float      # COV of job total demand
    n_jobs: int
    n_tasks: int


# -- ingestion and serialization ------------------------------------------

CSV_HEADER = ["job_id", "task_index", "arrival_time", "cpu_time"]

Source = Union[str, Path, io.IOBase, bytes]


def _open_text(source: Source) -> tuple[io.TextIOBase, str]:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline=""), str(source)
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8")), "<bytes>"
    if isinstance(source, io.TextIOBase):
        return source, getattr(source, "name", "<stream>")
    return io.TextIOWrapper(source, encoding="utf-8", newline=""), getattr(source, "name", "<stream>")


def parse_trace(source: Source, fmt: str = "csv", label: str | None = None) -> WorkloadTrace:
    """Read a per-task CSV trace (`job_id,task_index,arrival_time,cpu_time`).

    Rows are grouped by job_id; jobs come out sorted by arrival time with
    input order preserved on ties. All tasks of a job must share its
    arrival time.
    """
    if fmt != "csv":
        raise TraceError(f"unknown trace format {fmt!r}")
    fh, name = _open_text(source)
    try:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TraceError("empty trace") from None
        if [h.strip() for h in header] != CSV_HEADER:
            raise MalformedRowError(1, f"expected header {','.join(CSV_HEADER)}")

        order: list[str] = []                 # job ids in first-seen order
        arrivals: dict[str, float] = {}
        tasks: dict[str, list[tuple[int, float]]] = {}
        seen: set[tuple[str, int]] = set()
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise MalformedRowError(lineno, f"expected 4 columns, got {len(row)}")
            jid = row[0].strip()
            try:
                idx = int(row[1])
                arr = float(row[2])
                cpu = float(row[3])
            except ValueError as exc:
                raise MalformedRowError(lineno, str(exc)) from None
            if not jid:
                raise MalformedRowError(lineno, "empty job_id")
            if idx < 0:
                raise MalformedRowError(lineno, f"negative task_index {idx}")
            if not math.isfinite(arr) or arr < 0:
                raise MalformedRowError(lineno, f"invalid arrival_time {row[2]!r}")
            if not math.isfinite(cpu) or cpu <= 0:
                raise MalformedRowError(lineno, f"cpu_time must be positive, got {row[3]!r}")
            if (jid, idx) in seen:
                raise MalformedRowError(lineno, f"duplicate task ({jid!r}, {idx})")
            seen.add((jid, idx))
            if jid not in arrivals:
                order.append(jid)
                arrivals[jid] = arr
                tasks[jid] = []
            elif arrivals[jid] != arr:
                raise MalformedRowError(
                    lineno, f"job {jid!r} has conflicting arrival times")
            tasks[jid].append((idx, cpu))
    finally:
        if isinstance(source, (str, Path)):
            fh.close()

    if not order:
        raise TraceError("empty trace")

    # stable sort by arrival keeps first-seen order on ties
    order.sort(key=lambda j: arrivals[j])
    job_ids, arr_list, demands, offsets = [], [], [], [0]
    for jid in order:
        job_ids.append(jid)
        arr_list.append(arrivals[jid])
        for _, cpu in sorted(tasks[jid]):
            demands.append(cpu)
        offsets.append(len(demands))
    return WorkloadTrace(
        job_ids=job_ids,
        arrivals=np.array(arr_list),
        task_demands=np.array(demands),
        task_offsets=np.array(offsets),
        label=label if label is not None else name,
    )


def write_trace(trace: WorkloadTrace, dest: Union[str, Path, io.IOBase]) -> None:
    """Write a trace in the canonical per-task CSV format."""
    own = isinstance(dest, (str, Path))
    fh = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        offs = trace.task_offsets
        for i in range(trace.n_jobs):
            jid = trace.job_ids[i]
            arr = repr(float(trace.arrivals[i]))
            for k, z in enumerate(trace.task_demands[offs[i]:offs[i + 1]]):
                w.writerow([jid, k, arr, repr(float(z))])
    finally:
        if own:
            fh.close()


# -- transforms ------------------------------------------------------------

def slice_window(trace: WorkloadTrace, start: float, end: float) -> WorkloadTrace:
    """Keep jobs with start <= arrival < end, re-based so the window opens at 0."""
    if not start < end:
        raise ValueError(f"window start {start} must precede end {end}")
    mask = (trace.arrivals >= start) & (trace.arrivals < end)
    if not mask.any():
        raise TraceError(f"no jobs in window [{start}, {end})")
    return _select_jobs(trace, mask, rebase=start).relabeled(f"window[{start},{end})")


def day_window(trace: WorkloadTrace, day: int) -> WorkloadTrace:
    """Day d of a trace: window [d*86400, (d+1)*86400) relative to origin."""
    return slice_window(trace, day * DAY_SECONDS, (day + 1) * DAY_SECONDS)


def _select_jobs(trace: WorkloadTrace, mask: np.ndarray, rebase: float = 0.0) -> WorkloadTrace:
    idx = np.flatnonzero(mask)
    counts = trace.task_counts[idx]
    offsets = np.concatenate(([0], np.cumsum(counts)))
    task_mask = np.repeat(mask, trace.task_counts)
    return WorkloadTrace(
        job_ids=[trace.job_ids[i] for i in idx],
        arrivals=trace.arrivals[idx] - rebase,
        task_demands=trace.task_demands[task_mask],
        task_offsets=offsets,
        origin_time=trace.origin_time + rebase,
        label=trace.label,
    )


def job_level_view(trace: WorkloadTrace) -> WorkloadTrace:
    """Collapse each job to a single task carrying its total demand."""
    return WorkloadTrace(
        job_ids=list(trace.job_ids),
        arrivals=trace.arrivals.copy(),
        task_demands=trace.total_demands.copy(),
        task_offsets=np.arange(trace.n_jobs + 1, dtype=np.int64),
        origin_time=trace.origin_time,
        label=trace.label,
    ).relabeled("job_level")


def is_job_level(trace: WorkloadTrace) -> bool:
    return bool(np.all(trace.task_counts == 1))


def estimate_moments(trace: WorkloadTrace) -> WorkloadMoments:
    """Two-moment summary: arrival rate, IAT COV, and total-demand mean/COV.

    Uses population (not sample) variance; tied arrivals contribute zero
    inter-arrival times as-is.
    """
    if trace.n_jobs < 2:
        raise TraceError("need at least 2 jobs to estimate moments")
    span = float(trace.arrivals[-1] - trace.arrivals[0])
    if span <= 0:
        raise TraceError("zero time span between first and last arrival")
    iats = np.diff(trace.arrivals)
    lam = (trace.n_jobs - 1) / span
    c_a = float(np.std(iats) / np.mean(iats))
    y = trace.total_demands
    mean_y = float(np.mean(y))
    c_y = float(np.std(y) / mean_y)
    return WorkloadMoments(lam=lam, c_a=c_a, mean_y=mean_y, c_y=c_y,
                           n_jobs=trace.n_jobs, n_tasks=trace.n_tasks)


def shuffle_iat(trace: WorkloadTrace, seed: int) -> WorkloadTrace:
    """Permute the inter-arrival times, keeping each job's demands in place.

    New arrivals are rebuilt cumulatively from the original first arrival,
    so the trace span and mean rate are unchanged.
    """
    if trace.n_jobs < 2:
        raise TraceError("need at least 2 jobs to shuffle inter-arrival times")
    rng = np.random.default_rng(seed)
    iats = rng.permutation(np.diff(trace.arrivals))
    arrivals = np.concatenate(([0.0], np.cumsum(iats))) + trace.arrivals[0]
    return replace(trace, arrivals=arrivals,
                   job_ids=list(trace.job_ids)).relabeled(f"shuffle_iat(seed={seed})")


def shuffle_cpu(trace: WorkloadTrace, seed: int, level: str = "task") -> WorkloadTrace:
    """Permute CPU demands, leaving arrival times untouched.

    level="job" permutes total demands across jobs (requires a job-level
    view); level="task" permutes the global multiset of task demands while
    preserving each job's task count.
    """
    if level not in ("job", "task"):
        raise ValueError(f"unknown shuffle level {level!r}")
    if level == "job" and not is_job_level(trace):
        raise TraceError("job-level cpu shuffle requires a job-level view "
                         "(apply job_level_view first)")
    rng = np.random.default_rng(seed)
    demands = rng.permutation(trace.task_demands)
    return replace(trace, task_demands=demands, job_ids=list(trace.job_ids),
                   _total_demands=None).relabeled(f"shuffle_cpu(level={level}, seed={seed})")


def nearest_rank(values: np.ndarray, q: float) -> float:
    """Nearest-rank quantile: the ceil(q*N)-th smallest value, no interpolation."""
    values = np.asarray(values)
    if values.size == 0:
        raise ValueError("empty value list")
    if not 0 < q <= 1:
        raise ValueError(f"quantile must be in (0, 1], got {q}")
    k = min(math.ceil(q * values.size), values.size)
    return float(np.partition(values, k - 1)[k - 1])


def strip_outliers(trace: WorkloadTrace, q: float = 0.999) -> WorkloadTrace:
    """Drop jobs whose total demand is strictly above the q nearest-rank quantile."""
    if not 0 < q < 1:
        raise ValueError(f"quantile must be in (0, 1), got {q}")
    threshold = nearest_rank(trace.total_demands, q)
    mask = trace.total_demands <= threshold
    removed = int(trace.n_jobs - mask.sum())
    return _select_jobs(trace, mask).relabeled(
        f"strip_outliers(q={q}, removed={removed})")


def quantile_task_cpu(trace: WorkloadTrace, q: float) -> float:
    """Nearest-rank quantile over the multiset of all task CPU demands."""
    return nearest_rank(trace.task_demands, q)


# -- distributions and synthesis -------------------------------------------

@dataclass(frozen=True)
class Constant:
    value: float

    def mean(self) -> float:
        return self.value

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, float(self.value))


@dataclass(frozen=True)
class Exponential:
    mean_value: float

    def mean(self) -> float:
        return self.mean_value

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.exponential(self.mean_value, size)


@dataclass(frozen=True)
class LogNormal:
    mu: float
    sigma: float

    def mean(self) -> float:
        return math.exp(self.mu + self.sigma ** 2 / 2)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.lognormal(self.mu, self.sigma, size)


@dataclass(frozen=True)
class BoundedPareto:
    """Pareto truncated to [lower, upper]; always has a finite mean."""

    alpha: float
    lower: float
    upper: float

    def __post_init__(self):
        if not (self.alpha > 0 and 0 < self.lower < self.upper):
            raise ValueError("bounded Pareto needs alpha > 0 and 0 < lower < upper")

    def mean(self) -> float:
        a, l, h = self.alpha, self.lower, self.upper
        if a == 1.0:
            return math.log(h / l) * l * h / (h - l)
        return (l ** a / (1 - (l / h) ** a)) * (a / (a - 1)) * (l ** (1 - a) - h ** (1 - a))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        a, l, h = self.alpha, self.lower, self.upper
        return l * (1 - u * (1 - (l / h) ** a)) ** (-1 / a)


@dataclass(frozen=True)
class UniformInt:
    """Uniform integers on [low, high], inclusive."""

    low: int
    high: int

    def mean(self) -> float:
        return (self.low + self.high) / 2

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.integers(self.low, self.high + 1, size).astype(np.float64)


Dist = Union[Constant, Exponential, LogNormal, BoundedPareto, UniformInt]

_DIST_KINDS = {
    "constant": (Constant, ("value",)),
    "exponential": (Exponential, ("mean_value",)),
    "lognormal": (LogNormal, ("mu", "sigma")),
    "bounded_pareto": (BoundedPareto, ("alpha", "lower", "upper")),
    "uniform_int": (UniformInt, ("low", "high")),
}


def dist_from_dict(d: dict) -> Dist:
    """Build a distribution from {"kind": ..., <params>}; strict on keys."""
    d = dict(d)
    kind = d.pop("kind", None)
    if kind not in _DIST_KINDS:
        raise ValueError(f"unknown distribution kind {kind!r}")
    cls, names = _DIST_KINDS[kind]
    missing = set(names) - set(d)
    extra = set(d) - set(names)
    if missing or extra:
        raise ValueError(f"distribution {kind!r}: missing {sorted(missing)}, "
                         f"unknown {sorted(extra)}")
    if cls is UniformInt:
        return cls(**{k: int(d[k]) for k in names})
    return cls(**{k: float(d[k]) for k in names})


def dist_to_dict(dist: Dist) -> dict:
    for kind, (cls, names) in _DIST_KINDS.items():
        if isinstance(dist, cls):
            return {"kind": kind, **{k: getattr(dist, k) for k in names}}
    raise TypeError(f"not a distribution: {dist!r}")


@dataclass(frozen=True)
class Arrival:
    """Job arrival process: Poisson at a rate, or a renewal IAT distribution."""

    kind: str                 # "poisson" | "renewal"
    rate: float | None = None
    iat: Dist | None = None

    def __post_init__(self):
        if self.kind == "poisson":
            if self.rate is None or self.rate <= 0:
                raise ValueError("poisson arrivals need a positive rate")
        elif self.kind == "renewal":
            if self.iat is None or self.iat.mean() <= 0:
                raise ValueError("renewal arrivals need an IAT distribution with positive mean")
        else:
            raise ValueError(f"unknown arrival kind {self.kind!r}")

    def iat_dist(self) -> Dist:
        return Exponential(1.0 / self.rate) if self.kind == "poisson" else self.iat


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a synthetic workload.

    A job is a "monster" with probability monster_fraction; otherwise it is
    single-task with probability single_task_prob, else its task count comes
    from multi_task_count (clipped to >= 2). Monster task demands come from
    monster_task_cpu (task_cpu when unset) and are all equal to one per-job
    draw when monster_correlated is set, which makes demands strongly
    correlated within the job.
    """

    duration: float
    arrival: Arrival
    single_task_prob: float
    task_cpu: Dist
    multi_task_count: Dist = UniformInt(2, 10)
    monster_fraction: float = 0.0
    monster_task_count: Dist | None = None
    monster_task_cpu: Dist | None = None
    monster_correlated: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if not 0 <= self.single_task_prob <= 1:
            raise ValueError("single_task_prob must be in [0, 1]")
        if not 0 <= self.monster_fraction <= 1:
            raise ValueError("monster_fraction must be in [0, 1]")
        if self.monster_fraction > 0 and self.monster_task_count is None:
            raise ValueError("monster_fraction > 0 needs monster_task_count")
        for d in (self.task_cpu, self.multi_task_count, self.monster_task_count,
                  self.monster_task_cpu):
            if d is not None and not math.isfinite(d.mean()):
                raise ValueError(f"distribution {d!r} lacks a finite mean")


def generate_synthetic(spec: SynthSpec) -> WorkloadTrace:
    """Generate a trace from a SynthSpec, deterministically under its seed."""
    rng = np.random.default_rng(spec.seed)
    iat = spec.arrival.iat_dist()

    # draw IATs in fixed-size chunks until the horizon is covered
    chunks = []
    total = 0.0
    while total <= spec.duration:
        c = iat.sample(rng, 4096)
        chunks.append(c)
        total += float(c.sum())
    arrivals = np.cumsum(np.concatenate(chunks))
    arrivals = arrivals[arrivals <= spec.duration]
    if arrivals.size == 0:
        raise TraceError("no arrivals within the requested duration")
    n_jobs = arrivals.size

    u = rng.random(n_jobs)
    monster = u < spec.monster_fraction
    single = ~monster & (u < spec.monster_fraction + (1 - spec.monster_fraction) * spec.single_task_prob)
    multi = ~monster & ~single

    counts = np.ones(n_jobs, dtype=np.int64)
    if multi.any():
        counts[multi] = np.maximum(
            np.rint(spec.multi_task_count.sample(rng, int(multi.sum()))), 2
        ).astype(np.int64)
    if monster.any():
        counts[monster] = np.maximum(
            np.rint(spec.monster_task_count.sample(rng, int(monster.sum()))), 2
        ).astype(np.int64)

    offsets = np.concatenate(([0], np.cumsum(counts)))
    demands = np.empty(offsets[-1], dtype=np.float64)
    plain_tasks = np.repeat(~monster, counts)
    demands[plain_tasks] = spec.task_cpu.sample(rng, int(plain_tasks.sum()))
    if monster.any():
        mon_cpu = spec.monster_task_cpu or spec.task_cpu
        if spec.monster_correlated:
            per_job = mon_cpu.sample(rng, int(monster.sum()))
            demands[~plain_tasks] = np.repeat(per_job, counts[monster])
        else:
            demands[~plain_tasks] = mon_cpu.sample(rng, int((~plain_tasks).sum()))

    return WorkloadTrace(
        job_ids=[f"j{i}" for i in range(n_jobs)],
        arrivals=arrivals,
        task_demands=demands,
        task_offsets=offsets,
        label=f"synthetic(seed={spec.seed}, jobs={n_jobs})",
    )


def synthspec_from_dict(d: dict) -> SynthSpec:
    """Build a SynthSpec from a config mapping; unknown keys are rejected."""
    d = dict(d)
    known = set(SynthSpec.__dataclass_fields__)
    unknown = set(d) - known
    if unknown:
        raise ValueError(f"unknown synthesis keys {sorted(unknown)}")
    if "arrival" not in d or "task_cpu" not in d or "duration" not in d:
        raise ValueError("synthesis config needs duration, arrival, and task_cpu")
    arr = dict(d["arrival"])
    kind = arr.pop("kind", None)
    if kind == "poisson":
        d["arrival"] = Arrival("poisson", rate=float(arr.pop("rate", 0)))
    elif kind == "renewal":
        d["arrival"] = Arrival("renewal", iat=dist_from_dict(arr.pop("iat", {})))
    else:
        raise ValueError(f"unknown arrival kind {kind!r}")
    if arr:
        raise ValueError(f"arrival: unknown keys {sorted(arr)}")
    for key in ("task_cpu", "multi_task_count", "monster_task_count",
                "monster_task_cpu"):
        if key in d and d[key] is not None:
            d[key] = dist_from_dict(d[key])
    return SynthSpec(**d)


def synthspec_to_dict(spec: SynthSpec) -> dict:
    arr = {"kind": spec.arrival.kind}
    if spec.arrival.kind == "poisson":
        arr["rate"] = spec.arrival.rate
    else:
        arr["iat"] = dist_to_dict(spec.arrival.iat)
    return {
        "duration": spec.duration,
        "arrival": arr,
        "single_task_prob": spec.single_task_prob,
        "task_cpu": dist_to_dict(spec.task_cpu),
        "multi_task_count": dist_to_dict(spec.multi_task_count),
        "monster_fraction": spec.monster_fraction,
        "monster_task_count": (None if spec.monster_task_count is None
                               else dist_to_dict(spec.monster_task_count)),
        "monster_task_cpu": (None if spec.monster_task_cpu is None
                             else dist_to_dict(spec.monster_task_cpu)),
        "monster_correlated": spec.monster_correlated,
        "seed": spec.seed,
    }


# -- presets ----------------------------------------------------------------

def preset_spec(name: str, duration: float, seed: int = 0) -> SynthSpec:
    """Named workload recipes used by the test suite and the CLI.

    mm1        - Poisson(0.8) arrivals, single exp(1) task per job.
    calibrated - heavy-tailed mix aimed at the published trace regime:
                 ~96.6% single-task jobs, top 0.1% of jobs carrying most
                 of the CPU load.
    monster    - like calibrated but with >= 1% of jobs carrying hundreds
                 of heavy, within-job-correlated tasks.
    """
    if name == "mm1":
        return SynthSpec(
            duration=duration,
            arrival=Arrival("poisson", rate=0.8),
            single_task_prob=1.0,
            task_cpu=Exponential(1.0),
            seed=seed,
        )
    if name == "calibrated":
        return SynthSpec(
            duration=duration,
            arrival=Arrival("poisson", rate=1.0),
            single_task_prob=0.966,
            task_cpu=BoundedPareto(alpha=1.5, lower=0.05, upper=200.0),
            multi_task_count=UniformInt(2, 40),
            monster_fraction=0.0006,
            monster_task_count=UniformInt(1000, 8000),
            seed=seed,
        )
    if name == "monster":
        return SynthSpec(
            duration=duration,
            arrival=Arrival("poisson", rate=1.0),
            single_task_prob=0.966,
            task_cpu=BoundedPareto(alpha=1.3, lower=0.05, upper=5.0e3),
            multi_task_count=UniformInt(2, 20),
            monster_fraction=0.015,
            monster_task_count=UniformInt(100, 500),
            monster_task_cpu=BoundedPareto(alpha=1.3, lower=10.0, upper=5.0e3),
            seed=seed,
        )
    raise ValueError(f"unknown preset {name!r}")
