import numpy as np
import pytest

from dispatchsim.workload import WorkloadTrace


def make_trace(arrivals, tasks_per_job, label="test") -> WorkloadTrace:
    """Build a trace from arrival times and per-job task demand lists."""
    demands = [z for tasks in tasks_per_job for z in tasks]
    offsets = np.concatenate(([0], np.cumsum([len(t) for t in tasks_per_job])))
    return WorkloadTrace(
        job_ids=[f"j{i}" for i in range(len(arrivals))],
        arrivals=np.asarray(arrivals, dtype=float),
        task_demands=np.asarray(demands, dtype=float),
        task_offsets=offsets,
        label=label,
    )


@pytest.fixture
def toy_trace():
    return make_trace([0.0, 1.0, 2.5], [[3.0, 1.0], [2.0], [0.5, 0.5, 1.0]])
