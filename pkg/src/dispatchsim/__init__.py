"""Trace-driven simulation and analytic models for dispatching policies
over clusters of FCFS servers."""

from .workload import (
    WorkloadTrace, WorkloadMoments, SynthSpec, Arrival, TraceError,
    MalformedRowError, parse_trace, write_trace, slice_window, day_window,
    job_level_view, estimate_moments, shuffle_iat, shuffle_cpu,
    strip_outliers, quantile_task_cpu, generate_synthetic, preset_spec,
)
from .models import (
    ClusterParams, server_rate, erlang_b, erlang_c, marchal_phi,
    mean_resp_rr, mean_resp_lwl, mean_resp_jiq, mean_response, model_curve,
)
from .sim import ClusterSpec, SingleStage, TwoStage, SimOutput, JobRecord, run_sim
from .metrics import Summary, BoxplotStats, summarize, boxplot_stats
from .harness import (
    SweepPlan, SweepTable, TunePlan, TuneResult, UnstableConfigError,
    run_sweep, per_day_spread, tune_two_stage, compare_policies,
    apply_transforms, default_n_list,
)

__version__ = "0.1.0"
