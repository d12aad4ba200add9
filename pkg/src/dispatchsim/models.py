"""Closed-form mean response time approximations and Erlang formulas.

All three dispatching policies (round-robin, least-work-left, join-idle-
queue) are approximated from the first two moments of the job arrival and
demand processes, treating both as renewal sequences. The waiting-time
scaling factor comes in two variants:

  canonical  - (1 + cx2) * (ca2 + rho^2 * cx2) / (2 * (1 + rho^2 * cx2)),
               which keeps the dependence on the arrival COV.
  as_written - (1 + cx2) / 2; the form obtained when the arrival-variability
               factor cancels between numerator and denominator. Kept for
               comparison; it ignores ca2 entirely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .workload import WorkloadMoments

PhiVariant = Literal["canonical", "as_written"]

POLICIES = ("RR", "JIQ", "LWL")


@dataclass(frozen=True)
class ClusterParams:
    """Workload moments plus the sizing targets for one cluster configuration."""

    lam: float      # job arrival rate, jobs/s
    c_a: float      # COV of inter-arrival times
    mean_y: float   # mean job demand, reference-server seconds
    c_y: float      # COV of job demand
    rho0: float     # target per-server utilization
    n: int          # server count

    def __post_init__(self):
        if not 0 < self.rho0 < 1:
            raise ValueError(f"rho0 must be in (0, 1), got {self.rho0}")
        if self.n < 1:
            raise ValueError(f"need at least 1 server, got {self.n}")
        if self.lam <= 0 or self.mean_y <= 0:
            raise ValueError("lam and mean_y must be positive")
        if self.c_a < 0 or self.c_y < 0:
            raise ValueError("COVs must be non-negative")

    @classmethod
    def from_moments(cls, m: WorkloadMoments, rho0: float, n: int) -> "ClusterParams":
        return cls(lam=m.lam, c_a=m.c_a, mean_y=m.mean_y, c_y=m.c_y, rho0=rho0, n=n)


def server_rate(params: ClusterParams) -> float:
    """Per-server speed mu that pins utilization at rho0: lam*E[Y]/(n*rho0).

    The cluster budget n*mu is then constant across n for fixed workload
    moments and rho0.
    """
    return params.lam * params.mean_y / (params.n * params.rho0)


def erlang_b(m: int, a: float) -> float:
    """Erlang-B blocking probability for m servers at offered load a.

    Computed by the stable recursion B(m) = a*B(m-1) / (m + a*B(m-1)),
    B(0) = 1; never by factorial ratios.
    """
    if m < 0:
        raise ValueError(f"server count must be >= 0, got {m}")
    if a < 0:
        raise ValueError(f"offered load must be >= 0, got {a}")
    b = 1.0
    for k in range(1, m + 1):
        b = a * b / (k + a * b)
    return b


def erlang_c(m: int, a: float) -> float:
    """Erlang-C waiting probability for m servers at offered load a < m."""
    if m < 1:
        raise ValueError(f"server count must be >= 1, got {m}")
    if not 0 <= a < m:
        raise ValueError(f"offered load must satisfy 0 <= a < m, got a={a}, m={m}")
    b = erlang_b(m, a)
    r = a / m
    return b / (1 - r + r * b)


def marchal_phi(c_a2: float, c_x2: float, rho: float,
                variant: PhiVariant = "canonical") -> float:
    """Waiting-time scaling factor for squared COVs c_a2, c_x2 at utilization rho."""
    if min(c_a2, c_x2, rho) < 0 or rho >= 1:
        raise ValueError("need c_a2, c_x2 >= 0 and 0 <= rho < 1")
    if variant == "canonical":
        return (1 + c_x2) * (c_a2 + rho ** 2 * c_x2) / (2 * (1 + rho ** 2 * c_x2))
    if variant == "as_written":
        return (1 + c_x2) / 2
    raise ValueError(f"unknown phi variant {variant!r}")


def mean_resp_rr(params: ClusterParams, variant: PhiVariant = "canonical") -> float:
    """Mean response time under round-robin dispatch.

    Each server sees rate lam/n with per-server arrival COV c_a/sqrt(n) and
    behaves as an independent single-server FCFS queue at utilization rho0.
    """
    ex = params.n * params.rho0 / params.lam
    phi = marchal_phi(params.c_a ** 2 / params.n, params.c_y ** 2, params.rho0, variant)
    return ex * (1 + params.rho0 / (1 - params.rho0) * phi)


def mean_resp_lwl(params: ClusterParams, variant: PhiVariant = "canonical") -> float:
    """Mean response time under least-work-left dispatch.

    Equivalent to a central-queue system with n servers; the waiting term
    uses the Erlang-C probability at offered load n*rho0.
    """
    ex = params.n * params.rho0 / params.lam
    phi = marchal_phi(params.c_a ** 2, params.c_y ** 2, params.rho0, variant)
    c = erlang_c(params.n, params.n * params.rho0)
    return ex * (1 + c / (params.n * (1 - params.rho0)) * phi)


def mean_resp_jiq(params: ClusterParams, variant: PhiVariant = "canonical") -> float:
    """Mean response time under join-idle-queue dispatch.

    Blend of the other two: with all servers busy (probability approximated
    by Erlang-B at load n*rho0) assignment is effectively random, like RR;
    otherwise an idle server is hit, like LWL.
    """
    b = erlang_b(params.n, params.n * params.rho0)
    return b * mean_resp_rr(params, variant) + (1 - b) * mean_resp_lwl(params, variant)


_POLICY_FN = {"RR": mean_resp_rr, "LWL": mean_resp_lwl, "JIQ": mean_resp_jiq}


def mean_response(params: ClusterParams, policy: str,
                  variant: PhiVariant = "canonical") -> float:
    """Mean response time of the given policy at the given configuration."""
    try:
        fn = _POLICY_FN[policy]
    except KeyError:
        raise ValueError(f"unknown policy {policy!r}") from None
    return fn(params, variant)


def model_curve(moments: WorkloadMoments, rho0: float, n_list: list[int],
                policy: str, variant: PhiVariant = "canonical") -> list[tuple[int, float]]:
    """Evaluate the analytic mean response time at each server count in n_list."""
    if not n_list:
        raise ValueError("n_list must be non-empty")
    return [
        (n, mean_response(ClusterParams.from_moments(moments, rho0, n), policy, variant))
        for n in n_list
    ]
