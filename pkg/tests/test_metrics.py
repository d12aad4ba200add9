import numpy as np
import pytest

from dispatchsim import metrics, sim
from dispatchsim.sim import ClusterSpec, SingleStage, TwoStage
from conftest import make_trace


def run(tr, n=2, policy="RR", mu=1.0, granularity="job"):
    return sim.run_sim(tr, ClusterSpec(SingleStage(n), policy, mu, granularity))


class TestSummarize:
    def test_hand_case(self):
        # completions by hand (RR, n=2, mu=1): [4, 2, 7]; responses [4, 2, 6]
        tr = make_trace([0.0, 0.0, 1.0], [[4.0], [2.0], [3.0]])
        s = metrics.summarize(run(tr))
        assert s.mean_response == pytest.approx((4 + 2 + 6) / 3)
        # slowdowns: 4/4, 2/2, 6/3 -> mean 4/3
        assert s.mean_slowdown == pytest.approx(4 / 3)
        assert s.p_idle_at_arrival == pytest.approx(2 / 3)
        assert s.n_jobs == 3
        # total work 9 over 2 servers for 7s
        assert s.realized_utilization == pytest.approx(9 / 14)
        assert s.realized_utilization_per_stage == (pytest.approx(9 / 14),)

    def test_percentiles_nearest_rank(self):
        # 10 jobs in one overloaded server: responses are distinct and known
        tr = make_trace([0.0] * 10, [[1.0]] * 10)
        s = metrics.summarize(run(tr, n=1))
        resp = sorted(float(r) for r in range(1, 11))
        assert s.response_percentiles[0.5] == resp[4]    # ceil(0.5*10) = 5th
        assert s.response_percentiles[0.9] == resp[8]
        assert s.response_percentiles[0.99] == resp[9]

    def test_mu_affects_slowdown_not_ratio_of_response(self):
        tr = make_trace([0.0], [[4.0]])
        s = metrics.summarize(run(tr, n=1, mu=2.0))
        # response 2.0, ideal time 4/2 = 2.0 -> slowdown exactly 1
        assert s.mean_slowdown == pytest.approx(1.0)

    def test_two_stage_per_stage_utilization(self):
        tr = make_trace([0.0, 1.0], [[5.0], [1.0]])
        out = sim.run_sim(tr, ClusterSpec(TwoStage(1, 1, 2.0), "RR", 1.0, "task"))
        s = metrics.summarize(out)
        # end=7; stage 1 busy 3s of 7, stage 2 busy 5s of 7
        assert s.realized_utilization_per_stage == (
            pytest.approx(3 / 7), pytest.approx(5 / 7))
        assert s.realized_utilization == pytest.approx(8 / 14)

    def test_empty_output_rejected(self):
        tr = make_trace([0.0], [[1.0]])
        out = run(tr)
        out.job_ids = []
        with pytest.raises(ValueError):
            metrics.summarize(out)


class TestBoxplotStats:
    def test_known_quartiles(self):
        b = metrics.boxplot_stats([1.0, 2.0, 3.0, 4.0])
        # nearest rank: q1 = ceil(0.25*4)=1st, median = 2nd, q3 = 3rd
        assert (b.q1, b.median, b.q3) == (1.0, 2.0, 3.0)
        assert (b.min, b.max) == (1.0, 4.0)

    def test_single_value(self):
        b = metrics.boxplot_stats([7.0])
        assert b.min == b.q1 == b.median == b.q3 == b.max == 7.0

    def test_order_invariant(self):
        a = metrics.boxplot_stats([3.0, 1.0, 2.0])
        b = metrics.boxplot_stats([1.0, 2.0, 3.0])
        assert a == b

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            metrics.boxplot_stats([])

    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            metrics.BoxplotStats(median=1.0, q1=2.0, q3=3.0, min=0.0, max=4.0)
