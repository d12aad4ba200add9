import math

import pytest

from dispatchsim import models
from dispatchsim.workload import WorkloadMoments

MM = dict(lam=1.0, c_a=1.0, mean_y=1.0, c_y=1.0)


def params(n, rho0=0.8, **overrides):
    return models.ClusterParams(**{**MM, **overrides}, rho0=rho0, n=n)


class TestServerRate:
    def test_budget_constant_across_n(self):
        rates = [models.server_rate(params(n)) for n in (1, 2, 7, 100)]
        budgets = [n * mu for n, mu in zip((1, 2, 7, 100), rates)]
        assert all(b == pytest.approx(budgets[0]) for b in budgets)

    def test_hand_value(self):
        # lam=1, E[Y]=1, rho0=0.8, n=2 -> mu = 1/(2*0.8) = 0.625
        assert models.server_rate(params(2)) == pytest.approx(0.625)


class TestErlang:
    def test_b_zero_servers(self):
        assert models.erlang_b(0, 1.6) == 1.0

    def test_b_one_server(self):
        # B(1, a) = a/(1+a)
        assert models.erlang_b(1, 1.6) == pytest.approx(1.6 / 2.6)

    def test_b_two_servers_exact_fraction(self):
        # recursion in exact rationals gives B(2, 8/5) = 32/97
        assert models.erlang_b(2, 1.6) == pytest.approx(32 / 97, rel=1e-12)

    def test_b_monotone_decreasing_in_m(self):
        vals = [models.erlang_b(m, 5.0) for m in range(0, 30)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_b_stable_at_large_m(self):
        b = models.erlang_b(1000, 800.0)
        assert 0.0 < b < 1.0 and math.isfinite(b)

    def test_c_two_servers_exact_fraction(self):
        # C = B/(1-r+rB) with r=0.8, B=32/97 -> 32/45
        assert models.erlang_c(2, 1.6) == pytest.approx(32 / 45, rel=1e-12)

    def test_c_one_server_is_rho(self):
        assert models.erlang_c(1, 0.8) == pytest.approx(0.8)

    def test_c_at_least_b(self):
        for m, a in [(2, 1.6), (10, 8.0), (100, 80.0)]:
            assert models.erlang_c(m, a) >= models.erlang_b(m, a)

    def test_c_rejects_overload(self):
        with pytest.raises(ValueError):
            models.erlang_c(2, 2.0)


class TestMarchalPhi:
    def test_canonical_hand_value(self):
        # (1+1)*(0.1+0.64)/(2*(1+0.64)) = 0.74/1.64
        assert models.marchal_phi(0.1, 1.0, 0.8) == pytest.approx(0.74 / 1.64)

    def test_mm_case_is_one(self):
        assert models.marchal_phi(1.0, 1.0, 0.5) == pytest.approx(1.0)

    def test_as_written_ignores_arrival_cov(self):
        a = models.marchal_phi(0.0, 4.0, 0.8, "as_written")
        b = models.marchal_phi(9.0, 4.0, 0.8, "as_written")
        assert a == b == pytest.approx(2.5)

    def test_variants_agree_when_ca2_is_one(self):
        # at c_a2 = 1 the canonical numerator and denominator factor cancels
        for cx2 in (0.5, 1.0, 7.0):
            for rho in (0.2, 0.8):
                assert models.marchal_phi(1.0, cx2, rho) == pytest.approx(
                    models.marchal_phi(1.0, cx2, rho, "as_written"))

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            models.marchal_phi(1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            models.marchal_phi(-0.1, 1.0, 0.5)
        with pytest.raises(ValueError):
            models.marchal_phi(1.0, 1.0, 0.5, "bogus")


class TestMeanResponse:
    def test_single_server_all_policies_collapse_to_mm1(self):
        # M/M/1 at rho=0.8, mu=1.25: E[R] = 1/(mu - lam) = 4
        for policy in models.POLICIES:
            assert models.mean_response(params(1), policy) == pytest.approx(4.0)

    def test_lwl_two_servers_exact(self):
        # 1.6 * (1 + (32/45)/(2*0.2)) = 40/9
        assert models.mean_resp_lwl(params(2)) == pytest.approx(40 / 9, rel=1e-9)

    def test_rr_two_servers_exact(self):
        # phi(0.5,1,0.8) = 57/82; 1.6*(1+4*57/82) = 248/41
        assert models.mean_resp_rr(params(2)) == pytest.approx(248 / 41, rel=1e-9)

    def test_jiq_two_servers_is_erlang_b_blend(self):
        b = 32 / 97
        expected = b * 248 / 41 + (1 - b) * 40 / 9
        assert models.mean_resp_jiq(params(2)) == pytest.approx(expected, rel=1e-9)

    def test_rr_ten_servers(self):
        # ex=8, phi(0.1,1,0.8)=0.74/1.64 -> 8*(1+4*0.74/1.64)
        assert models.mean_resp_rr(params(10)) == pytest.approx(
            8 * (1 + 4 * 0.74 / 1.64), rel=1e-12)

    def test_rr_as_written_independent_of_arrival_cov(self):
        # as_written phi drops the arrival COV term entirely
        a = models.mean_resp_rr(params(10, c_a=0.0), "as_written")
        b = models.mean_resp_rr(params(10, c_a=3.0), "as_written")
        assert a == pytest.approx(b)
        # n=10 as_written: ex=8, phi=1 -> 8*(1+4) = 40
        assert a == pytest.approx(40.0)

    def test_ordering_low_variability(self):
        # with c_y <= 1 pooling wins: LWL <= JIQ <= RR
        p = params(10, c_y=0.5)
        lwl = models.mean_resp_lwl(p)
        jiq = models.mean_resp_jiq(p)
        rr = models.mean_resp_rr(p)
        assert lwl <= jiq <= rr

    def test_unknown_policy(self):
        with pytest.raises(ValueError, match="policy"):
            models.mean_response(params(2), "FIFO")

    def test_param_validation(self):
        with pytest.raises(ValueError):
            models.ClusterParams(lam=1, c_a=1, mean_y=1, c_y=1, rho0=1.0, n=2)
        with pytest.raises(ValueError):
            models.ClusterParams(lam=1, c_a=1, mean_y=1, c_y=1, rho0=0.5, n=0)
        with pytest.raises(ValueError):
            models.ClusterParams(lam=0, c_a=1, mean_y=1, c_y=1, rho0=0.5, n=2)


class TestModelCurve:
    def test_matches_pointwise_evaluation(self):
        m = WorkloadMoments(lam=2.0, c_a=1.3, mean_y=0.7, c_y=2.0,
                            n_jobs=100, n_tasks=100)
        curve = models.model_curve(m, 0.8, [2, 5, 10], "JIQ")
        assert [n for n, _ in curve] == [2, 5, 10]
        for n, r in curve:
            p = models.ClusterParams.from_moments(m, 0.8, n)
            assert r == models.mean_resp_jiq(p)

    def test_empty_n_list_rejected(self):
        m = WorkloadMoments(lam=1, c_a=1, mean_y=1, c_y=1, n_jobs=2, n_tasks=2)
        with pytest.raises(ValueError):
            models.model_curve(m, 0.8, [], "RR")
