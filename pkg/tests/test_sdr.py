"""
Relaxed reflection subproblem: lifting, elliptope max-min, feasibility and
bisection. Reference values come from exhaustive phase grids at M <= 2.
"""

import numpy as np
import pytest

from errors import AlphaOutOfRangeError, DimensionMismatchError
from numerics.rng import RngStream
from optimizer.oracle import grid_p31_value
from optimizer.sdr import (
    bisection_bracket,
    bisection_p31,
    build_lifted,
    elliptope_maxmin,
    normalized_margins,
    sdp_feasible,
)
from optimizer.settings import AOConfig
from rate.snr import closed_form_optima, combined_gain, rate_breakdown

from conftest import instance


def lifted_for(seed, m, pb):
    cs, casc = instance(seed, m)
    opt = closed_form_optima(pb, cs, casc)
    rb = rate_breakdown(pb, cs, casc, opt.theta_c_star)
    return cs, casc, opt, rb, build_lifted(cs.h_au, casc.q_u, cs.h_ac, casc.q_c)


class TestLifting:

    def test_quadratic_form_identity(self):
        rng = RngStream(17)
        for k in range(200):
            cs, casc = instance(k, 1 + k % 6)
            theta = np.exp(1j * rng.uniform(0, 2 * np.pi, size=cs.m))
            theta_bar = np.append(theta, 1.0)
            lm = build_lifted(cs.h_au, casc.q_u, cs.h_ac, casc.q_c)
            for b, h, q in ((lm.b_u, cs.h_au, casc.q_u), (lm.b_c, cs.h_ac, casc.q_c)):
                lhs = np.real(theta_bar.conj() @ b @ theta_bar) + abs(h) ** 2
                rhs = combined_gain(h, q, theta)
                assert abs(lhs - rhs) <= 1e-12 * max(1.0, rhs)

    def test_hermitian_with_zero_corner(self, pb):
        *_, lm = lifted_for(2, 3, pb)
        np.testing.assert_array_equal(lm.b_u, lm.b_u.conj().T)
        assert lm.b_u[-1, -1] == 0
        assert lm.order == 4

    def test_margins_at_rank_one_point(self, pb):
        cs, casc, opt, _, lm = lifted_for(5, 3, pb)
        theta_bar = np.append(opt.theta_u_star, 1.0)
        g_u, g_c = normalized_margins(lm, theta_bar[:, None], 0.0, 0.0)
        assert g_u == pytest.approx(1.0)
        assert g_c == pytest.approx(combined_gain(cs.h_ac, casc.q_c, opt.theta_u_star) / lm.scale_c)

    def test_mismatched_lengths(self):
        with pytest.raises(DimensionMismatchError):
            build_lifted(1.0, np.ones(2), 1.0, np.ones(3))


class TestElliptope:

    def test_rows_stay_unit_norm(self, pb):
        *_, lm = lifted_for(1, 4, pb)
        result = elliptope_maxmin(lm, 0.0, 0.0, AOConfig(bm_max_iters=200), rng=RngStream(0))
        np.testing.assert_allclose(np.linalg.norm(result.v, axis=1), 1.0)
        np.testing.assert_allclose(np.diag(result.psi).real, 1.0)

    def test_improves_a_random_start(self, pb):
        *_, lm = lifted_for(1, 4, pb)
        start = elliptope_maxmin(lm, 0.0, 0.0, AOConfig(bm_max_iters=1), rng=RngStream(0))
        result = elliptope_maxmin(lm, 0.0, 0.0, AOConfig(), rng=RngStream(0))
        assert result.slack >= start.slack
        assert result.improved

    def test_rank_one_optimum_for_single_constraint(self, pb):
        # with c_C far below reach only the user constraint binds; its maximum is 1
        cs, casc, opt, _, lm = lifted_for(4, 3, pb)
        result = elliptope_maxmin(lm, 0.0, -1e6, AOConfig(), rng=RngStream(1))
        assert result.slack == pytest.approx(1.0, abs=1e-3)


class TestFeasibility:

    def test_zero_rate_always_feasible(self, pb):
        _, _, _, rb, lm = lifted_for(3, 3, pb)
        assert sdp_feasible(0.0, 0.5, lm, rb, pb, AOConfig()).feasible

    def test_above_bracket_infeasible(self, pb):
        _, _, _, rb, lm = lifted_for(3, 3, pb)
        top = bisection_bracket(0.5, rb)
        result = sdp_feasible(top + 1.0, 0.5, lm, rb, pb, AOConfig())
        assert not result.feasible
        assert result.achieved_slack < 0

    @pytest.mark.parametrize("alpha", [0.0, 1.2])
    def test_alpha_range(self, pb, alpha):
        _, _, _, rb, lm = lifted_for(3, 2, pb)
        with pytest.raises(AlphaOutOfRangeError):
            sdp_feasible(0.1, alpha, lm, rb, pb, AOConfig())

    def test_negative_rate(self, pb):
        _, _, _, rb, lm = lifted_for(3, 2, pb)
        with pytest.raises(ValueError):
            sdp_feasible(-0.1, 0.5, lm, rb, pb, AOConfig())


class TestBisection:

    def test_result_within_bracket(self, pb):
        _, _, opt, rb, lm = lifted_for(6, 3, pb)
        result = bisection_p31(0.5, lm, rb, pb, AOConfig(), RngStream(0), init=np.append(opt.theta_c_star, 1.0))
        assert 0.0 <= result.delta_star <= result.bracket_top
        assert result.psi_star.shape == (4, 4)
        np.testing.assert_allclose(np.diag(result.psi_star).real, 1.0)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(5))
    def test_not_below_grid_optimum(self, pb, seed):
        cs, casc, opt, rb, lm = lifted_for(seed, 2, pb)
        result = bisection_p31(0.5, lm, rb, pb, AOConfig(), RngStream(seed), init=np.append(opt.theta_c_star, 1.0))
        reference = grid_p31_value(0.5, pb, cs, casc, phase_grid_points=64)
        assert result.delta_star >= reference - 1e-3

    def test_coarse_tolerance_stops_early(self, pb):
        _, _, _, rb, lm = lifted_for(6, 2, pb)
        cfg = AOConfig(bisection_eps=10.0)
        result = bisection_p31(0.5, lm, rb, pb, cfg, RngStream(0))
        if result.bracket_top <= 10.0:
            assert result.steps == 0
            assert result.delta_star == 0.0
