import numpy as np
import pytest

from channel.channels import ChannelSet, cascade
from errors import AlphaOutOfRangeError, DimensionMismatchError, ValidationError
from numerics.rng import RngStream
from rate.snr import (
    PowerBudget,
    align_phases,
    aligned_gain,
    closed_form_optima,
    combined_gain,
    dbm_to_mw,
    rate_breakdown,
    rate_c1,
    rate_gap,
    snr_controller_phase1,
    snr_user_phase1,
    snr_user_phase2,
    to_rate,
)

from conftest import instance


class TestUnits:

    def test_dbm(self):
        assert dbm_to_mw(8.0) == pytest.approx(6.309573, rel=1e-6)
        assert dbm_to_mw(-50.0) == pytest.approx(1e-5)

    def test_to_rate(self):
        assert to_rate(1.0) == pytest.approx(1.0)
        np.testing.assert_allclose(to_rate(np.array([0.0, 3.0])), [0.0, 2.0])

    @pytest.mark.parametrize("kwargs", [
        dict(p_a=0.0, p_c=1.0, p_max=1.0, sigma2=1.0),
        dict(p_a=2.0, p_c=1.0, p_max=1.0, sigma2=1.0),
        dict(p_a=1.0, p_c=-1.0, p_max=1.0, sigma2=1.0),
        dict(p_a=1.0, p_c=1.0, p_max=1.0, sigma2=0.0),
    ])
    def test_power_budget_validation(self, kwargs):
        with pytest.raises(ValidationError):
            PowerBudget(**kwargs)

    def test_silent_controller_allowed(self):
        assert PowerBudget(p_a=1.0, p_c=0.0, p_max=1.0, sigma2=1.0).p_c == 0.0


class TestSnr:

    def test_phase_snrs(self, pb):
        q = np.array([1.0, 1j])
        theta = np.array([1.0, -1j])
        # q^H θ = 1 + (-1j)(-1j) = 1 - 1 = 0
        assert snr_user_phase1(pb, 2.0, q, theta) == pytest.approx(4.0 / pb.sigma2)
        assert snr_controller_phase1(pb, 0.0, q, np.array([1.0, 1j])) == pytest.approx(4.0 / pb.sigma2)
        assert snr_user_phase2(pb, 1.0, np.zeros(2), theta) == pytest.approx(1.0 / pb.sigma2)

    def test_combined_gain_columns(self):
        q = np.array([1.0, 1.0])
        thetas = np.array([[1.0, 1.0], [1.0, -1.0]])
        np.testing.assert_allclose(combined_gain(0.0, q, thetas), [4.0, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            combined_gain(1.0, np.ones(3), np.ones(2))

    def test_align_phases_reaches_triangle_bound(self):
        rng = np.random.default_rng(5)
        h = complex(rng.standard_normal() + 1j * rng.standard_normal())
        q = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        theta = align_phases(h, q)
        np.testing.assert_allclose(np.abs(theta), 1.0)
        assert combined_gain(h, q, theta) == pytest.approx(aligned_gain(h, q))
        assert aligned_gain(h, q) == pytest.approx((abs(h) + np.abs(q).sum()) ** 2)

    def test_align_phases_beats_random_vectors(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            h = complex(rng.standard_normal() + 1j * rng.standard_normal())
            q = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            best = combined_gain(h, q, align_phases(h, q))
            random = combined_gain(h, q, np.exp(2j * np.pi * rng.random((4, 1000))))
            assert np.all(random <= best * (1 + 1e-12))

    def test_conventional_rate_without_cascaded_channels(self, pb):
        zeros = np.zeros(4)
        cs = ChannelSet(h_au=0.3 + 0.4j, h_ai=zeros, h_ac=1.0, h_ic=zeros, g_iu=zeros, g_cu=1.0)
        opt = closed_form_optima(pb, cs, cascade(cs))
        assert opt.c2_star == pytest.approx(np.log2(1 + pb.p_a * 0.25 / pb.sigma2))


class TestRelayRate:

    def test_c1_is_the_smaller_branch(self, pb):
        cs, casc = instance(3, 3)
        theta = align_phases(cs.h_ac, casc.q_c)
        rb = rate_breakdown(pb, cs, casc, theta)
        alpha = 0.4
        expected = min(alpha * rb.r_u + (1 - alpha) * rb.r_u_tilde_star, alpha * rb.r_c)
        assert rate_c1(rb, alpha) == pytest.approx(expected)

    def test_alpha_one_recovers_direct_phase(self, pb):
        cs, casc = instance(4, 2)
        rb = rate_breakdown(pb, cs, casc, closed_form_optima(pb, cs, casc).theta_u_star)
        assert rate_c1(rb, 1.0) == pytest.approx(min(rb.r_u, rb.r_c))

    @pytest.mark.parametrize("alpha", [-0.1, 1.5])
    def test_alpha_range(self, pb, alpha):
        cs, casc = instance(0, 2)
        rb = rate_breakdown(pb, cs, casc, np.ones(2))
        with pytest.raises(AlphaOutOfRangeError):
            rate_c1(rb, alpha)

    def test_gap_matches_difference(self, pb):
        for seed in range(20):
            cs, casc = instance(seed, 3)
            theta = np.exp(1j * RngStream(seed).uniform(0, 2 * np.pi, size=3))
            rb = rate_breakdown(pb, cs, casc, theta)
            for alpha in (0.1, 0.5, 0.9):
                gap, d1, d2 = rate_gap(rb, alpha)
                assert gap == pytest.approx(min(d1, d2))
                assert gap == pytest.approx(rate_c1(rb, alpha) - rb.c2_star, abs=1e-12)

    def test_rates_override(self, pb):
        cs, casc = instance(1, 2)
        rb = rate_breakdown(pb, cs, casc, np.ones(2))
        assert rate_c1(rb, 0.5, r_u=1.0, r_c=2.0) == pytest.approx(min(0.5 + 0.5 * rb.r_u_tilde_star, 1.0))
