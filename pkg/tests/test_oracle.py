import numpy as np
import pytest

from errors import TooLargeError
from numerics.rng import RngStream
from optimizer.alternating import Mode, ao_solve
from optimizer.conditions import best_alpha
from optimizer.oracle import brute_force_p1, grid_p31_value, phase_grid
from rate.snr import closed_form_optima, rate_breakdown, rate_c1

from conftest import PB, find_instance, instance, prop2_holds


def clear_relay_gain(cs, casc) -> bool:
    """Relaying at θ_C* beats C2* by at least 0.2 bps/Hz, so nearby grid points relay too."""
    if not prop2_holds(cs, casc):
        return False
    opt = closed_form_optima(PB, cs, casc)
    rb = rate_breakdown(PB, cs, casc, opt.theta_c_star)
    alpha = best_alpha(rb.r_u, rb.r_c, rb.r_u_tilde_star)
    return alpha is not None and rate_c1(rb, alpha) > rb.c2_star + 0.2


class TestPhaseGrid:

    def test_full_grid(self):
        grid = phase_grid(2, 4, 0, 16)
        assert grid.shape == (2, 16)
        np.testing.assert_allclose(np.abs(grid), 1.0)
        # every (i, j) pair appears exactly once
        pairs = {(round(np.angle(a) / (np.pi / 2)) % 4, round(np.angle(b) / (np.pi / 2)) % 4) for a, b in grid.T}
        assert len(pairs) == 16

    def test_chunk_matches_full_grid(self):
        np.testing.assert_array_equal(phase_grid(3, 5, 40, 60), phase_grid(3, 5, 0, 125)[:, 40:60])

    def test_no_elements(self):
        assert phase_grid(0, 64, 0, 1).shape == (0, 1)


class TestBruteForce:

    def test_size_limit(self, pb):
        cs, casc = instance(0, 5)
        with pytest.raises(TooLargeError):
            brute_force_p1(cs, casc, pb)
        with pytest.raises(TooLargeError):
            grid_p31_value(0.5, pb, cs, casc, 8)

    def test_never_below_conventional(self, pb):
        for seed in range(10):
            cs, casc = instance(seed, 1)
            solution = brute_force_p1(cs, casc, pb, phase_grid_points=32, alpha_grid_points=101)
            assert solution.rate >= closed_form_optima(pb, cs, casc).c2_star

    def test_scalar_relay_closed_form(self, pb):
        cs, casc = find_instance(0, prop2_holds)
        solution = brute_force_p1(cs, casc, pb)
        rb = rate_breakdown(pb, cs, casc, np.zeros(0))
        expected = rb.r_u_tilde_star * rb.r_c / (rb.r_c + rb.r_u_tilde_star - rb.r_u)
        assert solution.mode is Mode.RELAYING
        assert solution.rate == pytest.approx(expected, rel=1e-12)

    def test_relaying_solution_is_consistent(self, pb):
        cs, casc = find_instance(2, clear_relay_gain)
        solution = brute_force_p1(cs, casc, pb, phase_grid_points=32, alpha_grid_points=201)
        assert solution.mode is Mode.RELAYING
        rb = solution.breakdown
        assert rb.rho_c > rb.rho_u
        assert solution.rate == pytest.approx(rate_c1(rb, solution.alpha))

    def test_grid_value_bounds_relaying_rate(self, pb):
        cs, casc = find_instance(2, clear_relay_gain)
        best = brute_force_p1(cs, casc, pb, phase_grid_points=16, alpha_grid_points=101)
        assert best.mode is Mode.RELAYING
        assert grid_p31_value(best.alpha, pb, cs, casc, 16) >= best.rate - 1e-12


@pytest.mark.slow
class TestAgainstAo:

    @pytest.mark.parametrize("m", [1, 2])
    def test_ao_close_to_brute_force(self, pb, fast_ao, m):
        ratios = []
        for seed in range(10):
            cs, casc = instance(seed, m)
            ao = ao_solve(cs, casc, pb, fast_ao, RngStream(seed))
            reference = brute_force_p1(cs, casc, pb, phase_grid_points=64, alpha_grid_points=1001)
            ratios.append(ao.rate / reference.rate)
        assert np.mean(np.array(ratios) >= 0.95) >= 0.8
