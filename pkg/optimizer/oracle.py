"""
Exhaustive-search reference solver for small IRS sizes.

Every θ1 on a uniform phase grid is paired with every α on a uniform grid
(plus the closed-form α* where it applies); relaying candidates must satisfy
ρ_C(θ1) > ρ_U(θ1). Cost grows as grid^M, hence the M <= 4 limit.
"""

import logging

import numpy as np

from channel.channels import CascadedChannels, ChannelSet
from errors import TooLargeError
from optimizer.alternating import Solution, conventional_solution, select_mode
from rate.snr import PowerBudget, closed_form_optima, combined_gain, relay_rate, to_rate

logger = logging.getLogger(__name__)

MAX_ORACLE_M = 4
CELLS_PER_CHUNK = 4_000_000


def phase_grid(m: int, points: int, start: int, stop: int) -> np.ndarray:
    """Columns start..stop-1 of the full grid of m phases with `points` levels each."""
    if m == 0:
        return np.zeros((0, stop - start), dtype=np.complex128)
    index = np.array(np.unravel_index(np.arange(start, stop), (points,) * m))
    return np.exp(2j * np.pi * index / points)


def grid_p31_value(
    alpha: float,
    pb: PowerBudget,
    cs: ChannelSet,
    casc: CascadedChannels,
    phase_grid_points: int,
) -> float:
    """max over the phase grid of min{αR_U + (1-α)R̃_U*, αR_C} at a fixed α."""
    if cs.m > MAX_ORACLE_M:
        raise TooLargeError(f"grid search supports M <= {MAX_ORACLE_M}, got {cs.m}")
    r_u_tilde_star = closed_form_optima(pb, cs, casc).r_u_tilde_star
    total = phase_grid_points ** cs.m
    best = -np.inf
    for start in range(0, total, CELLS_PER_CHUNK):
        thetas = phase_grid(cs.m, phase_grid_points, start, min(start + CELLS_PER_CHUNK, total))
        r_u = to_rate(pb.p_a * combined_gain(cs.h_au, casc.q_u, thetas) / pb.sigma2)
        r_c = to_rate(pb.p_a * combined_gain(cs.h_ac, casc.q_c, thetas) / pb.sigma2)
        best = max(best, float(np.max(relay_rate(r_u, r_c, r_u_tilde_star, alpha))))
    return best


def brute_force_p1(
    channels: ChannelSet,
    casc: CascadedChannels,
    pb: PowerBudget,
    phase_grid_points: int = 64,
    alpha_grid_points: int = 1001,
) -> Solution:
    m = channels.m
    if m > MAX_ORACLE_M:
        raise TooLargeError(f"brute force supports M <= {MAX_ORACLE_M}, got {m}")

    opt = closed_form_optima(pb, channels, casc)
    alphas = np.linspace(0.0, 1.0, alpha_grid_points)
    total = phase_grid_points ** m
    chunk = max(1, CELLS_PER_CHUNK // alpha_grid_points)

    best_rate, best_theta, best_alpha = -np.inf, None, None
    for start in range(0, total, chunk):
        thetas = phase_grid(m, phase_grid_points, start, min(start + chunk, total))
        r_u = to_rate(pb.p_a * combined_gain(channels.h_au, casc.q_u, thetas) / pb.sigma2)
        r_c = to_rate(pb.p_a * combined_gain(channels.h_ac, casc.q_c, thetas) / pb.sigma2)
        valid = r_c > r_u
        if not np.any(valid):
            continue
        r_u, r_c, thetas = r_u[valid], r_c[valid], thetas[:, valid]

        table = relay_rate(r_u[:, None], r_c[:, None], opt.r_u_tilde_star, alphas[None, :])
        grid_pick = np.argmax(table, axis=1)
        rates = table[np.arange(table.shape[0]), grid_pick]
        picks = alphas[grid_pick]

        # closed-form α* where its preconditions hold
        exact = opt.r_u_tilde_star > r_u
        alpha_star = np.where(exact, opt.r_u_tilde_star / (r_c + opt.r_u_tilde_star - r_u), 1.0)
        exact_rates = np.where(exact, relay_rate(r_u, r_c, opt.r_u_tilde_star, alpha_star), -np.inf)
        use_exact = exact_rates > rates
        rates = np.where(use_exact, exact_rates, rates)
        picks = np.where(use_exact, alpha_star, picks)

        i = int(np.argmax(rates))
        if rates[i] > best_rate:
            best_rate, best_theta, best_alpha = float(rates[i]), thetas[:, i].copy(), float(picks[i])

    if best_theta is None:
        return conventional_solution(pb, channels, casc, opt)
    logger.debug(f"brute force over {total} phase points: best relaying rate {best_rate:.6f}, C2*={opt.c2_star:.6f}")
    return select_mode(pb, channels, casc, best_theta, best_alpha)
