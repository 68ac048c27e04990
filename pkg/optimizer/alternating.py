"""
Alternating optimization of the time split α and the Phase-1 reflection θ1.

Each AO run repeats
    fix θ1 -> α from optimal_alpha, or α = 1 when it has no interior value
    fix α  -> θ1 from bisection_p31 + gaussian_randomization
until the relaying rate stops improving. Two runs are made, started from
θ_C* and θ_U*, and the better one is kept (relaying_search). The result is then compared with
the conventional IRS rate C2* and the larger of the two is reported.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from channel.channels import CascadedChannels, ChannelSet
from numerics.rng import RngStream
from optimizer.conditions import best_alpha, check_prop1
from optimizer.randomization import gaussian_randomization
from optimizer.sdr import bisection_p31, build_lifted
from optimizer.settings import AOConfig
from rate.snr import (
    ClosedFormOptima,
    PowerBudget,
    RateBreakdown,
    closed_form_optima,
    rate_breakdown,
    rate_c1,
)

logger = logging.getLogger(__name__)

MONOTONE_SLACK = 1e-9


class Mode(str, Enum):
    RELAYING = "relaying"
    CONVENTIONAL = "conventional"


@dataclass(frozen=True, eq=False)
class Solution:
    mode: Mode
    theta1: np.ndarray
    theta2: np.ndarray
    alpha: float
    rate: float
    iterations: int
    rate_trace: list[float] = field(default_factory=list)
    breakdown: RateBreakdown | None = None

    def to_dict(self) -> dict:
        rb = self.breakdown
        return {
            "mode": self.mode.value,
            "alpha": self.alpha,
            "rate": self.rate,
            "iterations": self.iterations,
            "rate_trace": list(self.rate_trace),
            "theta1_phase": np.angle(self.theta1).tolist(),
            "theta2_phase": np.angle(self.theta2).tolist(),
            "r_u": rb.r_u if rb else None,
            "r_c": rb.r_c if rb else None,
            "r_u_tilde_star": rb.r_u_tilde_star if rb else None,
            "c2_star": rb.c2_star if rb else None,
        }


def conventional_solution(
    pb: PowerBudget,
    cs: ChannelSet,
    casc: CascadedChannels,
    opt: ClosedFormOptima | None = None,
    iterations: int = 0,
    rate_trace=(),
) -> Solution:
    """θ1 = θ_U*, α = 1, rate = C2*."""
    opt = opt if opt is not None else closed_form_optima(pb, cs, casc)
    rb = rate_breakdown(pb, cs, casc, opt.theta_u_star)
    return Solution(
        mode=Mode.CONVENTIONAL,
        theta1=opt.theta_u_star,
        theta2=opt.theta2_star,
        alpha=1.0,
        rate=opt.c2_star,
        iterations=iterations,
        rate_trace=list(rate_trace),
        breakdown=rb,
    )


def select_mode(
    pb: PowerBudget,
    cs: ChannelSet,
    casc: CascadedChannels,
    theta1: np.ndarray,
    alpha: float,
    iterations: int = 0,
    rate_trace=(),
) -> Solution:
    """Relaying at (θ1, α) if it strictly beats C2* with ρ_C(θ1) > ρ_U(θ1); conventional otherwise."""
    opt = closed_form_optima(pb, cs, casc)
    rb = rate_breakdown(pb, cs, casc, theta1)
    c1 = rate_c1(rb, alpha)
    if c1 > rb.c2_star and rb.rho_c > rb.rho_u:
        return Solution(
            mode=Mode.RELAYING,
            theta1=theta1,
            theta2=opt.theta2_star,
            alpha=alpha,
            rate=c1,
            iterations=iterations,
            rate_trace=list(rate_trace),
            breakdown=rb,
        )
    return conventional_solution(pb, cs, casc, opt, iterations, rate_trace)


@dataclass
class RelayRun:
    theta1: np.ndarray
    alpha: float
    rate: float
    trace: list[float]


def _alternate(
    theta1: np.ndarray,
    cs: ChannelSet,
    casc: CascadedChannels,
    pb: PowerBudget,
    cfg: AOConfig,
    rng: RngStream,
) -> RelayRun | None:
    lifted = build_lifted(cs.h_au, casc.q_u, cs.h_ac, casc.q_c)
    best: RelayRun | None = None
    trace: list[float] = []

    for iteration in range(cfg.max_ao_iters):
        rb = rate_breakdown(pb, cs, casc, theta1)
        alpha = best_alpha(rb.r_u, rb.r_c, rb.r_u_tilde_star)
        if alpha is None:
            # C1 is non-decreasing in α here, so the whole slot goes to Phase 1
            logger.debug(f"AO iteration {iteration}: no interior time split at this theta1, using alpha=1")
            alpha = 1.0

        value = rate_c1(rb, alpha)
        if trace and value < trace[-1] - MONOTONE_SLACK:
            logger.warning(f"AO iteration {iteration}: rate dropped from {trace[-1]:.9f} to {value:.9f}")
            break
        trace.append(value)
        best = RelayRun(theta1=theta1, alpha=alpha, rate=value, trace=list(trace))
        logger.debug(f"AO iteration {iteration}: alpha={alpha:.6f} C1={value:.6f}")

        if len(trace) >= 2 and trace[-1] - trace[-2] < cfg.ao_rate_tol:
            break
        if theta1.size == 0:
            break

        step_rng = rng.substream(iteration)
        bisection = bisection_p31(alpha, lifted, rb, pb, cfg, rng=step_rng.substream(0), init=np.append(theta1, 1.0))
        theta1 = gaussian_randomization(
            bisection.psi_star, alpha, pb, cs, casc, cfg, step_rng.substream(1), incumbents=(theta1,)
        )

    return best


def relaying_search(
    channels: ChannelSet,
    casc: CascadedChannels,
    pb: PowerBudget,
    cfg: AOConfig,
    rng: RngStream,
    opt: ClosedFormOptima | None = None,
) -> RelayRun | None:
    """Best AO run over the θ_C* and θ_U* starts, with no mode decision."""
    opt = opt if opt is not None else closed_form_optima(pb, channels, casc)
    runs = []
    for index, start in enumerate((opt.theta_c_star, opt.theta_u_star)):
        run = _alternate(start, channels, casc, pb, cfg, rng.substream(index))
        if run is not None:
            runs.append(run)
    return max(runs, key=lambda r: r.rate) if runs else None


def ao_solve(
    channels: ChannelSet,
    casc: CascadedChannels,
    pb: PowerBudget,
    cfg: AOConfig,
    rng: RngStream | None = None,
) -> Solution:
    """Jointly optimized (θ1, α); always returns a valid Solution."""
    rng = rng if rng is not None else RngStream(0)
    opt = closed_form_optima(pb, channels, casc)
    rb = rate_breakdown(pb, channels, casc, opt.theta_u_star)

    if check_prop1(rb):
        logger.debug("min(rho~_U*, rho_C*) <= rho_U*: relaying cannot help")
        return conventional_solution(pb, channels, casc, opt)
    if abs(channels.h_ac) + float(np.sum(np.abs(casc.q_c))) == 0:
        logger.debug("controller unreachable from the AP")
        return conventional_solution(pb, channels, casc, opt)

    best = relaying_search(channels, casc, pb, cfg, rng, opt)
    if best is None:
        return conventional_solution(pb, channels, casc, opt)
    return select_mode(pb, channels, casc, best.theta1, best.alpha, len(best.trace), best.trace)


def fixed_alpha_solve(
    channels: ChannelSet,
    casc: CascadedChannels,
    pb: PowerBudget,
    cfg: AOConfig,
    alpha: float,
    rng: RngStream | None = None,
) -> Solution:
    """
    Relaying with a prescribed time split: one reflection step at α, no
    fallback to C2* unless the decoding condition ρ_C(θ1) > ρ_U(θ1) fails.
    """
    rng = rng if rng is not None else RngStream(0)
    opt = closed_form_optima(pb, channels, casc)
    theta1 = opt.theta_c_star
    if channels.m > 0:
        rb = rate_breakdown(pb, channels, casc, theta1)
        lifted = build_lifted(channels.h_au, casc.q_u, channels.h_ac, casc.q_c)
        bisection = bisection_p31(alpha, lifted, rb, pb, cfg, rng=rng.substream(0), init=np.append(theta1, 1.0))
        theta1 = gaussian_randomization(
            bisection.psi_star, alpha, pb, channels, casc, cfg, rng.substream(1), incumbents=(theta1,)
        )

    rb = rate_breakdown(pb, channels, casc, theta1)
    if rb.rho_c > rb.rho_u:
        rate = rate_c1(rb, alpha)
        return Solution(
            mode=Mode.RELAYING,
            theta1=theta1,
            theta2=opt.theta2_star,
            alpha=alpha,
            rate=rate,
            iterations=1,
            rate_trace=[rate],
            breakdown=rb,
        )
    return conventional_solution(pb, channels, casc, opt, iterations=1)
