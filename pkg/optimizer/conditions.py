"""
Time allocation and the relaying-vs-conventional conditions.

  optimal_alpha  : the crossing point of the two C1 branches, α* = R̃_U*/(R_C + R̃_U* - R_U)
  check_prop1    : sufficient condition for relaying to never beat the conventional IRS
  check_prop2    : sufficient condition for relaying to strictly beat it at a given θ1
"""

from errors import PreconditionViolatedError
from rate.snr import RateBreakdown


def optimal_alpha(r_u: float, r_c: float, r_u_tilde_star: float) -> float:
    """
    Maximizer of min{αR_U + (1-α)R̃_U*, αR_C} over α in [0, 1].

    Needs R_C > R_U (the controller hears the AP better than the user does)
    and R̃_U* > R_U (the relayed phase is worth having); otherwise the two
    branches never cross inside (0, 1) and the caller should fall back to
    the conventional mode.
    """
    if not r_c > r_u:
        raise PreconditionViolatedError(f"relaying needs R_C > R_U, got R_C={r_c}, R_U={r_u}")
    if not r_u_tilde_star > r_u:
        raise PreconditionViolatedError(f"relaying needs R~_U* > R_U, got R~_U*={r_u_tilde_star}, R_U={r_u}")
    return r_u_tilde_star / (r_c + r_u_tilde_star - r_u)


def best_alpha(r_u: float, r_c: float, r_u_tilde_star: float) -> float | None:
    """optimal_alpha, or None when its preconditions fail."""
    try:
        return optimal_alpha(r_u, r_c, r_u_tilde_star)
    except PreconditionViolatedError:
        return None


def check_prop1(rb: RateBreakdown) -> bool:
    """True iff min{ρ̃_U*, ρ_C*} <= ρ_U*, in which case C1* <= C2*."""
    return min(rb.rho_u_tilde_star, rb.rho_c_star) <= rb.rho_u_star


def check_prop2(rb: RateBreakdown, r_u_at_theta1: float, r_c_at_theta1: float) -> bool:
    """
    True iff ρ̃_U* > ρ_U* and R_C(θ1) > (R̃_U* - R_U(θ1)) / (R̃_U* - C2*) · C2*.
    When it holds, some α gives C1(θ1, α) > C2*.
    """
    if not rb.rho_u_tilde_star > rb.rho_u_star:
        return False
    headroom = rb.r_u_tilde_star - rb.c2_star
    if headroom <= 0:
        return False
    threshold = (rb.r_u_tilde_star - r_u_at_theta1) / headroom * rb.c2_star
    return r_c_at_theta1 > threshold


def prop2_alpha_interval(rb: RateBreakdown, r_u_at_theta1: float, r_c_at_theta1: float) -> tuple[float, float] | None:
    """Open interval (C2*/R_C, (R̃_U* - C2*)/(R̃_U* - R_U)) of α beating C2*, or None."""
    if not check_prop2(rb, r_u_at_theta1, r_c_at_theta1):
        return None
    low = rb.c2_star / r_c_at_theta1
    high = (rb.r_u_tilde_star - rb.c2_star) / (rb.r_u_tilde_star - r_u_at_theta1)
    return low, high
