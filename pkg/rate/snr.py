"""
SNRs, rates and closed-form reflection vectors.

All quantities are linear (powers in mW, rates in bps/Hz). dB/dBm values
are converted once, when the config is parsed.

  Phase 1 (AP transmits):        ρ_U(θ1) = P_A|h_AU + q_U^H θ1|²/σ²
                                 ρ_C(θ1) = P_A|h_AC + q_C^H θ1|²/σ²
  Phase 2 (controller relays):   ρ̃_U(θ2) = P_C|g_CU + q̃_U^H θ2|²/σ²
  Relaying rate:                 C1 = min{αR_U + (1-α)R̃_U*, αR_C}
"""

from dataclasses import dataclass

import numpy as np

from channel.channels import CascadedChannels, ChannelSet
from errors import AlphaOutOfRangeError, DimensionMismatchError, ValidationError

# ---------------------------------------------------------------------------
# Units
# ---------------------------------------------------------------------------

def dbm_to_mw(dbm: float) -> float:
    return 10 ** (dbm / 10)


def to_rate(snr):
    """log2(1 + snr), elementwise."""
    return np.log2(1.0 + np.asarray(snr, dtype=float)) if np.ndim(snr) else float(np.log2(1.0 + snr))


@dataclass(frozen=True)
class PowerBudget:
    """p_c = 0 models a silent controller."""

    p_a: float
    p_c: float
    p_max: float
    sigma2: float

    def __post_init__(self):
        slack = 1e-12 * self.p_max
        if not 0 < self.p_a <= self.p_max + slack:
            raise ValidationError(f"need 0 < p_a <= p_max, got p_a={self.p_a}, p_max={self.p_max}")
        if not 0 <= self.p_c <= self.p_max + slack:
            raise ValidationError(f"need 0 <= p_c <= p_max, got p_c={self.p_c}, p_max={self.p_max}")
        if self.sigma2 <= 0:
            raise ValidationError(f"sigma2 must be > 0, got {self.sigma2}")


# ---------------------------------------------------------------------------
# SNRs
# ---------------------------------------------------------------------------

def combined_gain(h: complex, q, thetas) -> np.ndarray:
    """
    |h + q^H θ|² for one θ (shape (M,)) or many (shape (M, K), one per column).
    """
    q = np.asarray(q, dtype=np.complex128)
    thetas = np.asarray(thetas, dtype=np.complex128)
    if thetas.shape[0] != q.size:
        raise DimensionMismatchError(f"q has length {q.size} but theta has {thetas.shape[0]} entries")
    return np.abs(h + q.conj() @ thetas) ** 2


def snr_user_phase1(pb: PowerBudget, h_au: complex, q_u, theta1) -> float:
    return float(pb.p_a * combined_gain(h_au, q_u, theta1) / pb.sigma2)


def snr_controller_phase1(pb: PowerBudget, h_ac: complex, q_c, theta1) -> float:
    return float(pb.p_a * combined_gain(h_ac, q_c, theta1) / pb.sigma2)


def snr_user_phase2(pb: PowerBudget, g_cu: complex, q_tilde_u, theta2) -> float:
    return float(pb.p_c * combined_gain(g_cu, q_tilde_u, theta2) / pb.sigma2)


def align_phases(h: complex, q) -> np.ndarray:
    """
    θ[m] = e^{j(∠h + ∠q[m])}, which makes every reflected term add in phase
    with h: |h + q^H θ| = |h| + ||q||_1. ∠0 is taken as 0.
    """
    q = np.asarray(q, dtype=np.complex128)
    return np.exp(1j * (np.angle(h) + np.angle(q)))


def aligned_gain(h: complex, q) -> float:
    """(|h| + ||q||_1)², the maximum of |h + q^H θ|² over unit-modulus θ."""
    return float((abs(h) + np.sum(np.abs(q))) ** 2)


# ---------------------------------------------------------------------------
# Closed-form optima and rate breakdown
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClosedFormOptima:
    rho_u_star: float
    rho_c_star: float
    rho_u_tilde_star: float
    theta_u_star: np.ndarray
    theta_c_star: np.ndarray
    theta2_star: np.ndarray

    @property
    def c2_star(self) -> float:
        return to_rate(self.rho_u_star)

    @property
    def r_c_star(self) -> float:
        return to_rate(self.rho_c_star)

    @property
    def r_u_tilde_star(self) -> float:
        return to_rate(self.rho_u_tilde_star)


def closed_form_optima(pb: PowerBudget, cs: ChannelSet, casc: CascadedChannels) -> ClosedFormOptima:
    return ClosedFormOptima(
        rho_u_star=pb.p_a * aligned_gain(cs.h_au, casc.q_u) / pb.sigma2,
        rho_c_star=pb.p_a * aligned_gain(cs.h_ac, casc.q_c) / pb.sigma2,
        rho_u_tilde_star=pb.p_c * aligned_gain(cs.g_cu, casc.q_tilde_u) / pb.sigma2,
        theta_u_star=align_phases(cs.h_au, casc.q_u),
        theta_c_star=align_phases(cs.h_ac, casc.q_c),
        theta2_star=align_phases(cs.g_cu, casc.q_tilde_u),
    )


@dataclass(frozen=True)
class RateBreakdown:
    r_u: float
    r_c: float
    r_u_tilde_star: float
    c2_star: float
    rho_u: float
    rho_c: float
    rho_u_tilde_star: float
    rho_u_star: float
    rho_c_star: float

    @property
    def r_c_star(self) -> float:
        return to_rate(self.rho_c_star)

    def at(self, r_u: float | None, r_c: float | None) -> tuple[float, float]:
        return (self.r_u if r_u is None else r_u, self.r_c if r_c is None else r_c)


def rate_breakdown(pb: PowerBudget, cs: ChannelSet, casc: CascadedChannels, theta1) -> RateBreakdown:
    opt = closed_form_optima(pb, cs, casc)
    rho_u = snr_user_phase1(pb, cs.h_au, casc.q_u, theta1)
    rho_c = snr_controller_phase1(pb, cs.h_ac, casc.q_c, theta1)
    return RateBreakdown(
        r_u=to_rate(rho_u),
        r_c=to_rate(rho_c),
        r_u_tilde_star=opt.r_u_tilde_star,
        c2_star=opt.c2_star,
        rho_u=rho_u,
        rho_c=rho_c,
        rho_u_tilde_star=opt.rho_u_tilde_star,
        rho_u_star=opt.rho_u_star,
        rho_c_star=opt.rho_c_star,
    )


# ---------------------------------------------------------------------------
# Relaying rate and gap to the conventional case
# ---------------------------------------------------------------------------

def _check_alpha(alpha: float) -> None:
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRangeError(f"alpha must lie in [0, 1], got {alpha}")


def relay_rate(r_u, r_c, r_u_tilde_star, alpha):
    """min{αR_U + (1-α)R̃_U*, αR_C}; broadcasts over arrays, no checks."""
    return np.minimum(alpha * r_u + (1.0 - alpha) * r_u_tilde_star, alpha * r_c)


def rate_c1(rb: RateBreakdown, alpha: float, r_u: float | None = None, r_c: float | None = None) -> float:
    """C1(θ1, α); r_u / r_c default to the breakdown's θ1-dependent rates."""
    _check_alpha(alpha)
    r_u, r_c = rb.at(r_u, r_c)
    return float(relay_rate(r_u, r_c, rb.r_u_tilde_star, alpha))


def rate_gap(
    rb: RateBreakdown, alpha: float, r_u: float | None = None, r_c: float | None = None
) -> tuple[float, float, float]:
    """(Δ, Δ1, Δ2) with Δ = C1 - C2* = min(Δ1, Δ2)."""
    _check_alpha(alpha)
    r_u, r_c = rb.at(r_u, r_c)
    delta1 = alpha * (r_u - rb.r_u_tilde_star) + rb.r_u_tilde_star - rb.c2_star
    delta2 = alpha * r_c - rb.c2_star
    return min(delta1, delta2), delta1, delta2
