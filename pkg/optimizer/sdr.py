"""
Semidefinite relaxation of the Phase-1 reflection subproblem.

For fixed α the reflection step maximizes δ subject to

    tr(B_U Ψ) + |h_AU|² >= c_U(δ),   tr(B_C Ψ) + |h_AC|² >= c_C(δ),
    Ψ ⪰ 0,  diag(Ψ) = 1                      (Ψ is (M+1) x (M+1))

which is solved by bisection on δ over feasibility checks. Each check is a
max-min over the elliptope, solved here in factored form Ψ = V V^H with
unit-norm rows of V (rank ceil(sqrt(M+1)) + 1), smoothed-min projected
gradient ascent and temperature annealing.

With a = [q; conj(h)] the lifted matrix is B = a a^H - |h|² e e^T, so on the
elliptope tr(BΨ) + |h|² = ||V^H a||². The solver works with that form.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from errors import AlphaOutOfRangeError, DimensionMismatchError
from numerics.linalg import as_hermitian
from numerics.rng import RngStream
from optimizer.settings import AOConfig
from rate.snr import PowerBudget, RateBreakdown, aligned_gain, to_rate

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Lifting
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LiftedMatrices:
    b_u: np.ndarray
    b_c: np.ndarray
    a_u: np.ndarray        # [q_U; conj(h_AU)]
    a_c: np.ndarray        # [q_C; conj(h_AC)]
    scale_u: float         # (|h_AU| + ||q_U||_1)², 1 when zero
    scale_c: float

    @property
    def order(self) -> int:
        return self.a_u.size


def _lift_one(h: complex, q: np.ndarray) -> np.ndarray:
    m = q.size
    b = np.zeros((m + 1, m + 1), dtype=np.complex128)
    b[:m, :m] = np.outer(q, q.conj())
    b[:m, m] = h * q
    b[m, :m] = np.conj(h) * q.conj()
    return as_hermitian(b)


def build_lifted(h_au: complex, q_u, h_ac: complex, q_c) -> LiftedMatrices:
    q_u = np.asarray(q_u, dtype=np.complex128).reshape(-1)
    q_c = np.asarray(q_c, dtype=np.complex128).reshape(-1)
    if q_u.size != q_c.size:
        raise DimensionMismatchError(f"q_U has length {q_u.size} but q_C has {q_c.size}")

    scale_u = aligned_gain(h_au, q_u)
    scale_c = aligned_gain(h_ac, q_c)
    return LiftedMatrices(
        b_u=_lift_one(h_au, q_u),
        b_c=_lift_one(h_ac, q_c),
        a_u=np.append(q_u, np.conj(h_au)),
        a_c=np.append(q_c, np.conj(h_ac)),
        scale_u=scale_u if scale_u > 0 else 1.0,
        scale_c=scale_c if scale_c > 0 else 1.0,
    )


def normalized_margins(lm: LiftedMatrices, v: np.ndarray, c_u: float, c_c: float) -> tuple[float, float]:
    """Constraint margins at Ψ = V V^H, each divided by its single-constraint maximum."""
    g_u = (float(np.sum(np.abs(v.conj().T @ lm.a_u) ** 2)) - c_u) / lm.scale_u
    g_c = (float(np.sum(np.abs(v.conj().T @ lm.a_c) ** 2)) - c_c) / lm.scale_c
    return g_u, g_c


# ---------------------------------------------------------------------------
# Elliptope max-min (Burer-Monteiro)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ElliptopeResult:
    v: np.ndarray
    slack: float           # exact min of the normalized margins at v
    improved: bool         # False: the initial iterate could not be improved
    iterations: int

    @property
    def psi(self) -> np.ndarray:
        return self.v @ self.v.conj().T


def _normalize_rows(v: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    out = np.where(norms > 0, v / np.where(norms > 0, norms, 1.0), 0.0)
    dead = norms[:, 0] == 0
    if np.any(dead):
        out[dead, 0] = 1.0
    return out


def initial_factor(n: int, rank: int, rng: RngStream, theta_bar=None, noise: float = 0.05) -> np.ndarray:
    """
    Starting factor: rows of unit norm. With theta_bar the first column is the
    rank-1 point θ̄ and the remaining columns carry `noise`-sized perturbations.
    """
    z = rng.standard_normal((2, n, rank))
    z = z[0] + 1j * z[1]
    if theta_bar is None:
        return _normalize_rows(z)
    v = noise * z
    v[:, 0] = np.asarray(theta_bar, dtype=np.complex128).reshape(-1)
    return _normalize_rows(v)


def _smoothed_min(g_u: float, g_c: float, tau: float) -> float:
    low = min(g_u, g_c)
    return low - tau * math.log1p(math.exp(-abs(g_u - g_c) / tau))


def elliptope_maxmin(
    lm: LiftedMatrices,
    c_u: float,
    c_c: float,
    cfg: AOConfig,
    rng: RngStream | None = None,
    init: np.ndarray | None = None,
    stop_at: float | None = None,
) -> ElliptopeResult:
    """
    Locally maximize min{tr(B_U Ψ) + |h_AU|² - c_U, tr(B_C Ψ) + |h_AC|² - c_C}
    (normalized) over Ψ = V V^H with unit-norm rows.

    `init` is either an (M+1, r) factor or an (M+1,) rank-1 point. The best
    iterate by exact slack is returned; `stop_at` ends the search as soon as
    that slack is reached.
    """
    rng = rng if rng is not None else RngStream(0)
    n = lm.order
    rank = cfg.rank_for(n - 1)

    if init is None:
        v = initial_factor(n, rank, rng)
    elif np.ndim(init) == 1:
        v = initial_factor(n, rank, rng, theta_bar=init, noise=cfg.bm_init_noise)
    else:
        v = _normalize_rows(np.asarray(init, dtype=np.complex128))

    g_u, g_c = normalized_margins(lm, v, c_u, c_c)
    start_slack = best_slack = min(g_u, g_c)
    best_v = v

    # ||V^H a||² <= ||a||_1², so the slack can never exceed this bound
    ceiling = min(1.0 - c_u / lm.scale_u, 1.0 - c_c / lm.scale_c)
    if (stop_at is not None and best_slack >= stop_at) or ceiling < -cfg.feasibility_slack_tol:
        return ElliptopeResult(v=v, slack=best_slack, improved=False, iterations=0)

    tau = cfg.bm_tau_start
    step = cfg.bm_step
    objective = _smoothed_min(g_u, g_c, tau)
    iterations = 0

    while iterations < cfg.bm_max_iters:
        iterations += 1

        y_u = v.conj().T @ lm.a_u
        y_c = v.conj().T @ lm.a_c
        w_u = 1.0 / (1.0 + math.exp(max(min((g_u - g_c) / tau, 700.0), -700.0)))
        grad = (w_u / lm.scale_u) * np.outer(lm.a_u, y_u.conj()) \
            + ((1.0 - w_u) / lm.scale_c) * np.outer(lm.a_c, y_c.conj())
        # tangent space of the product of spheres
        grad -= np.real(np.sum(grad * v.conj(), axis=1, keepdims=True)) * v

        accepted = False
        while step > 1e-12:
            trial = _normalize_rows(v + step * grad)
            t_u, t_c = normalized_margins(lm, trial, c_u, c_c)
            trial_objective = _smoothed_min(t_u, t_c, tau)
            if trial_objective > objective:
                accepted = True
                break
            step *= cfg.bm_step_shrink

        if accepted:
            gain = trial_objective - objective
            v, g_u, g_c, objective = trial, t_u, t_c, trial_objective
            step = min(step * 1.5, 1e3)
            if min(g_u, g_c) > best_slack:
                best_slack, best_v = min(g_u, g_c), v
                if stop_at is not None and best_slack >= stop_at:
                    break

        if not accepted or gain < cfg.bm_stall_tol:
            tau *= cfg.bm_tau_decay
            if tau < cfg.bm_tau_min:
                break
            step = cfg.bm_step
            objective = _smoothed_min(g_u, g_c, tau)

    improved = best_slack > start_slack
    if not improved:
        logger.debug(f"elliptope_maxmin: no improvement over initial slack {start_slack:.3e}")
    return ElliptopeResult(v=best_v, slack=best_slack, improved=improved, iterations=iterations)


# ---------------------------------------------------------------------------
# Feasibility and bisection
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FeasResult:
    feasible: bool
    psi: np.ndarray
    achieved_slack: float
    v: np.ndarray


def rate_targets(delta: float, alpha: float, rb: RateBreakdown, pb: PowerBudget) -> tuple[float, float]:
    """Gain thresholds (c_U, c_C) that rate target δ imposes at time split α."""
    scale = pb.sigma2 / pb.p_a
    c_u = scale * (2.0 ** (delta / alpha - (1.0 - alpha) / alpha * rb.r_u_tilde_star) - 1.0)
    c_c = scale * (2.0 ** (delta / alpha) - 1.0)
    return c_u, c_c


def sdp_feasible(
    delta: float,
    alpha: float,
    lm: LiftedMatrices,
    rb: RateBreakdown,
    pb: PowerBudget,
    cfg: AOConfig,
    rng: RngStream | None = None,
    init: np.ndarray | None = None,
) -> FeasResult:
    """Is rate target δ reachable at split α by some Ψ in the elliptope?"""
    if not 0.0 < alpha <= 1.0:
        raise AlphaOutOfRangeError(f"alpha must lie in (0, 1], got {alpha}")
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")

    c_u, c_c = rate_targets(delta, alpha, rb, pb)
    result = elliptope_maxmin(lm, c_u, c_c, cfg, rng=rng, init=init, stop_at=0.0)
    return FeasResult(
        feasible=result.slack >= -cfg.feasibility_slack_tol,
        psi=result.psi,
        achieved_slack=result.slack,
        v=result.v,
    )


@dataclass(frozen=True, eq=False)
class BisectionResult:
    delta_star: float
    psi_star: np.ndarray
    v_star: np.ndarray
    bracket_top: float
    steps: int


def bisection_bracket(alpha: float, rb: RateBreakdown) -> float:
    """Largest δ either constraint could allow on its own."""
    return min(
        alpha * to_rate(rb.rho_c_star),
        alpha * to_rate(rb.rho_u_star) + (1.0 - alpha) * rb.r_u_tilde_star,
    )


def bisection_p31(
    alpha: float,
    lm: LiftedMatrices,
    rb: RateBreakdown,
    pb: PowerBudget,
    cfg: AOConfig,
    rng: RngStream | None = None,
    init: np.ndarray | None = None,
) -> BisectionResult:
    """
    Largest feasible δ (to within bisection_eps) and its witness Ψ.
    δ = 0 is always feasible, so a witness always exists.
    """
    rng = rng if rng is not None else RngStream(0)
    low, high = 0.0, bisection_bracket(alpha, rb)

    base = sdp_feasible(0.0, alpha, lm, rb, pb, cfg, rng=rng.substream(0), init=init)
    witness = base.v
    steps = 0
    while high - low > cfg.bisection_eps:
        steps += 1
        mid = 0.5 * (low + high)
        check = sdp_feasible(mid, alpha, lm, rb, pb, cfg, rng=rng.substream(steps), init=witness)
        if check.feasible:
            low, witness = mid, check.v
        else:
            high = mid
        logger.debug(f"bisection step {steps}: delta={mid:.6f} feasible={check.feasible} slack={check.achieved_slack:.3e}")

    return BisectionResult(
        delta_star=low,
        psi_star=witness @ witness.conj().T,
        v_star=witness,
        bracket_top=bisection_bracket(alpha, rb),
        steps=steps,
    )
