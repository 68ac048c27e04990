"""
Recover a unit-modulus θ1 from a relaxed witness Ψ by Gaussian randomization.
"""

import logging

import numpy as np

from channel.channels import CascadedChannels, ChannelSet
from errors import NotPSDError
from numerics.linalg import cholesky_psd, herm_eig, is_psd
from numerics.rng import RngStream, sample_cn_block
from optimizer.settings import AOConfig
from rate.snr import PowerBudget, closed_form_optima, combined_gain, relay_rate, to_rate

logger = logging.getLogger(__name__)


def project_unit_modulus(x) -> np.ndarray:
    """e^{j∠x}, elementwise; zero entries map to 1."""
    return np.exp(1j * np.angle(np.asarray(x, dtype=np.complex128)))


def lift_to_phases(xi: np.ndarray) -> np.ndarray:
    """
    θ1 = e^{j∠(ξ_{1:M} / ξ_{M+1})} for a column (or columns) of lifted samples.
    Dividing by the last coordinate removes the global phase of the lifting.
    """
    head, tail = xi[:-1], xi[-1]
    ratio = np.where(np.abs(tail) > 0, head / np.where(np.abs(tail) > 0, tail, 1.0), head)
    return project_unit_modulus(ratio)


def relay_rates(alpha: float, pb: PowerBudget, cs: ChannelSet, casc: CascadedChannels, thetas: np.ndarray) -> np.ndarray:
    """C1(θ, α) for every column of `thetas`."""
    r_u = to_rate(pb.p_a * combined_gain(cs.h_au, casc.q_u, thetas) / pb.sigma2)
    r_c = to_rate(pb.p_a * combined_gain(cs.h_ac, casc.q_c, thetas) / pb.sigma2)
    r_u_tilde_star = closed_form_optima(pb, cs, casc).r_u_tilde_star
    return relay_rate(r_u, r_c, r_u_tilde_star, alpha)


def gaussian_randomization(
    psi: np.ndarray,
    alpha: float,
    pb: PowerBudget,
    cs: ChannelSet,
    casc: CascadedChannels,
    cfg: AOConfig,
    rng: RngStream,
    incumbents=(),
) -> np.ndarray:
    """
    Best θ1 by C1(θ1, α) among: `randomization_count` draws ξ ~ CN(0, Ψ),
    the dominant eigenvector of Ψ, both closed-form vectors θ_U*, θ_C*, and
    any `incumbents` (e.g. the current AO iterate).
    """
    m = psi.shape[0] - 1
    if m == 0:
        return np.zeros(0, dtype=np.complex128)

    eigenvalues, eigenvectors = herm_eig(psi)
    if not is_psd(eigenvalues):
        raise NotPSDError(f"witness has eigenvalue {eigenvalues[0]:.3e} (max {eigenvalues[-1]:.3e})")

    lower = cholesky_psd(psi, shift=cfg.cholesky_shift)
    xi = lower @ sample_cn_block(rng, m + 1, cfg.randomization_count)

    opt = closed_form_optima(pb, cs, casc)
    fixed = [lift_to_phases(eigenvectors[:, -1]), opt.theta_u_star, opt.theta_c_star]
    fixed += [project_unit_modulus(theta) for theta in incumbents]
    candidates = np.column_stack([lift_to_phases(xi)] + fixed)

    rates = relay_rates(alpha, pb, cs, casc, candidates)
    best = int(np.argmax(rates))
    logger.debug(f"randomization: best C1={rates[best]:.6f} from candidate {best}/{candidates.shape[1]}")
    return candidates[:, best].copy()
