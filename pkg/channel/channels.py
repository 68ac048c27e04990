"""
Channel realizations and cascaded channels.

draw_channel_set() turns a Geometry + FadingSpec into one random ChannelSet;
cascade() forms the per-element products used by every SNR expression.
g_cu is the controller->user coefficient; by reciprocity it is the same
scalar the Phase-2 SNR calls h_CU.
"""

import logging
from dataclasses import dataclass

import numpy as np

from channel.fading import (
    LINKS,
    VECTOR_LINKS,
    FadingSpec,
    LinkModel,
    near_field_los,
    rayleigh,
    rician,
    spherical_phase,
)
from channel.geometry import Geometry, distance, path_gain, upa_positions
from errors import DimensionMismatchError
from numerics.linalg import check_finite
from numerics.rng import RngStream

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ChannelSet:
    h_au: complex
    h_ai: np.ndarray
    h_ac: complex
    h_ic: np.ndarray
    g_iu: np.ndarray
    g_cu: complex

    def __post_init__(self):
        for name in ("h_au", "h_ac", "g_cu"):
            value = check_finite(getattr(self, name), name)
            if value.size != 1:
                raise DimensionMismatchError(f"{name} must be a scalar, got shape {value.shape}")
            object.__setattr__(self, name, complex(value.reshape(-1)[0]))
        for name in ("h_ai", "h_ic", "g_iu"):
            object.__setattr__(self, name, np.atleast_1d(check_finite(getattr(self, name), name)).reshape(-1))
        if not self.h_ai.size == self.h_ic.size == self.g_iu.size:
            raise DimensionMismatchError(
                f"IRS vectors differ in length: h_ai={self.h_ai.size}, h_ic={self.h_ic.size}, g_iu={self.g_iu.size}"
            )

    @property
    def m(self) -> int:
        return self.h_ai.size

    def without_irs(self) -> "ChannelSet":
        """Same direct links, no reflecting elements (M = 0)."""
        empty = np.zeros(0, dtype=np.complex128)
        return ChannelSet(self.h_au, empty, self.h_ac, empty, empty, self.g_cu)

    def to_dict(self) -> dict:
        def pair(z):
            return [float(np.real(z)), float(np.imag(z))]

        return {
            "h_au": pair(self.h_au),
            "h_ac": pair(self.h_ac),
            "g_cu": pair(self.g_cu),
            "h_ai": [pair(z) for z in self.h_ai],
            "h_ic": [pair(z) for z in self.h_ic],
            "g_iu": [pair(z) for z in self.g_iu],
        }


@dataclass(frozen=True, eq=False)
class CascadedChannels:
    q_u: np.ndarray
    q_c: np.ndarray
    q_tilde_u: np.ndarray


def cascade(cs: ChannelSet) -> CascadedChannels:
    """q_U = conj(h_AI ∘ g_IU), q_C = conj(h_AI ∘ h_IC), q̃_U = conj(h_IC ∘ g_IU)."""
    return CascadedChannels(
        q_u=np.conj(cs.h_ai * cs.g_iu),
        q_c=np.conj(cs.h_ai * cs.h_ic),
        q_tilde_u=np.conj(cs.h_ic * cs.g_iu),
    )


# ---------------------------------------------------------------------------
# Random draws
# ---------------------------------------------------------------------------

def _link_endpoints(link: str, geometry: Geometry):
    """(node, far end) per link; the far end of a vector link is the IRS."""
    return {
        "au": (geometry.ap_pos, geometry.user_pos),
        "ai": (geometry.ap_pos, None),
        "ac": (geometry.ap_pos, geometry.controller_pos),
        "ic": (geometry.controller_pos, None),
        "iu": (geometry.user_pos, None),
        "cu": (geometry.controller_pos, geometry.user_pos),
    }[link]


def _draw_link(rng: RngStream, link: str, geometry: Geometry, spec: FadingSpec, elements: np.ndarray) -> np.ndarray:
    node, other = _link_endpoints(link, geometry)
    model = spec.models[link]
    exponent = spec.exponents[link]

    if link in VECTOR_LINKS:
        targets = elements
        d_mean = distance(node, geometry.irs_center_pos)
    else:
        targets = np.atleast_2d(np.asarray(other, dtype=float))
        d_mean = distance(node, other)
    d_exact = np.linalg.norm(targets - np.asarray(node, dtype=float), axis=1)

    if model is LinkModel.NEAR_FIELD_LOS:
        return near_field_los(targets, node, spec.gamma0_db, geometry.wavelength)

    gain = path_gain(spec.gamma0_db, d_mean, exponent)
    if model is LinkModel.RAYLEIGH:
        return rayleigh(rng, targets.shape[0], gain)
    return rician(rng, spherical_phase(d_exact, geometry.wavelength), spec.rician_k_db, gain)


def draw_channel_set(rng: RngStream, geometry: Geometry, spec: FadingSpec, d0: float) -> ChannelSet:
    """
    One realization of all six links with the user at (d0, y_user, z_user).

    Each link draws from its own substream of `rng`, so changing one link's
    model never shifts the samples of another.
    """
    geometry = geometry.with_user_at(d0)
    elements = upa_positions(geometry)
    links = {
        link: _draw_link(rng.substream(i), link, geometry, spec, elements)
        for i, link in enumerate(LINKS)
    }
    return ChannelSet(
        h_au=links["au"][0],
        h_ai=links["ai"],
        h_ac=links["ac"][0],
        h_ic=links["ic"],
        g_iu=links["iu"],
        g_cu=links["cu"][0],
    )
