"""
Small-scale fading models for the six links.

Link keys:
    au  AP -> user             ai  AP -> IRS elements
    ac  AP -> controller       ic  IRS elements -> controller
    iu  IRS elements -> user   cu  controller -> user
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from errors import ValidationError, ZeroDistanceError
from numerics.rng import RngStream, sample_cn

LINKS = ("au", "ai", "ac", "ic", "iu", "cu")
VECTOR_LINKS = ("ai", "ic", "iu")


class LinkModel(str, Enum):
    RAYLEIGH = "rayleigh"
    RICIAN = "rician"
    NEAR_FIELD_LOS = "near_field_los"


def _default_exponents() -> dict[str, float]:
    return {"au": 3.0, "ai": 2.5, "ac": 2.5, "ic": 2.5, "iu": 2.5, "cu": 2.5}


def _default_models() -> dict[str, LinkModel]:
    return {
        "au": LinkModel.RAYLEIGH,
        "ai": LinkModel.RICIAN,
        "ac": LinkModel.RICIAN,
        "ic": LinkModel.NEAR_FIELD_LOS,
        "iu": LinkModel.RICIAN,
        "cu": LinkModel.RICIAN,
    }


@dataclass(frozen=True)
class FadingSpec:
    gamma0_db: float = -30.0
    exponents: dict[str, float] = field(default_factory=_default_exponents)
    rician_k_db: float = 10.0
    models: dict[str, LinkModel] = field(default_factory=_default_models)

    def __post_init__(self):
        for link in LINKS:
            if link not in self.exponents or link not in self.models:
                raise ValidationError(f"fading spec is missing link '{link}'")
            if self.exponents[link] <= 0:
                raise ValidationError(f"path loss exponent for '{link}' must be > 0, got {self.exponents[link]}")


def spherical_phase(d, wavelength: float) -> np.ndarray:
    """Unit-magnitude LoS phase e^(-j2πd/λ) for distance(s) d."""
    return np.exp(-2j * np.pi * np.asarray(d, dtype=float) / wavelength)


def near_field_los(element_positions, point, gamma0_db: float, wavelength: float) -> np.ndarray:
    """
    Deterministic near-field LoS vector: entry m = (√γ0 / d_m)·e^(-j2πd_m/λ),
    with d_m the exact element-to-point distance.
    """
    positions = np.atleast_2d(np.asarray(element_positions, dtype=float))
    d = np.linalg.norm(positions - np.asarray(point, dtype=float), axis=1)
    if np.any(d <= 0):
        raise ZeroDistanceError(f"point {tuple(point)} coincides with an IRS element")
    return np.sqrt(10 ** (gamma0_db / 10)) / d * spherical_phase(d, wavelength)


def rician(rng: RngStream, los_component, k_db: float, mean_power_gain: float) -> np.ndarray:
    """√gain·(√(K/(K+1))·los + √(1/(K+1))·w), w ~ CN(0, I)."""
    los = np.atleast_1d(np.asarray(los_component, dtype=np.complex128))
    if mean_power_gain < 0:
        raise ValidationError(f"mean power gain must be >= 0, got {mean_power_gain}")
    k = 10 ** (k_db / 10)
    w = sample_cn(rng, los.size)
    return np.sqrt(mean_power_gain) * (np.sqrt(k / (k + 1)) * los + np.sqrt(1 / (k + 1)) * w)


def rayleigh(rng: RngStream, n: int, mean_power_gain: float) -> np.ndarray:
    """n i.i.d. CN(0, gain) coefficients."""
    return np.sqrt(mean_power_gain) * sample_cn(rng, n)
