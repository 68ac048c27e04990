"""
Scheme names and per-trial records shared by the sweep runner and the
result tables.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from errors import UnknownSchemeError


class Scheme(str, Enum):
    RELAYING_OPT_ALPHA = "RelayingOptAlpha"
    RELAYING_EQUAL_ALPHA = "RelayingEqualAlpha"
    CONVENTIONAL_IRS = "ConventionalIRS"
    RELAY_NO_IRS = "RelayNoIRS"

    @classmethod
    def parse(cls, name: str) -> "Scheme":
        try:
            return cls(name)
        except ValueError:
            known = ", ".join(s.value for s in cls)
            raise UnknownSchemeError(f"unknown scheme '{name}' (known: {known})") from None


@dataclass(frozen=True)
class TrialRecord:
    d0: float
    scheme: Scheme
    trial: int
    rate: float
    mode: str
    alpha: float
    seed: int


def rates_by_scheme(records: list[TrialRecord], d0: float) -> dict[Scheme, np.ndarray]:
    """Per-trial rates at one distance, in trial order, keyed by scheme."""
    out: dict[Scheme, list[float]] = {}
    for r in sorted(records, key=lambda r: r.trial):
        if r.d0 == d0:
            out.setdefault(r.scheme, []).append(r.rate)
    return {scheme: np.array(rates) for scheme, rates in out.items()}


def paired_wins(records: list[TrialRecord], d0: float, scheme: Scheme, other: Scheme, tol: float = 1e-12) -> int:
    """Trials at d0 where `scheme` reaches at least the rate of `other` on the same draw."""
    rates = rates_by_scheme(records, d0)
    return int(np.sum(rates[scheme] >= rates[other] - tol))
