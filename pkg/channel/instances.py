"""
Geometry-free random instances for the property suites and the oracle check.

Every coefficient is CN(0, 10^(x/10)) with x drawn uniformly from
[-spread_db/2, spread_db/2] per link, so both "relaying helps" and
"relaying never helps" instances show up in a modest sample.
"""

import numpy as np

from channel.channels import ChannelSet
from numerics.rng import RngStream, sample_cn


def _link(rng: RngStream, n: int, spread_db: float) -> np.ndarray:
    power_db = rng.uniform(-spread_db / 2, spread_db / 2)
    return np.sqrt(10 ** (power_db / 10)) * sample_cn(rng, n)


def random_channel_set(rng: RngStream, m: int, spread_db: float = 30.0) -> ChannelSet:
    if m == 0:
        empty = np.zeros(0, dtype=np.complex128)
        h_ai = h_ic = g_iu = empty
    else:
        h_ai = _link(rng, m, spread_db)
        h_ic = _link(rng, m, spread_db)
        g_iu = _link(rng, m, spread_db)
    return ChannelSet(
        h_au=_link(rng, 1, spread_db)[0],
        h_ai=h_ai,
        h_ac=_link(rng, 1, spread_db)[0],
        h_ic=h_ic,
        g_iu=g_iu,
        g_cu=_link(rng, 1, spread_db)[0],
    )
