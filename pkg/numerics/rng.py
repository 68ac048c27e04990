"""
Seeded random streams.

RngStream wraps numpy's counter-based Philox generator keyed by a
SeedSequence. Substreams are addressed by a spawn key, so trial
(d0_index, trial) always sees the same samples regardless of which
worker runs it or in which order.
"""

import numpy as np

SEED_BITS = 64


class RngStream:
    """Single-owner random stream. Parallel callers must each hold a substream."""

    def __init__(self, seed: int, spawn_key: tuple[int, ...] = ()):
        seed = int(seed)
        if not 0 <= seed < 2 ** SEED_BITS:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.spawn_key = tuple(int(k) for k in spawn_key)
        sequence = np.random.SeedSequence(entropy=seed, spawn_key=self.spawn_key)
        self.generator = np.random.Generator(np.random.Philox(sequence))

    def substream(self, *keys: int) -> "RngStream":
        """Independent child stream, a pure function of (seed, spawn_key, keys)."""
        return RngStream(self.seed, self.spawn_key + tuple(keys))

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        return self.generator.uniform(low, high, size)

    def standard_normal(self, size=None):
        return self.generator.standard_normal(size)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, spawn_key={self.spawn_key})"


def sample_cn(rng: RngStream, n: int) -> np.ndarray:
    """n i.i.d. CN(0, 1) samples: real and imaginary parts each N(0, 1/2)."""
    if n < 1:
        raise ValueError(f"sample_cn needs n >= 1, got {n}")
    parts = rng.standard_normal((2, n))
    return np.sqrt(0.5) * (parts[0] + 1j * parts[1])


def sample_cn_block(rng: RngStream, rows: int, cols: int) -> np.ndarray:
    """rows x cols matrix of i.i.d. CN(0, 1) samples."""
    if rows < 1 or cols < 1:
        raise ValueError(f"sample_cn_block needs a non-empty shape, got ({rows}, {cols})")
    parts = rng.standard_normal((2, rows, cols))
    return np.sqrt(0.5) * (parts[0] + 1j * parts[1])
