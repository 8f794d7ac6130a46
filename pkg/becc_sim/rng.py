"""
Seeded random source for reproducible simulation runs.

Every run owns exactly one `SeededRNG`, backed by numpy's PCG64 bit generator
(64-bit seed, 128-bit state). All randomness of a run (deployment, energy
draws, elections) is consumed from this single sequential stream, so a run is
a pure function of its configuration and seed.
"""

from typing import Sequence

import numpy as np

PRNG_ALGORITHM = "PCG64"
MAX_SEED = 2 ** 64 - 1


class SeededRNG:
    """Wrapper around numpy.random.Generator(PCG64) for deterministic simulation"""

    def __init__(self, seed: int):
        if not 0 <= seed <= MAX_SEED:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self._seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self._seed))

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def algorithm(self) -> str:
        return PRNG_ALGORITHM

    def random(self) -> float:
        """One float in [0, 1)."""
        return float(self._gen.random())

    def uniform(self, low: float, high: float, size=None):
        return self._gen.uniform(low, high, size=size)

    def sample_without_replacement(self, population: int, k: int) -> Sequence[int]:
        """k distinct indices from range(population), in draw order."""
        return [int(i) for i in self._gen.choice(population, size=k, replace=False)]
