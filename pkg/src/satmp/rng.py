"""Seeded random streams.

Every consumer derives its own PCG64 stream from ``(seed, purpose)`` through
numpy's SeedSequence, so draws never depend on the order in which unrelated
components consume randomness.
"""

from __future__ import annotations

import numpy as np

from .formula import Assignment

# purpose tags for SeedSequence spawn keys
INIT = 0
DRAWS = 1
CODEBOOK = 2
CLASSIC = 3
INSTANCE = 4

_MASK64 = (1 << 64) - 1


class RngStream:
    def __init__(self, seed: int, purpose: int = 0):
        self.seed = int(seed) & _MASK64
        self.purpose = purpose
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=(purpose,))))
        self.position = 0

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def random(self, size=None):
        """Uniform on [0, 1)."""
        self.position += 1 if size is None else int(np.prod(size))
        return self._gen.random(size)

    def unit_interval(self, size=None):
        """Uniform on (0, 1]."""
        return 1.0 - self.random(size)

    def integers(self, low: int, high: int, size=None):
        self.position += 1 if size is None else int(np.prod(size))
        return self._gen.integers(low, high, size=size)

    def below(self, n: int) -> int:
        return int(self.integers(0, n))

    def normal(self, size):
        self.position += int(np.prod(size))
        return self._gen.standard_normal(size)


def initial_assignment(num_vars: int, seed: int) -> Assignment:
    """The starting assignment every seeded local search (and the MP machine) shares."""
    bits = RngStream(seed, INIT).integers(0, 2, size=num_vars)
    return Assignment(tuple(bool(b) for b in bits))


def derive_seed(seed: int, index: int) -> int:
    ss = np.random.SeedSequence(int(seed) & _MASK64, spawn_key=(INSTANCE, index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


class CoupledStream:
    """Per-iteration draw vectors ``u_k`` of length 2n, one value per literal node.

    Two consumers built from the same ``(seed, num_literals, levels)`` read
    identical vectors at identical iterations. ``levels`` quantises the draws to
    the grid {1/L, ..., 1}; it exists so tests can force argmax ties.
    """

    def __init__(self, seed: int, num_literals: int, levels: int | None = None):
        if levels is not None and levels < 1:
            raise ValueError("levels must be >= 1")
        self.seed = seed
        self.num_literals = num_literals
        self.levels = levels
        self._rng = RngStream(seed, DRAWS)
        self.iteration = 0

    def _shape(self, u):
        if self.levels is not None:
            u = np.ceil(u * self.levels) / self.levels
        return u

    def next(self) -> np.ndarray:
        """Draw vector for the next iteration (iterations count from 1)."""
        self.iteration += 1
        return self._shape(self._rng.unit_interval(self.num_literals))

    def block(self, count: int) -> np.ndarray:
        """The next ``count`` draw vectors as rows; same values as ``count`` calls to next()."""
        self.iteration += count
        return self._shape(self._rng.unit_interval((count, self.num_literals)))
