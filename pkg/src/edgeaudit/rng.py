"""Seeded random streams.

Every stream is numpy's Philox4x64-10 counter-based bit generator keyed by a
:class:`numpy.random.SeedSequence`.  Child streams for parallel workers are
derived with ``SeedSequence.spawn``, so results depend only on the root seed
and the child index, never on scheduling.
"""

from __future__ import annotations

from typing import Union

import numpy as np

ALGORITHM = "philox4x64-10"


class SeededRng:
    """A reproducible random stream: identical seed gives an identical stream."""

    algorithm = ALGORITHM

    def __init__(self, seed: int | np.random.SeedSequence):
        if isinstance(seed, np.random.SeedSequence):
            self._seq = seed
            # child streams have no seed of their own
            self.seed = None if seed.spawn_key else int(seed.entropy)
        else:
            if int(seed) < 0 or int(seed) >= 2**64:
                raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
            self.seed = int(seed)
            self._seq = np.random.SeedSequence(self.seed)
        self.generator = np.random.Generator(np.random.Philox(self._seq))

    def spawn(self, k: int) -> list["SeededRng"]:
        """Derive ``k`` independent child streams (the documented split function)."""
        return [SeededRng(child) for child in self._seq.spawn(k)]

    def fresh(self) -> "SeededRng":
        """A new stream positioned at the start of this one's key."""
        seq = np.random.SeedSequence(self._seq.entropy, spawn_key=self._seq.spawn_key)
        return SeededRng(seq)

    def random(self, size=None):
        return self.generator.random(size)

    def __repr__(self) -> str:
        return f"SeededRng(seed={self.seed}, algorithm={self.algorithm!r})"


RngLike = Union[SeededRng, np.random.Generator, int]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, SeededRng):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    return SeededRng(int(rng)).generator


def as_seeded(rng: RngLike) -> SeededRng:
    if isinstance(rng, SeededRng):
        return rng
    if isinstance(rng, np.random.Generator):
        # derive a child key from the generator's own stream
        return SeededRng(int(rng.integers(0, 2**63)))
    return SeededRng(int(rng))
