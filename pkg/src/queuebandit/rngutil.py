"""Seed handling and a buffered scalar-uniform source.

All randomness in the package flows through numpy PCG64 generators; seeds
may be ints, SeedSequences, or generators. PCG64 produces the same double
sequence whether drawn one scalar at a time or in blocks, which is what
makes BufferedUniforms a drop-in replacement for Generator.random().
"""

from __future__ import annotations

import numpy as np

SeedLike = int | np.random.SeedSequence | np.random.Generator | None


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class BufferedUniforms:
    """Serves scalar uniforms from vectorized refills of a Generator."""

    __slots__ = ("_rng", "_block", "_buf", "_pos")

    def __init__(self, rng: np.random.Generator, block: int = 1024):
        self._rng = rng
        self._block = block
        self._buf = rng.random(block).tolist()
        self._pos = 0

    def random(self) -> float:
        pos = self._pos
        if pos == self._block:
            self._buf = self._rng.random(self._block).tolist()
            pos = 0
        self._pos = pos + 1
        return self._buf[pos]


UniformSource = np.random.Generator | BufferedUniforms
