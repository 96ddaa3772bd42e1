"""Seedable, portable random stream.

Backed by numpy's PCG64 bit generator (PCG XSL RR 128/64), which produces the
same sequence on every platform for a given seed. Doubles are drawn in blocks
to keep per-draw overhead low; the stream of values is identical to drawing
them one by one with ``Generator.random``.
"""
from __future__ import annotations

import numpy as np

_BLOCK = 4096


class Rng:
    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))
        self._buf: list[float] = []
        self._pos = 0

    def uniform(self) -> float:
        """A double in [0, 1)."""
        if self._pos >= len(self._buf):
            self._buf = self._gen.random(_BLOCK).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def below(self, k: int) -> int:
        """Uniform integer in [0, k)."""
        i = int(self.uniform() * k)
        return i if i < k else k - 1

    def spawn(self, n: int) -> list["Rng"]:
        """Independent child streams (for batch-parallel sampling)."""
        seq = np.random.SeedSequence(self.seed)
        return [Rng(int(s.generate_state(1, dtype=np.uint64)[0])) for s in seq.spawn(n)]
