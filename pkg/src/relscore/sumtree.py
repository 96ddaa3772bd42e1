"""Growable sum segment tree for proportional sampling over node ids."""
from __future__ import annotations


class SumTree:
    """Leaf ``i`` holds a non-negative weight; internal nodes hold subtree sums.

    Internal sums are recomputed from their children on every update (never
    incremented), so a zeroed leaf contributes exactly nothing and the total
    does not drift.
    """

    def __init__(self, capacity: int = 1024):
        cap = 1
        while cap < capacity:
            cap <<= 1
        self._cap = cap
        self._v = [0.0] * (2 * cap)

    @property
    def capacity(self) -> int:
        return self._cap

    def _grow(self, need: int) -> None:
        cap = self._cap
        while cap <= need:
            cap <<= 1
        leaves = self._v[self._cap:]
        v = [0.0] * (2 * cap)
        v[cap:cap + len(leaves)] = leaves
        for i in range(cap - 1, 0, -1):
            v[i] = v[2 * i] + v[2 * i + 1]
        self._cap, self._v = cap, v

    def __setitem__(self, idx: int, weight: float) -> None:
        if idx >= self._cap:
            self._grow(idx)
        v = self._v
        i = idx + self._cap
        v[i] = weight
        i >>= 1
        while i:
            v[i] = v[2 * i] + v[2 * i + 1]
            i >>= 1

    def __getitem__(self, idx: int) -> float:
        if idx >= self._cap:
            return 0.0
        return self._v[idx + self._cap]

    def total(self) -> float:
        return self._v[1]

    def find(self, u: float) -> int:
        """Index ``i`` with prefix(i) <= u < prefix(i + 1); ``u`` in [0, total)."""
        v = self._v
        i = 1
        cap = self._cap
        while i < cap:
            left = v[2 * i]
            right = v[2 * i + 1]
            if (u < left and left > 0.0) or right <= 0.0:
                i = 2 * i
            else:
                u -= left
                i = 2 * i + 1
        return i - cap
