"""Enumeration of n x k column reduced echelon forms over F_q.

Column ``j`` of a CREF matrix has a 1 in its pivot row ``p_j``, zeros above
it and in every other pivot row, and free entries below.  Pivot sets are
visited in colexicographic order; inside a pivot set the free entries,
listed column by column with increasing row, form a little-endian counter
(the first free entry varies fastest).  Entries are F_q element indices.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterator

import numpy as np


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^n, by the product formula."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def pivot_sets(n: int, k: int) -> list[tuple[int, ...]]:
    return sorted(itertools.combinations(range(n), k), key=lambda c: c[::-1])


def free_positions(pivots: tuple[int, ...], n: int) -> list[tuple[int, int]]:
    piv = set(pivots)
    return [(row, j) for j, pj in enumerate(pivots) for row in range(pj + 1, n) if row not in piv]


class CrefIterator:
    """All rank-k ``n x k`` CREF matrices over F_q, each exactly once."""

    def __init__(self, n: int, k: int, q: int):
        if not 1 <= k <= n:
            raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
        self.n, self.k, self.q = n, k, q
        self.pivot_sets = pivot_sets(n, k)

    def __len__(self) -> int:
        return sum(self.q ** len(free_positions(ps, self.n)) for ps in self.pivot_sets)

    def block_size(self, pivots: tuple[int, ...]) -> int:
        return self.q ** len(free_positions(pivots, self.n))

    def block(self, pivots: tuple[int, ...], start: int = 0, stop: int | None = None) -> np.ndarray:
        """Matrices ``start..stop`` of one pivot set, shape ``(count, n, k)``."""
        free = free_positions(pivots, self.n)
        total = self.q ** len(free)
        stop = total if stop is None else min(stop, total)
        t = np.arange(start, stop, dtype=np.int64)
        out = np.zeros((len(t), self.n, self.k), dtype=np.int64)
        for j, pj in enumerate(pivots):
            out[:, pj, j] = 1
        for i, (row, col) in enumerate(free):
            out[:, row, col] = (t // self.q**i) % self.q
        return out

    def units(self, max_size: int = 1 << 15) -> Iterator[tuple[tuple[int, ...], int, int]]:
        """Work units ``(pivots, start, stop)`` in enumeration order."""
        for ps in self.pivot_sets:
            total = self.block_size(ps)
            for start in range(0, total, max_size):
                yield ps, start, min(total, start + max_size)

    def __iter__(self) -> Iterator[np.ndarray]:
        for ps, start, stop in self.units():
            yield from self.block(ps, start, stop)
