from __future__ import annotations

import itertools

import numpy as np
import pytest

from twistcodes import cref, linalg
from twistcodes.gf import FieldTower


@pytest.mark.parametrize(("n", "k", "q", "count"), [(2, 1, 2, 3), (3, 2, 2, 7), (3, 1, 2, 7), (4, 2, 3, 130), (6, 3, 3, 33880)])
def test_counts(n, k, q, count):
    it = cref.CrefIterator(n, k, q)
    assert cref.gaussian_binomial(n, k, q) == count
    assert len(it) == count
    assert sum(len(it.block(ps, a, b)) for ps, a, b in it.units(1000)) == count


def test_subspace_oracle_small():
    """Each column space of F_3^4 of dimension 2 appears exactly once."""
    q, n, k = 3, 4, 2
    F = FieldTower(q, 1, 1).fq
    spaces = set()
    for M in cref.CrefIterator(n, k, q):
        cols = [[F(int(M[i, j])) for i in range(n)] for j in range(k)]
        span = frozenset(
            tuple(sum((F(c) * col[i] for c, col in zip(coeffs, cols)), F.zero).index for i in range(n))
            for coeffs in itertools.product(range(q), repeat=k)
        )
        spaces.add(span)
        assert linalg.rank(cols) == k
    assert len(spaces) == cref.gaussian_binomial(n, k, q)


def test_echelon_shape():
    for M in cref.CrefIterator(5, 2, 2):
        pivots = [int(np.nonzero(M[:, j])[0][0]) for j in range(2)]
        assert pivots == sorted(pivots)
        for j, pj in enumerate(pivots):
            assert M[pj, j] == 1
            assert all(M[pj, c] == 0 for c in range(2) if c != j)


def test_enumeration_order():
    it = cref.CrefIterator(3, 2, 2)
    assert it.pivot_sets == [(0, 1), (0, 2), (1, 2)]
    mats = list(it)
    # pivots (0, 1): one free entry at row 2 in each column, first column fastest
    assert [m[2].tolist() for m in mats[:4]] == [[0, 0], [1, 0], [0, 1], [1, 1]]


def test_blocks_partition_units():
    it = cref.CrefIterator(5, 3, 3)
    whole = np.concatenate([it.block(ps) for ps in it.pivot_sets])
    parts = np.concatenate([it.block(ps, a, b) for ps, a, b in it.units(7)])
    assert np.array_equal(whole, parts)


def test_rejects_bad_dimensions():
    with pytest.raises(ValueError):
        cref.CrefIterator(3, 0, 2)
    with pytest.raises(ValueError):
        cref.CrefIterator(2, 3, 2)
    assert cref.gaussian_binomial(3, 4, 2) == 0
