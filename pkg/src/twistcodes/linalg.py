"""Linear algebra over exact fields.

The scalar routines accept any element type with field operators and a
truth value that is false exactly for zero (``FieldElem``, ``RatFun``).
The ``batch_*`` kernels work on numpy integer arrays: either element
indices into a small field's operation tables, or flat F_p digit vectors of
a larger level multiplied through its structure tensor.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import Any

import numpy as np


def rref(rows: Sequence[Sequence[Any]]) -> tuple[list[list[Any]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence[Any]]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence[Any]], zero: Any, one: Any) -> list[list[Any]]:
    """Basis of ``{v : rows @ v = 0}``."""
    if not rows:
        return []
    ncols = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for i, pc in enumerate(pivots):
            v[pc] = zero - red[i][f]
        basis.append(v)
    return basis


def det(matrix: Sequence[Sequence[Any]], one: Any) -> Any:
    """Determinant by Gaussian elimination with division."""
    m = [list(r) for r in matrix]
    n = len(m)
    result = one
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return one - one
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            result = -result
        result = result * m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return result


# ---------------------------------------------------------------------------
# Batched kernels
# ---------------------------------------------------------------------------


def batch_rank(mats: np.ndarray, tables: tuple[np.ndarray, ...]) -> np.ndarray:
    """Ranks of a stack ``(B, R, C)`` of matrices over a small field.

    Entries are element indices; ``tables`` is ``(add, mul, neg, inv)`` as
    returned by ``Field.tables``.
    """
    add, mul, neg, inv = tables
    A = np.array(mats, dtype=np.int64, copy=True)
    if A.ndim != 3:
        raise ValueError("expected a (batch, rows, cols) array")
    B, R, C = A.shape
    rk = np.zeros(B, dtype=np.int64)
    rows = np.arange(R)
    for c in range(C):
        cand = (A[:, :, c] != 0) & (rows[None, :] >= rk[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        b = np.nonzero(has)[0]
        piv = cand[b].argmax(axis=1)
        r0 = rk[b]
        top = A[b, piv].copy()
        A[b, piv] = A[b, r0]
        A[b, r0] = mul[inv[top[:, c]][:, None], top]
        prow = A[b, r0]
        factors = A[b, :, c]
        factors = np.where(rows[None, :] > r0[:, None], factors, 0)
        A[b] = add[A[b], neg[mul[factors[:, :, None], prow[:, None, :]]]]
        rk[b] += 1
    return rk


def batch_mul(x: np.ndarray, y: np.ndarray, tensor: np.ndarray, p: int) -> np.ndarray:
    """Products of flat digit vectors ``x, y`` of shape ``(..., D)``."""
    D = x.shape[-1]
    outer = (x[..., :, None] * y[..., None, :]).reshape(x.shape[:-1] + (D * D,))
    return (outer @ tensor) % p


def batch_det(mats: np.ndarray, tensor: np.ndarray, p: int) -> np.ndarray:
    """Determinants of ``(B, k, k, D)`` digit matrices, division free.

    Laplace expansion along rows with memoisation over column subsets,
    ``k * 2^k`` batched products.
    """
    B, k, k2, D = mats.shape
    assert k == k2
    one = np.zeros((B, D), dtype=np.int64)
    one[:, 0] = 1
    minors = {0: one}
    for row in range(k):
        nxt = {}
        for mask, val in minors.items():
            for col in range(k):
                if mask & (1 << col):
                    continue
                # sign: number of used columns to the right of ``col``
                above = bin(mask >> (col + 1)).count("1")
                term = batch_mul(val, mats[:, row, col], tensor, p)
                if above % 2:
                    term = (-term) % p
                key = mask | (1 << col)
                nxt[key] = (nxt[key] + term) % p if key in nxt else term
        minors = nxt
    return minors[(1 << k) - 1]
