"""Linear rank-metric codes: construction, reduction and certification.

A :class:`GenMatrix` holds a ``k x n`` generator either over F_{q^m}[x]
(entries are :class:`RatFun`, usually polynomials) or, after reduction
modulo an irreducible ``f``, over the finite top level F_{q^{mr}}.
Rank weights are always taken over F_q.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import gf, linalg
from .cref import CrefIterator
from .errors import (
    BadDimension,
    BadEta,
    BadTwist,
    BudgetExceeded,
    DegreeTooSmall,
    DependentPoints,
    LengthMismatch,
    LevelMismatch,
    NotIrreducible,
)
from .gf import FieldElem, FieldTower
from .ratfun import Poly, RatFun, as_ratfun, reduce_mod
from .twist import TwistAut, apply_aut, independent_over_K

Entry = RatFun | FieldElem


# ---------------------------------------------------------------------------
# Generator matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GenMatrix:
    """Generator matrix of a linear code plus the data it was built from."""

    entries: tuple[tuple[Entry, ...], ...]
    tower: FieldTower
    lam: FieldElem | None = None
    points: tuple[RatFun, ...] | None = None
    f: Poly | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        if not rows or not rows[0]:
            raise BadDimension("generator matrix must be non-empty")
        if any(len(r) != len(rows[0]) for r in rows):
            raise BadDimension("ragged generator matrix")
        if len(rows) > len(rows[0]):
            raise BadDimension(f"k = {len(rows)} exceeds n = {len(rows[0])}")

    @property
    def k(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return len(self.entries[0])

    @property
    def reduced(self) -> bool:
        return isinstance(self.entries[0][0], FieldElem)

    @property
    def field(self) -> gf.Field:
        """The ambient field: the finite level of the entries, or F_{q^m} for F_{q^m}(x)."""
        if self.reduced:
            return max((e.field for row in self.entries for e in row), key=lambda F: F.level)
        return self.tower.fqm

    def rows(self) -> list[list[Entry]]:
        return [list(r) for r in self.entries]

    def finite_entries(self) -> list[list[FieldElem]]:
        """Entries lifted to the common finite level; raises for unreduced codes."""
        if not self.reduced:
            raise LevelMismatch("code lives over F_(q^m)(x); reduce it first")
        F = self.field
        return [[e.embed(F) for e in row] for row in self.entries]

    def is_full_rank(self) -> bool:
        return linalg.rank(self.entries) == self.k

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "tower": self.tower.to_json(),
            "lambda": self.lam.to_json() if self.lam is not None else None,
            "points": [p.to_json() for p in self.points] if self.points is not None else None,
            "k": self.k,
            "n": self.n,
            "entries": [[e.to_json() for e in row] for row in self.entries],
            "reduced": self.reduced,
        }
        if self.reduced:
            out["level"] = self.field.name
        if self.f is not None:
            out["f"] = self.f.to_json()
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_json(cls, data: dict) -> GenMatrix:
        tower = FieldTower.from_json(data["tower"])
        F = tower.fqm
        lam = F(data["lambda"]) if data.get("lambda") is not None else None
        points = tuple(RatFun.from_json(p, F) for p in data["points"]) if data.get("points") is not None else None
        f = Poly.from_json(data["f"], F) if data.get("f") is not None else None
        if data.get("reduced"):
            level = {v: k for k, v in gf.LEVEL_NAMES.items()}[data.get("level", "qmr")]
            L = tower.level(level)
            entries = [[L(e) for e in row] for row in data["entries"]]
        else:
            entries = [[RatFun.from_json(e, F) for e in row] for row in data["entries"]]
        if len(entries) != data.get("k", len(entries)):
            raise BadDimension("entry rows do not match k")
        return cls(tuple(map(tuple, entries)), tower, lam, points, f, dict(data.get("meta", {})))


def generator(rows: Sequence[Sequence[Any]], tower: FieldTower, level: int | None = None) -> GenMatrix:
    """Wrap a plain finite-field matrix (``level`` defaults to the top of ``tower``)."""
    L = tower.level(tower.top_level if level is None else level)
    return GenMatrix(tuple(tuple(L(e) for e in row) for row in rows), tower)


# ---------------------------------------------------------------------------
# Rank over a subfield
# ---------------------------------------------------------------------------


def rank_over_base(v: Sequence[FieldElem], base: int = gf.Q) -> int:
    """Dimension of the ``base``-span of the coordinates of ``v``."""
    v = list(v)
    if not v:
        return 0
    levels = {x.level for x in v}
    if len(levels) != 1:
        raise LevelMismatch(f"coordinates live at different levels {sorted(levels)}")
    if v[0].level < base:
        raise LevelMismatch("coordinates lie below the requested base level")
    cols = [gf.expand(x, base) for x in v]
    return linalg.rank([list(r) for r in zip(*cols)])


# ---------------------------------------------------------------------------
# Construction and reduction
# ---------------------------------------------------------------------------


def construct_mrd(phi: TwistAut, points: Sequence[Any], k: int) -> GenMatrix:
    """First ``k`` rows of the Moore matrix of ``points`` under ``phi``."""
    pts = tuple(as_ratfun(f, phi.field) for f in points)
    n = len(pts)
    if not 1 <= k <= n:
        raise BadDimension(f"need 1 <= k <= n, got k={k}, n={n}")
    if not independent_over_K(phi, pts):
        raise DependentPoints("evaluation points are not linearly independent over K")
    rows = [pts]
    for _ in range(1, k):
        rows.append(tuple(apply_aut(phi, e) for e in rows[-1]))
    return GenMatrix(tuple(rows), phi.tower, phi.lam, pts)


def fallback_degree(k: int, q: int) -> int:
    """Degree ``k(q-2)+1`` that always suffices for the reduction."""
    return k * (q - 2) + 1


def reduce_code(G: GenMatrix, f: Poly, *, allow_small_degree: bool = False) -> GenMatrix:
    """Reduce every entry modulo ``f``, landing in F_{q^{mr}} = F_{q^m}[x]/(f)."""
    if G.reduced:
        raise LevelMismatch("code is already reduced")
    if f.degree < 1 or f.lead != 1:
        raise NotIrreducible(f"{f} is not monic of positive degree")
    if not gf.is_irreducible(f):
        raise NotIrreducible(f"{f} is reducible")
    q = G.tower.q
    if f.degree < q - 1 and not allow_small_degree:
        raise DegreeTooSmall(f"deg f = {f.degree} < q - 1 = {q - 1}")
    tower = G.tower.base_tower().extend(f.coeffs)
    f = Poly(tower.fqm, f.coeffs)
    entries = tuple(tuple(reduce_mod(e, f, tower) for e in row) for row in G.entries)
    return GenMatrix(entries, tower, G.lam, G.points, f, dict(G.meta))


# ---------------------------------------------------------------------------
# Certification over all CREF matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    certified: bool
    count_checked: int
    total: int
    witness: list[list[int]] | None = None
    wall_time_ms: float = 0.0

    def to_json(self) -> dict:
        out: dict[str, Any] = {"count_checked": self.count_checked, "certified": self.certified}
        if self.witness is not None:
            out["witness"] = self.witness
        out["wall_time_ms"] = round(self.wall_time_ms, 3)
        return out


def default_workers() -> int:
    env = os.environ.get("TWISTCODES_THREADS")
    if env:
        return max(1, int(env))
    return 1


def _products(G: GenMatrix) -> tuple[np.ndarray, np.ndarray, int]:
    """``P[c, row, col] = digits(c * G[row][col])`` for every F_q element ``c``."""
    F = G.field
    fq = G.tower.fq
    scalars = list(fq.elements())
    ent = G.finite_entries()
    P = np.array([[[F._mul(F(c).vec, e.vec) for e in row] for row in ent] for c in scalars], dtype=np.int64)
    return P, F.mul_tensor, F.p


def _first_singular(P: np.ndarray, tensor: np.ndarray, p: int, mats: np.ndarray) -> int | None:
    """Index of the first ``M`` in ``mats`` (shape ``(B, n, k)``) with ``det(G M) = 0``."""
    _, k, n, D = P.shape
    B = mats.shape[0]
    GM = np.zeros((B, k, k, D), dtype=np.int64)
    for i in range(n):
        # P[M[b, i, j], row, i] -> (B, j, row, D)
        GM += P[mats[:, i, :], :, i, :].transpose(0, 2, 1, 3)
    GM %= p
    dets = linalg.batch_det(GM, tensor, p)
    bad = np.nonzero(~dets.any(axis=1))[0]
    return int(bad[0]) if len(bad) else None


def _check_unit(args) -> int | None:
    P, tensor, p, n, k, q, pivots, start, stop = args
    mats = CrefIterator(n, k, q).block(pivots, start, stop)
    return _first_singular(P, tensor, p, mats)


def certify_mrd(G: GenMatrix, workers: int | None = None, unit_size: int = 1 << 13) -> Certificate:
    """Check ``det(G M) != 0`` for every CREF ``M``; stop at the first failure.

    The result (including ``count_checked`` and the witness) depends only on
    the fixed enumeration order, never on ``workers``.
    """
    t0 = time.perf_counter()
    P, tensor, p = _products(G)
    q, n, k = G.tower.q, G.n, G.k
    it = CrefIterator(n, k, q)
    total = len(it)
    units = list(it.units(unit_size))
    offsets = list(itertools.accumulate((u[2] - u[1] for u in units), initial=0))
    workers = default_workers() if workers is None else max(1, workers)

    def finish(ui: int | None, local: int | None) -> Certificate:
        ms = (time.perf_counter() - t0) * 1000
        if ui is None:
            return Certificate(True, total, total, None, ms)
        pivots, start, _ = units[ui]
        M = it.block(pivots, start + local, start + local + 1)[0]
        return Certificate(False, offsets[ui] + local + 1, total, M.tolist(), ms)

    if workers == 1 or len(units) == 1:
        for ui, (pivots, start, stop) in enumerate(units):
            local = _first_singular(P, tensor, p, it.block(pivots, start, stop))
            if local is not None:
                return finish(ui, local)
        return finish(None, None)

    args = [(P, tensor, p, n, k, q, ps, a, b) for ps, a, b in units]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for ui, local in enumerate(pool.map(_check_unit, args)):
            # map yields in submission order, so the first hit is the earliest
            if local is not None:
                pool.shutdown(wait=False, cancel_futures=True)
                return finish(ui, local)
    return finish(None, None)


# ---------------------------------------------------------------------------
# Minimum distance by enumeration
# ---------------------------------------------------------------------------


def projective_classes(Q: int, k: int) -> int:
    return (Q**k - 1) // (Q - 1)


def messages(Q: int, k: int, D: int, p: int, chunk: int) -> Iterable[np.ndarray]:
    """Digit arrays ``(B, k, D)``: one normalised message per projective class."""
    for lead in range(k):
        tail = k - 1 - lead
        count = Q**tail
        for start in range(0, count, chunk):
            t = np.arange(start, min(count, start + chunk), dtype=np.int64)
            U = np.zeros((len(t), k, D), dtype=np.int64)
            U[:, lead, 0] = 1
            for j in range(tail):
                idx = (t // Q**j) % Q
                for d in range(D):
                    U[:, lead + 1 + j, d] = (idx // p**d) % p
            yield U


def codeword_coords(G: GenMatrix, U: np.ndarray) -> np.ndarray:
    """F_q-expansions of the codewords ``U @ G``: shape ``(B, D/s, n)`` of F_q indices.

    ``U`` holds message digit vectors, shape ``(B, k, D)``.
    """
    F = G.field
    s = G.tower.s
    mulm = np.array([[F.mul_matrix(e) for e in row] for row in G.finite_entries()], dtype=np.int64)  # (k, n, D, D)
    C = np.einsum("ijde,bie->bjd", mulm, U) % F.p  # (B, n, D)
    B, n, D = C.shape
    weights = F.p ** np.arange(s, dtype=np.int64)
    coords = (C.reshape(B, n, D // s, s) * weights).sum(axis=3)
    return coords.transpose(0, 2, 1)


def codeword_ranks(G: GenMatrix, U: np.ndarray) -> np.ndarray:
    """Rank weights over F_q of the codewords ``U @ G``."""
    return linalg.batch_rank(codeword_coords(G, U), G.tower.fq.tables)


def min_rank_distance(G: GenMatrix, budget: int = 10**5, chunk: int = 1 << 14) -> int:
    """Exact minimum rank weight over all nonzero codewords."""
    F = G.field
    Q = F.order
    classes = projective_classes(Q, G.k)
    if classes > budget:
        raise BudgetExceeded(f"{classes} projective classes exceed the budget of {budget}")
    best = G.n
    for U in messages(Q, G.k, F.dim, F.p, chunk):
        best = min(best, int(codeword_ranks(G, U).min()))
    return best


# ---------------------------------------------------------------------------
# Searching for a reduction degree
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    code: GenMatrix | None
    certificate: Certificate | None
    tried: list[dict]


def search_reduction(G: GenMatrix, r_min: int | None = None, r_max: int | None = None, seeds: int = 3, workers: int | None = None) -> SearchResult:
    """Try seeded irreducible moduli of increasing degree until one certifies."""
    q = G.tower.q
    r_min = q - 1 if r_min is None else r_min
    r_max = fallback_degree(G.k, q) if r_max is None else r_max
    tried = []
    for r in range(r_min, r_max + 1):
        seen = set()
        for seed in range(seeds):
            f = gf.irreducible(G.tower.base_tower(), r, seed)
            if f in seen:
                continue
            seen.add(f)
            C = reduce_code(G, f, allow_small_degree=True)
            cert = certify_mrd(C, workers)
            tried.append({"r": r, "seed": seed, "f": f.to_json(), "certified": cert.certified})
            if cert.certified:
                return SearchResult(C, cert, tried)
    return SearchResult(None, None, tried)


# ---------------------------------------------------------------------------
# Twisted Gabidulin codes and Frobenius images
# ---------------------------------------------------------------------------


def _check_twist(tower: FieldTower, k: int, n: int, h: int, s: int, eta: FieldElem) -> None:
    m = tower.m
    if math.gcd(m, s) != 1:
        raise BadTwist(f"gcd(m, s) = gcd({m}, {s}) != 1")
    if not eta.is_zero():
        if gf.norm(eta) == (-1) ** (n * k):
            raise BadEta(f"N(eta) = (-1)^(nk) = {(-1) ** (n * k)}")


def twisted_gabidulin(tower: FieldTower, k: int, h: int, s: int, eta: Any, points: Sequence[Any]) -> GenMatrix:
    """Generator of ``{(f(a_1), ..., f(a_n))}`` for
    ``f = f_0 x + f_1 x^{q^s} + ... + f_{k-1} x^{q^{s(k-1)}} + eta f_0^{q^h} x^{q^{sk}}``.

    Only F_{q^m}-linear twists (``h`` a multiple of ``m``, or ``eta = 0``) have
    a generator matrix; the general case is available through
    :func:`twisted_codewords`.
    """
    F = tower.fqm
    eta = F(eta)
    pts = [F(a) for a in points]
    n = len(pts)
    if not 1 <= k <= n:
        raise BadDimension(f"need 1 <= k <= n, got k={k}, n={n}")
    _check_twist(tower, k, n, h, s, eta)
    if not eta.is_zero() and h % tower.m:
        raise BadTwist(f"h = {h} is not a multiple of m = {tower.m}: the evaluation space is only semilinear")
    if rank_over_base(pts, gf.Q) != n:
        raise DependentPoints("points are not linearly independent over F_q")
    rows = []
    for i in range(k):
        row = [a.frobenius(s * i) for a in pts]
        if i == 0 and not eta.is_zero():
            row = [r + eta * a.frobenius(s * k) for r, a in zip(row, pts)]
        rows.append(tuple(row))
    return GenMatrix(tuple(rows), tower, None, None, None, {"kind": "twisted_gabidulin", "k": k, "h": h, "s": s, "eta": eta.to_json()})


def twisted_codewords(tower: FieldTower, k: int, h: int, s: int, eta: Any, points: Sequence[Any]) -> set[tuple[FieldElem, ...]]:
    """All evaluations ``(f(a_1), ..., f(a_n))`` for ``f`` in the twisted space, by brute force."""
    F = tower.fqm
    eta = F(eta)
    pts = [F(a) for a in points]
    frob = FieldElem.frobenius
    out = set()
    for fs in itertools.product(list(F.elements()), repeat=k):
        twist = eta * frob(fs[0], h)
        word = tuple(sum((fs[i] * frob(a, s * i) for i in range(k)), F.zero) + twist * frob(a, s * k) for a in pts)
        out.add(word)
    return out


def frobenius_code(C: GenMatrix, s: int) -> GenMatrix:
    """``C^{q^s}``: every entry raised to the power ``q^s``."""
    ent = C.finite_entries()
    rows = tuple(tuple(x.frobenius(s) for x in row) for row in ent)
    return GenMatrix(rows, C.tower, C.lam, C.points, C.f, {**C.meta, "frobenius": s})


def intersection_dim(C1: GenMatrix, C2: GenMatrix) -> int:
    """``dim(C1 ∩ C2)`` over the ambient field."""
    if C1.n != C2.n:
        raise LengthMismatch(f"lengths {C1.n} and {C2.n} differ")
    if C1.reduced != C2.reduced:
        raise LevelMismatch("cannot intersect a reduced code with an unreduced one")
    if C1.reduced:
        if not C1.field.compatible(C2.field):
            raise LevelMismatch("codes live in different towers")
        F = C1.field if C1.field.level >= C2.field.level else C2.field
        A = [[e.embed(F) for e in row] for row in C1.entries]
        B = [[e.embed(F) for e in row] for row in C2.entries]
    else:
        A, B = C1.rows(), C2.rows()
    return linalg.rank(A) + linalg.rank(B) - linalg.rank(A + B)
