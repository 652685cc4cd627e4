"""Ferrers diagram rank-metric codes.

A diagram is a non-decreasing list of column heights with dots aligned at
the top.  Codewords are matrices over F_q (stored as arrays of F_q element
indices) whose column ``j`` vanishes below row ``heights[j]``.

The optimal construction takes block-uniform diagrams whose heights are
multiples ``k_i m`` of the extension degree, evaluates the first ``k``
powers of the twisted automorphism at the points ``a^u x^(k_i - 1)``,
brings the constant part of the generator into block echelon form and
expands the codewords of a degree-bounded coefficient space over F_q.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import gf, linalg
from .errors import (
    BadDistance,
    EliminationFailure,
    FieldTooSmall,
    ProfileViolation,
    ShapeMismatch,
    ShapeNotAchieved,
)
from .gf import FieldElem, FieldTower
from .ratfun import Poly
from .twist import TwistAut, moore


# ---------------------------------------------------------------------------
# Diagrams and the upper bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FerrersDiagram:
    heights: tuple[int, ...]

    def __post_init__(self):
        h = tuple(int(x) for x in self.heights)
        object.__setattr__(self, "heights", h)
        if not h:
            raise ShapeMismatch("a diagram needs at least one column")
        if h[0] < 1 or any(a > b for a, b in zip(h, h[1:])):
            raise ShapeMismatch(f"heights {h} must be positive and non-decreasing")

    @property
    def columns(self) -> int:
        return len(self.heights)

    @property
    def rows(self) -> int:
        return self.heights[-1]

    @property
    def dots(self) -> int:
        return sum(self.heights)

    def mask(self) -> np.ndarray:
        """Boolean ``(rows, columns)`` array, true on the dots."""
        return np.arange(self.rows)[:, None] < np.array(self.heights)[None, :]

    def render(self) -> str:
        return "\n".join(" ".join("•" if r < h else " " for h in self.heights).rstrip() for r in range(self.rows))

    def to_json(self) -> dict:
        return {"heights": list(self.heights)}

    @classmethod
    def from_json(cls, data: dict) -> FerrersDiagram:
        return cls(tuple(data["heights"]))


def es_bound(diagram: FerrersDiagram | Sequence[int], d: int) -> int:
    """Upper bound on the F_q-dimension of a Ferrers code with minimum rank distance ``d``.

    ``min_i v_i`` over ``0 <= i < d``, where ``v_i`` counts the dots left after
    deleting the top ``i`` rows and the rightmost ``d - 1 - i`` columns.
    """
    if not isinstance(diagram, FerrersDiagram):
        diagram = FerrersDiagram(tuple(diagram))
    r = diagram.heights
    M = len(r)
    if not 1 <= d <= M:
        raise BadDistance(f"distance {d} outside 1..{M}")
    return min(sum(max(0, rj - i) for rj in r[: M - d + 1 + i]) for i in range(d))


def fits_diagram(matrix: Any, diagram: FerrersDiagram) -> bool:
    """True iff every entry outside the diagram is zero."""
    A = np.asarray(matrix)
    if A.ndim != 2 or A.shape[1] != diagram.columns or A.shape[0] < diagram.rows:
        raise ShapeMismatch(f"matrix of shape {A.shape} does not match a diagram with {diagram.columns} columns and {diagram.rows} rows")
    outside = np.ones(A.shape, dtype=bool)
    outside[: diagram.rows] = ~diagram.mask()
    return not np.any(A[outside])


# ---------------------------------------------------------------------------
# Block-uniform profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockProfile:
    """``m_i`` columns of height ``r_i`` for each block, with ``r_i = k_i m``."""

    blocks: tuple[tuple[int, int], ...]

    def __post_init__(self):
        blocks = tuple((int(r), int(c)) for r, c in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks or any(c < 1 for _, c in blocks):
            raise ProfileViolation("every block needs at least one column")
        m = self.m
        if any(r % m for r, _ in blocks):
            raise ProfileViolation(f"heights {[r for r, _ in blocks]} are not multiples of m = {m}")
        ks = self.ks
        if ks[0] < 1 or any(a >= b for a, b in zip(ks, ks[1:])):
            raise ProfileViolation(f"height multipliers {ks} must be positive and strictly increasing")

    @property
    def m(self) -> int:
        return max(c for _, c in self.blocks)

    @property
    def ks(self) -> tuple[int, ...]:
        return tuple(r // self.m for r, _ in self.blocks)

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(c for _, c in self.blocks)

    @property
    def M(self) -> int:
        return sum(self.widths)

    @property
    def diagram(self) -> FerrersDiagram:
        return FerrersDiagram(tuple(r for r, c in self.blocks for _ in range(c)))

    def column_block(self) -> list[int]:
        return [i for i, c in enumerate(self.widths) for _ in range(c)]

    def cut(self, d: int) -> tuple[int, int, int]:
        """``(k, I, t)``: ``k = M - d + 1`` columns survive, ending ``t`` columns into block ``I`` (0-based)."""
        M = self.M
        if not 1 <= d <= M:
            raise BadDistance(f"distance {d} outside 1..{M}")
        k = M - d + 1
        before = 0
        for I, c in enumerate(self.widths):
            if k <= before + c:
                return k, I, k - before
            before += c
        raise AssertionError("unreachable")

    def to_json(self) -> dict:
        return {"blocks": [list(b) for b in self.blocks]}

    @classmethod
    def from_json(cls, data: dict) -> BlockProfile:
        return cls(tuple(tuple(b) for b in data["blocks"]))


def eq4_dimension(profile: BlockProfile, d: int) -> int:
    """``sum_{i<I} r_i m_i + r_I t``: the dots left of the cut."""
    _, I, t = profile.cut(d)
    return sum(r * c for r, c in profile.blocks[:I]) + profile.blocks[I][0] * t


def staircase_profile(m: int, n: int) -> BlockProfile:
    """Blocks of ``m`` columns with heights ``m, 2m, ..., nm``."""
    return BlockProfile(tuple((i * m, m) for i in range(1, n + 1)))


def staircase_bound(m: int, n: int, d: int) -> tuple[int, int, int]:
    """``(l, t, K)`` with ``nm - d + 1 = lm + t``, ``0 <= t < m`` and ``K = m^2 l(l+1)/2 + t(l+1)m``."""
    if not 1 <= d <= n * m:
        raise BadDistance(f"distance {d} outside 1..{n * m}")
    l, t = divmod(n * m - d + 1, m)
    return l, t, m * m * l * (l + 1) // 2 + t * (l + 1) * m


# ---------------------------------------------------------------------------
# Codes
# ---------------------------------------------------------------------------


@dataclass
class FerrersCode:
    diagram: FerrersDiagram
    d: int
    basis: np.ndarray  # (K, rows, columns) of F_q element indices
    tower: FieldTower
    meta: dict = field(default_factory=dict)
    report: dict | None = None

    @property
    def K(self) -> int:
        return int(self.basis.shape[0])

    @property
    def q(self) -> int:
        return self.tower.q

    def to_json(self) -> dict:
        return {
            "diagram": self.diagram.to_json(),
            "d": self.d,
            "K": self.K,
            "q": self.q,
            "tower": self.tower.to_json(),
            "optimal": self.K == es_bound(self.diagram, self.d),
            "basis": self.basis.tolist(),
            "meta": self.meta,
            "verification_report": self.report,
        }


def code_from_matrices(matrices: Sequence[Any], diagram: FerrersDiagram, d: int, tower: FieldTower) -> FerrersCode:
    """Wrap explicit basis matrices (entries are F_q element indices)."""
    basis = np.asarray(matrices, dtype=np.int64).reshape(len(matrices), -1, diagram.columns) if len(matrices) else np.zeros((0, diagram.rows, diagram.columns), dtype=np.int64)
    return FerrersCode(diagram, d, basis, tower)


def _constant_part(phi: TwistAut, profile: BlockProfile, k: int) -> tuple[list[list[FieldElem]], list[Poly]]:
    """Evaluation points and the constant matrix ``A`` with ``G = A diag(x^(k_j - 1))``."""
    F = phi.field
    a = F.gen
    points = [Poly.monomial(a**u, kj - 1, F) for kj, (_, c) in zip(profile.ks, profile.blocks) for u in range(c)]
    W = moore(phi, points, rows=k)
    degs = [kj - 1 for kj, (_, c) in zip(profile.ks, profile.blocks) for _ in range(c)]
    A = []
    for row in W.entries:
        out = []
        for e, deg in zip(row, degs):
            poly = e.as_poly()
            assert poly.is_monomial() and poly.degree == deg
            out.append(poly.coeff(deg))
        A.append(out)
    return A, points


def _matmul(X: list[list[FieldElem]], Y: list[list[FieldElem]], zero: FieldElem) -> list[list[FieldElem]]:
    return [[sum((x * Y[l][j] for l, x in enumerate(row)), zero) for j in range(len(Y[0]))] for row in X]


def _inverse(X: list[list[FieldElem]], zero: FieldElem, one: FieldElem) -> list[list[FieldElem]] | None:
    n = len(X)
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(X)]
    red, piv = linalg.rref(aug)
    if piv[:n] != list(range(n)) or len(piv) < n:
        return None
    return [row[n:] for row in red]


def _block_eliminate(A: list[list[FieldElem]], row_blocks: list[range], col_blocks: list[range], F: gf.Field) -> list[list[FieldElem]]:
    """Zero the blocks below each leading diagonal block by block row operations."""
    A = [list(r) for r in A]
    for i, (rows_i, cols_i) in enumerate(zip(row_blocks, col_blocks)):
        if i == len(row_blocks) - 1:
            break
        pivot = [[A[r][c] for c in cols_i] for r in rows_i]
        inv = _inverse(pivot, F.zero, F.one)
        if inv is None:
            raise EliminationFailure(f"pivot block {i} is singular")
        Ri = [A[r] for r in rows_i]
        for rows_j in row_blocks[i + 1 :]:
            coef = _matmul([[A[r][c] for c in cols_i] for r in rows_j], inv, F.zero)
            upd = _matmul(coef, Ri, F.zero)
            for r, u in zip(rows_j, upd):
                A[r] = [x - y for x, y in zip(A[r], u)]
    return A


def _systematic(A: list[list[FieldElem]], k: int) -> list[list[FieldElem]]:
    """``A -> [I_k | *]``."""
    red, piv = linalg.rref(A)
    if piv[:k] != list(range(k)):
        raise EliminationFailure("the leading k x k block is singular")
    return red


def _expand_codewords(A: list[list[FieldElem]], profile: BlockProfile, tower: FieldTower, caps: Sequence[int]) -> np.ndarray:
    """F_q matrices of ``beta x^e`` times row ``rho`` of the divided generator, for
    every F_q-basis element ``beta`` of F_{q^m} and ``e m + u < caps[rho]``.
    """
    F = tower.fqm
    fq = tower.fq
    m = tower.m
    ks = profile.ks
    colblock = profile.column_block()
    k = len(A)
    row_block = colblock[:k]  # row rho is pivoted on column rho
    rows = profile.diagram.rows
    basis = F.basis_over(gf.Q)
    out = []
    for rho in range(k):
        ki = ks[row_block[rho]]
        for e in range(ki):
            for u, beta in enumerate(basis):
                if e * m + u >= caps[rho]:
                    continue
                mat = np.zeros((rows, profile.M), dtype=np.int64)
                for col, c in enumerate(A[rho]):
                    if c.is_zero():
                        continue
                    shift = ks[colblock[col]] - ki
                    if shift < 0:
                        raise EliminationFailure(f"row {rho} has a nonzero entry left of its block")
                    coords = gf.expand(beta * c, gf.Q)
                    base = (e + shift) * m
                    for v, y in enumerate(coords):
                        mat[base + v, col] = fq(y).index
                out.append(mat)
    return np.array(out, dtype=np.int64).reshape(len(out), rows, profile.M)


def _prepare(profile: BlockProfile, d: int, tower: FieldTower, lam: Any | None) -> tuple[TwistAut, int, int, int]:
    if tower.m != profile.m:
        raise ProfileViolation(f"profile needs extension degree m = {profile.m}, tower has m = {tower.m}")
    if profile.ks[-1] > tower.q - 1:
        raise FieldTooSmall(f"largest height multiplier {profile.ks[-1]} exceeds q - 1 = {tower.q - 1}")
    k, I, t = profile.cut(d)
    phi = TwistAut(tower, gf.find_lambda(tower) if lam is None else lam)
    return phi, k, I, t


def construct_ferrers(profile: BlockProfile, d: int, tower: FieldTower, lam: Any | None = None) -> FerrersCode:
    """Optimal Ferrers code for a block-uniform diagram."""
    phi, k, I, t = _prepare(profile, d, tower, lam)
    A, _ = _constant_part(phi, profile, k)
    starts = list(itertools.accumulate(profile.widths, initial=0))
    row_blocks = [range(starts[i], starts[i + 1]) for i in range(I)] + [range(starts[I], starts[I] + t)]
    col_blocks = [range(starts[i], starts[i + 1]) for i in range(I)] + [range(starts[I], starts[I] + t)]
    A = _block_eliminate(A, row_blocks, col_blocks, phi.field)
    caps = [profile.ks[b] * tower.m for b in profile.column_block()[:k]]
    basis = _expand_codewords(A, profile, tower, caps)
    meta = {"profile": profile.to_json(), "k": k, "I": I + 1, "t": t, "lambda": phi.lam.to_json(), "form": "block-triangular"}
    return FerrersCode(profile.diagram, d, basis, tower, meta)


def construct_ferrers_general(profile: BlockProfile, heights_override: Sequence[int], d: int, tower: FieldTower, lam: Any | None = None) -> FerrersCode:
    """Ferrers code for the diagram whose first ``k`` columns are lowered to ``heights_override``.

    The constant part of the generator is brought to ``[I_k | *]`` so that
    the first ``k`` coordinates of a codeword are exactly the coefficient
    polynomials, whose F_q-expansions are then truncated.  Every basis
    codeword is checked against the requested diagram.
    """
    phi, k, I, t = _prepare(profile, d, tower, lam)
    s = [int(x) for x in heights_override]
    if len(s) != k:
        raise ProfileViolation(f"expected {k} override heights, got {len(s)}")
    r = profile.diagram.heights
    if any(sj < 1 or sj > rj for sj, rj in zip(s, r)):
        raise ProfileViolation(f"override heights {s} must lie in 1..r_i")
    if tuple(s) == r[:k]:
        return construct_ferrers(profile, d, tower, phi.lam)
    heights = tuple(s) + r[k:]
    try:
        diagram = FerrersDiagram(heights)
    except ShapeMismatch as exc:
        raise ProfileViolation(str(exc)) from exc
    A, _ = _constant_part(phi, profile, k)
    A = _systematic(A, k)
    basis = _expand_codewords(A, profile, tower, s)
    for idx, mat in enumerate(basis):
        if not fits_diagram(mat, diagram):
            raise ShapeNotAchieved(f"basis codeword {idx} leaves the requested diagram", witness=mat.tolist())
    meta = {"profile": profile.to_json(), "k": k, "I": I + 1, "t": t, "lambda": phi.lam.to_json(), "form": "systematic", "override": s}
    return FerrersCode(diagram, d, basis, tower, meta)


def construct_staircase(m: int, n: int, d: int, tower: FieldTower, lam: Any | None = None) -> FerrersCode:
    """The ``(m, ..., m, 2m, ..., 2m, ..., nm, ..., nm)`` family."""
    return construct_ferrers(staircase_profile(m, n), d, tower, lam)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


def _fp_generators(code: FerrersCode) -> np.ndarray:
    """F_p digit arrays ``(K s, rows, cols, s)`` spanning the code over F_p."""
    fq = code.tower.fq
    s = fq.dim
    elems = [e for e in fq.elements()]
    digits = np.array([e.vec for e in elems], dtype=np.int64)  # (q, s)
    _, mul, _, _ = fq.tables
    gens = []
    for B in code.basis:
        for j in range(s):
            w = fq.from_index(fq.p**j).index  # the F_p-basis element w^j as an index
            gens.append(digits[mul[w][B]])
    return np.array(gens, dtype=np.int64).reshape(len(gens), code.basis.shape[1], code.basis.shape[2], s)


def _ranks(code: FerrersCode, gens: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    fq = code.tower.fq
    p, s = fq.p, fq.dim
    N, R, C, _ = gens.shape
    words = (coeffs @ gens.reshape(N, -1)) % p
    idx = (words.reshape(-1, R, C, s) * p ** np.arange(s)).sum(axis=3)
    return linalg.batch_rank(idx, fq.tables)


def verify_ferrers(code: FerrersCode, d: int | None = None, sample_budget: int = 200_000, seed: int = 0, chunk: int = 1 << 14) -> dict:
    """Check optimality, diagram fit and minimum distance of ``code``."""
    d = code.d if d is None else d
    K = code.K
    fq = code.tower.fq
    bound = es_bound(code.diagram, d)
    fits = all(fits_diagram(B, code.diagram) for B in code.basis)
    report: dict[str, Any] = {"K": K, "bound": bound, "optimal": K == bound, "fits": fits}
    if K == 0:
        report.update(mode="exhaustive", certifying=True, checked=0, min_rank=None, independent=True, distance_ok=True)
        code.report = report
        return report
    gens = _fp_generators(code)
    N = gens.shape[0]
    p = fq.p
    flat = code.basis.reshape(K, -1)
    report["independent"] = bool(linalg.batch_rank(flat[None], fq.tables)[0] == K)
    min_rank = None
    checked = 0
    if fq.order**K <= sample_budget:
        mode = "exhaustive"
        total = p**N
        for start in range(1, total, chunk):
            t = np.arange(start, min(total, start + chunk), dtype=np.int64)
            coeffs = (t[:, None] // p ** np.arange(N)) % p
            rk = _ranks(code, gens, coeffs)
            checked += len(t)
            low = int(rk.min())
            min_rank = low if min_rank is None else min(min_rank, low)
    else:
        mode = "sampled"
        rng = np.random.default_rng(seed)
        eye = np.eye(N, dtype=np.int64)
        batches = [eye]
        left = sample_budget
        while left > 0:
            c = rng.integers(0, p, size=(min(left, chunk), N))
            c = c[c.any(axis=1)]
            batches.append(c)
            left -= chunk
        for coeffs in batches:
            rk = _ranks(code, gens, coeffs)
            checked += len(coeffs)
            low = int(rk.min())
            min_rank = low if min_rank is None else min(min_rank, low)
    report.update(mode=mode, certifying=mode == "exhaustive", checked=checked, min_rank=min_rank, distance_ok=min_rank >= d)
    code.report = report
    return report
