"""The twisted automorphism ``phi(sum f_i x^i) = sum f_i^q lam^i x^i`` and its operators."""

from __future__ import annotations

import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

from . import gf, linalg
from .errors import DependentPoints, DuplicatePoints
from .gf import FieldElem, FieldTower
from .ratfun import Poly, RatFun, as_ratfun, det_polymatrix


@dataclass(frozen=True, eq=False)
class TwistAut:
    """``phi_{q,lam}`` on F_{q^m}(x).

    For q > 2 the norm of ``lam`` must have multiplicative order q - 1.  For
    q = 2 that condition is vacuous; such automorphisms are accepted but
    flagged through :attr:`outside_hypotheses`.
    """

    tower: FieldTower
    lam: FieldElem
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        lam = self.lam
        if not isinstance(lam, FieldElem):
            lam = self.tower.fqm(lam)
        else:
            lam = lam.embed(self.tower.fqm)
        object.__setattr__(self, "lam", lam)
        if lam.is_zero():
            raise ValueError("lambda must be nonzero")
        if not gf.is_valid_lambda(lam):
            raise ValueError(f"norm of {lam} does not have order q - 1 = {self.tower.q - 1}")
        if self.outside_hypotheses:
            warnings.warn("q = 2: the x-grading collapses and the construction leaves its usual hypotheses", stacklevel=3)

    @classmethod
    def auto(cls, tower: FieldTower) -> TwistAut:
        return cls(tower, gf.find_lambda(tower))

    @property
    def q(self) -> int:
        return self.tower.q

    @property
    def m(self) -> int:
        return self.tower.m

    @property
    def field(self):
        return self.tower.fqm

    @property
    def outside_hypotheses(self) -> bool:
        return self.tower.q == 2

    @property
    def extension_degree(self) -> int:
        """Degree of F_{q^m}(x) over the constant field K."""
        return self.m * (self.q - 1)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TwistAut) and self.tower == other.tower and self.lam == other.lam

    def __hash__(self) -> int:
        return hash((self.tower, self.lam))

    def _lam_step(self, i: int) -> FieldElem:
        """``lam^((q^i - 1)/(q - 1))``: the factor picked up by ``x`` under ``phi^i``."""
        key = ("step", i)
        if key not in self._cache:
            q = self.q
            e = (q**i - 1) // (q - 1) if q > 1 else i
            self._cache[key] = self.lam ** (e % (self.field.order - 1))
        return self._cache[key]

    def apply_poly(self, g: Poly, iterations: int = 1) -> Poly:
        if iterations < 0:
            raise ValueError("iterations must be non-negative")
        if iterations == 0 or g.is_zero():
            return g
        F = self.field
        frob = pow(self.q, iterations, F.order - 1) if F.order > 2 else 1
        step = self._lam_step(iterations).vec
        out = []
        scale = F._one
        for j, v in enumerate(g.vecs):
            if j:
                scale = F._mul(scale, step)
            out.append(F._mul(F._pow(v, frob), scale) if any(v) else v)
        return Poly._raw(F, out)

    def __call__(self, g: Any, iterations: int = 1) -> RatFun:
        return apply_aut(self, g, iterations)

    def to_json(self) -> dict:
        return {"tower": self.tower.to_json(), "lambda": self.lam.to_json()}


def apply_aut(phi: TwistAut, g: Any, iterations: int = 1) -> RatFun:
    """``phi^iterations(g)``: each monomial ``c x^j`` becomes ``c^q lam^j x^j`` per step."""
    g = as_ratfun(g, phi.field)
    num = phi.apply_poly(g.num, iterations)
    if g.is_poly():
        return RatFun._raw(num, g.den)
    return RatFun(num, phi.apply_poly(g.den, iterations))


def constant_ring_element(phi: TwistAut, coeffs: Sequence[Any]) -> Poly:
    """``sum c_i lam^-i x^((q-1) i)`` for ``c_i`` in F_q."""
    F = phi.field
    inv = phi.lam.inverse()
    out = Poly(F)
    for i, c in enumerate(coeffs):
        c = phi.tower.fq(c)
        out = out + Poly.monomial(F(c) * inv**i, (phi.q - 1) * i, F)
    return out


def in_constant_ring(phi: TwistAut, g: Poly) -> bool:
    """Closed-form membership in A = {sum c_i lam^-i x^((q-1)i) : c_i in F_q}."""
    step = phi.q - 1
    for j, c in enumerate(g.coeffs):
        if c.is_zero():
            continue
        if j % step:
            return False
        if not (c * phi.lam ** (j // step)).lies_in(gf.Q):
            return False
    return True


def in_constant_field(phi: TwistAut, g: Any) -> bool:
    """Closed-form membership in K = Frac(A).

    A reduced fraction of K is a scalar multiple of a quotient of coprime
    A-elements; with a monic denominator of degree ``(q-1)e`` the scalar is
    ``lam^-e``.
    """
    g = as_ratfun(g, phi.field)
    if g.is_poly():
        return in_constant_ring(phi, g.num)
    deg = g.den.degree
    if deg % (phi.q - 1):
        return False
    mu = phi.lam ** (-(deg // (phi.q - 1)))
    return in_constant_ring(phi, g.num * mu) and in_constant_ring(phi, g.den * mu)


def is_constant(phi: TwistAut, g: Any) -> bool:
    """True iff ``phi(g) == g``."""
    g = as_ratfun(g, phi.field)
    return apply_aut(phi, g) == g


def k_basis(phi: TwistAut) -> list[Poly]:
    """The basis ``a^i x^j`` (0 <= i < m, 0 <= j <= q-2) of F_{q^m}(x) over K, x-power outermost."""
    F = phi.field
    a = F.gen
    return [Poly.monomial(a**i, j, F) for j in range(phi.q - 1) for i in range(phi.m)]


@dataclass(frozen=True)
class MooreMatrix:
    points: tuple[RatFun, ...]
    entries: tuple[tuple[RatFun, ...], ...]

    @property
    def n(self) -> int:
        return len(self.points)

    def rows(self, k: int | None = None) -> list[list[RatFun]]:
        return [list(r) for r in self.entries[: k if k is not None else self.n]]

    def det(self) -> RatFun:
        return det_polymatrix(self.entries, self.points[0].field)

    def to_json(self) -> list:
        return [[e.to_json() for e in row] for row in self.entries]


def moore(phi: TwistAut, points: Sequence[Any], rows: int | None = None) -> MooreMatrix:
    """Moore matrix with ``W[i][j] = phi^i(points[j])`` (``rows`` defaults to ``len(points)``)."""
    pts = tuple(as_ratfun(f, phi.field) for f in points)
    if not pts:
        raise ValueError("at least one point is required")
    if len(set(pts)) != len(pts):
        raise DuplicatePoints("Moore matrix points must be distinct")
    nrows = len(pts) if rows is None else rows
    entries = [pts]
    for _ in range(1, nrows):
        entries.append(tuple(apply_aut(phi, e) for e in entries[-1]))
    return MooreMatrix(pts, tuple(entries))


def independent_over_K(phi: TwistAut, points: Sequence[Any]) -> bool:
    """Linear independence over the constant field via the Moore determinant."""
    pts = [as_ratfun(f, phi.field) for f in points]
    if not pts:
        return True
    if len(set(pts)) != len(pts) or any(f.is_zero() for f in pts):
        return False
    return not moore(phi, pts).det().is_zero()


@dataclass(frozen=True)
class LinOp:
    """``L = f_0 + f_1 phi + ... + f_k phi^k`` with trailing zeros trimmed."""

    coeffs: tuple[RatFun, ...]

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1].is_zero():
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Any], field) -> LinOp:
        return cls(tuple(as_ratfun(c, field) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs


def apply_op(L: LinOp, phi: TwistAut, g: Any) -> RatFun:
    g = as_ratfun(g, phi.field)
    total = RatFun(Poly(phi.field))
    for i, f in enumerate(L.coeffs):
        if not f.is_zero():
            total = total + f * apply_aut(phi, g, i)
    return total


def fq_expansion(phi: TwistAut, polys: Sequence[Poly]) -> list[list[FieldElem]]:
    """Rows of F_q-coordinates over ``{a^i x^j}`` (x-power outermost), zero padded."""
    width = max((p.degree for p in polys), default=-1) + 1
    fq = phi.tower.fq
    rows = []
    for p in polys:
        row: list[FieldElem] = []
        for j in range(width):
            row.extend(gf.expand(p.coeff(j), gf.Q) if j <= p.degree else [fq.zero] * phi.m)
        rows.append(row)
    return rows


def kernel_dim_on_span(L: LinOp, phi: TwistAut, basis_points: Sequence[Any]) -> int:
    """F_q-dimension of ``{v in F_q^n : sum v_j L(f_j) = 0}``."""
    pts = [as_ratfun(f, phi.field) for f in basis_points]
    if not independent_over_K(phi, pts):
        raise DependentPoints("points are not linearly independent over K")
    images = [apply_op(L, phi, f) for f in pts]
    den = Poly.constant(1, phi.field)
    for img in images:
        if img.den.degree > 0:
            den = (den * img.den) // den.gcd(img.den)
    polys = [img.num * (den // img.den) for img in images]
    rows = fq_expansion(phi, polys)
    if not rows or not rows[0]:
        return len(pts)
    return len(pts) - linalg.rank(rows)
