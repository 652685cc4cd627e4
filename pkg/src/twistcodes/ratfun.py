"""Polynomials over a tower level, rational functions, reduction and determinants."""

from __future__ import annotations

from collections.abc import Sequence
from typing import Any, Union

from . import gf
from .errors import DivisionByZero, ModulusMismatch
from .gf import Field, FieldElem, FieldTower, Vec


class Poly:
    """Polynomial in ``x`` over one level of a tower (usually F_{q^m}).

    Coefficients are little-endian and trimmed, so the zero polynomial has
    no coefficients and ``degree == -1``.
    """

    __slots__ = ("field", "vecs")

    def __init__(self, field: Field, coeffs: Sequence[Any] = ()):
        vecs = []
        for c in coeffs:
            if isinstance(c, tuple) and len(c) == field.dim and all(isinstance(d, int) for d in c):
                vecs.append(c)
            else:
                vecs.append(field(c).vec)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "vecs", tuple(gf.ptrim(field, vecs)))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    def __reduce__(self):
        return (Poly, (self.field, self.vecs))

    @classmethod
    def _raw(cls, field: Field, vecs: Sequence[Vec]) -> Poly:
        out = object.__new__(cls)
        object.__setattr__(out, "field", field)
        object.__setattr__(out, "vecs", tuple(vecs))
        return out

    @classmethod
    def x(cls, field: Field) -> Poly:
        return cls._raw(field, (field._zero, field._one))

    @classmethod
    def monomial(cls, c: Any, j: int, field: Field) -> Poly:
        c = field(c)
        if c.is_zero():
            return cls._raw(field, ())
        return cls._raw(field, (field._zero,) * j + (c.vec,))

    @classmethod
    def constant(cls, c: Any, field: Field) -> Poly:
        return cls.monomial(c, 0, field)

    # -- structure ----------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.vecs) - 1

    @property
    def coeffs(self) -> tuple[FieldElem, ...]:
        return tuple(FieldElem(self.field, v) for v in self.vecs)

    def coeff(self, i: int) -> FieldElem:
        if 0 <= i < len(self.vecs):
            return FieldElem(self.field, self.vecs[i])
        return self.field.zero

    @property
    def lead(self) -> FieldElem:
        if not self.vecs:
            return self.field.zero
        return FieldElem(self.field, self.vecs[-1])

    def is_zero(self) -> bool:
        return not self.vecs

    def __bool__(self) -> bool:
        return bool(self.vecs)

    def is_monomial(self) -> bool:
        return sum(1 for v in self.vecs if any(v)) <= 1

    def monic(self) -> Poly:
        return Poly._raw(self.field, gf.pmonic(self.field, self.vecs))

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other: Any) -> Poly:
        if isinstance(other, Poly):
            if other.field == self.field:
                return other
            if other.field.compatible(self.field) and other.field.level < self.field.level:
                return Poly(self.field, [self.field(c) for c in other.coeffs])
            raise ModulusMismatch(f"polynomials over {self.field!r} and {other.field!r}")
        if isinstance(other, (int, FieldElem)):
            return Poly.constant(other, self.field)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Poly._raw(self.field, gf.padd(self.field, self.vecs, o.vecs))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Poly._raw(self.field, gf.psub(self.field, self.vecs, o.vecs))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Poly._raw(self.field, [self.field._neg(v) for v in self.vecs])

    def __mul__(self, other):
        if isinstance(other, (int, FieldElem)):
            return Poly._raw(self.field, gf.pscale(self.field, self.field(other).vec, self.vecs))
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Poly._raw(self.field, gf.pmul(self.field, self.vecs, o.vecs))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> Poly:
        if e < 0:
            raise ValueError("negative polynomial power")
        result = Poly.constant(1, self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __divmod__(self, other) -> tuple[Poly, Poly]:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        qt, r = gf.pdivmod(self.field, self.vecs, o.vecs)
        return Poly._raw(self.field, qt), Poly._raw(self.field, r)

    def __floordiv__(self, other) -> Poly:
        return divmod(self, other)[0]

    def __mod__(self, other) -> Poly:
        return divmod(self, other)[1]

    def gcd(self, other: Poly) -> Poly:
        o = self._coerce(other)
        return Poly._raw(self.field, gf.pgcd(self.field, self.vecs, o.vecs))

    def shift(self, j: int) -> Poly:
        """Multiply by ``x^j``; negative ``j`` divides and requires exactness."""
        if not self.vecs:
            return self
        if j >= 0:
            return Poly._raw(self.field, (self.field._zero,) * j + self.vecs)
        if any(any(v) for v in self.vecs[:-j]):
            raise ValueError(f"{self} is not divisible by x^{-j}")
        return Poly._raw(self.field, self.vecs[-j:])

    def __call__(self, point: Any) -> FieldElem:
        """Horner evaluation at an element of this level or above."""
        acc = None
        for v in reversed(self.vecs):
            c = FieldElem(self.field, v)
            acc = c if acc is None else acc * point + c
        if acc is None:
            return self.field.zero
        return acc if isinstance(acc, FieldElem) else self.field(acc)

    # -- protocol -----------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, FieldElem)):
            other = Poly.constant(other, self.field)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.field == other.field and self.vecs == other.vecs

    def __hash__(self) -> int:
        return hash(self.vecs)

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        terms = []
        for i in range(len(self.vecs) - 1, -1, -1):
            v = self.vecs[i]
            if not any(v):
                continue
            c = str(FieldElem(self.field, v))
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if not mono:
                terms.append(c)
            elif c == "1":
                terms.append(mono)
            elif " + " in c:
                terms.append(f"({c}){mono}")
            else:
                terms.append(f"{c}{mono}")
        return " + ".join(terms) if terms else "0"

    def to_json(self) -> list:
        return [c.to_json() for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[Any], field: Field) -> Poly:
        return cls(field, [field(c) for c in data])


class RatFun:
    """Normalized rational function: monic denominator, coprime numerator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly | FieldElem | int, den: Poly | FieldElem | int | None = None, *, field: Field | None = None):
        if not isinstance(num, Poly):
            F = field or (num.field if isinstance(num, FieldElem) else getattr(den, "field", None))
            if F is None:
                raise ValueError("a field is required to build a RatFun from a scalar")
            num = Poly.constant(num, F)
        if den is None:
            den = Poly.constant(1, num.field)
        elif not isinstance(den, Poly):
            den = Poly.constant(den, num.field)
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        if num.is_zero():
            num, den = num, Poly.constant(1, num.field)
        elif den.degree > 0 or den.vecs[-1] != num.field._one:
            g = num.gcd(den)
            if g.degree > 0:
                num, den = num // g, den // g
            lead_inv = den.lead.inverse()
            num, den = num * lead_inv, den * lead_inv
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFun is immutable")

    def __reduce__(self):
        return (RatFun, (self.num, self.den))

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> RatFun:
        out = object.__new__(cls)
        object.__setattr__(out, "num", num)
        object.__setattr__(out, "den", den)
        return out

    @property
    def field(self) -> Field:
        return self.num.field

    def is_poly(self) -> bool:
        return self.den.degree == 0

    def as_poly(self) -> Poly:
        if not self.is_poly():
            raise ValueError(f"{self} is not a polynomial")
        return self.num

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def _coerce(self, other: Any) -> RatFun:
        if isinstance(other, RatFun):
            return other
        if isinstance(other, Poly):
            return RatFun._raw(other, Poly.constant(1, other.field))
        if isinstance(other, (int, FieldElem)):
            return RatFun._raw(Poly.constant(other, self.field), Poly.constant(1, self.field))
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.den == o.den:
            if self.is_poly():
                return RatFun._raw(self.num + o.num, self.den)
            return RatFun(self.num + o.num, self.den)
        return RatFun(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun._raw(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.is_poly() and o.is_poly():
            return RatFun._raw(self.num * o.num, self.den)
        return RatFun(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> RatFun:
        if self.is_zero():
            raise DivisionByZero("inverse of the zero rational function")
        return RatFun(self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int) -> RatFun:
        if e < 0:
            return self.inverse() ** (-e)
        return RatFun(self.num**e, self.den**e)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, FieldElem, Poly)):
            other = self._coerce(other)
        if not isinstance(other, RatFun):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num.vecs, self.den.vecs))

    def __repr__(self) -> str:
        return f"RatFun({self})"

    def __str__(self) -> str:
        if self.is_poly():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def to_json(self) -> Any:
        if self.is_poly():
            return self.num.to_json()
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data: Any, field: Field) -> RatFun:
        if isinstance(data, dict):
            return cls(Poly.from_json(data["num"], field), Poly.from_json(data["den"], field))
        return cls(Poly.from_json(data, field))


Scalar = Union[RatFun, Poly, FieldElem, int]


def as_ratfun(value: Scalar, field: Field) -> RatFun:
    if isinstance(value, RatFun):
        return value
    if isinstance(value, Poly):
        return RatFun._raw(value, Poly.constant(1, value.field))
    return RatFun(Poly.constant(value, field))


def poly_arith(f: Poly, g: Poly, op: str):
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "divmod":
        return divmod(f, g)
    if op == "gcd":
        return f.gcd(g)
    raise ValueError(f"unknown operation {op!r}")


def ratfun_arith(u: RatFun, v: RatFun, op: str) -> RatFun:
    if op == "add":
        return u + v
    if op == "sub":
        return u - v
    if op == "mul":
        return u * v
    if op == "div":
        return u / v
    raise ValueError(f"unknown operation {op!r}")


def _check_modulus(f: Poly, tower: FieldTower) -> None:
    if tower.r is None:
        raise ModulusMismatch("tower has no top extension to reduce into")
    top_mod = Poly(tower.fqm, tower.top.modulus)
    if f.field != tower.fqm or f != top_mod:
        raise ModulusMismatch(f"{f} is not the tower's top modulus {top_mod}")


def reduce_mod(g: Poly | RatFun, f: Poly, tower: FieldTower) -> FieldElem:
    """Image of ``g`` in F_{q^{mr}} = F_{q^m}[x]/(f) under ``x -> b``."""
    _check_modulus(f, tower)
    if isinstance(g, RatFun):
        den = reduce_mod(g.den, f, tower)
        if den.is_zero():
            raise DivisionByZero(f"denominator {g.den} vanishes modulo {f}")
        return reduce_mod(g.num, f, tower) / den
    if g.field != tower.fqm:
        g = Poly(tower.fqm, [tower.fqm(c) for c in g.coeffs])
    r = g % f
    top = tower.top
    coeffs = list(r.coeffs) + [tower.fqm.zero] * (tower.r - len(r.vecs))
    return top.from_coords(coeffs)


def lift(y: FieldElem) -> Poly:
    """Inverse of :func:`reduce_mod`: the polynomial of degree < r mapping to ``y``."""
    T = y.field.tower
    return Poly(T.fqm, gf.expand(y.embed(T.top), gf.QM))


def _poly_bareiss(rows: list[list[Poly]]) -> Poly:
    n = len(rows)
    if n == 0:
        raise ValueError("empty matrix")
    F = rows[0][0].field
    M = [list(r) for r in rows]
    sign = 1
    prev = Poly.constant(1, F)
    for k in range(n - 1):
        if M[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not M[i][k].is_zero()), None)
            if swap is None:
                return Poly(F)
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        pivot = M[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                numer = M[i][j] * pivot - M[i][k] * M[k][j]
                qt, rem = divmod(numer, prev)
                assert rem.is_zero(), "Bareiss division must be exact"
                M[i][j] = qt
            M[i][k] = Poly(F)
        prev = pivot
    return M[n - 1][n - 1] if sign == 1 else -M[n - 1][n - 1]


def det_polymatrix(M: Sequence[Sequence[Scalar]], field: Field | None = None) -> RatFun:
    """Exact determinant of a square matrix of rational functions.

    Each row is scaled by the lcm of its denominators, the resulting
    polynomial matrix goes through fraction-free elimination, and the
    scaling is divided back out.
    """
    n = len(M)
    if n == 0 or any(len(r) != n for r in M):
        raise ValueError("det_polymatrix needs a non-empty square matrix")
    if field is None:
        field = next(e.field for r in M for e in r if isinstance(e, (RatFun, Poly, FieldElem)))
    rows = [[as_ratfun(e, field) for e in r] for r in M]
    scale = Poly.constant(1, field)
    prows = []
    for r in rows:
        lcm = Poly.constant(1, field)
        for e in r:
            if e.den.degree > 0:
                lcm = (lcm * e.den) // lcm.gcd(e.den)
        scale = scale * lcm
        prows.append([e.num * (lcm // e.den) for e in r])
    return RatFun(_poly_bareiss(prows), scale)
