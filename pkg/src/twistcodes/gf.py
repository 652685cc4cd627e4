"""Exact arithmetic in the tower F_p < F_q < F_{q^m} < F_{q^{mr}}.

Every element is stored as a flat tuple of F_p digits with respect to the
canonical product basis of its level, lower-level index varying fastest.
For an element of F_{q^{mr}} = F_{q^m}[b]/(f) with F_{q^m} = F_q[a]/(g) and
F_q = F_p[w]/(h) the digit at position ``i + s*(j + m*l)`` is the coefficient
of ``w^i a^j b^l``.  Chunking the flat tuple therefore recovers the nested
little-endian coefficient sequences, and embedding a lower level is a matter
of zero padding.

Small levels (at most ``TABLE_LIMIT`` elements) multiply through log/exp
tables; larger levels multiply as polynomials over the level below.
"""

from __future__ import annotations

import itertools
import json
import random
from collections.abc import Iterable, Iterator, Sequence
from functools import cached_property
from typing import Any

from .errors import DivisionByZero, LevelMismatch, NotFound, NotIrreducible

TABLE_LIMIT = 8192

P, Q, QM, TOP = 0, 1, 2, 3
LEVEL_NAMES = {P: "p", Q: "q", QM: "qm", TOP: "qmr"}
_GEN_NAMES = {Q: "w", QM: "a", TOP: "b"}

Vec = tuple[int, ...]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


class Field:
    """One level of a :class:`FieldTower`.

    ``degree`` is the extension degree over the level below and ``dim`` the
    degree over F_p.  Elements are created by calling the field:
    ``F(3)``, ``F([[1], [0], [2]])`` or ``F(other_element)``.
    """

    def __init__(self, tower: FieldTower, level: int, base: Field | None, modulus: Sequence[Vec] | None):
        self.tower = tower
        self.level = level
        self.base = base
        self.p = tower.p
        # moduli up to this level; towers sharing them share this field
        self.key: tuple = tower.key
        if base is None:
            self.degree = 1
            self.dim = 1
            self._modvecs: tuple[Vec, ...] = ()
        else:
            assert modulus is not None
            self.degree = len(modulus) - 1
            self.dim = base.dim * self.degree
            self._modvecs = tuple(tuple(c) for c in modulus[:-1])
        self.order = self.p**self.dim
        self._zero: Vec = (0,) * self.dim
        self._one: Vec = (1,) + (0,) * (self.dim - 1)
        self._log: dict[Vec, int] | None = None
        self._exp: list[Vec] | None = None
        if self.order <= TABLE_LIMIT and self.order > 2:
            self._build_tables()

    # -- identity -----------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def compatible(self, other: Field) -> bool:
        """True when both fields sit in one tower (the lower one's moduli prefix the higher's)."""
        lo, hi = (self, other) if self.level <= other.level else (other, self)
        return hi.key[: len(lo.key)] == lo.key

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.dim})[{LEVEL_NAMES[self.level]}]"

    @property
    def name(self) -> str:
        return LEVEL_NAMES[self.level]

    @property
    def modulus(self) -> tuple[FieldElem, ...]:
        """Monic modulus over the base level, little-endian (empty for F_p)."""
        if self.base is None:
            return ()
        return tuple(FieldElem(self.base, v) for v in self._modvecs) + (self.base.one,)

    # -- construction -------------------------------------------------------
    def __call__(self, value: Any) -> FieldElem:
        if isinstance(value, FieldElem):
            return value.embed(self)
        if isinstance(value, (int,)) and not isinstance(value, bool):
            return FieldElem(self, ((value % self.p),) + (0,) * (self.dim - 1))
        return FieldElem(self, self._flatten(value))

    def _flatten(self, nested: Any) -> Vec:
        if self.base is None:
            if isinstance(nested, (list, tuple)):
                if len(nested) != 1:
                    raise ValueError("F_p element must be a single digit")
                nested = nested[0]
            if isinstance(nested, FieldElem):
                return nested.embed(self).vec
            return (int(nested) % self.p,)
        if isinstance(nested, FieldElem):
            return nested.embed(self).vec
        if isinstance(nested, int):
            return self(nested).vec
        seq = list(nested)
        if len(seq) > self.degree:
            raise ValueError(f"{self!r} expects at most {self.degree} coefficients, got {len(seq)}")
        out: list[int] = []
        for c in seq:
            out.extend(self.base._flatten(c))
        out.extend([0] * (self.dim - len(out)))
        return tuple(out)

    @property
    def zero(self) -> FieldElem:
        return FieldElem(self, self._zero)

    @property
    def one(self) -> FieldElem:
        return FieldElem(self, self._one)

    @cached_property
    def gen(self) -> FieldElem:
        """The adjoined root of this level's modulus (``w``, ``a`` or ``b``)."""
        if self.base is None:
            return self.one
        if self.degree == 1:
            return FieldElem(self, self.base._neg(self._modvecs[0]))
        w = self.base.dim
        return FieldElem(self, self._zero[:w] + self.base._one + self._zero[2 * w :])

    def from_index(self, n: int) -> FieldElem:
        digits = []
        for _ in range(self.dim):
            n, d = divmod(n, self.p)
            digits.append(d)
        return FieldElem(self, tuple(digits))

    def elements(self) -> Iterator[FieldElem]:
        """All elements in index order (first digit varies fastest)."""
        for digits in itertools.product(range(self.p), repeat=self.dim):
            yield FieldElem(self, digits[::-1])

    def random(self, rng: random.Random, nonzero: bool = False) -> FieldElem:
        while True:
            x = FieldElem(self, tuple(rng.randrange(self.p) for _ in range(self.dim)))
            if not (nonzero and x.is_zero()):
                return x

    def basis_over(self, base_level: int) -> list[FieldElem]:
        """Canonical product basis of this level over ``base_level``."""
        lower = self.tower.level(base_level)
        return [self.from_coords([lower.one if i == j else lower.zero for i in range(self.dim // lower.dim)]) for j in range(self.dim // lower.dim)]

    def from_coords(self, coords: Sequence[FieldElem]) -> FieldElem:
        """Rebuild an element from its expansion over a lower level."""
        if not coords:
            raise ValueError("empty coordinate sequence")
        lower = coords[0].field
        if lower.dim * len(coords) != self.dim:
            raise LevelMismatch(f"{len(coords)} coordinates over {lower!r} do not span {self!r}")
        return FieldElem(self, tuple(itertools.chain.from_iterable(lower(c).vec for c in coords)))

    # -- vector kernels -----------------------------------------------------
    def _add(self, a: Vec, b: Vec) -> Vec:
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def _sub(self, a: Vec, b: Vec) -> Vec:
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def _neg(self, a: Vec) -> Vec:
        p = self.p
        return tuple((-x) % p for x in a)

    def _smul(self, c: int, a: Vec) -> Vec:
        p = self.p
        return tuple((c * x) % p for x in a)

    def _mul(self, a: Vec, b: Vec) -> Vec:
        if self._log is not None:
            if not any(a) or not any(b):
                return self._zero
            return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]
        return self._mul_poly(a, b)

    def _mul_poly(self, a: Vec, b: Vec) -> Vec:
        if self.base is None:
            return ((a[0] * b[0]) % self.p,)
        base = self.base
        w, d = base.dim, self.degree
        A = [a[i * w : (i + 1) * w] for i in range(d)]
        B = [b[i * w : (i + 1) * w] for i in range(d)]
        prod = [base._zero] * (2 * d - 1)
        for i, ai in enumerate(A):
            if not any(ai):
                continue
            for j, bj in enumerate(B):
                if any(bj):
                    prod[i + j] = base._add(prod[i + j], base._mul(ai, bj))
        mod = self._modvecs
        for deg in range(2 * d - 2, d - 1, -1):
            t = prod[deg]
            if not any(t):
                continue
            for j in range(d):
                if any(mod[j]):
                    prod[deg - d + j] = base._sub(prod[deg - d + j], base._mul(t, mod[j]))
        return tuple(itertools.chain.from_iterable(prod[:d]))

    def _pow(self, a: Vec, e: int) -> Vec:
        if e < 0:
            return self._pow(self._inv(a), -e)
        if self._log is not None:
            if not any(a):
                return self._one if e == 0 else self._zero
            return self._exp[(self._log[a] * e) % (self.order - 1)]
        result, sq = self._one, a
        while e:
            if e & 1:
                result = self._mul_poly(result, sq)
            e >>= 1
            if e:
                sq = self._mul_poly(sq, sq)
        return result

    def _inv(self, a: Vec) -> Vec:
        if not any(a):
            raise DivisionByZero(f"inverse of zero in {self!r}")
        if self._log is not None:
            return self._exp[(-self._log[a]) % (self.order - 1)]
        if self.base is None:
            return (pow(a[0], self.p - 2, self.p),)
        return self._pow(a, self.order - 2)

    def _build_tables(self) -> None:
        n = self.order - 1
        factors = prime_factors(n)
        for idx in range(2, self.order):
            g = self.from_index(idx).vec
            if all(self._pow(g, n // f) != self._one for f in factors):
                break
        else:  # pragma: no cover - every finite field has a primitive element
            raise NotFound("no primitive element")
        exp = [self._one]
        for _ in range(n - 1):
            exp.append(self._mul_poly(exp[-1], g))
        self._exp = exp
        self._log = {v: i for i, v in enumerate(exp)}

    # -- batched helpers ----------------------------------------------------
    def mul_matrix(self, c: FieldElem):
        """Matrix ``M`` over F_p with ``vec(c*x) = M @ vec(x)``."""
        import numpy as np

        cv = self(c).vec
        cols = []
        for j in range(self.dim):
            e = tuple(1 if i == j else 0 for i in range(self.dim))
            cols.append(self._mul(cv, e))
        return np.array(cols, dtype=np.int64).T

    @cached_property
    def mul_tensor(self):
        """``T[i*dim + j] = vec(e_i * e_j)``, shape ``(dim*dim, dim)``."""
        import numpy as np

        basis = [tuple(1 if i == j else 0 for i in range(self.dim)) for j in range(self.dim)]
        rows = [self._mul(u, v) for u in basis for v in basis]
        return np.array(rows, dtype=np.int64)

    @cached_property
    def tables(self):
        """Integer-encoded ``(add, mul, neg, inv)`` arrays indexed by element index."""
        import numpy as np

        if self.order > 1024:
            raise ValueError(f"{self!r} is too large for dense operation tables")
        elems = [e.vec for e in self.elements()]
        index = {v: i for i, v in enumerate(elems)}
        q = self.order
        add = np.zeros((q, q), dtype=np.int64)
        mul = np.zeros((q, q), dtype=np.int64)
        neg = np.zeros(q, dtype=np.int64)
        inv = np.zeros(q, dtype=np.int64)
        for i, u in enumerate(elems):
            neg[i] = index[self._neg(u)]
            if i:
                inv[i] = index[self._inv(u)]
            for j, v in enumerate(elems):
                add[i, j] = index[self._add(u, v)]
                mul[i, j] = index[self._mul(u, v)]
        return add, mul, neg, inv


class FieldElem:
    """Immutable element of one level of a tower."""

    __slots__ = ("field", "vec")

    def __init__(self, field: Field, vec: Iterable[int]):
        vec = tuple(vec)
        if len(vec) != field.dim:
            raise ValueError(f"{field!r} elements have {field.dim} digits, got {len(vec)}")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "vec", vec)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElem is immutable")

    def __reduce__(self):
        return (FieldElem, (self.field, self.vec))

    # -- structure ----------------------------------------------------------
    @property
    def level(self) -> int:
        return self.field.level

    @property
    def index(self) -> int:
        p = self.field.p
        return sum(d * p**i for i, d in enumerate(self.vec))

    @property
    def coeffs(self) -> Any:
        """Nested little-endian coefficient lists (ints at the F_p level)."""
        return _nest(self.field, self.vec)

    def is_zero(self) -> bool:
        return not any(self.vec)

    def __bool__(self) -> bool:
        return any(self.vec)

    def embed(self, target: Field) -> FieldElem:
        if target == self.field:
            return self
        if not target.compatible(self.field):
            raise LevelMismatch(f"{self.field!r} and {target!r} belong to different towers")
        if target.level < self.field.level:
            return self.section(target.level)
        return FieldElem(target, self.vec + (0,) * (target.dim - self.field.dim))

    def section(self, level: int) -> FieldElem:
        """The same element viewed at a lower level; fails if it does not lie there."""
        lower = self.field.tower.level(level)
        if any(self.vec[lower.dim :]):
            raise LevelMismatch(f"{self} does not lie in {lower!r}")
        return FieldElem(lower, self.vec[: lower.dim])

    def lies_in(self, level: int) -> bool:
        return not any(self.vec[self.field.tower.level(level).dim :])

    def expand(self, base: int) -> tuple[FieldElem, ...]:
        """Coordinates over the product basis of level ``base``."""
        return expand(self, base)

    # -- arithmetic ---------------------------------------------------------
    def _align(self, other: Any) -> tuple[Field, Vec, Vec]:
        if isinstance(other, int) and not isinstance(other, bool):
            return self.field, self.vec, self.field(other).vec
        if not isinstance(other, FieldElem):
            return NotImplemented  # type: ignore[return-value]
        if other.field == self.field:
            return self.field, self.vec, other.vec
        if not other.field.compatible(self.field):
            raise LevelMismatch(f"{self.field!r} and {other.field!r} belong to different towers")
        top = self.field if self.field.level > other.field.level else other.field
        return top, self.embed(top).vec, other.embed(top).vec

    def __add__(self, other):
        al = self._align(other)
        if al is NotImplemented:
            return NotImplemented
        F, a, b = al
        return FieldElem(F, F._add(a, b))

    __radd__ = __add__

    def __sub__(self, other):
        al = self._align(other)
        if al is NotImplemented:
            return NotImplemented
        F, a, b = al
        return FieldElem(F, F._sub(a, b))

    def __rsub__(self, other):
        al = self._align(other)
        if al is NotImplemented:
            return NotImplemented
        F, a, b = al
        return FieldElem(F, F._sub(b, a))

    def __neg__(self):
        return FieldElem(self.field, self.field._neg(self.vec))

    def __mul__(self, other):
        al = self._align(other)
        if al is NotImplemented:
            return NotImplemented
        F, a, b = al
        return FieldElem(F, F._mul(a, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        al = self._align(other)
        if al is NotImplemented:
            return NotImplemented
        F, a, b = al
        return FieldElem(F, F._mul(a, F._inv(b)))

    def __rtruediv__(self, other):
        al = self._align(other)
        if al is NotImplemented:
            return NotImplemented
        F, a, b = al
        return FieldElem(F, F._mul(b, F._inv(a)))

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field._pow(self.vec, e))

    def inverse(self) -> FieldElem:
        return FieldElem(self.field, self.field._inv(self.vec))

    def frobenius(self, k: int = 1) -> FieldElem:
        """``x -> x^(q^k)`` with q the size of the tower's F_q level."""
        if not self:
            return self
        n = self.field.order - 1
        return self ** (pow(self.field.tower.q, k, n) if n > 1 else 1)

    # -- protocol -----------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, int) and not isinstance(other, bool):
            return self.vec == self.field(other).vec
        if not isinstance(other, FieldElem):
            return NotImplemented
        if other.field == self.field:
            return self.vec == other.vec
        if not other.field.compatible(self.field):
            return False
        lo, hi = (self, other) if self.field.level < other.field.level else (other, self)
        return lo.embed(hi.field).vec == hi.vec

    def __hash__(self) -> int:
        # trailing zeros are stripped so that embedded copies hash alike
        v = self.vec
        n = len(v)
        while n > 1 and v[n - 1] == 0:
            n -= 1
        return hash(v[:n])

    def __repr__(self) -> str:
        return f"FieldElem({self.field!r}, {self})"

    def __str__(self) -> str:
        return _format(self.field, self.vec)

    def to_json(self) -> Any:
        return self.coeffs


def _nest(field: Field, vec: Vec) -> Any:
    if field.base is None:
        return vec[0]
    w = field.base.dim
    return [_nest(field.base, vec[i * w : (i + 1) * w]) for i in range(field.degree)]


def _format(field: Field, vec: Vec) -> str:
    if field.base is None:
        return str(vec[0])
    if field.degree == 1:
        return _format(field.base, vec)
    w = field.base.dim
    gen = _GEN_NAMES[field.level]
    terms = []
    for i in range(field.degree - 1, -1, -1):
        c = vec[i * w : (i + 1) * w]
        if not any(c):
            continue
        cs = _format(field.base, c)
        compound = field.base.base is not None and field.base.degree > 1 and sum(1 for x in _split(field.base, c) if any(x)) > 1
        if i == 0:
            terms.append(cs)
            continue
        mono = gen if i == 1 else f"{gen}^{i}"
        if cs == "1":
            terms.append(mono)
        elif compound:
            terms.append(f"({cs}){mono}")
        else:
            terms.append(f"{cs}{mono}")
    return " + ".join(terms) if terms else "0"


def _split(field: Field, vec: Vec) -> list[Vec]:
    if field.base is None:
        return [vec]
    w = field.base.dim
    return [vec[i * w : (i + 1) * w] for i in range(field.degree)]


# ---------------------------------------------------------------------------
# Polynomial kernels over a single level (lists of digit vectors, little-endian)
# ---------------------------------------------------------------------------


def ptrim(F: Field, a: list[Vec]) -> list[Vec]:
    a = list(a)
    while a and not any(a[-1]):
        a.pop()
    return a


def padd(F: Field, a: Sequence[Vec], b: Sequence[Vec]) -> list[Vec]:
    n = max(len(a), len(b))
    z = F._zero
    return ptrim(F, [F._add(a[i] if i < len(a) else z, b[i] if i < len(b) else z) for i in range(n)])


def psub(F: Field, a: Sequence[Vec], b: Sequence[Vec]) -> list[Vec]:
    n = max(len(a), len(b))
    z = F._zero
    return ptrim(F, [F._sub(a[i] if i < len(a) else z, b[i] if i < len(b) else z) for i in range(n)])


def pscale(F: Field, c: Vec, a: Sequence[Vec]) -> list[Vec]:
    if not any(c):
        return []
    return ptrim(F, [F._mul(c, x) for x in a])


def pmul(F: Field, a: Sequence[Vec], b: Sequence[Vec]) -> list[Vec]:
    if not a or not b:
        return []
    out = [F._zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not any(x):
            continue
        for j, y in enumerate(b):
            if any(y):
                out[i + j] = F._add(out[i + j], F._mul(x, y))
    return ptrim(F, out)


def pdivmod(F: Field, a: Sequence[Vec], b: Sequence[Vec]) -> tuple[list[Vec], list[Vec]]:
    b = ptrim(F, list(b))
    if not b:
        raise DivisionByZero("polynomial division by zero")
    r = ptrim(F, list(a))
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], r
    inv_lead = F._inv(b[-1])
    quot = [F._zero] * (len(r) - db)
    while len(r) - 1 >= db and r:
        shift = len(r) - 1 - db
        c = F._mul(r[-1], inv_lead)
        quot[shift] = c
        for j in range(db + 1):
            if any(b[j]):
                r[shift + j] = F._sub(r[shift + j], F._mul(c, b[j]))
        r = ptrim(F, r)
    return ptrim(F, quot), r


def pmonic(F: Field, a: Sequence[Vec]) -> list[Vec]:
    a = ptrim(F, list(a))
    if not a:
        return a
    return pscale(F, F._inv(a[-1]), a)


def pgcd(F: Field, a: Sequence[Vec], b: Sequence[Vec]) -> list[Vec]:
    a, b = ptrim(F, list(a)), ptrim(F, list(b))
    while b:
        a, b = b, pdivmod(F, a, b)[1]
    return pmonic(F, a)


def pxgcd(F: Field, a: Sequence[Vec], b: Sequence[Vec]) -> tuple[list[Vec], list[Vec], list[Vec]]:
    """``(g, u, v)`` with ``u*a + v*b = g`` and ``g`` monic."""
    r0, r1 = ptrim(F, list(a)), ptrim(F, list(b))
    s0, s1 = [F._one], []
    t0, t1 = [], [F._one]
    while r1:
        qt, r = pdivmod(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, psub(F, s0, pmul(F, qt, s1))
        t0, t1 = t1, psub(F, t0, pmul(F, qt, t1))
    if not r0:
        return [], s0, t0
    c = F._inv(r0[-1])
    return pscale(F, c, r0), pscale(F, c, s0), pscale(F, c, t0)


def ppowmod(F: Field, a: Sequence[Vec], e: int, mod: Sequence[Vec]) -> list[Vec]:
    result = [F._one]
    base = pdivmod(F, a, mod)[1]
    while e:
        if e & 1:
            result = pdivmod(F, pmul(F, result, base), mod)[1]
        e >>= 1
        if e:
            base = pdivmod(F, pmul(F, base, base), mod)[1]
    return pdivmod(F, result, mod)[1]


def is_irreducible_vecs(F: Field, f: Sequence[Vec]) -> bool:
    """Rabin's test for a polynomial over ``F``."""
    f = ptrim(F, list(f))
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    f = pmonic(F, f)
    x = [F._zero, F._one]
    Qsize = F.order
    powers = {0: x}
    h = x
    for i in range(1, n + 1):
        h = ppowmod(F, h, Qsize, f)
        powers[i] = h
    if psub(F, powers[n], x):
        return False
    for ell in prime_factors(n):
        g = pgcd(F, psub(F, powers[n // ell], x), f)
        if len(g) != 1:
            return False
    return True


def random_irreducible_vecs(F: Field, degree: int, seed: int) -> list[Vec]:
    rng = random.Random(seed)
    while True:
        f = [F.random(rng).vec for _ in range(degree)] + [F._one]
        if is_irreducible_vecs(F, f):
            return f


# ---------------------------------------------------------------------------
# Towers
# ---------------------------------------------------------------------------


class FieldTower:
    """The tower F_p < F_q < F_{q^m} (< F_{q^{mr}}).

    ``moduli`` holds one monic polynomial per extension step, each as a
    little-endian coefficient sequence over the level below (digits for the
    F_q step, serialized or :class:`FieldElem` coefficients above).  Missing
    moduli are drawn by :func:`irreducible` with seed 0; for ``s == 1`` the
    trivial step uses ``w``.
    """

    def __init__(self, p: int, s: int = 1, m: int = 1, r: int | None = None, moduli: Sequence[Any] | None = None):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if s < 1 or m < 1 or (r is not None and r < 1):
            raise ValueError("extension degrees must be positive")
        self.p, self.s, self.m, self.r = p, s, m, r
        moduli = list(moduli) if moduli is not None else []
        degrees = [s, m] + ([r] if r is not None else [])
        if len(moduli) > len(degrees):
            raise ValueError("more moduli than extension steps")
        moduli += [None] * (len(degrees) - len(moduli))
        self._fields: list[Field] = []
        self.key: tuple = (p,)
        fp = Field(self, P, None, None)
        self._fields.append(fp)
        below = fp
        for lvl, (deg, mod) in enumerate(zip(degrees, moduli), start=1):
            if mod is None:
                if lvl == Q and deg == 1:
                    vecs = [below._zero, below._one]
                else:
                    vecs = random_irreducible_vecs(below, deg, 0)
            else:
                vecs = [below(c).vec if not isinstance(c, FieldElem) else c.embed(below).vec for c in mod]
                vecs = ptrim(below, vecs)
                if len(vecs) - 1 != deg:
                    raise ValueError(f"modulus for level {LEVEL_NAMES[lvl]} has degree {len(vecs) - 1}, expected {deg}")
                if vecs[-1] != below._one:
                    raise ValueError(f"modulus for level {LEVEL_NAMES[lvl]} is not monic")
                if not is_irreducible_vecs(below, vecs):
                    raise NotIrreducible(f"modulus for level {LEVEL_NAMES[lvl]} is reducible")
            self.key = self.key + (tuple(vecs),)
            field = Field(self, lvl, below, vecs)
            self._fields.append(field)
            below = field

    @property
    def q(self) -> int:
        return self.p**self.s

    @property
    def qm(self) -> int:
        return self.q**self.m

    @property
    def top_level(self) -> int:
        return len(self._fields) - 1

    def level(self, i: int) -> Field:
        try:
            return self._fields[i]
        except IndexError:
            raise LevelMismatch(f"tower has no level {i}") from None

    @property
    def fp(self) -> Field:
        return self._fields[P]

    @property
    def fq(self) -> Field:
        return self._fields[Q]

    @property
    def fqm(self) -> Field:
        return self._fields[QM]

    @property
    def top(self) -> Field:
        return self._fields[-1]

    @property
    def moduli(self) -> list[list[Any]]:
        return [[_nest(f.base, v) for v in f._modvecs] + [_nest(f.base, f.base._one)] for f in self._fields[1:]]

    def extend(self, f: Any) -> FieldTower:
        """A copy of this tower with F_{q^{mr}} = F_{q^m}[b]/(f) on top."""
        coeffs = [c for c in getattr(f, "coeffs", f)]
        if self.r is not None:
            raise LevelMismatch("tower already has a top extension")
        return FieldTower(self.p, self.s, self.m, len(coeffs) - 1, self.moduli[:2] + [coeffs])

    def base_tower(self) -> FieldTower:
        """The tower without its top extension."""
        if self.r is None:
            return self
        return FieldTower(self.p, self.s, self.m, None, self.moduli[:2])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldTower) and other.key == self.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        r = f", r={self.r}" if self.r is not None else ""
        return f"FieldTower(p={self.p}, s={self.s}, m={self.m}{r})"

    def __reduce__(self):
        return (_tower_from_json, (self.to_json(),))

    def to_json(self) -> dict:
        out: dict[str, Any] = {"p": self.p, "s": self.s, "m": self.m}
        if self.r is not None:
            out["r"] = self.r
        out["moduli"] = self.moduli
        return out

    @classmethod
    def from_json(cls, data: dict | str) -> FieldTower:
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["p"], data.get("s", 1), data.get("m", 1), data.get("r"), data.get("moduli"))


def _tower_from_json(data: dict) -> FieldTower:
    return FieldTower.from_json(data)


# Presets reproducing the worked example over F_27 and F_{3^12}.
EXAMPLE_F27_MODULUS = [1, 2, 0, 1]  # a^3 - a + 1
EXAMPLE_QUARTIC = [[1, 1, 0], [1, 1, 2], [2, 0, 1], [1, 1, 2], [1, 0, 0]]


def example_tower(with_top: bool = True) -> FieldTower:
    """F_3 < F_27 = F_3(a) < F_{3^12} = F_27(b) with the example moduli."""
    moduli: list[Any] = [[0, 1], EXAMPLE_F27_MODULUS]
    if with_top:
        moduli.append(EXAMPLE_QUARTIC)
    return FieldTower(3, 1, 3, 4 if with_top else None, moduli)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def arith(x: FieldElem, y: FieldElem | int, op: str) -> FieldElem:
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    if op == "pow":
        if not isinstance(y, int):
            raise TypeError("exponent must be an integer")
        return x**y
    raise ValueError(f"unknown operation {op!r}")


def norm(x: FieldElem) -> FieldElem:
    """Norm of F_{q^m}/F_q, returned as an element of F_q."""
    if x.level != QM:
        raise LevelMismatch(f"norm expects an element of F_(q^m), got {x.field!r}")
    T = x.field.tower
    return (x ** ((T.qm - 1) // (T.q - 1))).section(Q)


def multiplicative_order(x: FieldElem) -> int:
    if x.is_zero():
        raise DivisionByZero("zero has no multiplicative order")
    n = x.field.order - 1
    order = n
    for f in prime_factors(n):
        while order % f == 0 and (x ** (order // f)) == 1:
            order //= f
    return order


def is_valid_lambda(lam: FieldElem) -> bool:
    if lam.is_zero():
        return False
    q = lam.field.tower.q
    return multiplicative_order(norm(lam)) == q - 1


def find_lambda(tower: FieldTower) -> FieldElem:
    """Smallest nonzero element of F_{q^m}, in index order, whose norm has order q - 1."""
    F = tower.fqm
    for idx in range(1, F.order):
        lam = F.from_index(idx)
        if is_valid_lambda(lam):
            return lam
    raise NotFound(f"no element of {F!r} has a norm of order {tower.q - 1}")


def irreducible(tower: FieldTower, degree: int, seed: int = 0):
    """Seeded random monic irreducible polynomial of ``degree`` over F_{q^m}."""
    from .ratfun import Poly

    if degree < 1:
        raise ValueError("degree must be positive")
    F = tower.fqm
    return Poly(F, random_irreducible_vecs(F, degree, seed))


def is_irreducible(f) -> bool:
    return is_irreducible_vecs(f.field, f.vecs)


def expand(x: FieldElem, base: int) -> tuple[FieldElem, ...]:
    if base >= x.level:
        if base == x.level:
            return (x,)
        raise LevelMismatch(f"cannot expand {x.field!r} over higher level {LEVEL_NAMES.get(base, base)}")
    lower = x.field.tower.level(base)
    w = lower.dim
    return tuple(FieldElem(lower, x.vec[i : i + w]) for i in range(0, len(x.vec), w))
