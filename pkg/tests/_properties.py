"""Randomized property checks shared by the unit tests and the acceptance suite.

Each ``check_*`` draws one case from ``rng`` and asserts the property.
"""

from __future__ import annotations

import random

from twistcodes import cref, gf, linalg
from twistcodes.ratfun import Poly, RatFun
from twistcodes.twist import (
    LinOp,
    TwistAut,
    apply_aut,
    constant_ring_element,
    in_constant_field,
    independent_over_K,
    is_constant,
    k_basis,
    kernel_dim_on_span,
)

TOWERS = [gf.FieldTower(3, 1, 2), gf.FieldTower(3, 1, 3), gf.FieldTower(5, 1, 2), gf.FieldTower(2, 2, 2), gf.FieldTower(5, 1, 1)]
PHIS = [TwistAut.auto(T) for T in TOWERS]
SMALL_PHIS = [PHIS[0], PHIS[4]]  # K-bases of size 4


def rand_poly(rng: random.Random, F, deg: int) -> Poly:
    return Poly(F, [F.random(rng) for _ in range(deg + 1)])


def rand_ratfun(rng: random.Random, F) -> RatFun:
    num = rand_poly(rng, F, rng.randint(0, 4))
    if rng.random() < 0.5:
        return RatFun(num)
    den = rand_poly(rng, F, rng.randint(0, 3))
    while den.is_zero():
        den = rand_poly(rng, F, rng.randint(0, 3))
    return RatFun(num, den)


def rand_A(rng: random.Random, phi: TwistAut, terms: int = 2) -> Poly:
    return constant_ring_element(phi, [rng.randrange(phi.q) for _ in range(terms)])


def check_automorphism(rng: random.Random) -> None:
    phi = rng.choice(PHIS)
    F = phi.field
    f, g = rand_ratfun(rng, F), rand_ratfun(rng, F)
    assert phi(f + g) == phi(f) + phi(g)
    assert phi(f * g) == phi(f) * phi(g)
    if not g.is_zero():
        assert phi(f / g) == phi(f) / phi(g)
    assert phi(f, 2) == phi(phi(f))
    # the iterate m(q-1) fixes every monomial of x-degree at most q - 2
    j = rng.randrange(phi.q - 1)
    mono = Poly.monomial(F.random(rng), j, F)
    assert apply_aut(phi, mono, phi.extension_degree) == mono


def check_constant_membership(rng: random.Random) -> None:
    phi = rng.choice(PHIS)
    F = phi.field
    kind = rng.randrange(4)
    if kind == 0:
        g = RatFun(rand_A(rng, phi, 3))
    elif kind == 1:
        den = rand_A(rng, phi, 3)
        g = RatFun(rand_A(rng, phi, 3), den) if not den.is_zero() else RatFun(den)
    elif kind == 2:  # near miss: an A-element plus one stray monomial
        g = RatFun(rand_A(rng, phi, 2) + Poly.monomial(F.random(rng, nonzero=True), rng.randrange(1, 2 * phi.q), F))
    else:
        g = rand_ratfun(rng, F)
    assert is_constant(phi, g) == in_constant_field(phi, g)
    if kind <= 1:
        assert is_constant(phi, g)


def check_moore_independence(rng: random.Random) -> None:
    """Moore invertibility against rank of an explicit coefficient matrix over K."""
    phi = rng.choice(SMALL_PHIS)
    basis = [RatFun(b) for b in k_basis(phi)]
    size = rng.randint(1, len(basis))
    C = [[RatFun(rand_A(rng, phi, 2)) if rng.random() < 0.7 else RatFun(Poly(phi.field)) for _ in basis] for _ in range(size)]
    if rng.random() < 0.3 and size > 1:  # force a K-linear relation
        lam = RatFun(rand_A(rng, phi, 2))
        C[-1] = [x + lam * y for x, y in zip(C[0], C[1 % size])] if size > 2 else [lam * y for y in C[0]]
    pool = [sum((c * b for c, b in zip(row, basis)), RatFun(Poly(phi.field))) for row in C]
    expected = linalg.rank(C) == size and len(set(pool)) == size
    assert independent_over_K(phi, pool) == expected


def check_kernel_bound(rng: random.Random) -> None:
    phi = rng.choice(PHIS[:3])
    F = phi.field
    basis = k_basis(phi)
    pts = rng.sample(basis, rng.randint(1, len(basis)))
    deg = rng.randint(0, 3)
    coeffs = [rand_poly(rng, F, rng.randint(0, 2)) for _ in range(deg + 1)]
    while coeffs[-1].is_zero():
        coeffs[-1] = rand_poly(rng, F, 1)
    L = LinOp.from_coeffs(coeffs, F)
    assert kernel_dim_on_span(L, phi, pts) <= L.degree


def check_norm(rng: random.Random) -> None:
    T = rng.choice(TOWERS)
    F = T.fqm
    x, y = F.random(rng), F.random(rng)
    assert gf.norm(x * y) == gf.norm(x) * gf.norm(y)
    assert gf.norm(x).lies_in(gf.Q)


def check_cref_count(rng: random.Random) -> None:
    n = rng.randint(1, 6)
    k = rng.randint(1, n)
    q = rng.choice([2, 3, 4, 5, 7])
    it = cref.CrefIterator(n, k, q)
    assert len(it) == cref.gaussian_binomial(n, k, q)
    if len(it) <= 2000:
        mats = list(it)
        assert len(mats) == len(it)
        assert len({m.tobytes() for m in mats}) == len(mats)


PROPERTIES = {
    "automorphism": check_automorphism,
    "constant-membership": check_constant_membership,
    "moore-independence": check_moore_independence,
    "kernel-bound": check_kernel_bound,
    "norm-multiplicative": check_norm,
    "cref-count": check_cref_count,
}


def run(name: str, cases: int, seed: int) -> int:
    rng = random.Random(seed)
    for _ in range(cases):
        PROPERTIES[name](rng)
    return cases
