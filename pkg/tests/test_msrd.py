from __future__ import annotations

import itertools
import json
import random

import pytest

from twistcodes import codes, gf, linalg, msrd
from twistcodes.errors import BudgetExceeded, LengthMismatch, ProfileViolation
from twistcodes.ratfun import Poly
from twistcodes.twist import TwistAut, fq_expansion

T9 = gf.FieldTower(3, 1, 2)


def brute_sum_rank_distance(C: msrd.MsrdCode) -> int:
    """Every nonzero message, scalar arithmetic, per-block ranks by generic elimination."""
    F = C.G.field
    rows = C.rows()
    best = C.N
    for msg in itertools.product(list(F.elements()), repeat=C.k):
        if any(not u.is_zero() for u in msg):
            word = [sum((u * rows[i][j] for i, u in enumerate(msg)), F.zero) for j in range(C.N)]
            best = min(best, msrd.sum_rank(word, C.profile))
    return best


def brute_hamming(G: codes.GenMatrix) -> int:
    F = G.field
    rows = G.finite_entries()
    best = G.n
    for msg in itertools.product(list(F.elements()), repeat=G.k):
        if any(not u.is_zero() for u in msg):
            word = [sum((u * rows[i][j] for i, u in enumerate(msg)), F.zero) for j in range(G.n)]
            best = min(best, sum(not w.is_zero() for w in word))
    return best


def test_profile_basics():
    P = msrd.SumRankProfile((2, 1, 2))
    assert P.N == 5 and P.n == 3
    assert [(s.start, s.stop) for s in P.slices()] == [(0, 2), (2, 3), (3, 5)]
    with pytest.raises(ProfileViolation):
        msrd.SumRankProfile((0, 1))
    with pytest.raises(ProfileViolation):
        msrd.SumRankProfile((1, 1, 1)).check(T9)  # 3 blocks need q - 1 >= 3
    with pytest.raises(ProfileViolation):
        msrd.SumRankProfile((3,)).check(T9)  # block longer than m


def test_sum_rank_degenerate_profiles():
    rng = random.Random(0)
    F = T9.fqm
    for _ in range(30):
        v = [F.random(rng) if rng.random() < 0.6 else F.zero for _ in range(4)]
        assert msrd.sum_rank(v, msrd.SumRankProfile((1, 1, 1, 1))) == sum(not x.is_zero() for x in v)
        assert msrd.sum_rank(v[:2], msrd.SumRankProfile((2,))) == codes.rank_over_base(v[:2])
    with pytest.raises(LengthMismatch):
        msrd.sum_rank([F.one], msrd.SumRankProfile((2,)))


def test_sum_rank_equals_rank_of_tagged_vector():
    """Tag block i with x^i; the F_q-rank of the resulting polynomials equals the sum-rank."""
    phi = TwistAut.auto(T9)
    F = T9.fqm
    P = msrd.SumRankProfile((2, 2))
    rng = random.Random(1)
    for _ in range(40):
        v = [F.random(rng) for _ in range(4)]
        tagged = [Poly.monomial(c, i, F) for i, sl in enumerate(P.slices()) for c in v[sl]]
        assert msrd.sum_rank(v, P) == linalg.rank(fq_expansion(phi, tagged))
        assert msrd.sum_rank(v, P) >= codes.rank_over_base(v)


def test_entry_formula_q3_m2():
    C = msrd.construct_msrd((2, 2), 2, T9)
    F = T9.fqm
    a, lam, q = F.gen, C.lam, 3
    for l, i, j in itertools.product(range(2), range(2), range(2)):
        want = (a**j) ** (q**l) * lam ** (i * (q**l - 1) // (q - 1))
        assert C.rows()[l][2 * i + j] == want


def test_msrd_distance_q3_m2():
    C = msrd.construct_msrd((2, 2), 2, T9)
    assert codes.projective_classes(9, 2) == 10
    assert msrd.min_sum_rank_distance(C) == 3 == C.N - C.k + 1 == brute_sum_rank_distance(C)


@pytest.mark.parametrize(("profile", "k"), [((2, 2), 1), ((2, 2), 3), ((1, 2), 2), ((2, 1), 1), ((1, 1), 2)])
def test_construct_msrd_is_msrd(profile, k):
    C = msrd.construct_msrd(profile, k, T9)
    d = msrd.min_sum_rank_distance(C)
    assert d == sum(profile) - k + 1
    if 9**k <= 729:
        assert d == brute_sum_rank_distance(C)


def test_full_dimension_has_distance_one():
    C = msrd.construct_msrd((2, 2), 4, T9)
    assert msrd.min_sum_rank_distance(C) == 1


def test_single_block_is_gabidulin():
    T = gf.FieldTower(3, 1, 3)
    C = msrd.construct_msrd((3,), 2, T)
    a = T.fqm.gen
    assert C.rows() == [[(a**j).frobenius(l) for j in range(3)] for l in range(2)]
    assert msrd.min_sum_rank_distance(C) == codes.min_rank_distance(C.G) == 2


def test_singletons_give_reed_solomon():
    T = gf.FieldTower(5, 1, 1)
    C = msrd.construct_msrd((1, 1, 1, 1), 2, T)
    lam = C.lam
    # x^j is evaluated to lam^(j l) in row l: a Vandermonde matrix on distinct powers of lam
    assert C.rows() == [[lam ** (j * l) for j in range(4)] for l in range(2)]
    assert msrd.min_sum_rank_distance(C) == msrd.min_hamming_distance(C.G) == brute_hamming(C.G) == 3


def test_all_ones_row_is_mds():
    T = gf.FieldTower(5, 1, 1)
    G = codes.generator([[1, 1, 1]], T, gf.QM)
    assert msrd.min_sum_rank_distance(G, msrd.SumRankProfile((1, 1, 1))) == 3


def test_budget_and_profile_errors():
    C = msrd.construct_msrd((2, 2), 2, T9)
    with pytest.raises(BudgetExceeded):
        msrd.min_sum_rank_distance(C, budget=5)
    with pytest.raises(LengthMismatch):
        msrd.min_sum_rank_distance(C.G, msrd.SumRankProfile((1, 1)))
    with pytest.raises(ProfileViolation):
        msrd.construct_msrd((2, 2), 5, T9)


def test_msrd_json():
    C = msrd.construct_msrd((2, 2), 2, T9)
    data = json.loads(json.dumps(C.to_json({"distance": 3})))
    assert data["profile"] == [2, 2] and data["k"] == 2 and len(data["G"]) == 2
    assert gf.FieldTower.from_json(data["tower"]) == T9
