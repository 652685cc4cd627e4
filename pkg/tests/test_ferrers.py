from __future__ import annotations

import itertools
import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistcodes import ferrers as fr
from twistcodes import gf
from twistcodes.errors import BadDistance, FieldTooSmall, ProfileViolation, ShapeMismatch, ShapeNotAchieved

T9 = gf.FieldTower(3, 1, 2)
T16 = gf.FieldTower(2, 2, 2)
PROFILE = fr.BlockProfile(((2, 2), (4, 2)))

EXAMPLE_DIAGRAM = fr.FerrersDiagram((2, 2, 3, 5))
EXAMPLE_MATRICES = [
    [[1, 0, 1, 1], [1, 1, 1, 0], [0, 0, 1, 1], [0, 0, 0, 1], [0, 0, 0, 1]],
    [[1, 0, 1, 1], [0, 0, 1, 0], [0, 0, 1, 1], [0, 0, 0, 0], [0, 0, 0, 1]],
]


def rank_mod_p(A: np.ndarray, p: int) -> int:
    """Plain Gaussian elimination over a prime field, independent of the package kernels."""
    A = A.copy() % p
    rank, (rows, cols) = 0, A.shape
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if A[r, c]), None)
        if piv is None:
            continue
        A[[rank, piv]] = A[[piv, rank]]
        A[rank] = (A[rank] * pow(int(A[rank, c]), -1, p)) % p
        for r in range(rows):
            if r != rank and A[r, c]:
                A[r] = (A[r] - A[r, c] * A[rank]) % p
        rank += 1
    return rank


def brute_es_bound(heights, d):
    """Delete the top i rows and the rightmost d-1-i columns, count the dots left, minimize."""
    D = fr.FerrersDiagram(tuple(heights))
    mask = D.mask()
    return min(int(mask[i:, : D.columns - (d - 1 - i)].sum()) for i in range(d))


def min_rank_exhaustive(basis: np.ndarray, p: int) -> int:
    best = None
    for coeffs in itertools.product(range(p), repeat=len(basis)):
        if any(coeffs):
            W = np.tensordot(np.array(coeffs), basis, axes=1) % p
            r = rank_mod_p(W, p)
            best = r if best is None else min(best, r)
    return best


# -- diagrams and bounds -----------------------------------------------------


def test_es_bound_examples():
    assert fr.es_bound(EXAMPLE_DIAGRAM, 1) == 12
    assert fr.es_bound(EXAMPLE_DIAGRAM, 2) == 7
    with pytest.raises(BadDistance):
        fr.es_bound(EXAMPLE_DIAGRAM, 5)
    with pytest.raises(BadDistance):
        fr.es_bound(EXAMPLE_DIAGRAM, 0)


def test_diagram_validation_and_render():
    with pytest.raises(ShapeMismatch):
        fr.FerrersDiagram((3, 2))
    with pytest.raises(ShapeMismatch):
        fr.FerrersDiagram(())
    assert EXAMPLE_DIAGRAM.dots == 12 and EXAMPLE_DIAGRAM.rows == 5
    assert EXAMPLE_DIAGRAM.render().splitlines()[2] == "    • •"
    assert fr.FerrersDiagram.from_json(EXAMPLE_DIAGRAM.to_json()) == EXAMPLE_DIAGRAM


def test_fits_diagram():
    for M in EXAMPLE_MATRICES:
        assert fr.fits_diagram(M, EXAMPLE_DIAGRAM)
    assert fr.fits_diagram(np.zeros((5, 4), dtype=int), EXAMPLE_DIAGRAM)
    bad = np.zeros((5, 4), dtype=int)
    bad[2, 0] = 1
    assert not fr.fits_diagram(bad, EXAMPLE_DIAGRAM)
    with pytest.raises(ShapeMismatch):
        fr.fits_diagram(np.zeros((5, 3), dtype=int), EXAMPLE_DIAGRAM)


def test_example_code_verification():
    code = fr.code_from_matrices(EXAMPLE_MATRICES, EXAMPLE_DIAGRAM, 2, gf.FieldTower(2, 1, 1))
    rep = fr.verify_ferrers(code)
    assert rep["fits"] and rep["independent"]
    assert rep["mode"] == "exhaustive" and rep["checked"] == 3
    assert rep["min_rank"] == 2 == min_rank_exhaustive(code.basis, 2)
    assert rep["K"] == 2 and rep["bound"] == 7 and not rep["optimal"]


def test_zero_dimensional_code_passes():
    code = fr.code_from_matrices([], EXAMPLE_DIAGRAM, 3, gf.FieldTower(2, 1, 1))
    rep = fr.verify_ferrers(code)
    assert rep["distance_ok"] and rep["K"] == 0


@settings(max_examples=100, deadline=None, derandomize=True)
@given(st.lists(st.integers(1, 6), min_size=1, max_size=7).map(sorted), st.data())
def test_es_bound_formula_and_monotonicity(heights, data):
    d = data.draw(st.integers(1, len(heights)))
    assert fr.es_bound(heights, d) == brute_es_bound(heights, d)
    values = [fr.es_bound(heights, e) for e in range(1, len(heights) + 1)]
    assert values == sorted(values, reverse=True)
    assert values[0] == sum(heights)


# -- profiles ----------------------------------------------------------------


def test_profile_cut_and_dimension_formulas():
    assert PROFILE.m == 2 and PROFILE.ks == (1, 2) and PROFILE.M == 4
    assert PROFILE.cut(2) == (3, 1, 1)
    assert fr.eq4_dimension(PROFILE, 2) == 2 * 2 + 4 * 1 == 8
    assert fr.staircase_bound(2, 2, 2) == (1, 1, 8)
    for d in range(1, 5):
        assert fr.eq4_dimension(PROFILE, d) == fr.es_bound(PROFILE.diagram, d)


def test_profile_validation():
    with pytest.raises(ProfileViolation):
        fr.BlockProfile(((3, 2), (4, 2)))  # 3 is not a multiple of m = 2
    with pytest.raises(ProfileViolation):
        fr.BlockProfile(((4, 2), (4, 1)))  # multipliers must increase
    assert fr.BlockProfile.from_json(PROFILE.to_json()) == PROFILE


@pytest.mark.parametrize(("m", "n"), [(1, 3), (2, 2), (2, 3), (3, 2), (3, 3)])
def test_staircase_bound_matches_dot_count(m, n):
    P = fr.staircase_profile(m, n)
    for d in range(1, n * m + 1):
        _, _, K = fr.staircase_bound(m, n, d)
        assert K == fr.eq4_dimension(P, d) == fr.es_bound(P.diagram, d)


# -- constructions -----------------------------------------------------------


def test_construct_q3_m2_d2():
    code = fr.construct_ferrers(PROFILE, 2, T9)
    assert code.K == 8 == fr.es_bound(code.diagram, 2)
    assert all(fr.fits_diagram(B, code.diagram) for B in code.basis)
    assert rank_mod_p(code.basis.reshape(8, -1), 3) == 8
    assert min_rank_exhaustive(code.basis, 3) == 2
    rep = fr.verify_ferrers(code)
    assert rep["optimal"] and rep["distance_ok"] and rep["certifying"]


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_construct_every_distance_is_optimal(d):
    code = fr.construct_ferrers(PROFILE, d, T9)
    assert code.K == fr.es_bound(PROFILE.diagram, d)
    if d == 1:
        assert code.K == PROFILE.diagram.dots
    if code.K <= 8:
        assert min_rank_exhaustive(code.basis, 3) >= d


def test_random_combinations_stay_in_diagram():
    code = fr.construct_ferrers(PROFILE, 2, T9)
    rng = random.Random(0)
    for _ in range(200):
        c = np.array([rng.randrange(3) for _ in range(code.K)])
        assert fr.fits_diagram(np.tensordot(c, code.basis, axes=1) % 3, code.diagram)


def test_staircase_q4():
    code = fr.construct_staircase(2, 3, 4, T16)
    assert code.diagram.heights == (2, 2, 4, 4, 6, 6)
    assert code.K == fr.staircase_bound(2, 3, 4)[2] == fr.es_bound(code.diagram, 4) == 8
    rep = fr.verify_ferrers(code)
    assert rep["mode"] == "exhaustive" and rep["min_rank"] >= 4 and rep["optimal"]


def test_field_too_small():
    with pytest.raises(FieldTooSmall):
        fr.construct_staircase(2, 3, 4, T9)


def test_profile_must_match_tower():
    with pytest.raises(ProfileViolation):
        fr.construct_ferrers(PROFILE, 2, gf.FieldTower(3, 1, 3))


def test_override_equal_to_heights_is_identical():
    for d in (1, 2, 3):
        k = PROFILE.cut(d)[0]
        a = fr.construct_ferrers(PROFILE, d, T9)
        b = fr.construct_ferrers_general(PROFILE, list(PROFILE.diagram.heights[:k]), d, T9)
        assert np.array_equal(a.basis, b.basis) and a.diagram == b.diagram


@pytest.mark.parametrize("override", [[1, 2, 4], [1, 1, 1], [2, 2, 3], [1, 2, 2]])
def test_override_shapes(override):
    code = fr.construct_ferrers_general(PROFILE, override, 2, T9)
    assert code.diagram.heights[:3] == tuple(override)
    assert all(fr.fits_diagram(B, code.diagram) for B in code.basis)
    assert code.K == fr.es_bound(code.diagram, 2)
    assert min_rank_exhaustive(code.basis, 3) >= 2


def test_override_preconditions():
    with pytest.raises(ProfileViolation):
        fr.construct_ferrers_general(PROFILE, [3, 2, 4], 2, T9)  # exceeds r_1
    with pytest.raises(ProfileViolation):
        fr.construct_ferrers_general(PROFILE, [1, 2], 2, T9)  # wrong length
    with pytest.raises(ProfileViolation):
        fr.construct_ferrers_general(PROFILE, [2, 1, 4], 2, T9)  # not non-decreasing


def test_shape_not_achieved_reports_witness(monkeypatch):
    real = fr._expand_codewords

    def leaky(*args, **kw):
        basis = real(*args, **kw)
        basis[0, -1, 0] = 1
        return basis

    monkeypatch.setattr(fr, "_expand_codewords", leaky)
    with pytest.raises(ShapeNotAchieved) as exc:
        fr.construct_ferrers_general(PROFILE, [1, 2, 4], 2, T9)
    assert exc.value.witness is not None


def test_sampled_mode_is_not_certifying():
    code = fr.construct_ferrers(PROFILE, 2, T9)
    rep = fr.verify_ferrers(code, sample_budget=500, seed=1)
    assert rep["mode"] == "sampled" and not rep["certifying"]
    assert rep["checked"] >= 500 and rep["distance_ok"]


def test_code_json():
    code = fr.construct_ferrers(PROFILE, 2, T9)
    fr.verify_ferrers(code)
    data = json.loads(json.dumps(code.to_json()))
    assert data["K"] == 8 and data["optimal"] and data["verification_report"]["min_rank"] == 2
    assert np.array(data["basis"]).shape == (8, 4, 4)
