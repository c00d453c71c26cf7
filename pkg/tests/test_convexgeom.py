from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog
from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form as sympy_hnf

from horolip.convexgeom import (dual_norm, enumerate_faces, extreme_points, face_from_members, facets,
                                gauge_norm, subgroup_data, support_bound_check, word_gauge_gap)
from horolip.errors import DimensionError, RankError
from horolip.hnf import hermite_normal_form, in_lattice, lattice_determinant, reduce_mod
from horolip.lattice import GeneratingSet, LengthOracle

PM12 = GeneratingSet.symmetric([1, 2])
SQUARE = GeneratingSet.symmetric([(1, 0), (0, 1)])
HEX = GeneratingSet.symmetric([(1, 0), (0, 1), (1, 1)])


def lp_gauge(gens: GeneratingSet, x) -> float:
    """min sum q_s subject to sum q_s s = x, q >= 0 (S is symmetric)."""
    A = np.array([list(s) for s in gens], dtype=float).T
    res = linprog(np.ones(A.shape[1]), A_eq=A, b_eq=np.asarray(x, dtype=float), bounds=(0, None))
    assert res.status == 0
    return res.fun


def test_square_facets():
    fs = facets(SQUARE)
    assert sorted(tuple(f.sigma) for f in fs) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    assert all(f.index == 1 and f.coset_reps == ((0, 0),) for f in fs)


def test_standard_facets():
    fs = facets(GeneratingSet.symmetric([1]))
    assert sorted((f.members, tuple(f.sigma)) for f in fs) == [(((-1,),), (-1,)), (((1,),), (1,))]


def test_pm12_facets():
    fs = facets(PM12)
    assert sorted(f.members for f in fs) == [((-2,),), ((2,),)]
    assert {tuple(f.sigma) for f in fs} == {(Fraction(1, 2),), (Fraction(-1, 2),)}
    members = {m for f in fs for m in f.members}
    assert (1,) not in members and (-1,) not in members


def test_hexagon_facets():
    fs = facets(HEX)
    assert len(fs) == 6
    for f in fs:
        assert len(f.members) == 2 and f.index == 1
        assert all(f.sigma_at(s) < 1 for s in HEX if s not in f.members)
    assert {p for f in fs for p in f.members} == set(extreme_points(HEX))


def test_lower_faces_present():
    faces = enumerate_faces(SQUARE)
    vertices = [f for f in faces if not f.is_facet]
    assert sorted(f.members for f in vertices) == [((-1, 0),), ((0, -1),), ((0, 1),), ((1, 0),)]
    assert not any(f.sigma_unique for f in vertices)
    for f in vertices:
        assert all(f.sigma_at(s) <= 1 for s in SQUARE)
        assert [s for s in SQUARE if f.sigma_at(s) == 1] == list(f.members)


def test_degenerate_hull_rejected():
    with pytest.raises(DimensionError):
        enumerate_faces(GeneratingSet(2, ((1, 1), (-1, -1))))


def test_gauge_examples():
    assert gauge_norm(PM12, [3]) == Fraction(3, 2)
    assert gauge_norm(PM12, [0]) == 0
    assert gauge_norm(SQUARE, [1, 1]) == 2


def test_dual_examples():
    assert dual_norm(SQUARE, [1, 1]) == 1
    assert dual_norm(SQUARE, [0, 0]) == 0
    assert dual_norm(PM12, [1]) == 2


@settings(max_examples=50, deadline=None)
@given(st.integers(-9, 9), st.integers(-9, 9), st.sampled_from(["square", "hex", "oct"]))
def test_gauge_matches_lp(a, b, which):
    g = {"square": SQUARE, "hex": HEX,
         "oct": GeneratingSet.symmetric([(2, 1), (1, 2), (-1, 2), (2, -1)])}[which]
    assert float(gauge_norm(g, [a, b])) == pytest.approx(lp_gauge(g, [a, b]), abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.tuples(st.fractions(-5, 5, max_denominator=7), st.fractions(-5, 5, max_denominator=7)),
       st.tuples(st.fractions(-5, 5, max_denominator=7), st.fractions(-5, 5, max_denominator=7)))
def test_gauge_dual_pairing(x, tau):
    for g in (SQUARE, HEX):
        assert x[0] * tau[0] + x[1] * tau[1] <= gauge_norm(g, x) * dual_norm(g, tau)


def test_pairing_equality_on_facet_cone():
    for f in facets(HEX):
        x = f.z
        assert f.sigma_at(x) == gauge_norm(HEX, x) * dual_norm(HEX, f.sigma)


def test_gauge_below_word_length():
    for g in (PM12, SQUARE, HEX):
        o = LengthOracle.word(g)
        assert all(gauge_norm(g, x) <= o(x) for x in o.ball(8))
    assert word_gauge_gap(PM12, 10) == 0
    assert word_gauge_gap(GeneratingSet.symmetric([3, 8]), 12) > 0


def test_support_bound_examples():
    o = LengthOracle.word(PM12)
    F = face_from_members(PM12, [2])
    assert support_bound_check(F, o, 20)
    pm38 = GeneratingSet.symmetric([3, 8])
    assert support_bound_check(face_from_members(pm38, [8]), LengthOracle.word(pm38), 30)


def test_subgroup_examples():
    assert subgroup_data(face_from_members(PM12, [2])) == (2, ((0,), (1,)))
    assert subgroup_data(face_from_members(SQUARE, [(1, 0), (0, 1)])) == (1, ((0, 0),))
    g = GeneratingSet.symmetric([(2, 0), (0, 2), (1, 0), (0, 1)])
    F = face_from_members(g, [(2, 0), (0, 2)])
    index, reps = subgroup_data(F)
    assert index == 4 and reps[0] == (0, 0) and len(reps) == 4
    with pytest.raises(RankError):
        subgroup_data(face_from_members(SQUARE, [(1, 0)]))


def test_pm38_cosets():
    pm38 = GeneratingSet.symmetric([3, 8])
    F = face_from_members(pm38, [8])
    assert F.index == 8
    o = LengthOracle.word(pm38)
    assert sorted(r[0] % 8 for r in F.coset_reps) == list(range(8))
    # each representative is shortest in its residue class mod 8
    for q in F.coset_reps:
        assert o(q) == min(o(q[0] + 8 * k) for k in range(-6, 7))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=1, max_size=5))
def test_hnf_matches_sympy(rows):
    ours = hermite_normal_form(rows, 3)
    nz = [r for r in rows if any(r)]
    if not nz:
        assert ours == []
        return
    # sympy's normal form uses another convention; compare the lattices instead:
    # sympy's basis lies in ours and both have the same covolume
    theirs = sympy_hnf(Matrix(nz).T).T
    theirs = [tuple(int(c) for c in theirs.row(i)) for i in range(theirs.rows)]
    theirs = [r for r in theirs if any(r)]
    assert len(ours) == len(theirs) == Matrix(nz).rank()
    assert all(in_lattice(ours, r) for r in theirs)
    gram = lambda B: abs((Matrix(B) * Matrix(B).T).det())  # noqa: E731
    assert gram(ours) == gram(theirs)
    for r in nz:
        assert in_lattice(ours, r)
        assert not any(reduce_mod(ours, r))


def test_hnf_determinant():
    assert lattice_determinant(hermite_normal_form([(2, 0), (0, 2)], 2), 2) == 4
    assert lattice_determinant(hermite_normal_form([(1, 1), (1, -1)], 2), 2) == 2
    assert lattice_determinant(hermite_normal_form([(3,), (8,)], 1), 1) == 1
