from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from horolip.convexgeom import face_from_members, facets
from horolip.errors import CocycleMismatchError, DimensionError, InvariantViolation, PreconditionError
from horolip.horoboundary import orbit
from horolip.lattice import GeneratingSet, LengthOracle, NormSpec
from horolip.nctorus import (GOLDEN, AlgebraElement, Cocycle, L_ell, X_sigma, a_norm, df_norm, dual_action,
                             dual_ball_functionals, fourier_sup, involution, k_constants,
                             main_inequality_check, op_norm, random_element,
                             truncated_pi, twisted_convolve)
from horolip.nctorus.algebra import cocycle_eval
from horolip.nctorus.opnorm import lanczos_norm, sparse_norm
from horolip.nctorus.seminorms import fibre_norm

STD = LengthOracle.word(GeneratingSet.symmetric([1]))
PM12 = GeneratingSet.symmetric([1, 2])
T0_1 = Cocycle.trivial(1)
T0_2 = Cocycle.trivial(2)
ROT = Cocycle.rotation(2, 0.3)


def el(items: dict, c: Cocycle) -> AlgebraElement:
    return AlgebraElement({tuple(k) if isinstance(k, tuple) else (k,): v for k, v in items.items()}, c)


def grid_sup(f: AlgebraElement, n: int = 8192) -> float:
    """sup |sum f(k) e^{ikt}| by direct evaluation on n points (no FFT)."""
    t = 2 * np.pi * np.arange(n) / n
    vals = sum(v * np.exp(1j * x[0] * t) for x, v in f.items)
    return float(np.max(np.abs(vals)))


# cocycles and the algebra ----------------------------------------------------


def test_cocycle_examples():
    assert cocycle_eval(T0_2, (3, 1), (-2, 5)) == 1
    assert cocycle_eval(ROT, (1, 0), (0, 1)) == pytest.approx(cmath.exp(1j * math.pi * 0.3))
    assert cocycle_eval(ROT, (4, -1), (0, 0)) == 1
    assert cocycle_eval(ROT, (2, 3), (2, 3)) == pytest.approx(1)
    with pytest.raises(PreconditionError):
        Cocycle(((0.0, 1.0), (1.0, 0.0)))


def test_convolution_examples():
    e1, e2 = AlgebraElement.delta((1, 0), ROT), AlgebraElement.delta((0, 1), ROT)
    a, b = twisted_convolve(e1, e2), twisted_convolve(e2, e1)
    assert a((1, 1)) == pytest.approx(cmath.exp(1j * math.pi * 0.3))
    assert b((1, 1)) == pytest.approx(cmath.exp(-1j * math.pi * 0.3))
    assert a((1, 1)) / b((1, 1)) == pytest.approx(cmath.exp(2j * math.pi * 0.3))
    f = random_element(np.random.default_rng(1), ROT, 2)
    assert twisted_convolve(AlgebraElement.delta((0, 0), ROT), f).max_diff(f) == 0
    y, z = (2, -1), (1, 3)
    dd = twisted_convolve(AlgebraElement.delta(y, ROT), AlgebraElement.delta(z, ROT))
    assert dd((3, 2)) == pytest.approx(ROT(y, z))
    with pytest.raises(CocycleMismatchError):
        twisted_convolve(AlgebraElement.delta((0, 0), T0_2), f)


def test_involution_examples():
    assert involution(AlgebraElement.delta((0, 0), ROT)).max_diff(AlgebraElement.delta((0, 0), ROT)) == 0
    d = involution(AlgebraElement.delta((2, 1), ROT))
    assert d((-2, -1)) == pytest.approx(1)
    f = random_element(np.random.default_rng(2), ROT, 2)
    g = involution(f)
    assert all(g(tuple(-c for c in x)) == pytest.approx(v.conjugate()) for x, v in f.items)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.floats(-1, 1))
def test_associativity_and_involution(seed, theta):
    c = Cocycle.rotation(2, theta)
    rng = np.random.default_rng(seed)
    f, g, h = (random_element(rng, c, 3) for _ in range(3))
    left = twisted_convolve(twisted_convolve(f, g), h)
    right = twisted_convolve(f, twisted_convolve(g, h))
    assert left.max_diff(right) <= 1e-12 * max(1.0, max(abs(v) for _, v in left.items))
    assert involution(involution(f)).max_diff(f) <= 1e-12
    lhs = involution(twisted_convolve(f, g))
    rhs = twisted_convolve(involution(g), involution(f))
    assert lhs.max_diff(rhs) <= 1e-11


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=3, max_size=3),
       st.floats(-2, 2))
def test_cocycle_identity(pts, theta):
    c = Cocycle.rotation(2, theta)
    x, y, z = pts
    s = lambda a, b: (a[0] + b[0], a[1] + b[1])  # noqa: E731
    assert abs(c(y, z) * c(x, s(y, z)) - c(x, y) * c(s(x, y), z)) <= 1e-11
    assert abs(abs(c(x, y)) - 1) <= 1e-12


# truncations and norms ---------------------------------------------------------


def test_truncated_pi_examples():
    assert np.array_equal(truncated_pi(AlgebraElement.delta((0,), T0_1), 3).dense(), np.eye(7))
    m = truncated_pi(AlgebraElement.delta((1,), T0_1), 2).dense()
    assert np.array_equal(m, np.eye(5, k=-1))
    rep = truncated_pi(AlgebraElement.delta((1, -2), ROT), 3)
    d = rep.dense()
    assert np.all((np.abs(d) > 0).sum(axis=0) <= 1)
    assert np.allclose(np.abs(d[np.abs(d) > 0]), 1)


def test_truncations_are_compressions():
    f = random_element(np.random.default_rng(3), Cocycle.rotation(2, GOLDEN), 2)
    small, big = truncated_pi(f, 4), truncated_pi(f, 7)
    idx = [big.index_of(x) for x in small.points]
    assert np.allclose(big.dense()[np.ix_(idx, idx)], small.dense())


def test_op_norm_examples():
    assert op_norm(np.eye(10), "dense_svd") == pytest.approx(1)
    assert op_norm(np.diag([3.0, 1.0, 0.0]), "power_iteration") == pytest.approx(3)
    rng = np.random.default_rng(7)
    m = rng.normal(size=(50, 50)) + 1j * rng.normal(size=(50, 50))
    assert abs(op_norm(m, "power_iteration", tol=1e-12) - op_norm(m, "dense_svd")) <= 1e-8 * op_norm(m)


def test_sparse_routes_agree():
    rng = np.random.default_rng(11)
    m = sp.random(600, 600, density=0.01, random_state=11, dtype=complex)
    m = m + 1j * sp.random(600, 600, density=0.01, random_state=12)
    dense = op_norm(m, "dense_svd")
    assert sparse_norm(m)[0] == pytest.approx(dense, rel=1e-9)
    assert lanczos_norm(m)[0] == pytest.approx(dense, rel=1e-6)
    # a weighted partial permutation has its largest entry as norm
    perm = rng.permutation(500)
    w = rng.normal(size=500)
    w[::7] = 0
    pm = sp.csr_matrix((w.astype(complex), (perm, np.arange(500))), shape=(500, 500))
    assert sparse_norm(pm)[0] == pytest.approx(op_norm(pm, "dense_svd"), rel=1e-12)


def test_a_norm_examples():
    assert a_norm(AlgebraElement.delta((3,), T0_1)).value == pytest.approx(1)
    assert a_norm(AlgebraElement.delta((1, 2), ROT)).value == pytest.approx(1)
    f = el({1: 1, -1: 1}, T0_1)
    assert a_norm(f, radii=[256]).value == pytest.approx(2, rel=1e-3)
    g = el({0: 1, 1: 1}, T0_1)
    assert a_norm(g, radii=[256]).value == pytest.approx(2, rel=1e-3)


@pytest.mark.parametrize("seed", range(5))
def test_a_norm_matches_fourier(seed):
    f = random_element(np.random.default_rng([seed, 99]), T0_1, 4)
    est = a_norm(f, radii=[256])
    assert est.value <= grid_sup(f) * (1 + 1e-9)
    assert est.value == pytest.approx(grid_sup(f), rel=2e-3)
    assert fourier_sup(f, 4096) == pytest.approx(grid_sup(f), rel=1e-4)


def test_twisted_truncation_below_fibre_norm():
    f = random_element(np.random.default_rng(5), Cocycle.rotation(2, GOLDEN), 2)
    fibre = fibre_norm(f).value
    trace = a_norm(f, radii=[8, 16, 24]).trace
    assert all(v <= fibre * (1 + 1e-9) for _, v in trace)
    assert trace[-1][1] >= fibre * 0.97
    # rational theta uses several fibres; still an upper envelope of the truncations
    g = AlgebraElement(f.coeffs, Cocycle.rotation(2, 0.25))
    fib = fibre_norm(g).value
    assert a_norm(g, radii=[16]).value <= fib * (1 + 1e-9)


def test_c_star_identity_proxy():
    f = random_element(np.random.default_rng(8), Cocycle.rotation(2, GOLDEN), 1)
    ff = twisted_convolve(involution(f), f)
    a, b = a_norm(f, radii=[24]).value, a_norm(ff, radii=[24]).value
    assert b == pytest.approx(a * a, rel=2e-2)
    # both truncations are lower bounds; the fibre picture gives the exact identity
    fa, fb = fibre_norm(f).value, fibre_norm(ff).value
    assert fb == pytest.approx(fa * fa, rel=2e-3)
    assert b <= fb * (1 + 1e-9)


def test_L_examples():
    for y in (1, -3, 5):
        assert L_ell(AlgebraElement.delta((y,), T0_1), STD).value == pytest.approx(abs(y), abs=1e-9)
    assert L_ell(AlgebraElement.delta((0,), T0_1), STD).value == 0
    f = el({1: 1, -1: 1}, T0_1)
    est = L_ell(f, STD)
    assert est.value == pytest.approx(2, rel=1e-3) and est.value <= 2 * (1 + 1e-9)
    hexo = LengthOracle.word(GeneratingSet.symmetric([(1, 0), (0, 1), (1, 1)]))
    for y in [(1, 1), (2, -1), (-3, 2)]:
        assert L_ell(AlgebraElement.delta(y, ROT), hexo).value == pytest.approx(hexo(y), abs=1e-9)


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10**6), st.booleans(), st.sampled_from(["l1", "l2", "word"]))
def test_sandwich_and_monotone_trace(seed, twist, kind):
    c = Cocycle.rotation(2, GOLDEN) if twist else T0_2
    f = random_element(np.random.default_rng(seed), c, 2)
    o = (LengthOracle.word(GeneratingSet.symmetric([(1, 0), (0, 1)])) if kind == "word"
         else LengthOracle.norm(NormSpec(kind, 2)))
    est = L_ell(f, o, radii=[8, 12])
    assert est.lower_companion <= est.value * (1 + 1e-12)
    assert est.value <= est.upper_companion * (1 + 1e-9)
    vals = [v for _, v in est.trace]
    assert all(b >= a * (1 - 1e-9) for a, b in zip(vals, vals[1:]))


def test_dual_action_invariance():
    rng = np.random.default_rng(4)
    o = LengthOracle.norm(NormSpec("l1", 2))
    f = random_element(rng, Cocycle.rotation(2, GOLDEN), 2)
    assert dual_action(f, [0.0, 0.0]).max_diff(f) == 0
    p = rng.random(2)
    g = dual_action(f, p)
    assert abs(L_ell(g, o, radii=[8]).value - L_ell(f, o, radii=[8]).value) <= 1e-6
    assert abs(a_norm(g, radii=[8]).value - a_norm(f, radii=[8]).value) <= 1e-6
    d = dual_action(AlgebraElement.delta((2, 1), ROT), p)
    assert abs(d((2, 1))) == pytest.approx(1)


def test_x_sigma_examples():
    f = el({2: 1, -2: 1}, T0_1)
    g = X_sigma(f, [Fraction(1, 2)])
    assert g((2,)) == 1 and g((-2,)) == -1
    assert not X_sigma(f, [0]).support
    assert X_sigma(AlgebraElement.delta((3,), T0_1), [2])((3,)) == 6
    with pytest.raises(DimensionError):
        X_sigma(f, [1, 1])


def test_df_norm_examples():
    assert df_norm(AlgebraElement.delta((0,), T0_1), [(1,), (-1,)]).value == 0
    f = el({1: 1, -1: 1}, T0_1)
    assert df_norm(f, facets(GeneratingSet.symmetric([1])), method="faithful").value == pytest.approx(2, rel=1e-9)
    sq = GeneratingSet.symmetric([(1, 0), (0, 1)])
    e1 = AlgebraElement.delta((1, 0), ROT)
    assert df_norm(e1, facets(sq, with_cosets=False)).value == pytest.approx(1)
    with pytest.raises(PreconditionError):
        df_norm(f, [])


def test_dual_ball_functionals():
    assert sorted(dual_ball_functionals(NormSpec("l1", 2))) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    circle = dual_ball_functionals(NormSpec("l2", 2), samples=8)
    assert len(circle) == 8 and all(math.hypot(*s) == pytest.approx(1) for s in circle)


def test_k_constants_pm12():
    o = LengthOracle.word(PM12)
    F = face_from_members(PM12, [2])
    kc = k_constants(F, o, orbit(o, F))
    assert kc.k_F == 2
    assert kc.k_F_as_stated == Fraction(3, 2)
    q1 = [c for c in kc.per_coset if c.q == (1,)][0]
    assert q1.values == [0, 1] and q1.k == 1 and q1.sigma_q == Fraction(1, 2)


def test_k_constants_single_coset():
    g = GeneratingSet.symmetric([1])
    o = LengthOracle.word(g)
    F = face_from_members(g, [1])
    kc = k_constants(F, o, orbit(o, F))
    assert kc.k_F == 1 and kc.k_F_as_stated == 1


def test_k_constants_pm38():
    pm38 = GeneratingSet.symmetric([3, 8])
    o = LengthOracle.word(pm38)
    F = face_from_members(pm38, [8])
    kc = k_constants(F, o, orbit(o, F))
    assert len(kc.per_coset) == 8 and kc.k_F >= 1
    for c in kc.per_coset:
        if c.pair is not None:
            m1, m2 = c.pair
            assert c.k == (abs(c.sigma_q - m2) + abs(m1 - c.sigma_q)) / abs(m1 - m2)


def test_main_inequality_examples():
    o = LengthOracle.norm(NormSpec("l1", 2))
    funcs = dual_ball_functionals(NormSpec("l1", 2))
    rep = main_inequality_check(AlgebraElement.delta((2, -1), ROT), o, funcs)
    assert rep.passed and rep.lhs == pytest.approx(3) and rep.rhs == pytest.approx(3)
    zero = main_inequality_check(AlgebraElement.delta((0, 0), ROT), o, funcs)
    assert zero.lhs == 0 and zero.rhs == 0 and zero.passed


@pytest.mark.parametrize("seed", range(4))
def test_main_inequality_d1_word(seed):
    o = LengthOracle.word(PM12)
    f = random_element(np.random.default_rng([seed, 5]), T0_1, 3)
    k = max(k_constants(F, o, orbit(o, F)).k_F for F in facets(PM12))
    rep = main_inequality_check(f, o, facets(PM12, with_cosets=False), k=float(k), method="faithful")
    assert rep.passed, rep.to_json()


def test_trace_decrease_is_rejected(monkeypatch):
    from horolip.nctorus import seminorms

    values = iter([2.0, 1.0])
    monkeypatch.setattr(seminorms, "op_norm", lambda m, method="auto", tol=1e-10: next(values))
    f = random_element(np.random.default_rng(0), T0_1, 2)
    with pytest.raises(InvariantViolation):
        seminorms.L_ell(f, STD, radii=[8, 16], method="dense_svd")
