from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horolip.errors import DimensionError, PreconditionError, RegimeError
from horolip.lattice import GeneratingSet, LengthOracle, min_nonzero_length
from horolip.nctorus import AlgebraElement, Cocycle, random_element
from horolip.nctorus.analysis import (delta_for, holder_check, modulus_bounds, modulus_upper, order_norm_bound,
                                      radius_probe, weight_ratio)

STD = LengthOracle.word(GeneratingSet.symmetric([1]))
T0 = Cocycle.trivial(1)


def polylog_modulus(beta: float, h: float) -> float:
    """m from the closed form 4 (zeta(2b) - Re Li_2b(e^{2 pi i h}))."""
    m2 = 4 * (mp.zeta(2 * beta) - mp.re(mp.polylog(2 * beta, mp.exp(2j * mp.pi * h))))
    return float(mp.sqrt(m2))


@pytest.mark.parametrize("beta,h", [(0.8, 0.1), (0.8, 1e-3), (0.6, 0.25), (1.0, 0.5), (0.8, 1e-6),
                                    (0.55, 0.37), (0.9, 0.9)])
def test_modulus_brackets_polylog(beta, h):
    lo, hi = modulus_bounds(beta, h)
    ref = polylog_modulus(beta, h)
    assert lo <= ref <= hi
    assert hi - lo <= 1e-2 * ref


def test_modulus_at_beta_one():
    # for beta = 1 the series sums to 2 pi^2 h (1 - h) in closed form
    for h in (0.1, 0.3, 0.5):
        lo, hi = modulus_bounds(1.0, h)
        exact = math.sqrt(8 * math.pi ** 2 * h * (1 - h) / 2)
        assert lo <= exact <= hi


@settings(max_examples=30, deadline=None)
@given(st.floats(0.51, 1.0), st.floats(1e-5, 0.5))
def test_modulus_bounds_ordered(beta, h):
    lo, hi = modulus_bounds(beta, h)
    assert 0 <= lo <= hi
    lo2, hi2 = modulus_bounds(beta, 1 - h)
    assert lo2 == pytest.approx(lo, rel=1e-6) and hi2 == pytest.approx(hi, rel=1e-6)


def test_modulus_zero_and_regime():
    assert modulus_bounds(0.8, 0.0) == (0.0, 0.0)
    assert modulus_bounds(0.8, 3.0) == (0.0, 0.0)
    with pytest.raises(RegimeError):
        modulus_bounds(0.5, 0.1)
    with pytest.raises(RegimeError):
        modulus_bounds(1.2, 0.1)


def test_delta_for_beta_08():
    d = delta_for(0.8, 0.05)
    # frozen from the bracketed search
    assert d == pytest.approx(1.6548e-7, rel=2e-3)
    assert modulus_upper(0.8, d) <= 0.05
    assert polylog_modulus(0.8, d) <= 0.05
    # the certified delta is within a factor 1.5 of the true threshold
    assert polylog_modulus(0.8, d * 1.5) > 0.05
    for h in np.geomspace(d * 1e-3, d, 7):
        assert modulus_upper(0.8, h) <= 0.05


def test_weight_ratio():
    assert weight_ratio(1.0, STD, 200) == pytest.approx(1.0)
    assert weight_ratio(0.8, STD, 200) == pytest.approx(1.0)
    pm12 = LengthOracle.word(GeneratingSet.symmetric([1, 2]))
    assert weight_ratio(1.0, pm12, 100) == pytest.approx(2.0)


def test_holder_examples():
    zero = holder_check(AlgebraElement.delta((0,), T0), 0.8, STD, 0.1, 0.2)
    assert zero.lhs == pytest.approx(0, abs=1e-15) and zero.passed
    rep = holder_check(AlgebraElement.delta((1,), T0), 1.0, STD, 0.0, 1 / 16)
    assert rep.passed and rep.rhs - rep.lhs > 0
    same = holder_check(random_element(np.random.default_rng(0), T0, 3), 0.8, STD, 0.3, 0.3)
    assert same.lhs == 0 and same.rhs == 0 and same.passed
    with pytest.raises(RegimeError):
        holder_check(AlgebraElement.delta((1,), T0), 0.4, STD, 0.0, 0.1)
    with pytest.raises(DimensionError):
        holder_check(AlgebraElement.delta((1, 0), Cocycle.trivial(2)), 0.8, STD, 0.0, 0.1)


def test_holder_random_grid():
    rng = np.random.default_rng(1)
    f = random_element(rng, T0, 3)
    for s, t in rng.random((10, 2)):
        assert holder_check(f, 0.8, STD, s, t, ratio=1.0).passed


def test_radius_probe_standard():
    pr = radius_probe(STD, T0, 2, 10, seed=0)
    assert 0.5 <= pr.value <= math.pi
    assert pr.certified <= pr.value + 1e-12
    assert pr.consistent
    again = radius_probe(STD, T0, 2, 10, seed=0)
    assert again.value == pr.value and again.trace == pr.trace


def test_radius_probe_delta_ratio():
    pr = radius_probe(STD, T0, 1, 0)
    # with no random samples the best seed is delta_{±1}, ratio 1 / l(1)
    assert pr.value == pytest.approx(1.0) and pr.certified == pytest.approx(1.0)


def test_radius_probe_length_consistency():
    pm12 = LengthOracle.word(GeneratingSet.symmetric([1, 2]))
    pr = radius_probe(pm12, T0, 2, 6, seed=3)
    s = min_nonzero_length(pm12, 4)
    assert s >= 1 / (2 * pr.value)


def test_order_norm_bound():
    rng = np.random.default_rng(2)
    for _ in range(5):
        f = random_element(rng, T0, 3, zero_at_origin=True)
        norm, bound = order_norm_bound(f, STD)
        assert norm <= bound * (1 + 1e-12)
    with pytest.raises(PreconditionError):
        order_norm_bound(AlgebraElement.delta((0,), T0), STD)
