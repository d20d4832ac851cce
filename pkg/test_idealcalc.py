# -*- coding: utf-8 -*-
import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from conftest import build_ideal
from config import using
from errors import InputError, RingMismatch
from idealcalc import (
    Ideal,
    Smoothness,
    _intersect_by_elimination,
    _saturate_iteratively,
    eliminate,
    ideal_equal,
    ideal_intersect,
    ideal_power,
    ideal_product,
    ideal_quotient,
    ideal_sum,
    is_projectively_empty,
    jacobian_smoothness_check,
    saturate_all,
    saturate_by_variable,
    saturation,
)
from polyring import RingSpec


def test_sum_product_power(qxy, ideal):
    assert ideal_sum(ideal(qxy, "x"), ideal(qxy, "y")) == ideal(qxy, "x", "y")
    assert ideal_power(ideal(qxy, "x", "y^2"), 2) == ideal(qxy, "x^2", "x*y^2", "y^4")
    assert ideal_product(ideal(qxy, "x"), Ideal.unit(qxy)) == ideal(qxy, "x")
    assert ideal_power(ideal(qxy, "x"), 0).is_unit


def test_power_generators_are_interreduced(qxy, ideal):
    I = ideal_power(ideal(qxy, "x", "y^2"), 2)
    assert sorted(I.monomials()) == sorted([(2, 0), (1, 2), (0, 4)])


def test_intersect(qxy, ideal):
    assert ideal_intersect(ideal(qxy, "x"), ideal(qxy, "y")) == ideal(qxy, "x*y")
    I2 = ideal_power(ideal(qxy, "x", "y^2"), 2)
    assert ideal_intersect(I2, ideal(qxy, "x")) == ideal(qxy, "x^2", "x*y^2")
    I = ideal(qxy, "x + y^2", "x*y")
    assert ideal_intersect(I, Ideal.unit(qxy)) == I


def test_elimination_matches_monomial_fast_path(qxy, ideal):
    I, J = ideal(qxy, "x^2", "x*y"), ideal(qxy, "y^3", "x^3")
    assert _intersect_by_elimination(I, J) == ideal_intersect(I, J)


def test_eliminate(qxyz, qxy, ideal):
    # 抛物线的参数化 x = z, y = z^2，消去 z
    I = ideal(qxyz, "x - z", "y - z^2")
    assert eliminate(I, ["z"], qxy) == ideal(qxy, "y - x^2")
    assert eliminate(ideal(qxyz, "z"), ["z"], qxy).is_zero


def test_size_bounds(qxy, ideal):
    big = RingSpec.standard(tuple(f"x{i}" for i in range(17)))
    with pytest.raises(InputError):
        Ideal(big, [])
    with using(MAX_VARIABLES=17):
        assert Ideal(big, []).is_zero
    # 辅助块不计入
    ext = RingSpec.standard(tuple(f"x{i}" for i in range(16))).extend("w", "_aux")
    assert Ideal(ext, [ext.gen("w")]).ring is ext

    f = qxy.gen("x") ** 5
    with using(MAX_DEGREE=4):
        with pytest.raises(InputError):
            Ideal(qxy, [f])
    assert Ideal(qxy, [f]).contains(f)


def test_quotient_and_saturation(qxy, p1, ideal):
    assert ideal_quotient(ideal(qxy, "x*y"), ideal(qxy, "x")) == ideal(qxy, "y")
    irrelevant = ideal(p1, "x0", "x1")
    assert saturation(ideal(p1, "x0^2", "x0*x1"), irrelevant) == ideal(p1, "x0")
    I = ideal(qxy, "x^2 - y", "x*y")
    assert saturation(I, Ideal.unit(qxy)) == I


def test_bayer_matches_iterated_quotient(p2, ideal):
    I = ideal(p2, "x0^2*x2 - x1^3", "x0*x1*x2")
    for name in p2.variables:
        fast = saturate_by_variable(I, name)
        slow = _saturate_iteratively(I, Ideal(p2, [p2.gen(name)]))
        assert fast == slow


def test_equality(qxy, ideal):
    assert ideal_equal(ideal(qxy, "x", "y"), ideal(qxy, "y", "x"))
    assert ideal(qxy, "x^2", "x*y^2") == ideal_product(ideal(qxy, "x"), ideal(qxy, "x", "y^2"))
    assert not ideal_equal(ideal(qxy, "x"), ideal(qxy, "x^2"))
    with pytest.raises(RingMismatch):
        ideal_equal(ideal(qxy, "x"), Ideal.unit(RingSpec.standard(("x",))))


def test_projective_emptiness(p2, ideal):
    assert is_projectively_empty(ideal(p2, "x0", "x1", "x2"))
    assert not is_projectively_empty(ideal(p2, "x0"))
    assert not is_projectively_empty(ideal(p2, "x0^2", "x1"))
    assert saturate_all(ideal(p2, "x0^2", "x1")) == ideal(p2, "x0^2", "x1")


def test_bigraded_saturation(p1p1, ideal):
    # x 块无关理想的分量被去掉
    I = ideal(p1p1, "x0*y1", "x1*y1")
    assert saturate_all(I) == ideal(p1p1, "y1")


def test_jacobian(p2, ideal):
    assert jacobian_smoothness_check(ideal(p2, "x0^2 + x1^2 + x2^2"), 1) == Smoothness.SMOOTH
    assert jacobian_smoothness_check(ideal(p2, "x0*x1"), 1) == Smoothness.SINGULAR
    assert jacobian_smoothness_check(Ideal.zero(p2), 0) == Smoothness.SMOOTH
    assert jacobian_smoothness_check(ideal(p2, "x0", "x1", "x0 + x1"), 2) == Smoothness.INCONCLUSIVE


_R = RingSpec.standard(("x", "y", "z"))
_terms = st.dictionaries(
    st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 1)),
    st.integers(-2, 2),
    min_size=1,
    max_size=2,
)
_ideal = st.lists(_terms, min_size=1, max_size=2).map(
    lambda ts: Ideal(_R, [_R.from_terms(t) for t in ts])
)


@given(_ideal, _ideal)
def test_product_inside_intersection(I, J):
    K = ideal_intersect(I, J)
    assert K.contains_ideal(ideal_product(I, J))
    assert I.contains_ideal(K)
    assert J.contains_ideal(K)


@given(_ideal, _ideal)
def test_quotient_times_divisor(I, J):
    Q = ideal_quotient(I, J)
    assert I.contains_ideal(ideal_product(Q, J))


@given(_ideal, st.integers(0, 1), st.integers(0, 2))
def test_power_law(I, a, b):
    assert ideal_power(I, a + b) == ideal_product(ideal_power(I, a), ideal_power(I, b))


@given(_ideal)
def test_saturation_idempotent(I):
    J = build_ideal(_R, "x", "y")
    S = saturation(I, J)
    assert saturation(S, J) == S


@settings(max_examples=15)
@given(_ideal, st.data())
def test_combinations_are_members(I, data):
    f = _R.poly_ring.zero
    for g in I.generators:
        f += _R.from_terms(data.draw(_terms)) * g
    assert I.contains(f)
