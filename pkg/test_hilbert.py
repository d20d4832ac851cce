# -*- coding: utf-8 -*-
import itertools
import random
from fractions import Fraction

import pytest
from sympy.polys.matrices import DomainMatrix

from config import using
from errors import FlatnessError, InputError, StabilizationError
from hilbert import (
    SectionTable,
    _count_by_enumeration,
    extract_coefficients,
    fill_linear_range,
    graded_dimension,
    hilbert_polynomial,
    k_polynomial,
    relative_euler_characteristic,
    section_table,
    stable_interpolation,
)
from idealcalc import Ideal
from polyring import RingSpec


def test_fat_point(p2, ideal):
    I = ideal(p2, "x0^2", "x0*x1", "x1^2")
    assert [graded_dimension(I, (k,)) for k in range(4)] == [1, 3, 3, 3]
    hp = hilbert_polynomial(I)
    assert str(hp) == "3"
    assert hp.degree == 0


def test_plane_and_curves(p2, ideal):
    hp = hilbert_polynomial(Ideal.zero(p2))
    assert hp.coefficients == (Fraction(1, 2), Fraction(3, 2), Fraction(1))

    conic = hilbert_polynomial(ideal(p2, "x0^2 + x1^2 + x2^2"))
    assert conic.coefficients == (2, 1)

    P3 = RingSpec.standard(("x0", "x1", "x2", "x3"))
    cubic = hilbert_polynomial(ideal(P3, "x0*x2 - x1^2", "x0*x3 - x1*x2", "x1*x3 - x2^2"))
    assert cubic.coefficients == (3, 1)


def test_saturation_before_counting(p2, ideal):
    # 无关分量只影响低次数
    I = ideal(p2, "x0^2", "x0*x1", "x0*x2")
    assert hilbert_polynomial(I, saturate=False).coefficients == hilbert_polynomial(I).coefficients
    assert str(hilbert_polynomial(I)) == "k + 1"


def test_k_polynomial(qxy):
    assert k_polynomial([(1, 0), (0, 1)], qxy) == {(0,): 1, (1,): -2, (2,): 1}
    assert k_polynomial([], qxy) == {(0,): 1}
    assert k_polynomial([(2, 0), (1, 1)], qxy) == {(0,): 1, (2,): -2, (3,): 1}


@pytest.mark.parametrize("texts", [
    ("x0^2*x1 - x2^3", "x0*x1*x2"),
    ("x0^2", "x1^3", "x0*x1*x2"),
    ("x0*x1 - x2^2",),
])
def test_numerator_matches_enumeration(p2, ideal, texts):
    I = ideal(p2, *texts)
    for k in range(7):
        assert graded_dimension(I, (k,)) == _count_by_enumeration(I, (k,))


def test_bigraded_dimension(p1p1, ideal):
    I = ideal(p1p1, "x0*y1 - x1*y0")
    for a in range(4):
        for b in range(4):
            assert graded_dimension(I, (a, b)) == _count_by_enumeration(I, (a, b))
    assert graded_dimension(Ideal.zero(p1p1), (2, 3)) == 12
    assert graded_dimension(I, (-1, 2)) == 0
    hp = hilbert_polynomial(Ideal.zero(p1p1))
    assert hp.coefficients == (1, 2, 1)


def test_inhomogeneous_rejected(qxy, ideal):
    with pytest.raises(InputError):
        graded_dimension(ideal(qxy, "x + 1"), (2,))


def test_stable_interpolation():
    hp = stable_interpolation(lambda k: k * k + 1, 2)
    assert hp.coefficients == (1, 0, 1)
    assert hp(Fraction(1, 2)) == Fraction(5, 4)

    late = stable_interpolation(lambda k: k if k >= 6 else 0, 1, start=4)
    assert late.coefficients == (1, 0)
    assert late.k0 == 8

    strided = stable_interpolation(lambda k: k // 2, 1, stride=2)
    assert strided.coefficients == (Fraction(1, 2), 0)
    assert strided.k0 % 2 == 0


def test_interpolation_windows_do_not_overlap():
    calls = []
    hp = stable_interpolation(lambda k: calls.append(k) or k, 1, start=4)
    assert calls == [4, 5, 6, 7, 8, 9]
    assert hp.coefficients == (1, 0)

    # 4..7 上是 k，之后是 2k；只看前四个点会误判为稳定
    hp = stable_interpolation(lambda k: k if k < 8 else 2 * k, 1, start=4)
    assert hp.coefficients == (2, 0)
    assert hp.k0 == 8


def test_stable_interpolation_gives_up():
    with using(STABILIZATION_RETRIES=1):
        with pytest.raises(StabilizationError):
            stable_interpolation(lambda k: 2 ** k, 1)


def test_extract_coefficients(p1, p2, ideal):
    hp = hilbert_polynomial(Ideal.zero(p1))
    assert extract_coefficients(hp, 1) == (1, 1)
    assert extract_coefficients(hilbert_polynomial(ideal(p2, "x0", "x1")), 1) == (0, 1)
    with pytest.raises(FlatnessError):
        extract_coefficients(hilbert_polynomial(Ideal.zero(p2)), 1)


def test_section_table_product(p1p1):
    table = section_table(Ideal.zero(p1p1), 1, [2], [0, 1, 2])
    assert table.column(2) == [(0, 3), (1, 6), (2, 9)]
    assert fill_linear_range(table, 2) == 0
    assert relative_euler_characteristic(table, 2) == 3


def test_section_table_twisted(p1p1, ideal):
    table = SectionTable(Ideal.zero(p1p1), 1, twist=ideal(p1p1, "x1"), c=Fraction(1, 2))
    assert table.power(4) == 2
    assert table.value(2, 0) == 2
    assert table.value(4, 3) == 3 * 4
    with pytest.raises(InputError):
        table.power(3)
    assert "saturated=True" in table.provenance


def test_section_table_not_linear_yet(p1p1):
    table = SectionTable(Ideal.zero(p1p1), 1)
    table.value(1, 0)
    with pytest.raises(StabilizationError):
        relative_euler_characteristic(table, 1)


def test_section_table_needs_bigraded(p2, p1p1):
    with pytest.raises(InputError):
        SectionTable(Ideal.zero(p2), 1)
    with pytest.raises(InputError):
        SectionTable(Ideal.zero(p1p1), 1, twist=Ideal.of_variables(p1p1, ["x0"]))


def _dense_quotient_dimension(R, gens, deg):
    """dim (S/I)_deg：I_deg 由 m·g 张成，用 DomainMatrix 求秩。"""
    n = len(R.variables)
    monos = [m for m in itertools.product(range(deg + 1), repeat=n) if sum(m) == deg]
    index = {m: i for i, m in enumerate(monos)}
    domain = R.poly_ring.domain
    rows = []
    for g in gens:
        for m in itertools.product(range(deg + 1), repeat=n):
            if sum(m) != deg - sum(g.LM):
                continue
            row = [domain.zero] * len(monos)
            for mono, c in g.mul_monom(m).iterterms():
                row[index[mono]] = c
            rows.append(row)
    if not rows:
        return len(monos)
    return len(monos) - DomainMatrix(rows, (len(rows), len(monos)), domain).rank()


def _random_homogeneous(R, rng):
    n = len(R.variables)
    d = rng.randint(1, 3)
    terms = {}
    for _ in range(rng.randint(1, 3)):
        exps = [0] * n
        for _ in range(d):
            exps[rng.randrange(n)] += 1
        terms[tuple(exps)] = rng.choice([-2, -1, 1, 2, 3])
    return R.from_terms(terms)


@pytest.mark.parametrize("seed", range(100))
def test_graded_dimension_matches_rank(seed):
    rng = random.Random(seed)
    R = RingSpec.standard(("x", "y", "z")[:rng.randint(1, 3)])
    gens = [_random_homogeneous(R, rng) for _ in range(rng.randint(1, 3))]
    I = Ideal(R, gens)
    for k in range(9):
        assert graded_dimension(I, (k,)) == _dense_quotient_dimension(R, gens, k), k
