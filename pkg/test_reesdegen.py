# -*- coding: utf-8 -*-
import random

import pytest

from config import using
from errors import InputError, OrdCapExceeded
from idealcalc import Ideal, ideal_power
from polyring import RingSpec
from reesdegen import (
    TildeFamily,
    convolution_power_check,
    family_invariants_hold,
    flatness_certificate,
    init_ideal,
    lemma41_check,
    local_equation,
    ord_along,
    power_compat,
    random_ideal_containing,
    rees_components,
    rees_presentation,
    tilde_components,
)


def test_ord_along(qxy, ideal):
    center = ideal(qxy, "x", "y")
    x, y = qxy.gens
    assert ord_along(x ** 2 * y, center) == 3
    assert ord_along(x ** 2 + y, center) == 1
    assert ord_along(qxy.element(1), center) == 0
    with pytest.raises(InputError):
        ord_along(qxy.poly_ring.zero, center)


def test_ord_cap(qxy, ideal):
    # 模掉 (x) 之后 x 属于所有幂次
    with using(ORD_CAP=5):
        with pytest.raises(OrdCapExceeded):
            ord_along(qxy.gen("x"), ideal(qxy, "x"), ambient=ideal(qxy, "x"))


def test_tilde_of_center_itself(qxy, ideal):
    center = ideal(qxy, "x", "y")
    family = tilde_components(center, center)
    assert family.stabilized
    assert family.stabilization_index == 1
    for j in range(5):
        assert family.component(j) == ideal_power(center, max(1, j))
    assert family_invariants_hold(family)
    # (x, y) 不是主理想，没有 Rees 表示
    assert flatness_certificate(family) is None
    assert convolution_power_check(family, 2, 3) is None


def test_tilde_late_stabilization(qxy, ideal):
    center = ideal(qxy, "x", "y")
    family = tilde_components(ideal(qxy, "x^2"), center)
    assert family.stabilization_index == 2
    assert family.component(1) == ideal(qxy, "x^2")
    assert family.component(2) == ideal(qxy, "x^2")
    assert family.component(4) == ideal(qxy, "x^4", "x^3*y", "x^2*y^2")
    assert family_invariants_hold(family)
    assert flatness_certificate(family) is None
    assert "t^-2" in family.describe()


def test_tilde_rejects_other_ring(qxy, qxyz, ideal):
    with pytest.raises(InputError):
        tilde_components(ideal(qxy, "x"), ideal(qxyz, "x"))


def test_tilde_partial_when_capped(qxy, ideal):
    family = tilde_components(ideal(qxy, "x^4"), ideal(qxy, "x", "y"), j_cap=2)
    assert not family.stabilized
    assert family.stabilization_index is None
    assert family.component(6) == ideal(qxy, "x^4*y^2", "x^5*y", "x^6")


def test_convolution_rejects_bad_m(qxy, ideal):
    family = tilde_components(ideal(qxy, "x"), ideal(qxy, "x", "y"))
    with pytest.raises(InputError):
        convolution_power_check(family, 0, 2)


def test_local_equation(qxy, ideal):
    assert local_equation(ideal(qxy, "x")) == qxy.gen("x")
    with pytest.raises(InputError):
        local_equation(ideal(qxy, "x", "y"))
    # 模 y - x^2 之后 (x, y) = (x)
    assert local_equation(ideal(qxy, "y", "x"), ambient=ideal(qxy, "y - x^2")) == qxy.gen("x")


def test_init_of_smooth_pair(qxy, ideal):
    init = init_ideal(ideal(qxy, "x", "y"), ideal(qxy, "x"))
    assert init.s == "s"
    assert init.ring.variables == ("x", "y", "s")
    assert init.ideal == ideal(init.ring, "x", "y", "s")
    assert init.stabilization_index == 1


def test_init_with_higher_component(qxy, ideal):
    init = init_ideal(ideal(qxy, "x^2", "y"), ideal(qxy, "x"))
    assert init.stabilization_index == 2
    assert init.ideal == ideal(init.ring, "x", "y", "s^2")
    assert sorted(str(g) for g in init.generators()) == ["s**2", "y"]
    assert init.degree_zero_part(qxy) == ideal(qxy, "x", "y")


def test_init_of_coordinate_center(ideal):
    R = RingSpec.standard(("x", "u"))
    init = init_ideal(ideal(R, "u", "x^2"), ideal(R, "u"))
    assert init.stabilization_index == 1
    assert init.ideal == ideal(init.ring, "u", "s", "x^2")
    assert sorted(str(g) for g in init.generators()) == ["s", "x**2"]


def test_init_with_center_principal_modulo_ambient(qxy, ideal):
    # 模 y - x^2 之后 (x, y) = (x)，而 y ≡ x^2 不能在 S 里被 x^2 整除
    init = init_ideal(ideal(qxy, "y"), ideal(qxy, "x", "y"), ambient=ideal(qxy, "y - x^2"))
    assert init.local_equation == qxy.gen("x")
    assert init.stabilization_index == 2
    assert init.ideal == ideal(init.ring, "x", "y", "s^2")
    assert [str(g) for g in init.generators()] == ["s**2"]


def test_tilde_of_coordinate_center(ideal):
    R = RingSpec.standard(("x", "u"))
    family = tilde_components(ideal(R, "u", "x^2"), ideal(R, "u"))
    assert [family.component(j) for j in range(3)] == [
        ideal(R, "u", "x^2"), ideal(R, "u"), ideal(R, "u^2"),
    ]
    assert family.stabilization_index == 1


def _random_poly(R, rng, max_degree=2):
    f = R.poly_ring.zero
    for _ in range(rng.randint(1, 3)):
        exps = [0] * len(R.variables)
        for _ in range(rng.randint(0, max_degree)):
            exps[rng.randrange(len(exps))] += 1
        f += R.from_terms({tuple(exps): rng.choice([-2, -1, 1, 2, 3])})
    return f


def _random_ideal_avoiding(u, R, rng):
    # 生成元是 u^e · f，整体不含 u
    while True:
        gens = [u ** rng.randint(0, 2) * _random_poly(R, rng) for _ in range(2)]
        I = Ideal(R, [g for g in gens if g])
        if not I.is_zero and not I.contains(u):
            return I


def test_tilde_against_rees_presentation(ideal):
    R = RingSpec.standard(("x", "u"))
    I, center = ideal(R, "x*u", "u^2"), ideal(R, "u")
    family = tilde_components(I, center)
    assert family.stabilization_index == 2
    expected = [ideal(R, "x*u", "u^2"), ideal(R, "x*u", "u^2"), ideal(R, "u^2"), ideal(R, "u^3")]
    assert [family.component(j) for j in range(4)] == expected
    assert rees_components(I, center, 3) == expected
    assert flatness_certificate(family) is True


def test_rees_presentation_modulo_ambient(qxy, ideal):
    presentation = rees_presentation(ideal(qxy, "y"), ideal(qxy, "x", "y"), ambient=ideal(qxy, "y - x^2"))
    assert presentation.h == qxy.gen("x")
    assert presentation.ring.variables == ("x", "y", "t", "z")
    assert presentation.component(2) == ideal(qxy, "x^2", "y")
    assert presentation.component(3) == ideal(qxy, "x^3", "y - x^2")


def test_flatness_detects_wrong_components(ideal):
    R = RingSpec.standard(("x", "u"))
    center = ideal(R, "u")
    good = tilde_components(center, center)
    assert flatness_certificate(good) is True
    # C_1 少了 u 本身，z 变成 t 的零因子
    bad = TildeFamily(center, center, [ideal(R, "u"), ideal(R, "u^2")], 1, True)
    assert flatness_certificate(bad) is False
    partial = TildeFamily(center, center, [ideal(R, "u")], None, False)
    assert flatness_certificate(partial) is None


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(50))
def test_tilde_components_against_rees(seed):
    R = RingSpec.standard(("x", "y", "u"))
    u = R.gen("u")
    I = _random_ideal_avoiding(u, R, random.Random(seed))
    center = Ideal(R, [u])
    family = tilde_components(I, center)
    assert family.stabilized
    expected = rees_components(I, center, 3)
    for j in range(4):
        assert family.component(j) == expected[j]
    assert flatness_certificate(family) is True


def test_power_compat_fails_for_xy(qxy, ideal):
    report = lemma41_check(qxy.gen("x") * qxy.gen("y"), ideal(qxy, "x", "y"), 2)
    assert not report.passed
    assert report.failure == (2, 1)
    assert report.certificate_text == "x*y"
    assert report.direction == "lhs-not-in-rhs"
    assert report.hypotheses_verified is False


@pytest.mark.parametrize("h, gens", [
    ("u", ("u", "x^2", "x*y")),
    ("x", ("x", "y^2")),
])
def test_power_compat_passes(ideal, h, gens):
    R = RingSpec.standard(("u", "x", "y"))
    I = ideal(R, *gens)
    report = lemma41_check(ideal(R, h).generators[0], I, 4)
    assert report.passed
    assert report.failure is None
    assert (4, 4) in report.checked


def test_power_compat_support(qxy, ideal):
    report = power_compat(ideal(qxy, "x"), ideal(qxy, "y"), 1)
    assert not report.support_ok
    with pytest.raises(InputError):
        power_compat(ideal(qxy, "x"), ideal(qxy, "x"), 0)
    with pytest.raises(InputError):
        lemma41_check(qxy.gen("y"), ideal(qxy, "x"), 1)


def test_random_ideal_containing(qxyz):
    h = qxyz.gen("z")
    a = random_ideal_containing(h, qxyz, random.Random(7))
    b = random_ideal_containing(h, qxyz, random.Random(7))
    assert a.generators == b.generators
    assert a.contains(h)
    assert a.generators[0] == h


@pytest.mark.parametrize("seed", range(3))
def test_random_principal_centers_pass(seed):
    R = RingSpec.standard(("u", "x", "y"))
    I = random_ideal_containing(R.gen("u"), R, random.Random(seed), extra_generators=1)
    # 中心是坐标超平面，u 素且 A/(u) 正则
    assert lemma41_check(R.gen("u"), I, 2).passed


@pytest.mark.slow
def test_lemma41_random_trials():
    R = RingSpec.standard(("u", "x", "y"))
    rng = random.Random(2024)
    for _ in range(200):
        I = random_ideal_containing(R.gen("u"), R, rng)
        report = lemma41_check(R.gen("u"), I, 4)
        assert report.passed, I
        assert len(report.checked) == 10
