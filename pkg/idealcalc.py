# -*- coding: utf-8 -*-
"""理想运算：和、积、幂、交、商、饱和、相等、射影空集判定、Jacobian 光滑性。

约定：
- Ideal 的生成元都放在 RingSpec.poly_ring（grevlex）里；零理想用单个生成元 0 表示
- 各单项式序下的约化基缓存在 Ideal 实例上，同时走 groebner 模块的全局缓存
- 商环 O_X = S/I_X 上的理想一律用"包含 I_X 的原像"表示，调用方负责把 I_X 加进去
- 消元：要消去的变量排成最大的块，辅助变量不能泄漏到结果里（泄漏即内部错误）
- 交用辅助变量消元：<w*I, (1-w)*J> ∩ S
- 构造 Ideal 时检查变量个数和生成元次数，超出 MAX_VARIABLES / MAX_DEGREE 抛 InputError
"""

from __future__ import annotations

import enum
import itertools
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import MonomialOrder, grevlex
from sympy.polys.polyerrors import ExactQuotientFailed, GeneratorsError

from config import current_settings
from errors import BudgetExceeded, InputError, InvariantViolation, RingMismatch
from groebner import GroebnerBasis, leading_ideal, normal_form, polynomial_key, reduced_groebner
from polyparse import format_polynomial
from polyring import BlockOrder, GrevlexOrder, Monomial, Polynomial, RingSpec, multidegree_of

logger = logging.getLogger(__name__)


class Ideal:
    def __init__(self, ring: RingSpec, generators: Iterable):
        ring.check_size()
        gens = [ring.element(g) for g in generators]
        nonzero = tuple(ring.check_degree(g) for g in gens if g)
        self.ring = ring
        self.generators: Tuple[Polynomial, ...] = nonzero if nonzero else (ring.poly_ring.zero,)
        self._bases: Dict[MonomialOrder, GroebnerBasis] = {}
        self._powers: Dict[int, "Ideal"] = {1: self}

    @classmethod
    def unit(cls, ring: RingSpec) -> "Ideal":
        return cls(ring, [ring.poly_ring.one])

    @classmethod
    def zero(cls, ring: RingSpec) -> "Ideal":
        return cls(ring, [])

    @classmethod
    def of_variables(cls, ring: RingSpec, names: Iterable[str]) -> "Ideal":
        return cls(ring, [ring.gen(n) for n in names])

    # ---- Gröbner ----
    def groebner(self, order: MonomialOrder = grevlex) -> GroebnerBasis:
        basis = self._bases.get(order)
        if basis is None:
            basis = reduced_groebner(self.generators, order)
            basis = self._bases.setdefault(order, basis)
        return basis

    def basis(self, order: MonomialOrder = grevlex) -> Tuple[Polynomial, ...]:
        """约化基生成元（回到默认环），是理想的规范生成元组。"""
        home = self.ring.poly_ring
        return tuple(g.set_ring(home) for g in self.groebner(order).generators)

    def leading_ideal(self) -> "Ideal":
        return leading_ideal(self.groebner(), self.ring)

    # ---- 性质 ----
    @property
    def is_zero(self) -> bool:
        return not any(self.generators)

    @property
    def is_unit(self) -> bool:
        if any(g.is_ground and g for g in self.generators):
            return True
        return self.groebner().is_unit

    @property
    def is_monomial(self) -> bool:
        return all(len(g) == 1 for g in self.generators if g)

    def is_homogeneous(self) -> bool:
        return all(multidegree_of(g, self.ring) is not None for g in self.generators)

    def is_standard_homogeneous(self) -> bool:
        """对总次数齐次（Bayer 饱和的前提）。"""
        return all(len({sum(m) for m in g.itermonoms()}) <= 1 for g in self.generators)

    def monomials(self) -> List[Monomial]:
        return [g.LM for g in self.generators if g]

    @property
    def key(self):
        return (self.ring, polynomial_key(self.generators))

    # ---- 成员 ----
    def contains(self, f: Polynomial) -> bool:
        f = self.ring.element(f)
        return not normal_form(f, self.groebner())

    def contains_ideal(self, other: "Ideal") -> bool:
        _check_same(self, other)
        return all(self.contains(g) for g in other.generators)

    def first_outside(self, other: "Ideal") -> Optional[Polynomial]:
        """other 的约化基里第一个不在 self 中的元素；全部在内返回 None。"""
        _check_same(self, other)
        for g in other.basis():
            if not self.contains(g):
                return g
        return None

    # ---- 运算符 ----
    def __add__(self, other: "Ideal") -> "Ideal":
        return ideal_sum(self, other)

    def __mul__(self, other: "Ideal") -> "Ideal":
        return ideal_product(self, other)

    def __pow__(self, m: int) -> "Ideal":
        return ideal_power(self, m)

    def __and__(self, other: "Ideal") -> "Ideal":
        return ideal_intersect(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ideal):
            return NotImplemented
        return ideal_equal(self, other)

    def __hash__(self) -> int:
        return hash((self.ring, frozenset(self.basis())))

    def __repr__(self) -> str:
        return "(" + ", ".join(format_polynomial(g) for g in self.generators) + ")"


def _check_same(I: Ideal, J: Ideal) -> None:
    if I.ring != J.ring:
        raise RingMismatch("两个理想不在同一个环")


# ========= 单项式理想 =========

def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def minimal_monomials(monomials: Iterable[Monomial]) -> List[Monomial]:
    result: List[Monomial] = []
    for m in sorted(set(monomials), key=lambda m: (sum(m), m)):
        if not any(_divides(g, m) for g in result):
            result.append(m)
    return result


def monomial_ideal(ring: RingSpec, monomials: Iterable[Monomial]) -> Ideal:
    home = ring.poly_ring
    return Ideal(ring, [home.term_new(m, 1) for m in minimal_monomials(monomials)])


def _interreduced(ring: RingSpec, gens: Sequence[Polynomial]) -> Ideal:
    gens = [g for g in gens if g]
    if not gens:
        return Ideal.zero(ring)
    if all(len(g) == 1 for g in gens):
        return monomial_ideal(ring, [g.LM for g in gens])
    ideal = Ideal(ring, gens)
    return Ideal(ring, ideal.basis())


# ========= 和 / 积 / 幂 =========

def ideal_sum(I: Ideal, J: Ideal) -> Ideal:
    _check_same(I, J)
    return Ideal(I.ring, I.generators + J.generators)


def ideal_product(I: Ideal, J: Ideal) -> Ideal:
    _check_same(I, J)
    if I.is_zero or J.is_zero:
        return Ideal.zero(I.ring)
    return _interreduced(I.ring, [f * g for f in I.generators for g in J.generators])


def ideal_power(I: Ideal, m: int) -> Ideal:
    if m < 0:
        raise InputError("理想的幂次必须非负")
    if m == 0:
        return Ideal.unit(I.ring)
    top = max(k for k in I._powers if k <= m)
    current = I._powers[top]
    for k in range(top + 1, m + 1):
        current = ideal_product(current, I)
        current = I._powers.setdefault(k, current)
    return current


# ========= 交 =========

def ideal_intersect(I: Ideal, J: Ideal) -> Ideal:
    _check_same(I, J)
    ring = I.ring
    if I.is_zero or J.is_zero:
        return Ideal.zero(ring)
    if I.is_unit:
        return J
    if J.is_unit:
        return I
    if I.is_monomial and J.is_monomial:
        lcm = ring.poly_ring.monomial_lcm
        return monomial_ideal(ring, [lcm(a, b) for a in I.monomials() for b in J.monomials()])
    return _intersect_by_elimination(I, J)


def eliminate(I: Ideal, names: Sequence[str], target: RingSpec) -> Ideal:
    """I ∩ target：names 排成最大的块做消元序，保留不含这些变量的基元素。"""
    ring = I.ring
    drop = tuple(ring.index(n) for n in names)
    keep = tuple(i for i in range(len(ring.variables)) if i not in drop)
    G = I.groebner(BlockOrder((drop, keep)))
    kept = [g for g in G.generators if not any(g.LM[i] for i in drop)]
    try:
        result = [g.set_ring(target.poly_ring) for g in kept]
    except GeneratorsError:
        raise InvariantViolation(f"消元变量 {', '.join(names)} 泄漏到结果里") from None
    return Ideal(target, result)


def _intersect_by_elimination(I: Ideal, J: Ideal) -> Ideal:
    ring = I.ring
    w = ring.fresh_name("w")
    ext = ring.extend(w, block="_aux")
    W = ext.gen(w)
    one = ext.poly_ring.one

    def lift(f: Polynomial) -> Polynomial:
        return f.set_ring(ext.poly_ring)

    gens = [W * lift(f) for f in I.generators] + [(one - W) * lift(g) for g in J.generators]
    return eliminate(Ideal(ext, gens), [w], ring)


# ========= 商 / 饱和 =========

def _divide_by_variable(f: Polynomial, i: int, a: int) -> Polynomial:
    if a == 0:
        return f
    return f.ring.from_dict({m[:i] + (m[i] - a,) + m[i + 1:]: c for m, c in f.iterterms()})


def principal_quotient(I: Ideal, g: Polynomial) -> Ideal:
    """I : (g) = (I ∩ (g)) / g。"""
    ring = I.ring
    g = ring.element(g)
    if not g:
        return Ideal.unit(ring)
    if g.is_ground:
        return I
    if I.is_monomial and len(g) == 1:
        gm = g.LM
        return monomial_ideal(ring, [tuple(max(a - b, 0) for a, b in zip(m, gm)) for m in I.monomials()])
    K = ideal_intersect(I, Ideal(ring, [g]))
    try:
        return Ideal(ring, [k.exquo(g) for k in K.generators])
    except ExactQuotientFailed:
        raise InvariantViolation("I ∩ (g) 的生成元不能被 g 整除") from None


def ideal_quotient(I: Ideal, J: Ideal) -> Ideal:
    _check_same(I, J)
    result: Optional[Ideal] = None
    for g in J.generators:
        if not g:
            continue
        Q = principal_quotient(I, g)
        result = Q if result is None else ideal_intersect(result, Q)
    return result if result is not None else Ideal.unit(I.ring)


def saturate_by_variable(I: Ideal, name: str) -> Ideal:
    """I : x^∞。"""
    ring = I.ring
    i = ring.index(name)
    if I.is_zero:
        return I
    for g in I.generators:
        if len(g) == 1 and all(e == 0 for k, e in enumerate(g.LM) if k != i):
            return Ideal.unit(ring)

    if I.is_monomial:
        return monomial_ideal(ring, [m[:i] + (0,) + m[i + 1:] for m in I.monomials()])

    if I.is_standard_homogeneous():
        # Bayer：x 排在最后的 grevlex 基，逐个除掉 x 的最高幂
        ranking = tuple(k for k in range(len(ring.variables)) if k != i) + (i,)
        G = I.groebner(GrevlexOrder(ranking))
        home = ring.poly_ring
        gens = []
        for g in G.generators:
            a = min(m[i] for m in g.itermonoms())
            gens.append(_divide_by_variable(g, i, a).set_ring(home))
        return Ideal(ring, gens)

    return _saturate_iteratively(I, Ideal(ring, [ring.gen(name)]))


def _saturate_iteratively(I: Ideal, J: Ideal) -> Ideal:
    cap = current_settings().SATURATION_CAP
    current = I
    for _ in range(cap):
        nxt = ideal_quotient(current, J)
        if ideal_equal(nxt, current):
            return current
        current = nxt
    raise BudgetExceeded(f"饱和迭代超过 {cap} 步仍未稳定")


def _variable_names(J: Ideal) -> Optional[List[str]]:
    names = []
    for g in J.generators:
        if len(g) != 1 or g.LC != 1 or sum(g.LM) != 1:
            return None
        names.append(J.ring.variables[g.LM.index(1)])
    return names


def saturation(I: Ideal, J: Ideal) -> Ideal:
    """I : J^∞。J 由变量生成且 I 对总次数齐次时走 Bayer 路线。"""
    _check_same(I, J)
    if J.is_unit:
        return I
    names = _variable_names(J)
    if names is not None and I.is_standard_homogeneous():
        return _intersect_all(I.ring, [saturate_by_variable(I, n) for n in names])
    return _saturate_iteratively(I, J)


def _intersect_all(ring: RingSpec, ideals: Sequence[Ideal]) -> Ideal:
    nontrivial = [K for K in ideals if not K.is_unit]
    if not nontrivial:
        return Ideal.unit(ring)
    result = nontrivial[0]
    for K in nontrivial[1:]:
        result = ideal_intersect(result, K)
    return result


def projective_blocks(ring: RingSpec) -> Tuple[str, ...]:
    """分次列非零的块（x 块、y 块）；辅助块不参与饱和。"""
    blocks = []
    for name, names in ring.blocks:
        if all(any(ring.column(ring.index(v))) for v in names):
            blocks.append(name)
    return tuple(blocks)


def saturate_irrelevant(I: Ideal, block: str) -> Ideal:
    ring = I.ring
    return saturation(I, Ideal.of_variables(ring, ring.block(block)))


_SATURATED: Dict[object, Ideal] = {}


def saturate_all(I: Ideal) -> Ideal:
    """依次对每个射影块的无关理想饱和（双分次时先 x 后 y）。"""
    cached = _SATURATED.get(I.key)
    if cached is not None:
        return cached
    result = I
    for block in projective_blocks(I.ring):
        result = saturate_irrelevant(result, block)
        if result.is_unit:
            break
    return _SATURATED.setdefault(I.key, result)


# ========= 判定 =========

def ideal_equal(I: Ideal, J: Ideal) -> bool:
    _check_same(I, J)
    if I is J:
        return True
    return I.contains_ideal(J) and J.contains_ideal(I)


def is_projectively_empty(I: Ideal, block: Optional[str] = None) -> bool:
    if block is not None:
        return saturate_irrelevant(I, block).is_unit
    return saturate_all(I).is_unit


class Smoothness(enum.Enum):
    SMOOTH = "smooth"
    SINGULAR = "singular"
    INCONCLUSIVE = "inconclusive"


def jacobian_minors(I: Ideal, size: int) -> List[Polynomial]:
    ring = I.ring
    gens = [g for g in I.generators if g]
    home = ring.poly_ring
    rows = [[g.diff(x) for x in home.gens] for g in gens]
    domain = home.to_domain()
    minors = []
    for cols in itertools.combinations(range(len(home.gens)), size):
        entries = [[rows[r][c] for c in cols] for r in range(size)]
        det = DomainMatrix(entries, (size, size), domain).det()
        if det:
            minors.append(det)
    return minors


def jacobian_smoothness_check(I_V: Ideal, expected_codim: int) -> Smoothness:
    """完全交情形下的 Jacobian 判据；表示不是完全交时给出 inconclusive。"""
    from hilbert import hilbert_polynomial

    if I_V.is_zero:
        return Smoothness.SMOOTH
    gens = [g for g in I_V.generators if g]
    if len(gens) != expected_codim:
        return Smoothness.INCONCLUSIVE
    expected_dim = len(I_V.ring.variables) - 1 - expected_codim
    if hilbert_polynomial(I_V).degree != expected_dim:
        return Smoothness.INCONCLUSIVE

    minors = jacobian_minors(I_V, expected_codim)
    singular_locus = Ideal(I_V.ring, list(I_V.generators) + minors)
    if is_projectively_empty(singular_locus):
        return Smoothness.SMOOTH
    logger.debug("[jacobian] 奇异点集非空: %r", singular_locus)
    return Smoothness.SINGULAR
