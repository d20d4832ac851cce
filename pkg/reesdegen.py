# -*- coding: utf-8 -*-
"""扩展 Rees 退化（理想分量层面）。

要点：
- Ĩ = I[t] + Σ_j C_j t^{-j}，只保存分量 C_j = I ∩ I_X0^j，不在 Rees 环里实体化
- Artin–Rees：从 j = 1 开始找第一个满足 C_{j+1} = I_X0 · C_j 的 j，即 j*；之后再验证 ARTIN_REES_MARGIN 步，不成立就是内部错误
- ambient 给出时，所有理想都是商环 O_X = S/ambient 里理想的原像（自动加上 ambient）
- ord_along 取"最大"的 k 使 f ∈ I_X0^k
- 中心在图卡上是主理想 (h) 时，Rees 代数写成 S[t, z]/(tz - h)（z = h·t^-1），
  平坦性证书和分量的第二条计算路线都在这个表示里做
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.polyerrors import ExactQuotientFailed

from config import current_settings
from errors import InputError, InvariantViolation, OrdCapExceeded, StabilizationError
from idealcalc import (
    Ideal,
    eliminate,
    ideal_equal,
    ideal_intersect,
    ideal_power,
    ideal_product,
    ideal_sum,
    principal_quotient,
    saturate_by_variable,
)
from polyparse import format_polynomial
from polyring import Polynomial, RingSpec, multidegree_of, substitute

logger = logging.getLogger(__name__)


def _lift(I: Ideal, ambient: Optional[Ideal]) -> Ideal:
    return I if ambient is None else ideal_sum(I, ambient)


def _center_power(center: Ideal, j: int, ambient: Optional[Ideal]) -> Ideal:
    return _lift(ideal_power(center, j), ambient)


# ========= ord =========

def ord_along(f: Polynomial, center: Ideal, ambient: Optional[Ideal] = None) -> int:
    if not f:
        raise InputError("ord_along 不接受零多项式")
    f = center.ring.element(f)
    cap = current_settings().ORD_CAP
    k = 0
    while _center_power(center, k + 1, ambient).contains(f):
        k += 1
        if k >= cap:
            raise OrdCapExceeded(f"{format_polynomial(f)} 属于 I_X0 的 {cap} 次幂，疑似属于所有幂次")
    return k


# ========= 分量 =========

@dataclass
class TildeFamily:
    base: Ideal
    center: Ideal
    components: List[Ideal]
    stabilization_index: Optional[int]
    stabilized: bool
    ambient: Optional[Ideal] = None
    verification: List[Ideal] = field(default_factory=list)

    @property
    def ring(self) -> RingSpec:
        return self.base.ring

    def component(self, j: int) -> Ideal:
        """C_j；超过 j* 时按 I_X0^{j-j*} · C_{j*} 延拓。"""
        if j < 0:
            raise InputError("分量下标必须非负")
        if j < len(self.components):
            return self.components[j]
        if not self.stabilized:
            return ideal_intersect(self.components[0], _center_power(self.center, j, self.ambient))
        js = self.stabilization_index
        return _lift(ideal_product(ideal_power(self.center, j - js), self.components[js]), self.ambient)

    def describe(self, var: str = "t") -> str:
        parts = [f"{self.components[0]!r}[{var}]"]
        for j, C in enumerate(self.components[1:], start=1):
            parts.append(f"{C!r}·{var}^-{j}")
        return " + ".join(parts)


def tilde_components(
    I: Ideal,
    center: Ideal,
    j_cap: Optional[int] = None,
    ambient: Optional[Ideal] = None,
) -> TildeFamily:
    settings = current_settings()
    if I.ring != center.ring:
        raise InputError("I 与 I_X0 不在同一个环")
    j_cap = j_cap or settings.J_CAP
    base = _lift(I, ambient)

    def C(j: int) -> Ideal:
        return ideal_intersect(base, _center_power(center, j, ambient))

    comps = [base, C(1)]
    j = 1
    while True:
        nxt = C(j + 1)
        if ideal_equal(nxt, _lift(ideal_product(center, comps[j]), ambient)):
            break
        comps.append(nxt)
        j += 1
        if j >= j_cap:
            logger.warning("[tilde] j_cap=%d 内未检测到 Artin–Rees 稳定，返回部分分量", j_cap)
            return TildeFamily(base, center, comps, None, False, ambient)

    # 检测到 j* 之后再验证几步
    verification = [nxt]
    prev = nxt
    for step in range(settings.ARTIN_REES_MARGIN):
        jj = j + 2 + step
        cur = C(jj)
        if not ideal_equal(cur, _lift(ideal_product(center, prev), ambient)):
            raise InvariantViolation(f"Artin–Rees 在 j*={j} 处检测到稳定，但 j={jj} 处验证失败")
        verification.append(cur)
        prev = cur

    logger.debug("[tilde] j*=%d，分量 %d 个", j, len(comps))
    return TildeFamily(base, center, comps, j, True, ambient, verification)


def family_invariants_hold(family: TildeFamily) -> bool:
    """C_{j+1} ⊆ C_j 且 I_X0 · C_j ⊆ C_{j+1}。"""
    comps = family.components + family.verification
    for j in range(len(comps) - 1):
        if not comps[j].contains_ideal(comps[j + 1]):
            return False
        if not comps[j + 1].contains_ideal(ideal_product(family.center, comps[j])):
            return False
    return True


def _convolve(P: Sequence[Ideal], Q: Sequence[Ideal], ambient: Optional[Ideal]) -> List[Ideal]:
    out = []
    for j in range(len(P)):
        acc: Optional[Ideal] = None
        for a in range(j + 1):
            term = ideal_product(P[a], Q[j - a])
            acc = term if acc is None else ideal_sum(acc, term)
        out.append(_lift(acc, ambient))
    return out


def convolution_power_check(family: TildeFamily, m: int, j_max: int) -> Optional[int]:
    """Σ_{j1+…+jm=j} C_{j1}⋯C_{jm} 是否等于 I^m ∩ I_X0^j；返回第一个不等的 j，全部相等返回 None。"""
    if m < 1:
        raise InputError("m 必须是正整数")
    seq = [family.component(j) for j in range(j_max + 1)]
    power = seq
    for _ in range(m - 1):
        power = _convolve(power, seq, family.ambient)
    base_power = _lift(ideal_power(family.base, m), family.ambient)
    for j in range(j_max + 1):
        expected = ideal_intersect(base_power, _center_power(family.center, j, family.ambient))
        if not ideal_equal(power[j], expected):
            return j
    return None


# ========= init(I) =========

@dataclass
class InitIdeal:
    ring: RingSpec            # 原环 + s
    s: str
    relations: Ideal          # I_X0 + ambient，O_X0[s] 的商关系
    emitted: Tuple[Polynomial, ...]
    ideal: Ideal              # emitted + relations
    local_equation: Polynomial
    stabilization_index: int

    def generators(self) -> List[Polynomial]:
        """约化基中去掉关系理想里的元素后剩下的生成元。"""
        return [g for g in self.ideal.basis() if not self.relations.contains(g)]

    def degree_zero_part(self, base_ring: RingSpec) -> Ideal:
        """s := 0 的特化，回到原环。"""
        gens = [substitute(g, {self.s: 0}, base_ring) for g in self.ideal.generators]
        return Ideal(base_ring, gens)

    def __repr__(self) -> str:
        return "(" + ", ".join(format_polynomial(g) for g in self.generators()) + ")"


def local_equation(center: Ideal, ambient: Optional[Ideal] = None) -> Polynomial:
    """I_X0 在 ambient 模下的主生成元；不是主理想就报错。"""
    full = _lift(center, ambient)
    candidates = sorted(
        (g for g in center.generators if g),
        key=lambda g: (sum(g.LM), len(g)),
    )
    for g in candidates:
        if _lift(Ideal(center.ring, [g]), ambient).contains_ideal(full):
            return g
    raise InputError(f"中心 {center!r} 在该图卡上不是主理想（非 Cartier）")


def _divide_by_power(
    g: Polynomial,
    h: Polynomial,
    j: int,
    ring: RingSpec,
    ambient: Optional[Ideal],
) -> List[Polynomial]:
    """g/h^j 在 S/ambient 里的类，以 ((g) + ambient) : h^j 的生成元（去掉 ambient 里的）给出。"""
    hj = h ** j
    if ambient is None:
        try:
            return [g.exquo(hj)]
        except ExactQuotientFailed:
            raise InputError(f"{format_polynomial(g)} 不能被 h^{j} 整除") from None
    Q = principal_quotient(_lift(Ideal(ring, [g]), ambient), hj)
    return [q for q in Q.basis() if not ambient.contains(q)]


def _emit(
    family: TildeFamily,
    gens_for: Dict[int, Sequence[Polynomial]],
    h: Polynomial,
    ext: RingSpec,
    s: str,
) -> List[Polynomial]:
    S = ext.gen(s)
    ambient = family.ambient
    out = []
    for j, gens in sorted(gens_for.items()):
        for g in gens:
            if not g or (ambient is not None and ambient.contains(g)):
                continue
            if ord_along(g, family.center, family.ambient) != j:
                continue
            for q in _divide_by_power(g, h, j, family.ring, family.ambient):
                out.append(q.set_ring(ext.poly_ring) * S ** j)
    return out


def init_ideal(I: Ideal, center: Ideal, ambient: Optional[Ideal] = None) -> InitIdeal:
    settings = current_settings()
    ring = I.ring
    h = local_equation(center, ambient)
    family = tilde_components(I, center, ambient=ambient)
    if not family.stabilized:
        raise StabilizationError("tilde 分量未稳定，无法构造 init(I)")

    s = ring.fresh_name("s")
    column = multidegree_of(h, ring) or (0,) * len(ring.grading)
    ext = ring.extend(s, "_s", column)
    relations = Ideal(
        ext,
        [g.set_ring(ext.poly_ring) for g in _lift(center, ambient).generators],
    )

    gens_for = {j: C.basis() for j, C in enumerate(family.components)}
    emitted = _emit(family, gens_for, h, ext, s)
    ideal = ideal_sum(Ideal(ext, emitted), relations)

    if settings.INIT_CROSSCHECK:
        # 用扩充过的生成元组再算一遍，结果必须是同一个理想
        enlarged = {}
        for j, gens in gens_for.items():
            extra = [gens[i] + gens[i + 1] for i in range(len(gens) - 1)]
            extra += [h * g for g in gens]
            enlarged[j] = list(gens) + extra
        other = ideal_sum(Ideal(ext, _emit(family, enlarged, h, ext, s)), relations)
        if not ideal_equal(ideal, other):
            raise InvariantViolation("init(I) 依赖生成元的选取")

    return InitIdeal(ext, s, relations, tuple(emitted), ideal, h, family.stabilization_index)


# ========= Rees 表示 =========

def _rees_ring(ring: RingSpec) -> Tuple[RingSpec, str, str]:
    t = ring.fresh_name("t")
    ext = ring.extend(t, "_t")
    z = ext.fresh_name("z")
    return ext.extend(z, "_z"), t, z


def _rees_relations(ext: RingSpec, t: str, z: str, h: Polynomial, ambient: Optional[Ideal]) -> List[Polynomial]:
    gens = [ext.gen(t) * ext.gen(z) - h.set_ring(ext.poly_ring)]
    if ambient is not None:
        gens += [g.set_ring(ext.poly_ring) for g in ambient.generators]
    return gens


@dataclass
class ReesPresentation:
    """Ĩ 在 S[t, z] 里的原像（已含 tz - h 和 ambient）。"""

    ring: RingSpec
    base_ring: RingSpec
    t: str
    z: str
    h: Polynomial
    ideal: Ideal
    ambient: Optional[Ideal] = None

    def component(self, j: int) -> Ideal:
        """C_j = h^j · ((Ĩ : z^j) ∩ S)。"""
        colon = principal_quotient(self.ideal, self.ring.gen(self.z) ** j)
        Q = eliminate(colon, (self.t, self.z), self.base_ring)
        return _lift(ideal_product(Ideal(self.base_ring, [self.h ** j]), Q), self.ambient)


def rees_presentation(I: Ideal, center: Ideal, ambient: Optional[Ideal] = None) -> ReesPresentation:
    """从生成元 f·t^{-ord f}（写成 (f/h^k)·z^k）出发，对 t 饱和。"""
    ring = I.ring
    if ring != center.ring:
        raise InputError("I 与 I_X0 不在同一个环")
    h = local_equation(center, ambient)
    ext, t, z = _rees_ring(ring)
    Z = ext.gen(z)
    gens = _rees_relations(ext, t, z, h, ambient)
    for f in I.generators:
        if not f or (ambient is not None and ambient.contains(f)):
            continue
        k = ord_along(f, center, ambient)
        gens += [q.set_ring(ext.poly_ring) * Z ** k for q in _divide_by_power(f, h, k, ring, ambient)]
    tilde = saturate_by_variable(Ideal(ext, gens), t)
    logger.debug("[rees] Ĩ 原像有 %d 个生成元", len(tilde.generators))
    return ReesPresentation(ext, ring, t, z, h, tilde, ambient)


def rees_components(I: Ideal, center: Ideal, j_max: int, ambient: Optional[Ideal] = None) -> List[Ideal]:
    """C_0, …, C_{j_max}，走 Rees 表示里的消元，不用 I ∩ I_X0^j。"""
    presentation = rees_presentation(I, center, ambient)
    return [presentation.component(j) for j in range(j_max + 1)]


def flatness_certificate(family: TildeFamily) -> Optional[bool]:
    """由 C_0..C_{j*} 拼出 Ĩ 的原像 J，检查 J : t = J（t 是非零因子，族在 A¹ 上平坦）。

    中心在图卡上不是主理想、或者分量没有稳定时返回 None。
    """
    if not family.stabilized:
        return None
    try:
        h = local_equation(family.center, family.ambient)
    except InputError:
        return None
    ext, t, z = _rees_ring(family.ring)
    Z = ext.gen(z)
    gens = _rees_relations(ext, t, z, h, family.ambient)
    for j, C in enumerate(family.components):
        Q = principal_quotient(C, h ** j)
        gens += [q.set_ring(ext.poly_ring) * Z ** j for q in Q.generators if q]
    J = Ideal(ext, gens)
    return ideal_equal(principal_quotient(J, ext.gen(t)), J)


# ========= 幂相容性 =========

@dataclass
class PowerCompatReport:
    passed: bool
    m_max: int
    failure: Optional[Tuple[int, int]] = None
    certificate: Optional[Polynomial] = None
    direction: Optional[str] = None   # "lhs-not-in-rhs" / "rhs-not-in-lhs"
    support_ok: bool = True
    checked: List[Tuple[int, int]] = field(default_factory=list)
    hypotheses_verified: Optional[bool] = None

    @property
    def certificate_text(self) -> Optional[str]:
        return None if self.certificate is None else format_polynomial(self.certificate)


def power_compat(
    I: Ideal,
    center: Ideal,
    m_max: int,
    ambient: Optional[Ideal] = None,
) -> PowerCompatReport:
    """对 1 <= j <= m <= m_max 检查 I^m ∩ I_X0^j = I_X0^j · I^{m-j}。"""
    if m_max < 1:
        raise InputError("m_max 必须是正整数")
    base = _lift(I, ambient)
    support_ok = base.contains_ideal(_lift(center, ambient))
    if not support_ok:
        logger.warning("[power-compat] I 不包含 I_X0，支撑假设不成立")

    report = PowerCompatReport(passed=True, m_max=m_max, support_ok=support_ok)
    for m in range(1, m_max + 1):
        Im = ideal_power(I, m)
        for j in range(1, m + 1):
            lhs = ideal_intersect(_lift(Im, ambient), _center_power(center, j, ambient))
            rhs = _lift(ideal_product(ideal_power(center, j), ideal_power(I, m - j)), ambient)
            report.checked.append((m, j))
            cert = rhs.first_outside(lhs)
            direction = "lhs-not-in-rhs"
            if cert is None:
                cert = lhs.first_outside(rhs)
                direction = "rhs-not-in-lhs"
            if cert is not None:
                logger.info("[power-compat] (m, j) = (%d, %d) 失败，证书 %s", m, j, format_polynomial(cert))
                report.passed = False
                report.failure = (m, j)
                report.certificate = cert
                report.direction = direction
                return report
    return report


def lemma41_check(h: Polynomial, I: Ideal, m_max: int) -> PowerCompatReport:
    """主中心 (h) 的幂相容性；h 素、A/(h) 正则这两个假设由调用方保证，这里不验证。"""
    h = I.ring.element(h)
    if not I.contains(h):
        raise InputError(f"h = {format_polynomial(h)} 不在 I 中")
    report = power_compat(I, Ideal(I.ring, [h]), m_max)
    report.hypotheses_verified = False
    return report


def random_ideal_containing(
    h: Polynomial,
    ring: RingSpec,
    rng: random.Random,
    extra_generators: int = 2,
    max_degree: int = 2,
) -> Ideal:
    """(h) 加上几个随机的小系数多项式。"""
    names = ring.variables
    gens = [ring.element(h)]
    for _ in range(rng.randint(1, extra_generators)):
        f = ring.poly_ring.zero
        for _ in range(rng.randint(1, 3)):
            exps = [0] * len(names)
            for _ in range(rng.randint(1, max_degree)):
                exps[rng.randrange(len(names))] += 1
            f += ring.from_terms({tuple(exps): rng.choice([-2, -1, 1, 2, 3])})
        if f:
            gens.append(f)
    return Ideal(ring, gens)
