# -*- coding: utf-8 -*-
"""约化 Gröbner 基（Buchberger + Gebauer–Möller 消对）。

注意：
- 选对策略固定为 normal：lcm 次数最小，其次按单项式序，再按下标，保证结果可复现
- 预算：处理的 S-对数 <= MAX_PAIRS，中间多项式次数 <= MAX_DEGREE，超出抛 BudgetExceeded
- 结果按 (生成元, 单项式序) 缓存；缓存表只做 setdefault（原子的"没有才插入"）
- GroebnerBasis.generators 放在对应序的 sympy 环里，按首项从小到大排列
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, List, Sequence, Set, Tuple

from sympy.polys.orderings import MonomialOrder, grevlex
from sympy.polys.rings import PolyRing

from config import current_settings
from errors import BudgetExceeded, RingMismatch
from polyring import Polynomial, total_degree

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


@dataclass(frozen=True)
class GroebnerBasis:
    generators: Tuple[Polynomial, ...]
    order: MonomialOrder
    ring: PolyRing
    reduced: bool = True

    @property
    def is_zero(self) -> bool:
        return not self.generators

    @property
    def is_unit(self) -> bool:
        return len(self.generators) == 1 and self.generators[0] == self.ring.one

    @property
    def leading_monomials(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(g.LM for g in self.generators)

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)


# ========= Buchberger =========

def spoly(f: Polynomial, g: Polynomial) -> Polynomial:
    R = f.ring
    lmf, lmg = f.LM, g.LM
    lcm = R.monomial_lcm(lmf, lmg)
    return f.mul_monom(R.monomial_div(lcm, lmf)) - g.mul_monom(R.monomial_div(lcm, lmg))


def _select(G: List[Polynomial], P: Set[Pair]) -> Pair:
    R = G[0].ring

    def key(p: Pair):
        lcm = R.monomial_lcm(G[p[0]].LM, G[p[1]].LM)
        return sum(lcm), R.order(lcm), p

    return min(P, key=key)


def _update(G: List[Polynomial], P: Set[Pair], f: Polynomial) -> Tuple[List[Polynomial], Set[Pair]]:
    R = f.ring
    lcm, mul, div = R.monomial_lcm, R.monomial_mul, R.monomial_div
    lmf = f.LM
    lmG = [g.LM for g in G]

    # 链判据
    P = {
        p for p in P
        if (not div(lcm(lmG[p[0]], lmG[p[1]]), lmf)
            or lcm(lmG[p[0]], lmG[p[1]]) == lcm(lmG[p[0]], lmf)
            or lcm(lmG[p[0]], lmG[p[1]]) == lcm(lmG[p[1]], lmf))
    }

    by_lcm: Dict[Tuple[int, ...], List[int]] = {}
    for i in range(len(G)):
        by_lcm.setdefault(lcm(lmG[i], lmf), []).append(i)

    minimal: List[Tuple[int, ...]] = []
    for L in sorted(by_lcm, key=R.order):
        if all(not div(L, L_) for L_ in minimal):
            minimal.append(L)

    new_pairs = set()
    for L in minimal:
        # 首项互素判据
        if not any(lcm(lmG[i], lmf) == mul(lmG[i], lmf) for i in by_lcm[L]):
            new_pairs.add((min(by_lcm[L]), len(G)))

    return G + [f], P | new_pairs


def _minimalize(G: List[Polynomial]) -> List[Polynomial]:
    R = G[0].ring
    Gmin: List[Polynomial] = []
    for f in sorted(G, key=lambda h: R.order(h.LM)):
        if all(not R.monomial_div(f.LM, g.LM) for g in Gmin):
            Gmin.append(f)
    return Gmin


def _interreduce(G: List[Polynomial]) -> List[Polynomial]:
    reduced = []
    for i, g in enumerate(G):
        others = G[:i] + G[i + 1:]
        r = g.rem(others) if others else g
        reduced.append(r.monic())
    return reduced


def buchberger(F: Sequence[Polynomial]) -> List[Polynomial]:
    settings = current_settings()
    G: List[Polynomial] = []
    P: Set[Pair] = set()
    for f in F:
        G, P = _update(G, P, f.monic())

    processed = 0
    while P:
        i, j = _select(G, P)
        P.remove((i, j))
        processed += 1
        if processed > settings.MAX_PAIRS:
            raise BudgetExceeded(f"S-对数超过上限 {settings.MAX_PAIRS}")
        r = spoly(G[i], G[j]).rem(G)
        if r:
            if total_degree(r) > settings.MAX_DEGREE:
                raise BudgetExceeded(f"中间多项式次数超过上限 {settings.MAX_DEGREE}")
            G, P = _update(G, P, r.monic())

    logger.debug("[buchberger] 处理 %d 个 S-对，基大小 %d", processed, len(G))
    return _interreduce(_minimalize(G))


# ========= 缓存与对外接口 =========

_MEMO: Dict[Hashable, GroebnerBasis] = {}


def polynomial_key(polys: Sequence[Polynomial]) -> FrozenSet[FrozenSet]:
    return frozenset(frozenset(p.items()) for p in polys if p)


def clear_memo() -> None:
    _MEMO.clear()


def reduced_groebner(gens: Sequence[Polynomial], order: MonomialOrder = grevlex) -> GroebnerBasis:
    if not gens:
        raise RingMismatch("至少需要一个生成元来确定所在的环")
    home = gens[0].ring
    for g in gens:
        if g.ring.symbols != home.symbols:
            raise RingMismatch("生成元不在同一个环")

    ring = home.clone(order=order)
    F = [g.set_ring(ring) for g in gens if g]
    key = (ring.symbols, order, polynomial_key(F))
    cached = _MEMO.get(key)
    if cached is not None:
        return cached

    if not F:
        basis = GroebnerBasis((), order, ring)
    else:
        G = buchberger(F)
        G.sort(key=lambda g: ring.order(g.LM))
        basis = GroebnerBasis(tuple(G), order, ring)
    return _MEMO.setdefault(key, basis)


def normal_form(f: Polynomial, G: GroebnerBasis) -> Polynomial:
    """多元除法余式，结果回到 f 原来的环。"""
    if f.ring.symbols != G.ring.symbols:
        raise RingMismatch("多项式与 Gröbner 基不在同一个环")
    if G.is_zero or not f:
        return f
    r = f.set_ring(G.ring).rem(list(G.generators))
    return r.set_ring(f.ring)


def is_groebner_basis(G: GroebnerBasis) -> bool:
    """所有 S-多项式都约化到 0。"""
    gens = list(G.generators)
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if spoly(gens[i], gens[j]).rem(gens):
                return False
    return True


def is_reduced(G: GroebnerBasis) -> bool:
    gens = list(G.generators)
    R = G.ring
    for i, g in enumerate(gens):
        if g.LC != R.domain.one:
            return False
        for j, h in enumerate(gens):
            if i != j and any(R.monomial_div(m, h.LM) is not None for m in g.itermonoms()):
                return False
    return True


def leading_ideal(G: GroebnerBasis, spec=None):
    """首项生成的单项式理想（与原理想 Hilbert 函数相同）。

    spec 给出分次信息；不给时按标准分次处理。
    """
    from idealcalc import Ideal
    from polyring import RingSpec

    if spec is None:
        spec = RingSpec.standard(tuple(str(s) for s in G.ring.symbols))
    if G.is_zero:
        return Ideal(spec, [spec.poly_ring.zero])
    home = spec.poly_ring
    return Ideal(spec, [home.term_new(m, 1) for m in G.leading_monomials])


def ideal_member(f: Polynomial, I) -> bool:
    return not normal_form(f, I.groebner())

