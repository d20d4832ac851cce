# -*- coding: utf-8 -*-
"""多重分次多项式环（系数域固定为 Q）。

- 多项式就是 sympy 的 PolyElement；环由 RingSpec 描述，RingSpec.poly_ring 是默认（grevlex）环
- 同一组变量在不同单项式序下是不同的 sympy 环，用 RingSpec.ring_for(order) 切换
- 对外的有理数一律是 fractions.Fraction（约分、分母为正）
- 分次矩阵：行 = 分次分量，列 = 变量；块（block）把变量分成 x / y / t 等命名组
- 下划线开头的块（_aux、_s、_t、_z）放内部构造用的辅助变量，不计入 MAX_VARIABLES
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.orderings import MonomialOrder, grevlex, lex
from sympy.polys.rings import PolyElement, PolyRing

from config import current_settings
from errors import InputError, RingMismatch


Polynomial = PolyElement
Monomial = Tuple[int, ...]
DegreeVector = Tuple[int, ...]
Scalar = Union[int, Fraction]

__all__ = [
    "BlockOrder",
    "Comparison",
    "GrevlexOrder",
    "Polynomial",
    "RingSpec",
    "WeightOrder",
    "format_rational",
    "from_fraction",
    "grevlex",
    "lex",
    "mono_compare",
    "multidegree_of",
    "poly_arith",
    "substitute",
    "to_fraction",
    "total_degree",
]


# ========= 有理数 =========

def to_fraction(c) -> Fraction:
    """把 QQ 元素（gmpy2.mpq / PythonMPQ）或整数转成 Fraction。"""
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    return Fraction(int(c.numerator), int(c.denominator))


def from_fraction(q: Scalar):
    q = Fraction(q)
    return QQ(q.numerator, q.denominator)


def format_rational(q: Scalar) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# ========= 单项式序 =========

@dataclass(frozen=True)
class GrevlexOrder(MonomialOrder):
    """grevlex，但变量的大小次序由 ranking 给出（ranking[-1] 最小）。

    ranking 为恒等排列时与 sympy 的 grevlex 相同；把 x_i 放到最后就是 Bayer 饱和要用的序。
    """

    ranking: Tuple[int, ...]

    alias = "grevlex"
    is_global = True

    def __call__(self, monomial):
        return (sum(monomial), tuple(-monomial[i] for i in reversed(self.ranking)))


@dataclass(frozen=True)
class BlockOrder(MonomialOrder):
    """块消元序：前面的块整体大于后面的块，块内 grevlex。"""

    blocks: Tuple[Tuple[int, ...], ...]

    alias = "block"
    is_global = True

    def __call__(self, monomial):
        return tuple(
            (sum(monomial[i] for i in block), tuple(-monomial[i] for i in reversed(block)))
            for block in self.blocks
        )


@dataclass(frozen=True)
class WeightOrder(MonomialOrder):
    """先比权重 <w, m>，相同再用 tiebreak。权重非负时是容许序。"""

    weights: Tuple[int, ...]
    tiebreak: MonomialOrder = grevlex

    alias = "weighted"
    is_global = True

    def __call__(self, monomial):
        return (sum(w * e for w, e in zip(self.weights, monomial)), self.tiebreak(monomial))


class Comparison(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def mono_compare(order: MonomialOrder, m1: Monomial, m2: Monomial) -> Comparison:
    if len(m1) != len(m2):
        raise RingMismatch("单项式长度不一致")
    a, b = order(tuple(m1)), order(tuple(m2))
    if a == b:
        return Comparison.EQUAL
    return Comparison.GREATER if a > b else Comparison.LESS


# ========= 环 =========

@dataclass(frozen=True)
class RingSpec:
    variables: Tuple[str, ...]
    grading: Tuple[Tuple[int, ...], ...]
    blocks: Tuple[Tuple[str, Tuple[str, ...]], ...]

    def __post_init__(self):
        if not self.variables:
            raise InputError("环至少需要一个变量")
        if len(set(self.variables)) != len(self.variables):
            raise InputError("变量名重复")
        for row in self.grading:
            if len(row) != len(self.variables):
                raise InputError("分次矩阵列数必须等于变量个数")
        seen = [v for _, names in self.blocks for v in names]
        if sorted(seen) != sorted(self.variables):
            raise InputError("blocks 必须恰好划分全部变量")

    # ---- 构造 ----
    @classmethod
    def standard(cls, names: Sequence[str], block: str = "x") -> "RingSpec":
        names = tuple(names)
        return cls(names, ((1,) * len(names),), ((block, names),))

    @classmethod
    def bigraded(cls, xnames: Sequence[str], ynames: Sequence[str]) -> "RingSpec":
        xnames, ynames = tuple(xnames), tuple(ynames)
        nx, ny = len(xnames), len(ynames)
        return cls(
            xnames + ynames,
            ((1,) * nx + (0,) * ny, (0,) * nx + (1,) * ny),
            (("x", xnames), ("y", ynames)),
        )

    def check_size(self) -> None:
        """下划线开头的块是消元、Rees 构造用的辅助变量，不计入上限。"""
        limit = current_settings().MAX_VARIABLES
        count = sum(len(names) for name, names in self.blocks if not name.startswith("_"))
        if count > limit:
            raise InputError(f"变量个数 {count} 超过上限 {limit}")

    def extend(self, name: str, block: str, column: Optional[Sequence[int]] = None) -> "RingSpec":
        """追加一个变量（辅助变量 w、Rees 变量 s 等），分次列默认为零。"""
        if name in self.variables:
            raise InputError(f"变量 {name} 已存在")
        column = tuple(column) if column is not None else (0,) * len(self.grading)
        grading = tuple(row + (column[i],) for i, row in enumerate(self.grading))
        blocks = self.blocks + ((block, (name,)),)
        return RingSpec(self.variables + (name,), grading, blocks)

    def fresh_name(self, stem: str) -> str:
        name, i = stem, 0
        while name in self.variables:
            i += 1
            name = f"{stem}{i}"
        return name

    # ---- sympy 环 ----
    @cached_property
    def poly_ring(self) -> PolyRing:
        return PolyRing(self.variables, QQ, grevlex)

    def ring_for(self, order: MonomialOrder) -> PolyRing:
        return self.poly_ring.clone(order=order)

    @property
    def gens(self) -> Tuple[Polynomial, ...]:
        return self.poly_ring.gens

    def gen(self, name: str) -> Polynomial:
        return self.poly_ring.gens[self.index(name)]

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise InputError(f"未声明的变量: {name}") from None

    def block(self, name: str) -> Tuple[str, ...]:
        for block_name, names in self.blocks:
            if block_name == name:
                return names
        raise InputError(f"未声明的块: {name}")

    def block_indices(self, name: str) -> Tuple[int, ...]:
        return tuple(self.index(v) for v in self.block(name))

    @property
    def block_names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.blocks)

    def degree_of(self, monomial: Monomial) -> DegreeVector:
        return tuple(sum(a * e for a, e in zip(row, monomial)) for row in self.grading)

    def column(self, i: int) -> DegreeVector:
        return tuple(row[i] for row in self.grading)

    @cached_property
    def is_block_standard(self) -> bool:
        """每个变量的分次列都是单位向量（P^a × P^b 这类标准多重分次）。"""
        for i in range(len(self.variables)):
            col = self.column(i)
            if sorted(col) != [0] * (len(col) - 1) + [1]:
                return False
        return True

    # ---- 元素 ----
    def element(self, f) -> Polynomial:
        """把任意来源的多项式放进本环（默认序）。"""
        if isinstance(f, PolyElement):
            if tuple(str(s) for s in f.ring.symbols) != self.variables:
                raise RingMismatch("多项式不属于该环")
            return f.set_ring(self.poly_ring)
        return self.poly_ring.ground_new(from_fraction(f))

    def from_terms(self, terms: Mapping[Monomial, Scalar]) -> Polynomial:
        ring = self.poly_ring
        return ring.from_dict({tuple(m): from_fraction(c) for m, c in terms.items() if c})

    def check_degree(self, f: Polynomial) -> Polynomial:
        limit = current_settings().MAX_DEGREE
        if total_degree(f) > limit:
            raise InputError(f"多项式总次数 {total_degree(f)} 超过上限 {limit}")
        return f

    def multidegree_of(self, f: Polynomial) -> Optional[DegreeVector]:
        return multidegree_of(f, self)


def variable_names(f: Polynomial) -> Tuple[str, ...]:
    return tuple(str(s) for s in f.ring.symbols)


def _same_ring(f: Polynomial, g: Polynomial) -> None:
    if f.ring.symbols != g.ring.symbols:
        raise RingMismatch("两个多项式不在同一个环")


def poly_arith(op: str, f: Polynomial, g: Polynomial) -> Polynomial:
    _same_ring(f, g)
    g = g.set_ring(f.ring)
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise InputError(f"未知运算: {op}")


def total_degree(f: Polynomial) -> int:
    if not f:
        return 0
    return max(sum(m) for m in f.itermonoms())


def multidegree_of(f: Polynomial, spec: RingSpec) -> Optional[DegreeVector]:
    """所有项共同的多重次数；非齐次返回 None，零多项式返回零向量。"""
    if not f:
        return (0,) * len(spec.grading)
    degrees = {spec.degree_of(m) for m in f.itermonoms()}
    if len(degrees) != 1:
        return None
    return degrees.pop()


def substitute(
    f: Polynomial,
    assignment: Mapping[str, Union[Polynomial, Scalar]],
    target: RingSpec,
) -> Polynomial:
    """环同态像：assignment 里没出现的变量映到 target 中同名变量。"""
    source = variable_names(f)
    unknown = sorted(set(assignment) - set(source))
    if unknown:
        raise InputError(f"未声明的变量: {', '.join(unknown)}")

    images = []
    for name in source:
        if name in assignment:
            images.append(target.element(assignment[name]))
        else:
            images.append(target.gen(name))

    ring = target.poly_ring
    result = ring.zero
    powers: Dict[Tuple[int, int], Polynomial] = {}
    for monom, coeff in f.iterterms():
        term = ring.ground_new(coeff)
        for i, e in enumerate(monom):
            if e:
                key = (i, e)
                if key not in powers:
                    powers[key] = images[i] ** e
                term = term * powers[key]
        result += term
    return result


def dehomogenize(f: Polynomial, set_to_one: Iterable[str], target: RingSpec) -> Polynomial:
    return substitute(f, {name: 1 for name in set_to_one}, target)
