# -*- coding: utf-8 -*-
"""Hilbert 数据：分次维数、插值得到的 Hilbert 多项式、双分次截面表、相对 Euler 示性数。

要点：
- 维数一律用首项理想的标准单项式计数（Macaulay）；单项式理想的 Hilbert 级数分子
  用 pivot 递归 K(M) = K(M + (p)) + t^deg(p) K(M : p) 求出，之后每个次数的维数是一次求和
- 插值只在 k ∈ k0 + qZ 上采样；前 D+2 个点拟合一次，紧接着的另外 D+2 个点再拟合一次，
  两个窗口不重叠，系数必须完全一致
- 对 P¹ 底：H(k, m) 在 m 足够大时等于 deg(k) + r(k)(m+1)，χ = deg + r
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import Poly, Rational, Symbol
from sympy.polys.domains import QQ
from sympy.polys.polyfuncs import interpolate

from config import current_settings
from errors import FlatnessError, InputError, InvariantViolation, StabilizationError
from idealcalc import Ideal, ideal_power, ideal_sum, saturate_all
from polyparse import format_polynomial
from polyring import DegreeVector, Monomial, RingSpec

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]
Laurent = Dict[DegreeVector, int]


# ========= 单项式理想的 Hilbert 级数分子 =========

def _minimalize(A: np.ndarray) -> np.ndarray:
    n = A.shape[1]
    kept = np.empty((A.shape[0], n), dtype=np.int64)
    count = 0
    for row in sorted(A.tolist(), key=lambda r: (sum(r), r)):
        row = np.asarray(row, dtype=np.int64)
        if count and np.any(np.all(kept[:count] <= row, axis=1)):
            continue
        kept[count] = row
        count += 1
    return kept[:count]


def _times_one_minus(poly: Laurent, shift: DegreeVector) -> Laurent:
    out = dict(poly)
    for deg, c in poly.items():
        key = tuple(a + b for a, b in zip(deg, shift))
        out[key] = out.get(key, 0) - c
    return {k: v for k, v in out.items() if v}


def _add_shifted(a: Laurent, b: Laurent, shift: DegreeVector) -> Laurent:
    out = dict(a)
    for deg, c in b.items():
        key = tuple(x + y for x, y in zip(deg, shift))
        out[key] = out.get(key, 0) + c
    return {k: v for k, v in out.items() if v}


class _Numerator:
    def __init__(self, weights: np.ndarray):
        self.weights = weights  # 变量数 × 分次行数
        self.zero = (0,) * weights.shape[1]
        self.memo: Dict[Tuple, Laurent] = {}

    def degree(self, row: np.ndarray) -> DegreeVector:
        return tuple(int(x) for x in row @ self.weights)

    def __call__(self, A: np.ndarray) -> Laurent:
        key = tuple(map(tuple, A.tolist()))
        cached = self.memo.get(key)
        if cached is not None:
            return cached

        if A.shape[0] == 0:
            result = {self.zero: 1}
        elif np.all(np.count_nonzero(A, axis=0) <= 1):
            # 生成元两两互素
            result = {self.zero: 1}
            for row in A:
                result = _times_one_minus(result, self.degree(row))
        else:
            i = int(np.argmax(np.count_nonzero(A, axis=0)))
            a = int(A[A[:, i] > 0, i].min())
            p = np.zeros(A.shape[1], dtype=np.int64)
            p[i] = a
            left = np.vstack([A[A[:, i] == 0], p])
            right = _minimalize(np.maximum(A - p, 0))
            result = _add_shifted(self(left), self(right), self.degree(p))

        self.memo[key] = result
        return result


def k_polynomial(monomials: Sequence[Monomial], ring: RingSpec) -> Laurent:
    """S/M 的多重分次 Hilbert 级数分子（分母为 ∏(1 - t^deg x_i)）。"""
    n = len(ring.variables)
    weights = np.array([ring.column(i) for i in range(n)], dtype=np.int64).reshape(n, len(ring.grading))
    A = np.array(list(monomials), dtype=np.int64).reshape(-1, n)
    return _Numerator(weights)(_minimalize(A))


_K_MEMO: Dict[object, Laurent] = {}


def _numerator_of(I: Ideal) -> Laurent:
    cached = _K_MEMO.get(I.key)
    if cached is None:
        monomials = [] if I.is_zero else list(I.groebner().leading_monomials)
        cached = _K_MEMO.setdefault(I.key, k_polynomial(monomials, I.ring))
    return cached


def _require_homogeneous(I: Ideal) -> None:
    if not I.is_homogeneous():
        raise InputError(f"理想不是齐次的: {I!r}")


def _count_by_enumeration(I: Ideal, deg: DegreeVector) -> int:
    ring = I.ring
    n = len(ring.variables)
    cols = [ring.column(i) for i in range(n)]
    if any(not any(c) or min(c) < 0 for c in cols):
        raise InputError("只支持非负且每列非零的分次矩阵")
    leads = [] if I.is_zero else list(I.groebner().leading_monomials)

    count = 0

    def walk(i: int, remaining: List[int], exps: List[int]) -> None:
        nonlocal count
        if i == n:
            if not any(remaining):
                m = tuple(exps)
                if not any(all(a <= b for a, b in zip(g, m)) for g in leads):
                    count += 1
            return
        e = 0
        while all(r - e * c >= 0 for r, c in zip(remaining, cols[i])):
            walk(i + 1, [r - e * c for r, c in zip(remaining, cols[i])], exps + [e])
            e += 1

    walk(0, list(deg), [])
    return count


def graded_dimension(I: Ideal, deg: Sequence[int]) -> int:
    """dim (S/I)_deg。"""
    ring = I.ring
    deg = tuple(int(x) for x in deg)
    if len(deg) != len(ring.grading):
        raise InputError("次数向量长度与分次行数不符")
    _require_homogeneous(I)
    if any(x < 0 for x in deg):
        return 0
    if not ring.is_block_standard:
        return _count_by_enumeration(I, deg)

    sizes = [sum(row) for row in ring.grading]
    total = 0
    for alpha, c in _numerator_of(I).items():
        term = c
        for d_r, a_r, n_r in zip(deg, alpha, sizes):
            gap = d_r - a_r
            if n_r == 0:
                term *= 1 if gap == 0 else 0
            elif gap < 0:
                term = 0
            else:
                term *= math.comb(gap + n_r - 1, n_r - 1)
            if not term:
                break
        total += term
    return total


# ========= 插值 =========

_K = Symbol("k")


@dataclass(frozen=True)
class HilbertPolynomial:
    coefficients: Tuple[Fraction, ...]  # 降幂
    k0: int
    stride: int
    samples: Tuple[Tuple[int, Fraction], ...] = ()

    def __call__(self, k: Number) -> Fraction:
        value = Fraction(0)
        for c in self.coefficients:
            value = value * k + c
        return value

    @property
    def degree(self) -> int:
        for i, c in enumerate(self.coefficients):
            if c:
                return len(self.coefficients) - 1 - i
        return -1

    def coefficient(self, power: int) -> Fraction:
        idx = len(self.coefficients) - 1 - power
        if power < 0 or idx < 0:
            return Fraction(0)
        return self.coefficients[idx]

    def as_string(self, var: str = "k") -> str:
        ring = RingSpec.standard((var,))
        n = len(self.coefficients) - 1
        f = ring.from_terms({(n - i,): c for i, c in enumerate(self.coefficients)})
        return format_polynomial(f)

    def __str__(self) -> str:
        return self.as_string()


def fit_polynomial(points: Sequence[Tuple[Number, Number]]) -> Tuple[Fraction, ...]:
    data = [(to_sympy(x), to_sympy(y)) for x, y in points]
    expr = interpolate(data, _K)
    coeffs = Poly(expr, _K, domain=QQ).all_coeffs()
    return tuple(Fraction(int(c.p), int(c.q)) for c in coeffs)


def to_sympy(x: Number) -> Rational:
    x = Fraction(x)
    return Rational(x.numerator, x.denominator)


def strip_leading_zeros(coeffs: Tuple[Fraction, ...]) -> Tuple[Fraction, ...]:
    i = 0
    while i < len(coeffs) - 1 and coeffs[i] == 0:
        i += 1
    return coeffs[i:]


def stable_interpolation(
    sampler: Callable[[int], Number],
    degree_bound: int,
    stride: int = 1,
    start: Optional[int] = None,
    label: str = "",
) -> HilbertPolynomial:
    """在 k0, k0+q, ... 上采样 2(D+2) 个点；前后两个不相交的窗口分别拟合，系数一致才算稳定。

    第二个窗口从 k0 + (D+2)q 开始。
    """
    settings = current_settings()
    q = max(1, int(stride))
    k0 = start if start is not None else q * settings.HILBERT_START
    k0 = q * max(1, -(-k0 // q))
    npts = degree_bound + 2

    for attempt in range(settings.STABILIZATION_RETRIES + 1):
        ks = [k0 + i * q for i in range(2 * npts)]
        values = [(k, Fraction(sampler(k))) for k in ks]
        first = strip_leading_zeros(fit_polynomial(values[:npts]))
        second = strip_leading_zeros(fit_polynomial(values[npts:]))
        hp = HilbertPolynomial(first, k0, q, tuple(values))
        if first == second and hp.degree <= degree_bound:
            logger.debug("[hilbert] %s 稳定于 k0=%d, q=%d: %s", label, k0, q, hp)
            return hp
        logger.debug("[hilbert] %s 在 k0=%d 未稳定，重试", label, k0)
        k0 *= 2
    raise StabilizationError(f"{label or '插值'} 在 {settings.STABILIZATION_RETRIES} 次重试后仍未稳定")


def hilbert_polynomial(
    I: Ideal,
    d: int = 1,
    stride: int = 1,
    direction: Optional[Sequence[int]] = None,
    saturate: bool = True,
    start: Optional[int] = None,
) -> HilbertPolynomial:
    """k ↦ dim (S/I)_{k·d·direction} 的 Hilbert 多项式。"""
    ring = I.ring
    _require_homogeneous(I)
    if direction is None:
        direction = (1,) * len(ring.grading)
    direction = tuple(direction)
    J = saturate_all(I) if saturate else I
    bound = len(ring.variables) - len(ring.grading)
    return stable_interpolation(
        lambda k: graded_dimension(J, tuple(k * d * x for x in direction)),
        bound,
        stride,
        start,
        label="HP",
    )


def extract_coefficients(hp: HilbertPolynomial, n: int) -> Tuple[Fraction, Fraction]:
    """(k^n 系数, k^{n-1} 系数)，次数不足时补零。"""
    if hp.degree > n:
        raise FlatnessError(f"Hilbert 多项式次数 {hp.degree} 超过预期 {n}")
    return hp.coefficient(n), hp.coefficient(n - 1)


# ========= 双分次截面表 =========

@dataclass
class SectionTable:
    """H(k, m) = h⁰(X, L^k ⊗ I^{ck} ⊗ O_base(m))，按需计算并记录。"""

    ambient: Ideal
    d: int
    twist: Optional[Ideal] = None
    c: Optional[Fraction] = None
    saturated: bool = True
    entries: Dict[Tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        ring = self.ambient.ring
        if len(ring.grading) != 2 or set(ring.block_names[:2]) != {"x", "y"}:
            raise InputError("截面表需要带 x 块和 y 块的双分次环")
        _require_homogeneous(self.ambient)
        if self.twist is not None:
            _require_homogeneous(self.twist)
            if self.c is None:
                raise InputError("给了扭曲理想就必须给 c")
        self._base = saturate_all(self.ambient) if self.saturated else self.ambient
        self._twisted: Dict[int, Ideal] = {}

    @property
    def provenance(self) -> str:
        twist = f" twist={self.twist!r}^(c k), c={self.c}" if self.twist is not None else ""
        return f"I={self.ambient!r}, d={self.d}{twist}, saturated={self.saturated}"

    def power(self, k: int) -> int:
        if self.c is None:
            return 0
        ck = self.c * k
        if ck.denominator != 1:
            raise InputError(f"k={k} 不是 c={self.c} 的分母的倍数")
        return int(ck)

    def twisted_ideal(self, k: int) -> Optional[Ideal]:
        N = self.power(k)
        if self.twist is None or N == 0:
            return None
        J = self._twisted.get(N)
        if J is None:
            J = ideal_sum(self.ambient, ideal_power(self.twist, N))
            if self.saturated:
                J = saturate_all(J)
            J = self._twisted.setdefault(N, J)
        return J

    def value(self, k: int, m: int) -> int:
        key = (k, m)
        if key not in self.entries:
            deg = (self.d * k, m)
            h = graded_dimension(self._base, deg)
            J = self.twisted_ideal(k)
            if J is not None:
                h -= graded_dimension(J, deg)
            self.entries[key] = h
        return self.entries[key]

    def column(self, k: int) -> List[Tuple[int, int]]:
        return sorted((m, v) for (kk, m), v in self.entries.items() if kk == k)

    def start_m(self, k: int) -> int:
        """线性区的搜索起点：c·k 乘以扭曲生成元的最大 y 次数。"""
        if self.twist is None:
            return 0
        ydeg = max((self.twist.ring.degree_of(mono)[1] for g in self.twist.generators for mono in g.itermonoms()), default=0)
        return self.power(k) * ydeg


def section_table(
    I: Ideal,
    d: int,
    k_samples: Sequence[int],
    m_samples: Sequence[int],
    twist: Optional[Ideal] = None,
    c: Optional[Fraction] = None,
) -> SectionTable:
    table = SectionTable(I, d, twist, c)
    for k in k_samples:
        for m in m_samples:
            table.value(k, m)
    return table


def fill_linear_range(table: SectionTable, k: int) -> int:
    """从 start_m 往上补 m，直到连续 3 个值等差，再多断言 LINEAR_MARGIN 个点；返回线性区起点。"""
    settings = current_settings()
    m = table.start_m(k)
    while True:
        if m > settings.M_CAP:
            raise StabilizationError(f"k={k} 时 H(k, m) 到 m={settings.M_CAP} 仍未线性")
        a, b, c = table.value(k, m), table.value(k, m + 1), table.value(k, m + 2)
        if b - a == c - b:
            break
        m += 1

    rank = b - a
    for extra in range(settings.LINEAR_MARGIN):
        mm = m + 3 + extra
        if table.value(k, mm) - table.value(k, mm - 1) != rank:
            raise InvariantViolation(f"k={k} 的截面表在 m={mm} 处离开线性区")
    if rank < 0:
        raise InvariantViolation(f"k={k} 的截面表在稳定区递减")
    return m


def relative_euler_characteristic(table: SectionTable, k: int) -> int:
    """χ(X, L^k) = deg π_* + rank π_*，取表中最靠上的连续三个 m。"""
    column = dict(table.column(k))
    ms = sorted(column)
    for top in reversed(ms):
        if top - 1 in column and top - 2 in column:
            m = top - 2
            a, b, c = column[m], column[m + 1], column[m + 2]
            if b - a == c - b:
                rank = b - a
                degree = a - rank * (m + 1)
                return degree + rank
            break
    raise StabilizationError(f"k={k} 的截面表还没有进入线性区")
