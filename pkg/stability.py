# -*- coding: utf-8 -*-
"""稳定性不变量：μ、a_i(x)、μ_c、Seshadri 代理值、总权重 w(k)、法锥退化的 DF、族的 CM 次数、
CM 可加性检查和斜率半稳定扫描。

记号：
- (V, L) 由饱和齐次理想 I_V 和次数 d 给出，L = O_V(d)；χ(V, L^k) = dim (S/I_V)_{dk}
- 子概形 Z 的截面：h⁰(V, I_Z^j ⊗ L^k) = dim (S/I_V)_{dk} - dim (S/J_j)_{dk}，J_j = sat(I_V + I_Z^j)
- 总权重 w(k) = Σ_{j=1}^{ck} (h⁰(I_Z^j L^k) - h⁰(L^k))，k 只取 c 分母的倍数
- 族只支持 P¹ 底（亏格 0）；双分次环的 y 块恰好两个变量，y1 = 0 是中心纤维
- DF 的两条路线（权重插值 / 紧化构形的 CM）必须逐系数相等，不等就是内部错误
- prop33 另外记录中心纤维的 Jacobian 光滑性和链 CM(B) >= CM(X) => DF >= 0 => μ >= μ_c；
  斜率那一步只在 a₀(c) > 0 时比较
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from sympy import Poly, Rational, Symbol
from sympy.polys.domains import QQ

from config import current_settings
from errors import DegenerateError, FlatnessError, InputError, InvariantViolation, StabilizationError
from hilbert import (
    HilbertPolynomial,
    SectionTable,
    extract_coefficients,
    fit_polynomial,
    fill_linear_range,
    graded_dimension,
    hilbert_polynomial,
    relative_euler_characteristic,
    stable_interpolation,
    strip_leading_zeros,
    to_sympy,
)
from idealcalc import (
    Ideal,
    Smoothness,
    ideal_equal,
    ideal_power,
    ideal_sum,
    jacobian_smoothness_check,
    saturate_all,
)
from polyring import RingSpec, format_rational, substitute
from reesdegen import PowerCompatReport, power_compat

logger = logging.getLogger(__name__)

Number = Union[int, Fraction, "RationalParam"]

_RE_RATIONAL = re.compile(r"\s*(\d+)\s*(?:/\s*(\d+))?\s*$")

# 平坦性抽查的三个底点 (y0 : y1)
FIBER_POINTS: Tuple[Tuple[int, int], ...] = ((1, 0), (0, 1), (1, 1))


# ========= 参数 =========

@dataclass(frozen=True)
class RationalParam:
    value: Fraction
    source: Optional[str] = None  # 原始写法不是最简分数时记下来

    def __post_init__(self):
        if self.value <= 0:
            raise InputError(f"c 必须是正有理数，收到 {format_rational(self.value)}")

    @classmethod
    def parse(cls, text: str) -> "RationalParam":
        m = _RE_RATIONAL.match(text)
        if not m:
            raise InputError(f"无法解析的有理数 {text!r}，应写成 \"p/q\" 或 \"n\"")
        p = int(m.group(1))
        q = int(m.group(2)) if m.group(2) is not None else 1
        if q == 0:
            raise InputError(f"分母为 0: {text!r}")
        value = Fraction(p, q)
        canonical = format_rational(value)
        return cls(value, None if canonical == re.sub(r"\s+", "", text) else text)

    @classmethod
    def of(cls, x: Number) -> "RationalParam":
        if isinstance(x, RationalParam):
            return x
        return cls(Fraction(x))

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator

    @property
    def normalized(self) -> bool:
        return self.source is not None

    def __str__(self) -> str:
        return format_rational(self.value)


def _fraction(x: Number) -> Fraction:
    return x.value if isinstance(x, RationalParam) else Fraction(x)


def _power_at(c: Fraction, k: int) -> int:
    ck = c * k
    if ck.denominator != 1:
        raise InputError(f"c·k = {format_rational(ck)} 不是整数（k 必须是 c 分母的倍数）")
    return int(ck)


# ========= 簇 / 子概形 / 族 =========

class VarietySpec:
    """极化簇 (V, O_V(d))，V ⊂ P^{n_amb}。"""

    def __init__(self, ideal: Ideal, d: int = 1, check_smoothness: bool = False):
        ring = ideal.ring
        if len(ring.grading) != 1 or len(ring.blocks) != 1 or not ring.is_block_standard:
            raise InputError("VarietySpec 需要标准分次的单块环")
        if int(d) < 1:
            raise InputError(f"极化次数 d 必须 >= 1，收到 {d}")
        if not ideal.is_homogeneous():
            raise InputError(f"I_V 不是齐次理想: {ideal!r}")

        self.ring: RingSpec = ring
        self.d = int(d)
        self.ambient_dimension = len(ring.variables) - 1
        self.ideal = saturate_all(ideal)
        if self.ideal.is_unit:
            raise InputError("V 在射影空间里是空集")
        self.hilbert = hilbert_polynomial(self.ideal, self.d)
        self.n = self.hilbert.degree
        self.smoothness: Optional[Smoothness] = None
        if check_smoothness:
            self.smoothness = jacobian_smoothness_check(ideal, self.ambient_dimension - self.n)
        self._twisted: Dict[Tuple[object, int], Ideal] = {}

    def coefficients(self) -> Tuple[Fraction, Fraction]:
        """(a₀, a₁)：χ(V, L^k) = a₀k^n + a₁k^{n-1} + …"""
        return extract_coefficients(self.hilbert, self.n)

    def sections(self, k: int) -> int:
        return graded_dimension(self.ideal, (self.d * k,))

    def twisted_quotient(self, Z: "SubschemeSpec", j: int) -> Ideal:
        key = (Z.ideal.key, j)
        J = self._twisted.get(key)
        if J is None:
            J = saturate_all(ideal_sum(self.ideal, ideal_power(Z.ideal, j)))
            J = self._twisted.setdefault(key, J)
        return J

    def twisted_sections(self, Z: "SubschemeSpec", j: int, k: int) -> int:
        """h⁰(V, I_Z^j ⊗ L^k)。"""
        h = self.sections(k)
        if j == 0:
            return h
        return h - graded_dimension(self.twisted_quotient(Z, j), (self.d * k,))

    def __repr__(self) -> str:
        return f"VarietySpec(I_V={self.ideal!r}, d={self.d}, n={self.n})"


class SubschemeSpec:
    """真闭子概形 Z ⊊ V；I_Z 自动加上 I_V 并饱和。"""

    def __init__(self, ideal: Ideal, container: Ideal, name: str = "Z", in_fiber: bool = False):
        if ideal.ring != container.ring:
            raise InputError(f"{name} 与所在的簇不在同一个环")
        if not ideal.is_homogeneous():
            raise InputError(f"I_{name} 不是齐次理想: {ideal!r}")
        self.name = name
        self.in_fiber = in_fiber
        self.container = saturate_all(container)
        self.ideal = saturate_all(ideal_sum(ideal, self.container))
        if self.ideal.is_unit:
            raise InputError(f"{name} 在射影空间里是空集")
        if ideal_equal(self.ideal, self.container):
            raise InputError(f"{name} 与整个簇相同，不是真子概形")

    @property
    def ring(self) -> RingSpec:
        return self.ideal.ring

    def __repr__(self) -> str:
        return f"SubschemeSpec({self.name}={self.ideal!r})"


class FamilySpec:
    """P¹ 上的极化族 X ⊂ P^n × P¹，相对极化 O(d, ·)；中心纤维在 y1 = 0。"""

    def __init__(
        self,
        ideal: Ideal,
        d: int = 1,
        fiber: Optional[VarietySpec] = None,
        check_flatness: bool = True,
    ):
        ring = ideal.ring
        if (len(ring.grading) != 2 or ring.block_names != ("x", "y")
                or not ring.is_block_standard or len(ring.block("y")) != 2):
            raise InputError("FamilySpec 需要 x 块 + 两变量 y 块的双分次环")
        if int(d) < 1:
            raise InputError(f"相对极化次数 d 必须 >= 1，收到 {d}")
        if not ideal.is_homogeneous():
            raise InputError(f"I_X 不是双齐次理想: {ideal!r}")
        self.genus = current_settings().BASE_GENUS
        if self.genus != 0:
            raise InputError("只支持亏格 0 的底曲线 P¹")

        self.ring: RingSpec = ring
        self.d = int(d)
        self.xnames = ring.block("x")
        self.y0, self.y1 = ring.block("y")
        self.fiber_ring = RingSpec.standard(self.xnames)
        self.ideal = saturate_all(ideal)
        self.central_fiber = saturate_all(ideal_sum(self.ideal, Ideal(ring, [ring.gen(self.y1)])))

        own = VarietySpec(self.restrict((1, 0)), self.d)
        if fiber is not None:
            if fiber.ring.variables != self.xnames or fiber.d != self.d:
                raise InputError("声明的纤维与族的环或极化次数不符")
            if not ideal_equal(fiber.ideal, own.ideal):
                raise InputError("声明的纤维与 I_X0 不符")
        self.fiber = fiber or own
        self.fiber_polynomials: Dict[Tuple[int, int], HilbertPolynomial] = {}
        if check_flatness:
            self.flatness_spot_check()

    @classmethod
    def product(cls, V: VarietySpec, ynames: Optional[Sequence[str]] = None) -> "FamilySpec":
        """X₀ × P¹，极化从 X₀ 拉回。"""
        if ynames is None:
            ynames = (V.ring.fresh_name("y0"), V.ring.fresh_name("y1"))
        ring = RingSpec.bigraded(V.ring.variables, ynames)
        ideal = Ideal(ring, [g.set_ring(ring.poly_ring) for g in V.ideal.generators])
        return cls(ideal, V.d, fiber=V, check_flatness=False)

    @property
    def n(self) -> int:
        return self.fiber.n

    def restrict(self, point: Tuple[int, int], ideal: Optional[Ideal] = None) -> Ideal:
        """底点 (y0 : y1) 上的纤维理想（在纤维环里）；ideal 默认是 I_X。"""
        a, b = point
        source = self.ideal if ideal is None else ideal
        gens = [substitute(g, {self.y0: a, self.y1: b}, self.fiber_ring) for g in source.generators]
        return Ideal(self.fiber_ring, gens)

    def lift(self, I: Ideal) -> Ideal:
        """纤维环里的理想拉回到族的环。"""
        if I.ring.variables != self.xnames:
            raise InputError("理想不在该族的纤维环里")
        return Ideal(self.ring, [g.set_ring(self.ring.poly_ring) for g in I.generators])

    def flatness_spot_check(self) -> None:
        for point in FIBER_POINTS:
            self.fiber_polynomials[point] = hilbert_polynomial(self.restrict(point), self.d)
        reference = self.fiber_polynomials[FIBER_POINTS[0]]
        for point, hp in self.fiber_polynomials.items():
            if hp.coefficients != reference.coefficients:
                raise FlatnessError(
                    f"纤维 Hilbert 多项式不一致：{FIBER_POINTS[0]} 上 {reference}，{point} 上 {hp}"
                )

    def supports_in_fiber(self, J: Ideal) -> bool:
        """J + I_X 含有 y1 的某个幂（Z 落在中心纤维里）。"""
        full = saturate_all(ideal_sum(J, self.ideal))
        y1 = self.ring.gen(self.y1)
        return any(full.contains(y1 ** e) for e in range(1, current_settings().ORD_CAP + 1))

    def __repr__(self) -> str:
        return f"FamilySpec(I_X={self.ideal!r}, d={self.d})"


# ========= μ 与 a_i(x) =========

def slope_mu(V: VarietySpec) -> Fraction:
    a0, a1 = V.coefficients()
    if a0 == 0:
        raise DegenerateError("a₀ = 0，斜率无定义")
    return a1 / a0


def ax_coefficients(V: VarietySpec, Z: SubschemeSpec, x: Number) -> Tuple[Fraction, Fraction]:
    """k ↦ h⁰(V, I_Z^{xk} ⊗ L^k) 的 Hilbert 多项式的 (k^n, k^{n-1}) 系数。"""
    x = _fraction(x)
    if x < 0:
        raise InputError("x 必须非负")
    if x == 0:
        return V.coefficients()
    hp = stable_interpolation(
        lambda k: V.twisted_sections(Z, _power_at(x, k), k),
        V.n,
        x.denominator,
        label=f"a(x) at x={format_rational(x)}",
    )
    return extract_coefficients(hp, V.n)


@dataclass(frozen=True)
class AxFit:
    """a₀(x)、a₁(x) 作为 x 的精确多项式（系数降幂）。"""

    a0: HilbertPolynomial
    a1: HilbertPolynomial
    upper: Fraction
    samples: Tuple[Tuple[Fraction, Fraction, Fraction], ...]

    def as_strings(self) -> Tuple[str, str]:
        return self.a0.as_string("x"), self.a1.as_string("x")


def _x_samples(upper: Fraction, count: int) -> List[Fraction]:
    # 取 upper - i/D（i < count），D 是 upper 分母的倍数，保证全部落在 (0, upper]
    D = upper.denominator
    while upper * D < count:
        D += upper.denominator
    return [upper - Fraction(i, D) for i in reversed(range(count))]


def fit_ax_polynomials(V: VarietySpec, Z: SubschemeSpec, upper: Number) -> AxFit:
    """n+2 个 x 样本拟合 a₀(x), a₁(x)，再用第 n+3 个样本（x = upper）验证。"""
    upper = _fraction(upper)
    if upper <= 0:
        raise InputError("拟合上界必须为正")
    n = V.n
    xs = _x_samples(upper, n + 3)
    rows = [(x,) + ax_coefficients(V, Z, x) for x in xs]

    fitted = []
    for col in (1, 2):
        coeffs = strip_leading_zeros(fit_polynomial([(r[0], r[col]) for r in rows[:-1]]))
        poly = HilbertPolynomial(coeffs, 0, 1, tuple((r[0], r[col]) for r in rows))
        if poly.degree > n or poly(rows[-1][0]) != rows[-1][col]:
            raise StabilizationError(
                f"a_{col - 1}(x) 的拟合在 x={format_rational(rows[-1][0])} 处与样本不符"
                f"（可能超出了 Seshadri 窗口）"
            )
        fitted.append(poly)

    logger.debug("[a(x)] a0(x) = %s, a1(x) = %s", fitted[0].as_string("x"), fitted[1].as_string("x"))
    return AxFit(fitted[0], fitted[1], upper, tuple(rows))


_X = Symbol("x")


def _x_poly(p: HilbertPolynomial) -> Poly:
    return Poly([to_sympy(c) for c in p.coefficients], _X, domain=QQ)


def _definite_integral(p: Poly, c: Fraction) -> Fraction:
    value = Rational(p.integrate().eval(to_sympy(c)))
    return Fraction(int(value.p), int(value.q))


def slope_mu_c(V: VarietySpec, Z: SubschemeSpec, c: Number, fit: Optional[AxFit] = None) -> Fraction:
    """μ_c = ∫₀^c (a₁(x) + a₀′(x)/2) dx / ∫₀^c a₀(x) dx。"""
    c = _fraction(c)
    if fit is None or fit.upper < c:
        fit = fit_ax_polynomials(V, Z, c)
    a0, a1 = _x_poly(fit.a0), _x_poly(fit.a1)
    numerator = _definite_integral(a1 + a0.diff(_X) * Rational(1, 2), c)
    denominator = _definite_integral(a0, c)
    if denominator == 0:
        raise DegenerateError(f"∫₀^c a₀(x) dx = 0（c = {format_rational(c)}）")
    return numerator / denominator


def seshadri_proxy(V: VarietySpec, Z: SubschemeSpec, grid: Sequence[Number]) -> Optional[Fraction]:
    """网格上 a₀(x) > 0 且严格递减的最大 x；只是 ε 的上界代理，不是 ε 本身。"""
    xs = [_fraction(x) for x in grid]
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise InputError("Seshadri 网格必须严格递增")
    if xs and (xs[0] <= 0 or xs[-1] > V.d):
        raise InputError(f"Seshadri 网格必须落在 (0, {V.d}] 内")

    previous = V.coefficients()[0]
    proxy: Optional[Fraction] = None
    for x in xs:
        a0 = ax_coefficients(V, Z, x)[0]
        if not (0 < a0 < previous):
            break
        proxy, previous = x, a0
    return proxy


# ========= 总权重与 DF =========

def total_weight(V: VarietySpec, Z: SubschemeSpec, c: Number, k: int) -> int:
    c = _fraction(c)
    N = _power_at(c, k)
    dk = (V.d * k,)
    return -sum(graded_dimension(V.twisted_quotient(Z, j), dk) for j in range(1, N + 1))


def weight_polynomial(V: VarietySpec, Z: SubschemeSpec, c: Number) -> HilbertPolynomial:
    c = _fraction(c)
    return stable_interpolation(
        lambda k: total_weight(V, Z, c, k),
        V.n + 1,
        c.denominator,
        label=f"w(k) at c={format_rational(c)}",
    )


@dataclass
class CMResult:
    cm: Fraction
    a0: Fraction
    a1: Fraction
    b0: Fraction
    b1: Fraction
    chi: HilbertPolynomial
    c: Optional[Fraction] = None
    twisted: bool = False
    linear_starts: Dict[int, int] = field(default_factory=dict)

    formula = "a_1 b_0 - a_0 b_1 + (1-g) a_0^2"


@dataclass
class DFResult:
    df: Fraction
    a0: Fraction
    a1: Fraction
    w0: Fraction
    w1: Fraction
    weight: HilbertPolynomial
    c: Fraction
    cm_route: Optional[CMResult] = None

    formula = "a_1 w_0 - a_0 w_1"

    @property
    def route_equality(self) -> Optional[bool]:
        """w₀ = b₀、w₁ = b₁ - a₀、DF = CM；没做交叉验证时为 None。"""
        if self.cm_route is None:
            return None
        r = self.cm_route
        return self.w0 == r.b0 and self.w1 == r.b1 - self.a0 and self.df == r.cm


def cm_degree(F: FamilySpec, twist: Optional[Ideal] = None, c: Optional[Number] = None) -> CMResult:
    """(Bl_J X, π*L(-cE)) 的 CM 次数；J 不给时就是 (X, L) 本身。"""
    if twist is not None:
        if c is None:
            raise InputError("给了扭曲理想就必须给 c")
        if twist.ring != F.ring:
            raise InputError("扭曲理想不在族的环里")
        if not F.supports_in_fiber(twist):
            raise InputError(f"扭曲理想 {twist!r} 不落在中心纤维里")
        c = _fraction(c)
    else:
        c = None

    table = SectionTable(F.ideal, F.d, twist, c)
    stride = c.denominator if c is not None else 1
    starts: Dict[int, int] = {}

    def chi(k: int) -> int:
        starts[k] = fill_linear_range(table, k)
        return relative_euler_characteristic(table, k)

    hp = stable_interpolation(chi, F.n + 1, stride, label="χ(X, L^k)")
    b0, b1 = extract_coefficients(hp, F.n + 1)
    a0, a1 = F.fiber.coefficients()
    cm = a1 * b0 - a0 * b1 + (1 - F.genus) * a0 * a0
    logger.debug("[CM] b0=%s b1=%s CM=%s", b0, b1, cm)
    return CMResult(cm, a0, a1, b0, b1, hp, c, twist is not None, starts)


def df_normal_cone(V: VarietySpec, Z: SubschemeSpec, c: Number, proxy: Optional[Number] = None) -> DFResult:
    """法锥退化的 DF = a₁w₀ - a₀w₁；DF_CROSSCHECK 打开时同时算紧化构形的 CM 并要求逐系数相等。"""
    c = _fraction(c)
    if proxy is not None and c > _fraction(proxy):
        logger.warning("[DF] c = %s 超出 Seshadri 代理值 %s，结果只作为 χ 多项式的量", c, _fraction(proxy))

    weight = weight_polynomial(V, Z, c)
    w0, w1 = extract_coefficients(weight, V.n + 1)
    a0, a1 = V.coefficients()
    result = DFResult(a1 * w0 - a0 * w1, a0, a1, w0, w1, weight, c)

    if current_settings().DF_CROSSCHECK:
        T = FamilySpec.product(V)
        twist = ideal_sum(T.lift(Z.ideal), Ideal(T.ring, [T.ring.gen(T.y1)]))
        result.cm_route = cm_degree(T, twist, c)
        if not result.route_equality:
            r = result.cm_route
            raise InvariantViolation(
                f"DF 两条路线不一致：w0={w0}, w1={w1}, DF={result.df}；"
                f"b0={r.b0}, b1={r.b1}, CM={r.cm}"
            )
    logger.info("[DF] c=%s DF=%s", format_rational(c), format_rational(result.df))
    return result


# ========= 汇总报告 =========

def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


@dataclass
class StabilityReport:
    mu: Fraction
    c: Fraction
    mu_c: Optional[Fraction] = None
    df: Optional[DFResult] = None
    fit: Optional[AxFit] = None
    proxy: Optional[Fraction] = None
    epsilon: Optional[Fraction] = None   # 用户给的 ε，覆盖代理值
    verdicts: Dict[str, bool] = field(default_factory=dict)

    @property
    def window(self) -> Optional[Fraction]:
        return self.epsilon if self.epsilon is not None else self.proxy


def analyze_normal_cone(
    V: VarietySpec,
    Z: SubschemeSpec,
    c: Number,
    proxy_grid: Optional[Sequence[Number]] = None,
    epsilon: Optional[Number] = None,
    with_df: bool = True,
) -> StabilityReport:
    """μ、μ_c、DF 一起算，并在窗口内检查 sign(DF) = sign(μ - μ_c)。"""
    c = _fraction(c)
    report = StabilityReport(mu=slope_mu(V), c=c)
    if epsilon is not None:
        report.epsilon = _fraction(epsilon)
        logger.info("[slope] 使用给定的 ε = %s 代替代理值", report.epsilon)
    elif proxy_grid:
        report.proxy = seshadri_proxy(V, Z, proxy_grid)

    report.fit = fit_ax_polynomials(V, Z, c)
    report.mu_c = slope_mu_c(V, Z, c, report.fit)
    report.verdicts["slope"] = report.mu >= report.mu_c

    if with_df:
        report.df = df_normal_cone(V, Z, c, report.window)
        if report.df.route_equality is not None:
            report.verdicts["route_equality"] = report.df.route_equality
        coherent = _sign(report.df.df) == _sign(report.mu - report.mu_c)
        report.verdicts["sign_coherence"] = coherent
        inside = report.window is None or c < report.window
        if not coherent and inside:
            raise InvariantViolation(
                f"sign(DF) 与 sign(μ - μ_c) 不一致：DF={report.df.df}, μ - μ_c={report.mu - report.mu_c}"
            )
    return report


# ========= CM 可加性 =========

@dataclass
class Prop33Report:
    passed: bool
    compat_passed: bool
    charts: List[Tuple[str, PowerCompatReport]] = field(default_factory=list)
    cm_T: Optional[Fraction] = None
    cm_T_chi: Optional[CMResult] = None
    cm_B: Optional[CMResult] = None
    cm_X: Optional[CMResult] = None
    df: Optional[DFResult] = None
    coefficient_identity: Optional[bool] = None
    a0_positive: Optional[bool] = None
    fiber_smoothness: Optional[Smoothness] = None
    mu: Optional[Fraction] = None
    mu_c: Optional[Fraction] = None
    cm_minimized: Optional[bool] = None       # CM(B) >= CM(X)
    df_nonnegative: Optional[bool] = None     # CM(T) = DF >= 0
    slope_inequality: Optional[bool] = None   # μ >= μ_c

    formula = "CM(T,N) = CM(B,M) - CM(X,L)"
    chain = "CM(B) >= CM(X) => CM(T) = DF >= 0 => mu >= mu_c"

    @property
    def chain_holds(self) -> Optional[bool]:
        """两步蕴含都不被反驳；斜率一步只在 a₀(c) > 0 时比较。"""
        if self.cm_minimized is None or self.df_nonnegative is None:
            return None
        if self.cm_minimized and not self.df_nonnegative:
            return False
        if self.slope_inequality is None:
            return None
        return not (self.df_nonnegative and not self.slope_inequality)

    @property
    def failing_chart(self) -> Optional[Tuple[str, PowerCompatReport]]:
        for name, rep in self.charts:
            if not rep.passed:
                return name, rep
        return None


def _affine_chart(F: FamilySpec, x: str) -> RingSpec:
    names = tuple(v for v in F.xnames if v != x) + (F.y1,)
    return RingSpec.standard(names)


def _dehomogenize(I: Ideal, F: FamilySpec, x: str, chart: RingSpec) -> Ideal:
    gens = [substitute(g, {x: 1, F.y0: 1}, chart) for g in I.generators]
    return Ideal(chart, gens)


def prop33_check(F: FamilySpec, Z: Ideal, c: Number, m_max: int) -> Prop33Report:
    """先在每个与 Z 相交的仿射图卡上做幂相容性检查，全部通过后再比较三个 CM 次数。"""
    c = _fraction(c)
    if Z.ring != F.ring:
        raise InputError("I_Z 不在族的环里")
    I_Z = saturate_all(ideal_sum(Z, F.ideal))
    if not I_Z.contains_ideal(F.central_fiber):
        raise InputError("Z 不是中心纤维的闭子概形（I_Z 不包含 I_X0）")
    if I_Z.is_unit:
        raise InputError("Z 是空集")

    report = Prop33Report(passed=False, compat_passed=True)
    for x in F.xnames:
        chart = _affine_chart(F, x)
        local_Z = _dehomogenize(I_Z, F, x, chart)
        if local_Z.is_unit:
            continue
        ambient = _dehomogenize(F.ideal, F, x, chart)
        center = Ideal(chart, [chart.gen(F.y1)])
        rep = power_compat(local_Z, center, m_max, ambient=ambient)
        report.charts.append((f"{x}=1", rep))
        if not rep.passed:
            report.compat_passed = False
            logger.info("[CM] 图卡 %s=1 上幂相容性不成立，恒等式不做断言", x)
            return report

    V0 = F.fiber
    report.fiber_smoothness = jacobian_smoothness_check(V0.ideal, V0.ambient_dimension - V0.n)
    if report.fiber_smoothness != Smoothness.SMOOTH:
        logger.warning("[CM] 中心纤维的 Jacobian 检查结果为 %s", report.fiber_smoothness.value)
    Z0 = SubschemeSpec(F.restrict((1, 0), I_Z), V0.ideal, name="Z0")
    report.a0_positive = ax_coefficients(V0, Z0, c)[0] > 0
    if not report.a0_positive:
        logger.warning("[CM] c = %s 处 a₀(c) <= 0，已超出纤维的 Seshadri 窗口", format_rational(c))

    report.df = df_normal_cone(V0, Z0, c)
    report.cm_T = report.df.df
    report.cm_T_chi = report.df.cm_route
    report.cm_B = cm_degree(F, I_Z, c)
    report.cm_X = cm_degree(F)

    b0T, b1T = report.df.w0, report.df.w1 + report.df.a0
    B, X = report.cm_B, report.cm_X
    report.coefficient_identity = (b0T + X.b0 == B.b0) and (b1T + X.b1 - X.a0 == B.b1)
    report.passed = report.cm_T == B.cm - X.cm
    logger.info("[CM] CM(T)=%s, CM(B)=%s, CM(X)=%s", report.cm_T, B.cm, X.cm)

    report.cm_minimized = B.cm >= X.cm
    report.df_nonnegative = report.cm_T >= 0
    report.mu = slope_mu(V0)
    if report.a0_positive:
        report.mu_c = slope_mu_c(V0, Z0, c)
        report.slope_inequality = report.mu >= report.mu_c
    if report.chain_holds is False:
        logger.warning("[CM] 蕴含链 %s 在 c = %s 处不成立", Prop33Report.chain, format_rational(c))
    return report


# ========= 斜率扫描 =========

@dataclass
class ScanRow:
    name: str
    c: Fraction
    verdict: str                      # ok / violation / outside-proxy
    mu: Optional[Fraction] = None
    mu_c: Optional[Fraction] = None
    difference: Optional[Fraction] = None
    df: Optional[Fraction] = None


@dataclass
class ScanReport:
    rows: List[ScanRow] = field(default_factory=list)
    proxies: Dict[str, Optional[Fraction]] = field(default_factory=dict)
    fits: Dict[str, AxFit] = field(default_factory=dict)

    @property
    def violations(self) -> List[ScanRow]:
        return [r for r in self.rows if r.verdict == "violation"]

    @property
    def verdict(self) -> str:
        if self.violations:
            return "violation found"
        return "no violation found over the supplied scan"


def slope_semistable_scan(
    V: VarietySpec,
    subschemes: Sequence[Tuple[str, SubschemeSpec]],
    c_grid: Sequence[Number],
    with_df: bool = False,
) -> ScanReport:
    """对每个 Z 和网格里的 c 计算 μ - μ_c；网格同时用来求 Seshadri 代理值。"""
    grid = sorted({_fraction(c) for c in c_grid})
    report = ScanReport()
    if not subschemes:
        return report
    mu = slope_mu(V)
    proxy_grid = [c for c in grid if c <= V.d]

    for name, Z in subschemes:
        proxy = seshadri_proxy(V, Z, proxy_grid)
        report.proxies[name] = proxy
        inside = [c for c in grid if proxy is not None and c <= proxy]
        fit = fit_ax_polynomials(V, Z, inside[-1]) if inside else None
        if fit is not None:
            report.fits[name] = fit

        for c in grid:
            if c not in inside:
                report.rows.append(ScanRow(name, c, "outside-proxy"))
                continue
            mu_c = slope_mu_c(V, Z, c, fit)
            diff = mu - mu_c
            row = ScanRow(name, c, "ok" if diff >= 0 else "violation", mu, mu_c, diff)
            if with_df:
                row.df = df_normal_cone(V, Z, c, proxy).df
                if _sign(row.df) != _sign(diff):
                    raise InvariantViolation(f"{name} 在 c={c} 处 sign(DF) 与 sign(μ - μ_c) 不一致")
            report.rows.append(row)
            logger.debug("[scan] %s c=%s μ-μ_c=%s", name, c, diff)
    return report
