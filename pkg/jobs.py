# -*- coding: utf-8 -*-
"""作业文件（JSON）解析 + 执行器：按 job.kind 分发到各个内核模块。

作业格式（一个文件一个对象，UTF-8）：
    {
      "ring":   {"variables": [...], "blocks": {"x": [...], "y": [...]}, "grading": [[...], ...]},
      "ideals": {"V": ["x0*x2 - x1^2"], "Z": ["x1", "x2"]},
      "job":    {"kind": "df", "params": {"variety": "V", "subscheme": "Z", "c": "1/2"}}
    }

规则：
- blocks 省略时全部变量归入 x 块；grading 省略时每个块一行、块内变量次数为 1
- 有理数一律写成字符串 "p/q" 或整数；不接受浮点数；不是最简分数时约分并记一条 notice
- 未知字段、未声明的理想名都是 schema 错误，错误位置用绝对 JSON pointer（如 /job/params/c）
- 报告里的数值全部是 "p/q" / "n" 字符串；同一个作业重跑，除 timing_ms 外逐字节相同
"""

from __future__ import annotations

import json
import logging
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import groebner
from config import current_settings
from errors import InputError, ParseError, SchemaError
from hilbert import HilbertPolynomial, hilbert_polynomial
from idealcalc import Ideal
from polyparse import format_polynomial, parse_polynomial
from polyring import Polynomial, RingSpec, format_rational
from reesdegen import (
    PowerCompatReport,
    convolution_power_check,
    family_invariants_hold,
    flatness_certificate,
    init_ideal,
    lemma41_check,
    power_compat,
    random_ideal_containing,
    tilde_components,
)
from stability import (
    FamilySpec,
    RationalParam,
    SubschemeSpec,
    VarietySpec,
    analyze_normal_cone,
    cm_degree,
    fit_ax_polynomials,
    prop33_check,
    slope_mu,
    slope_mu_c,
    slope_semistable_scan,
)

logger = logging.getLogger(__name__)

JOB_KINDS = (
    "slope", "mu-c", "df", "cm", "prop33", "tilde",
    "init", "power-compat", "lemma41", "hilbert", "scan",
)

# 作业类型 -> {参数名: (类型, 默认值)}；默认值为 REQUIRED 的参数必须给出
REQUIRED = object()

_PARAMS: Dict[str, Dict[str, Tuple[str, Any]]] = {
    "slope": {
        "variety": ("ideal", "V"), "d": ("int", 1), "check_smoothness": ("bool", False),
    },
    "mu-c": {
        "variety": ("ideal", "V"), "subscheme": ("ideal", "Z"), "c": ("rational", REQUIRED), "d": ("int", 1),
    },
    "df": {
        "variety": ("ideal", "V"), "subscheme": ("ideal", "Z"), "c": ("rational", REQUIRED), "d": ("int", 1),
        "proxy_grid": ("rationals", None), "epsilon": ("rational", None),
    },
    "cm": {
        "family": ("ideal", "X"), "twist": ("ideal", None), "c": ("rational", None), "d": ("int", 1),
    },
    "prop33": {
        "family": ("ideal", "X"), "subscheme": ("ideal", "Z"), "c": ("rational", REQUIRED),
        "m_max": ("int", 2), "d": ("int", 1),
    },
    "tilde": {
        "ideal": ("ideal", "I"), "center": ("ideal", "X0"), "ambient": ("ideal", None),
        "j_cap": ("int", None), "convolution_m": ("int", None),
    },
    "init": {
        "ideal": ("ideal", "I"), "center": ("ideal", "X0"), "ambient": ("ideal", None),
    },
    "power-compat": {
        "ideal": ("ideal", "I"), "center": ("ideal", "X0"), "ambient": ("ideal", None),
        "m_max": ("int", REQUIRED),
    },
    "lemma41": {
        "h": ("poly", REQUIRED), "ideal": ("ideal", None), "m_max": ("int", REQUIRED),
        "random_trials": ("int", 0),
    },
    "hilbert": {
        "ideal": ("ideal", "I"), "d": ("int", 1), "direction": ("ints", None), "saturate": ("bool", True),
    },
    "scan": {
        "variety": ("ideal", "V"), "subschemes": ("names", REQUIRED), "c_grid": ("rationals", REQUIRED),
        "d": ("int", 1), "with_df": ("bool", False),
    },
}

# 必须 >= 1 的整数参数；其余整数参数只要求 >= 0
_POSITIVE = {"d", "m_max", "j_cap", "convolution_m"}


# ========= 作业文档 =========

@dataclass
class JobDocument:
    ring: RingSpec
    ideals: Dict[str, Ideal]
    kind: str
    params: Dict[str, Any]
    raw: Dict[str, Any]
    notices: List[str] = field(default_factory=list)

    def ideal(self, name: str) -> Ideal:
        return self.ideals[name]


def _reject_unknown(obj: Dict[str, Any], allowed: Sequence[str], pointer: str) -> None:
    for key in obj:
        if key not in allowed:
            raise SchemaError(f"未知字段 {key!r}", f"{pointer}/{key}")


def _expect(value: Any, kind: type, what: str, pointer: str) -> Any:
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise SchemaError(f"{what}类型错误", pointer)
    return value


def _parse_ring(data: Any) -> RingSpec:
    _expect(data, dict, "ring ", "/ring")
    _reject_unknown(data, ("variables", "blocks", "grading"), "/ring")
    if "variables" not in data:
        raise SchemaError("缺少 variables", "/ring/variables")
    variables = _expect(data["variables"], list, "variables ", "/ring/variables")
    for i, v in enumerate(variables):
        if not isinstance(v, str) or not v.isidentifier():
            raise SchemaError(f"变量名不合法: {v!r}", f"/ring/variables/{i}")
    variables = tuple(variables)

    blocks_raw = data.get("blocks", {"x": list(variables)})
    _expect(blocks_raw, dict, "blocks ", "/ring/blocks")
    blocks = []
    for name, names in blocks_raw.items():
        pointer = f"/ring/blocks/{name}"
        if name.startswith("_"):
            raise SchemaError(f"块名不能以下划线开头: {name!r}", pointer)
        _expect(names, list, "块 ", pointer)
        for i, v in enumerate(names):
            _expect(v, str, "块成员 ", f"{pointer}/{i}")
        blocks.append((name, tuple(names)))

    if "grading" in data:
        grading_raw = _expect(data["grading"], list, "grading ", "/ring/grading")
        grading = []
        for r, row in enumerate(grading_raw):
            _expect(row, list, "分次行 ", f"/ring/grading/{r}")
            for c, x in enumerate(row):
                _expect(x, int, "分次次数 ", f"/ring/grading/{r}/{c}")
            grading.append(tuple(row))
    else:
        grading = [tuple(1 if v in names else 0 for v in variables) for _, names in blocks]

    try:
        ring = RingSpec(variables, tuple(grading), tuple(blocks))
        ring.check_size()
    except InputError as e:
        raise SchemaError(str(e), "/ring") from e
    return ring


def _parse_ideals(data: Any, ring: RingSpec) -> Dict[str, Ideal]:
    _expect(data, dict, "ideals ", "/ideals")
    ideals = {}
    for name, gens in data.items():
        _expect(gens, list, "理想 ", f"/ideals/{name}")
        polys = []
        for i, text in enumerate(gens):
            pointer = f"/ideals/{name}/{i}"
            _expect(text, str, "生成元 ", pointer)
            try:
                polys.append(parse_polynomial(text, ring))
            except ParseError as e:
                raise SchemaError(str(e), pointer) from e
        ideals[name] = Ideal(ring, polys)
    return ideals


def _parse_rational(value: Any, pointer: str, notices: List[str]) -> RationalParam:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise SchemaError("有理数必须写成字符串 \"p/q\" 或整数", pointer)
    try:
        c = RationalParam.parse(str(value))
    except InputError as e:
        raise SchemaError(str(e), pointer) from e
    if c.normalized:
        notices.append(f"{pointer}: {c.source} 已约分为 {c}")
    return c


def _convert(kind: str, value: Any, pointer: str, doc: JobDocument) -> Any:
    if kind == "ideal":
        _expect(value, str, "理想名 ", pointer)
        if value not in doc.ideals:
            raise SchemaError(f"未声明的理想 {value!r}", pointer)
        return value
    if kind == "names":
        _expect(value, list, "理想名列表 ", pointer)
        return [_convert("ideal", v, f"{pointer}/{i}", doc) for i, v in enumerate(value)]
    if kind == "int":
        return _expect(value, int, "整数 ", pointer)
    if kind == "ints":
        _expect(value, list, "整数列表 ", pointer)
        return [_expect(v, int, "整数 ", f"{pointer}/{i}") for i, v in enumerate(value)]
    if kind == "bool":
        return _expect(value, bool, "布尔值 ", pointer)
    if kind == "rational":
        return _parse_rational(value, pointer, doc.notices)
    if kind == "rationals":
        _expect(value, list, "有理数列表 ", pointer)
        return [_parse_rational(v, f"{pointer}/{i}", doc.notices) for i, v in enumerate(value)]
    if kind == "poly":
        _expect(value, str, "多项式 ", pointer)
        try:
            return parse_polynomial(value, doc.ring)
        except ParseError as e:
            raise SchemaError(str(e), pointer) from e
    raise AssertionError(kind)


def _parse_params(doc: JobDocument, raw: Any) -> Dict[str, Any]:
    spec = _PARAMS[doc.kind]
    _expect(raw, dict, "params ", "/job/params")
    _reject_unknown(raw, tuple(spec), "/job/params")

    params: Dict[str, Any] = {}
    for key, (kind, default) in spec.items():
        pointer = f"/job/params/{key}"
        if key in raw:
            value = _convert(kind, raw[key], pointer, doc)
        elif default is REQUIRED:
            raise SchemaError(f"{doc.kind} 作业缺少参数 {key}", pointer)
        elif kind == "ideal" and default is not None:
            if default not in doc.ideals:
                raise SchemaError(f"{doc.kind} 作业缺少参数 {key}（也没有名为 {default} 的理想）", pointer)
            value = default
        else:
            value = default
        if kind == "int" and value is not None:
            floor = 1 if key in _POSITIVE else 0
            if value < floor:
                raise SchemaError(f"{key} 必须 >= {floor}", pointer)
        params[key] = value
    return params


def parse_job(text: str) -> JobDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"JSON 语法错误（第 {e.lineno} 行第 {e.colno} 列）: {e.msg}", "/") from e
    _expect(data, dict, "作业文档", "/")
    _reject_unknown(data, ("ring", "ideals", "job"), "")
    for key in ("ring", "ideals", "job"):
        if key not in data:
            raise SchemaError(f"缺少 {key}", f"/{key}")

    ring = _parse_ring(data["ring"])
    ideals = _parse_ideals(data["ideals"], ring)

    job = _expect(data["job"], dict, "job ", "/job")
    _reject_unknown(job, ("kind", "params"), "/job")
    kind = job.get("kind")
    if kind not in JOB_KINDS:
        raise SchemaError(f"未知的作业类型 {kind!r}", "/job/kind")

    doc = JobDocument(ring, ideals, kind, {}, data)
    doc.params = _parse_params(doc, job.get("params", {}))
    return doc


def load_job(path: str) -> JobDocument:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise InputError(f"无法读取作业文件 {path}: {e.strerror}") from e
    return parse_job(text)


# ========= 报告 =========

def _q(x) -> str:
    return format_rational(x)


def _basis(I: Ideal) -> List[str]:
    return [format_polynomial(g) for g in I.basis()]


def _stabilization(hp: HilbertPolynomial) -> Dict[str, Any]:
    return {
        "k0": _q(hp.k0),
        "stride": _q(hp.stride),
        "samples": [[_q(k), _q(v)] for k, v in hp.samples],
    }


@dataclass
class ReportDocument:
    job: Dict[str, Any]
    results: Dict[str, Any] = field(default_factory=dict)
    certificates: Dict[str, Any] = field(default_factory=dict)
    verdict: Dict[str, Any] = field(default_factory=lambda: {"status": "ok"})
    notices: List[str] = field(default_factory=list)
    timing_ms: int = 0

    @property
    def kind(self) -> str:
        return self.job["job"]["kind"]

    @property
    def passed(self) -> bool:
        return self.verdict.get("status") != "fail"

    def as_dict(self) -> Dict[str, Any]:
        return {
            "job": self.job,
            "results": self.results,
            "certificates": self.certificates,
            "verdict": self.verdict,
            "notices": self.notices,
            "timing_ms": self.timing_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), ensure_ascii=False, sort_keys=True, indent=2)


def _render_value(value: Any) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(_render_value(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_render_value(v)}" for k, v in sorted(value.items())) + "}"
    if value is None:
        return "-"
    return str(value)


def render_text(report: ReportDocument) -> str:
    """从 JSON 报告派生的文本视图，不重新计算任何东西。"""
    lines = [f"=== {report.kind} ===", f"状态: {report.verdict.get('status')}"]
    for key, value in sorted(report.verdict.items()):
        if key != "status":
            lines.append(f"  {key}: {_render_value(value)}")
    lines.append("结果:")
    for key, value in sorted(report.results.items()):
        if isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"  {key}:")
            lines.extend(f"    {_render_value(v)}" for v in value)
        else:
            lines.append(f"  {key}: {_render_value(value)}")
    for notice in report.notices:
        lines.append(f"注意: {notice}")
    lines.append(f"用时 {report.timing_ms} ms")
    return "\n".join(lines)


# ========= 执行器 =========

@dataclass
class JobStats:
    ideals_declared: int = 0
    groebner_bases: int = 0
    elapsed_ms: int = 0


class JobExecutor:
    def __init__(self, job: JobDocument):
        self.job = job
        self.params = job.params
        self.stats = JobStats(ideals_declared=len(job.ideals))

    def run(self) -> ReportDocument:
        report = ReportDocument(job=self.job.raw, notices=list(self.job.notices))
        handler: Callable[[ReportDocument], None] = getattr(self, "_handle_" + self.job.kind.replace("-", "_"))
        logger.info("[job] 开始 %s", self.job.kind)
        memo_before = len(groebner._MEMO)
        start = time.perf_counter()
        handler(report)
        report.timing_ms = int(round((time.perf_counter() - start) * 1000))
        self.stats.elapsed_ms = report.timing_ms
        self.stats.groebner_bases = len(groebner._MEMO) - memo_before
        logger.info("[job] 完成 %s，状态 %s", self.job.kind, report.verdict.get("status"))
        return report

    # ---- 取参数 ----
    def _ideal(self, key: str) -> Optional[Ideal]:
        name = self.params.get(key)
        return None if name is None else self.job.ideal(name)

    def _c(self) -> Optional[Fraction]:
        c = self.params.get("c")
        return None if c is None else c.value

    def _variety(self) -> VarietySpec:
        return VarietySpec(self._ideal("variety"), self.params["d"], self.params.get("check_smoothness", False))

    def _subscheme(self, V: VarietySpec, name: str) -> SubschemeSpec:
        return SubschemeSpec(self.job.ideal(name), V.ideal, name=name)

    def _family(self) -> FamilySpec:
        return FamilySpec(self._ideal("family"), self.params["d"])

    # ---- 各作业 ----
    def _handle_slope(self, report: ReportDocument) -> None:
        V = self._variety()
        a0, a1 = V.coefficients()
        report.results.update({
            "n": _q(V.n),
            "a0": _q(a0),
            "a1": _q(a1),
            "mu": _q(slope_mu(V)),
            "hilbert_polynomial": str(V.hilbert),
            "formula": "a_1 / a_0",
        })
        if V.smoothness is not None:
            report.results["smoothness"] = V.smoothness.value
        report.certificates["hilbert"] = _stabilization(V.hilbert)

    def _handle_mu_c(self, report: ReportDocument) -> None:
        V = self._variety()
        Z = self._subscheme(V, self.params["subscheme"])
        c = self._c()
        fit = fit_ax_polynomials(V, Z, c)
        mu, mu_c = slope_mu(V), slope_mu_c(V, Z, c, fit)
        a0x, a1x = fit.as_strings()
        report.results.update({
            "c": _q(c),
            "mu": _q(mu),
            "mu_c": _q(mu_c),
            "difference": _q(mu - mu_c),
            "a0(x)": a0x,
            "a1(x)": a1x,
            "formula": "int_0^c (a_1(x) + a_0'(x)/2) dx / int_0^c a_0(x) dx",
        })
        report.certificates["x_samples"] = [[_q(x), _q(a0), _q(a1)] for x, a0, a1 in fit.samples]
        report.verdict["slope"] = mu >= mu_c

    def _handle_df(self, report: ReportDocument) -> None:
        V = self._variety()
        Z = self._subscheme(V, self.params["subscheme"])
        grid = [c.value for c in self.params["proxy_grid"] or []]
        epsilon = self.params["epsilon"].value if self.params["epsilon"] is not None else None
        analysis = analyze_normal_cone(V, Z, self._c(), grid or None, epsilon)
        df = analysis.df

        report.results.update({
            "c": _q(analysis.c),
            "df": _q(df.df),
            "formula": df.formula,
            "a0": _q(df.a0),
            "a1": _q(df.a1),
            "w0": _q(df.w0),
            "w1": _q(df.w1),
            "weight_polynomial": str(df.weight),
            "mu": _q(analysis.mu),
            "mu_c": _q(analysis.mu_c),
            "difference": _q(analysis.mu - analysis.mu_c),
            "a0(x)": analysis.fit.as_strings()[0],
            "a1(x)": analysis.fit.as_strings()[1],
        })
        if analysis.proxy is not None:
            report.results["seshadri_proxy"] = _q(analysis.proxy)
        if analysis.epsilon is not None:
            report.results["epsilon_asserted"] = _q(analysis.epsilon)
        report.certificates["weight"] = _stabilization(df.weight)
        if df.cm_route is not None:
            r = df.cm_route
            report.results.update({"b0": _q(r.b0), "b1": _q(r.b1), "cm": _q(r.cm)})
            report.certificates["chi"] = _stabilization(r.chi)
        report.verdict.update(analysis.verdicts)

    def _handle_cm(self, report: ReportDocument) -> None:
        F = self._family()
        twist = self._ideal("twist")
        c = self._c()
        if twist is not None and c is None:
            raise SchemaError("给了 twist 就必须给 c", "/job/params/c")
        result = cm_degree(F, twist, c)
        report.results.update({
            "cm": _q(result.cm),
            "formula": result.formula,
            "a0": _q(result.a0),
            "a1": _q(result.a1),
            "b0": _q(result.b0),
            "b1": _q(result.b1),
            "chi": str(result.chi),
        })
        report.certificates["chi"] = _stabilization(result.chi)
        report.certificates["linear_starts"] = {_q(k): _q(m) for k, m in sorted(result.linear_starts.items())}
        report.certificates["fiber_polynomials"] = {
            f"({a}:{b})": str(hp) for (a, b), hp in F.fiber_polynomials.items()
        }

    def _handle_prop33(self, report: ReportDocument) -> None:
        F = self._family()
        Z = self._ideal("subscheme")
        rep = prop33_check(F, Z, self._c(), self.params["m_max"])
        report.certificates["charts"] = [_compat_certificate(rep_, chart) for chart, rep_ in rep.charts]
        report.verdict["status"] = "pass" if rep.passed else "fail"
        report.verdict["power_compat"] = rep.compat_passed
        if not rep.compat_passed:
            report.results["identity_asserted"] = False
            return
        report.results.update({
            "identity_asserted": True,
            "formula": rep.formula,
            "cm_T": _q(rep.cm_T),
            "cm_B": _q(rep.cm_B.cm),
            "cm_X": _q(rep.cm_X.cm),
            "difference": _q(rep.cm_T - (rep.cm_B.cm - rep.cm_X.cm)),
            "fiber_smoothness": rep.fiber_smoothness.value,
            "chain": rep.chain,
            "mu": _q(rep.mu),
            "mu_c": None if rep.mu_c is None else _q(rep.mu_c),
        })
        report.verdict["coefficient_identity"] = rep.coefficient_identity
        report.verdict["a0_positive"] = rep.a0_positive
        report.verdict["cm_minimized"] = rep.cm_minimized
        report.verdict["df_nonnegative"] = rep.df_nonnegative
        if rep.chain_holds is not None:
            report.verdict["chain"] = rep.chain_holds
        if rep.df is not None and rep.df.route_equality is not None:
            report.verdict["route_equality"] = rep.df.route_equality

    def _handle_tilde(self, report: ReportDocument) -> None:
        family = tilde_components(
            self._ideal("ideal"), self._ideal("center"), self.params["j_cap"], self._ideal("ambient"),
        )
        report.results.update({
            "components": [_basis(C) for C in family.components],
            "stabilized": family.stabilized,
            "stabilization_index": None if family.stabilization_index is None else _q(family.stabilization_index),
            "family": family.describe(),
        })
        report.certificates["verification"] = [_basis(C) for C in family.verification]
        report.verdict["family_invariants"] = family_invariants_hold(family)
        flat = flatness_certificate(family)
        if flat is None:
            report.notices.append("中心不是主理想或分量未稳定，跳过平坦性证书")
        else:
            report.verdict["flatness"] = flat
        m = self.params["convolution_m"]
        if m is not None:
            bad = convolution_power_check(family, m, len(family.components))
            report.verdict["convolution_power"] = bad is None
            if bad is not None:
                report.results["convolution_first_mismatch"] = _q(bad)

    def _handle_init(self, report: ReportDocument) -> None:
        base_ring = self.job.ring
        init = init_ideal(self._ideal("ideal"), self._ideal("center"), self._ideal("ambient"))
        report.results.update({
            "variable": init.s,
            "local_equation": format_polynomial(init.local_equation),
            "generators": [format_polynomial(g) for g in init.generators()],
            "relations": _basis(init.relations),
            "degree_zero_part": _basis(init.degree_zero_part(base_ring)),
            "stabilization_index": _q(init.stabilization_index),
        })

    def _handle_power_compat(self, report: ReportDocument) -> None:
        rep = power_compat(self._ideal("ideal"), self._ideal("center"), self.params["m_max"], self._ideal("ambient"))
        _fill_compat(report, rep)

    def _handle_lemma41(self, report: ReportDocument) -> None:
        h: Polynomial = self.params["h"]
        m_max = self.params["m_max"]
        trials: List[Tuple[str, Ideal]] = []
        given = self._ideal("ideal")
        if given is not None:
            trials.append((self.params["ideal"], given))
        count = self.params["random_trials"]
        if count:
            rng = random.Random(current_settings().SEED)
            for i in range(count):
                trials.append((f"random#{i}", random_ideal_containing(h, self.job.ring, rng)))
        if not trials:
            raise SchemaError("lemma41 作业至少要给 ideal 或 random_trials", "/job/params")

        report.results["h"] = format_polynomial(h)
        report.results["trials"] = _q(len(trials))
        report.results["hypotheses_verified"] = False
        for label, I in trials:
            rep = lemma41_check(h, I, m_max)
            if not rep.passed:
                report.results["failing_trial"] = label
                report.results["failing_ideal"] = _basis(I)
                _fill_compat(report, rep)
                return
        report.verdict["status"] = "pass"
        report.results["passed"] = True

    def _handle_hilbert(self, report: ReportDocument) -> None:
        I = self._ideal("ideal")
        direction = self.params["direction"]
        if direction is not None and len(direction) != len(I.ring.grading):
            raise SchemaError("direction 的长度必须等于分次行数", "/job/params/direction")
        hp = hilbert_polynomial(I, self.params["d"], direction=direction, saturate=self.params["saturate"])
        report.results.update({
            "polynomial": str(hp),
            "degree": _q(hp.degree),
            "coefficients": [_q(c) for c in hp.coefficients],
        })
        report.certificates["hilbert"] = _stabilization(hp)

    def _handle_scan(self, report: ReportDocument) -> None:
        V = self._variety()
        subschemes = [(name, self._subscheme(V, name)) for name in self.params["subschemes"]]
        grid = [c.value for c in self.params["c_grid"]]
        scan = slope_semistable_scan(V, subschemes, grid, self.params["with_df"])
        rows = []
        for row in scan.rows:
            entry = {"subscheme": row.name, "c": _q(row.c), "verdict": row.verdict}
            if row.difference is not None:
                entry.update({"mu_c": _q(row.mu_c), "difference": _q(row.difference)})
            if row.df is not None:
                entry["df"] = _q(row.df)
            rows.append(entry)
        report.results.update({
            "mu": _q(slope_mu(V)) if subschemes else None,
            "rows": rows,
            "proxies": {name: None if p is None else _q(p) for name, p in scan.proxies.items()},
            "fits": {name: list(fit.as_strings()) for name, fit in scan.fits.items()},
        })
        report.verdict["overall"] = scan.verdict


def _compat_certificate(rep: PowerCompatReport, chart: Optional[str] = None) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "passed": rep.passed,
        "m_max": _q(rep.m_max),
        "checked": _q(len(rep.checked)),
        "support_ok": rep.support_ok,
    }
    if chart is not None:
        out["chart"] = chart
    if not rep.passed:
        out["failure"] = [_q(rep.failure[0]), _q(rep.failure[1])]
        out["certificate"] = rep.certificate_text
        out["direction"] = rep.direction
    return out


def _fill_compat(report: ReportDocument, rep: PowerCompatReport) -> None:
    report.verdict["status"] = "pass" if rep.passed else "fail"
    report.results["passed"] = rep.passed
    if not rep.passed:
        report.results["failure"] = [_q(rep.failure[0]), _q(rep.failure[1])]
        report.results["certificate"] = rep.certificate_text
    report.certificates["power_compat"] = _compat_certificate(rep)


def run_job(job: JobDocument) -> ReportDocument:
    return JobExecutor(job).run()
