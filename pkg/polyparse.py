# -*- coding: utf-8 -*-
"""多项式输入语言：递归下降解析 + 打印。

文法（空白无意义，并列书写不是乘法）：

    expr   := ("+"|"-")? term (("+"|"-") term)*
    term   := factor (("*" factor) | ("/" natural))*
    factor := atom ("^" natural)?
    atom   := natural | variable | "(" expr ")"

- 开头的正负号和 "/ natural" 是为了让 format_polynomial 的输出（负首项、有理系数）能原样读回
- 出错位置报告为 1 起算的行号、列号；输入末尾出错时列号指向最后一个字符之后
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from sympy.polys.orderings import MonomialOrder

from config import current_settings
from errors import ParseError
from polyring import Polynomial, RingSpec, from_fraction, to_fraction


_RE_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()])"
)


@dataclass(frozen=True)
class Token:
    kind: str  # num / name / op / eof
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _RE_TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"无法识别的字符 {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            tokens.append(Token(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, ring: RingSpec):
        self.ring = ring
        self.poly_ring = ring.poly_ring
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def _error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def _accept(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == op:
            self.i += 1
            return True
        return False

    def _natural(self, what: str) -> int:
        tok = self.tok
        if tok.kind != "num":
            raise self._error(f"{what}必须是自然数")
        self.i += 1
        return int(tok.text)

    def parse(self) -> Polynomial:
        if self.tok.kind == "eof":
            raise self._error("输入为空")
        result = self.expr()
        if self.tok.kind != "eof":
            raise self._error(f"多余的记号 {self.tok.text!r}")
        return result

    def expr(self) -> Polynomial:
        negative = self._accept("-")
        if not negative:
            self._accept("+")
        result = self.term()
        if negative:
            result = -result
        while True:
            if self._accept("+"):
                result = result + self.term()
            elif self._accept("-"):
                result = result - self.term()
            else:
                return result

    def term(self) -> Polynomial:
        result = self.factor()
        while True:
            if self._accept("*"):
                result = result * self.factor()
            elif self._accept("/"):
                tok = self.tok
                q = self._natural("除数")
                if q == 0:
                    raise self._error("除数不能为 0", tok)
                result = result * from_fraction(Fraction(1, q))
            else:
                return result

    def factor(self) -> Polynomial:
        base = self.atom()
        if self._accept("^"):
            tok = self.tok
            e = self._natural("指数")
            if e > current_settings().MAX_DEGREE and not base.is_ground:
                raise self._error("指数超过次数上限", tok)
            return base ** e
        return base

    def atom(self) -> Polynomial:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return self.poly_ring.ground_new(int(tok.text))
        if tok.kind == "name":
            if tok.text not in self.ring.variables:
                raise self._error(f"未知变量 {tok.text}")
            self.i += 1
            return self.ring.gen(tok.text)
        if self._accept("("):
            inner = self.expr()
            if not self._accept(")"):
                raise self._error("缺少右括号")
            return inner
        if tok.kind == "eof":
            raise self._error("表达式不完整")
        raise self._error(f"意外的记号 {tok.text!r}")


def parse_polynomial(text: str, ring: RingSpec) -> Polynomial:
    f = _Parser(text, ring).parse()
    return ring.check_degree(f)


def _format_monomial(names, monom) -> str:
    parts = []
    for name, e in zip(names, monom):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_polynomial(f: Polynomial, order: Optional[MonomialOrder] = None) -> str:
    """按单项式序从大到小打印；系数写成 "p/q" 或整数，能被 parse_polynomial 读回。"""
    if not f:
        return "0"
    names = [str(s) for s in f.ring.symbols]
    pieces = []
    for monom, coeff in f.terms(order):
        c = to_fraction(coeff)
        sign = "-" if c < 0 else "+"
        c = abs(c)
        mono = _format_monomial(names, monom)
        if not mono:
            body = str(c.numerator)
        elif c.numerator == 1:
            body = mono
        else:
            body = f"{c.numerator}*{mono}"
        if c.denominator != 1:
            body = f"{body}/{c.denominator}"
        pieces.append((sign, body))

    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out
