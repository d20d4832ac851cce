# -*- coding: utf-8 -*-
"""内核异常。

规则：
- 每个异常类带 exit_code，run_job.py 直接用它做进程退出码
- 输入/格式问题 -> 2；计算预算耗尽 -> 3；内部不变量被破坏 -> 5
- 检查类 job（prop33 / power-compat / lemma41）失败不抛异常，报告里 passed=false，退出码 4
"""

from __future__ import annotations

from typing import Optional


EXIT_OK = 0
EXIT_CHECK_FAILED = 4


class KernelError(Exception):
    exit_code = 1


class InputError(KernelError, ValueError):
    exit_code = 2


class RingMismatch(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"第 {line} 行第 {column} 列：{message}")
        self.line = line
        self.column = column


class SchemaError(InputError):
    def __init__(self, message: str, pointer: str):
        super().__init__(f"schema error at {pointer}: {message}")
        self.pointer = pointer


class DegenerateError(InputError):
    pass


class FlatnessError(InputError):
    pass


class OrdCapExceeded(InputError):
    pass


class BudgetExceeded(KernelError):
    exit_code = 3


class StabilizationError(BudgetExceeded):
    pass


class InvariantViolation(KernelError, AssertionError):
    exit_code = 5


def exit_code_for(exc: Optional[BaseException]) -> int:
    if exc is None:
        return EXIT_OK
    return getattr(exc, "exit_code", 1)
