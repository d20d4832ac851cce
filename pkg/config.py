# -*- coding: utf-8 -*-
"""内核参数配置（预算、插值窗口、检查开关都在这里改）。

用法：
- Settings 不可变；运行时生效的是 current_settings()
- 临时修改用 `with using(MAX_PAIRS=1000): ...`，退出 with 自动恢复
- run_job.py 的 --budget-pairs / --max-degree / --seed 就是走 using()
"""

from __future__ import annotations

import contextlib
import dataclasses
import logging
import sys
from contextvars import ContextVar
from dataclasses import dataclass
from typing import Iterator


@dataclass(frozen=True)
class Settings:
    # ========= 规模上限 =========
    # 每个环最多变量数（下划线开头的辅助块 w / s / t / z 不计入）
    MAX_VARIABLES: int = 16
    # 单个多项式总次数上限；Gröbner 中间结果同样受限
    MAX_DEGREE: int = 64

    # ========= Gröbner 预算 =========
    # 处理过的 S-对数上限
    MAX_PAIRS: int = 200_000
    # 饱和时 I : J 迭代次数上限
    SATURATION_CAP: int = 64

    # ========= Rees 退化 =========
    ORD_CAP: int = 32
    J_CAP: int = 16
    # Artin–Rees 检测到之后再多验证几步
    ARTIN_REES_MARGIN: int = 2
    # init(I) 是否用扩充生成元再算一遍做对照
    INIT_CROSSCHECK: bool = True

    # ========= Hilbert 插值 =========
    # 起点 k0 = q * max(HILBERT_START, ...)
    HILBERT_START: int = 4
    # 窗口不一致时 k0 翻倍重试的次数
    STABILIZATION_RETRIES: int = 3
    # H(k, m) 线性检测到之后额外断言的点数
    LINEAR_MARGIN: int = 2
    M_CAP: int = 256

    # ========= 稳定性 =========
    # DF 同时走 CM(χ) 路线交叉验证
    DF_CROSSCHECK: bool = True
    # 底曲线亏格，只支持 P¹
    BASE_GENUS: int = 0

    # ========= 随机 / 日志 =========
    SEED: int = 0
    LOG_LEVEL: str = "INFO"


_ACTIVE: ContextVar[Settings] = ContextVar("kernel_settings", default=Settings())


def current_settings() -> Settings:
    return _ACTIVE.get()


@contextlib.contextmanager
def using(**overrides) -> Iterator[Settings]:
    from errors import InputError

    known = {f.name for f in dataclasses.fields(Settings)}
    unknown = sorted(set(overrides) - known)
    if unknown:
        raise InputError(f"未知配置项: {', '.join(unknown)}")
    settings = dataclasses.replace(_ACTIVE.get(), **overrides)
    token = _ACTIVE.set(settings)
    try:
        yield settings
    finally:
        _ACTIVE.reset(token)


def setup_logging(level: str = "INFO") -> None:
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level.upper(), logging.INFO),
        format="[%(name)s] %(message)s",
    )
