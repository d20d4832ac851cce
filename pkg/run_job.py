#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""命令行入口（只做"读作业 + 调执行器 + 输出报告"）。

运行方式：
    python3 run_job.py --job jobs/df_p1_point.json
    python3 run_job.py --job jobs/power_compat_xy.json --text

退出码：
    0 成功 / 检查通过    2 输入或 schema 错误    3 超出计算预算
    4 检查失败（恒等式不成立 / 找到反例）       5 内部不变量被破坏
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from config import current_settings, setup_logging, using
from errors import EXIT_CHECK_FAILED, EXIT_OK, KernelError, exit_code_for
from jobs import JobExecutor, load_job, render_text

logger = logging.getLogger("run_job")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="稳定性不变量计算内核")
    parser.add_argument("--job", required=True, help="作业文件（JSON）")
    fmt = parser.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="output", action="store_const", const="json", help="输出 JSON 报告（默认）")
    fmt.add_argument("--text", dest="output", action="store_const", const="text", help="输出文本报告")
    parser.add_argument("--budget-pairs", type=int, default=None, help="Gröbner S-对数上限")
    parser.add_argument("--max-degree", type=int, default=None, help="多项式次数上限")
    parser.add_argument("--seed", type=int, default=None, help="随机作业的种子")
    parser.add_argument("--log-level", default=None, help="日志级别（默认取 Settings.LOG_LEVEL）")
    parser.set_defaults(output="json")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    overrides = {}
    if args.budget_pairs is not None:
        overrides["MAX_PAIRS"] = args.budget_pairs
    if args.max_degree is not None:
        overrides["MAX_DEGREE"] = args.max_degree
    if args.seed is not None:
        overrides["SEED"] = args.seed

    try:
        with using(**overrides):
            setup_logging(args.log_level or current_settings().LOG_LEVEL)

            # 1) 读取并校验作业
            job = load_job(args.job)
            for notice in job.notices:
                logger.warning("[job] %s", notice)

            # 2) 执行
            executor = JobExecutor(job)
            report = executor.run()
    except KernelError as e:
        print(f"错误: {e}", file=sys.stderr)
        return exit_code_for(e)

    # 3) 输出
    if args.output == "text":
        print(render_text(report))
    else:
        print(report.to_json())
    logger.info("[job] %s", executor.stats)

    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
