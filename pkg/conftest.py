# -*- coding: utf-8 -*-
"""共享的测试环和理想构造。"""

import pytest
from hypothesis import settings

from idealcalc import Ideal
from polyparse import parse_polynomial
from polyring import RingSpec

# 固定种子，重跑结果一致
settings.register_profile("kernel", derandomize=True, deadline=None, max_examples=25)
settings.load_profile("kernel")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: 端到端的大计算，CI 里可以用 -m 'not slow' 跳过")


def build_ideal(ring: RingSpec, *texts: str) -> Ideal:
    return Ideal(ring, [parse_polynomial(t, ring) for t in texts])


@pytest.fixture
def ideal():
    return build_ideal


@pytest.fixture
def qxy():
    return RingSpec.standard(("x", "y"))


@pytest.fixture
def qxyz():
    return RingSpec.standard(("x", "y", "z"))


@pytest.fixture
def p1():
    return RingSpec.standard(("x0", "x1"))


@pytest.fixture
def p2():
    return RingSpec.standard(("x0", "x1", "x2"))


@pytest.fixture
def p1p1():
    return RingSpec.bigraded(("x0", "x1"), ("y0", "y1"))


@pytest.fixture
def p2p1():
    return RingSpec.bigraded(("x0", "x1", "x2"), ("y0", "y1"))
