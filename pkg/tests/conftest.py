"""
공용 테스트 픽스처
==================

- 저장소 루트를 sys.path 에 추가 (cli.py / server.py 와 같은 방식)
- 측정 모델 3종, 작은 Monte Carlo / 사분 예산
"""

import os
import sys
import math

import numpy as np
import pytest
from hypothesis import strategies as st

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, BASE_DIR)

from pipeline.pom import get_pom  # noqa: E402
from pipeline.sampling import IntegrationBudget  # noqa: E402

SEED = 20130


@pytest.fixture
def coin():
    return get_pom('coin')


@pytest.fixture
def crosshair4():
    return get_pom('crosshair4')


@pytest.fixture
def trine3():
    return get_pom('trine3')


@pytest.fixture
def mc_budget():
    return IntegrationBudget(method='mc', samples=100_000, seed=SEED)


@pytest.fixture
def quad_budget():
    return IntegrationBudget(method='quadrature', radial=512, angles=256)


def disk_points(max_radius: float = 0.999):
    """원판 내부 점 전략 (반경, 각도)"""
    return st.tuples(
        st.floats(0.0, max_radius, allow_nan=False),
        st.floats(0.0, 2.0 * math.pi, allow_nan=False),
    ).map(lambda sa: np.array([sa[0] * math.cos(sa[1]), sa[0] * math.sin(sa[1])]))
