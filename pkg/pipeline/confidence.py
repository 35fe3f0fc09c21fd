"""
신뢰수준 평가 모듈 (coin 전용)
==============================

영역 집합 𝐂 = {C_D}: 가능한 모든 데이터 D=(n₁, N−n₁) 마다 p₁ 의 닫힌 구간 합집합 하나

    coverage(p₁) = Σ_D binom(N, n₁) p₁^{n₁}(1−p₁)^{N−n₁} · [p₁ ∈ C_D]
    γ = min_{p₁} coverage(p₁)

γ 는 균일 격자 + 모든 구간 끝점(± ε) 위의 최솟값으로 계산한다.
"""

import json
import logging
from dataclasses import dataclass
from typing import Dict, Tuple, Union

import numpy as np
from scipy.stats import binom

from .errors import UsageError
from .pom import Counts
from .oracle import coin_find_lambda, coin_region

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]

# 끝점 주변 불연속 포착용 오프셋
ENDPOINT_EPS = 1e-9
MIN_GRID = 1000


@dataclass(frozen=True)
class RegionSet:
    N: int
    regions: Dict[int, Tuple[Interval, ...]]

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 0:
            raise UsageError(f"N 은 음이 아닌 정수여야 합니다: {self.N}")
        if set(self.regions) != set(range(self.N + 1)):
            raise UsageError(f"n₁ = 0..{self.N} 각각에 영역이 하나씩 있어야 합니다")
        for n1, intervals in self.regions.items():
            prev_end = -np.inf
            for a, b in intervals:
                if not (0.0 <= a <= b <= 1.0):
                    raise UsageError(f"n₁={n1} 의 구간 [{a}, {b}] 이 [0, 1] 안의 정렬된 구간이 아닙니다")
                if a < prev_end:
                    raise UsageError(f"n₁={n1} 의 구간들이 정렬되어 있지 않습니다")
                prev_end = b

    @classmethod
    def from_json(cls, doc: Union[str, dict]) -> 'RegionSet':
        """{"N": int, "regions": {"n1": [[a, b], …], …}}"""
        try:
            if isinstance(doc, str):
                doc = json.loads(doc)
            regions = {
                int(k): tuple((float(a), float(b)) for a, b in v)
                for k, v in doc['regions'].items()
            }
            return cls(int(doc['N']), regions)
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, UsageError):
                raise
            raise UsageError(f"영역 집합 JSON 형식 오류: {e}") from e

    def to_dict(self) -> dict:
        return {
            'N': self.N,
            'regions': {str(k): [list(iv) for iv in self.regions[k]] for k in sorted(self.regions)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def endpoints(self) -> np.ndarray:
        pts = [v for ivs in self.regions.values() for iv in ivs for v in iv]
        return np.asarray(pts, dtype=float)

    def contains(self, p1: np.ndarray) -> np.ndarray:
        """(N+1, P) 포함 행렬"""
        p1 = np.asarray(p1, dtype=float)
        mask = np.zeros((self.N + 1, len(p1)), dtype=bool)
        for n1, intervals in self.regions.items():
            for a, b in intervals:
                mask[n1] |= (p1 >= a) & (p1 <= b)
        return mask


def whole_space(N: int) -> RegionSet:
    return RegionSet(N, {n: ((0.0, 1.0),) for n in range(N + 1)})


def empty_set(N: int) -> RegionSet:
    return RegionSet(N, {n: () for n in range(N + 1)})


def coverage(region_set: RegionSet, p1) -> np.ndarray:
    """
    각 p₁ 에서 데이터 색인 영역이 참 값을 포함할 확률

    모든 영역이 p₁ 을 포함하면 정확히 1, 어느 영역도 포함하지 않으면 정확히 0.
    """
    p1 = np.atleast_1d(np.asarray(p1, dtype=float))
    if np.any(p1 < 0.0) or np.any(p1 > 1.0):
        raise UsageError("p₁ 은 [0, 1] 범위여야 합니다")
    mask = region_set.contains(p1)
    n1 = np.arange(region_set.N + 1)[:, None]
    pmf = binom.pmf(n1, region_set.N, p1[None, :])
    cov = np.sum(np.where(mask, pmf, 0.0), axis=0)
    cov[mask.all(axis=0)] = 1.0
    cov[~mask.any(axis=0)] = 0.0
    return cov


def confidence_level(region_set: RegionSet, grid: int = 10_000) -> float:
    """γ = min coverage (격자 ∪ 끝점 ± ε)"""
    if grid < MIN_GRID:
        raise UsageError(f"grid 는 {MIN_GRID} 이상이어야 합니다: {grid}")
    ends = region_set.endpoints()
    probe = np.concatenate([
        np.linspace(0.0, 1.0, grid + 1),
        ends,
        ends - ENDPOINT_EPS,
        ends + ENDPOINT_EPS,
    ])
    probe = np.unique(np.clip(probe, 0.0, 1.0))
    gamma = float(np.min(coverage(region_set, probe)))
    logger.info(f"신뢰수준 γ={gamma:.6f} (N={region_set.N}, 평가점 {len(probe)}개)")
    return gamma


def scr_interval_set(N: int, prior, credibility: float) -> RegionSet:
    """각 데이터의 SCR 구간 (신용도 c) 으로 이루어진 영역 집합"""
    if not 0.0 < credibility < 1.0:
        raise UsageError(f"신용도는 (0, 1) 범위여야 합니다: {credibility}")
    if N < 1:
        raise UsageError("SCR 집합에는 N ≥ 1 이 필요합니다")
    regions: Dict[int, Tuple[Interval, ...]] = {}
    for n1 in range(N + 1):
        counts = Counts((n1, N - n1))
        lam = coin_find_lambda(prior, counts, credibility, mode='credibility')
        regions[n1] = (coin_region(prior, counts, lam),)
    return RegionSet(N, regions)
