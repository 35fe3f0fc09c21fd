"""
적분 예산 및 가중 표본 모듈
===========================

사전분포에 대한 모든 적분(크기, 신용도, 사전우도, 베이지안 평균)은 하나의
가중 표본(WeightedSample) 위의 가중 합으로 계산한다.

표본 생성 방식 2가지:
1. Monte Carlo (method='mc')
   - 평탄(primitive) 제안분포에서 균일 추출 → 가중치 = 사전밀도 / 제안밀도
   - 시드 → SeedSequence.spawn() 으로 청크별 하위 시드를 결정론적으로 생성
   - 청크 처리 순서/스레드 수와 무관하게 같은 결과
2. 결정론적 사분(method='quadrature')
   - coin: u = −cos θ 치환 후 θ에 대한 Gauss–Legendre
   - 원판: s = sin θ 치환 후 (θ, φ) 중점 규칙 텐서곱
   - 치환으로 Jeffreys 밀도의 경계 발산이 유계 피적분함수가 됨
"""

import math
import logging
from dataclasses import dataclass, field
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Tuple

import numpy as np

from config.numerics import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_CHUNK_SIZE,
    DEFAULT_WORKERS,
    QUADRATURE_ANGLES,
    QUADRATURE_RADIAL,
)
from .errors import UsageError, IntegrationError
from .pom import Pom, from_polar

logger = logging.getLogger(__name__)

DensityFn = Callable[[np.ndarray], np.ndarray]

# 비유한 가중치 재추출 최대 반복
MAX_REDRAW_ROUNDS = 100


@dataclass(frozen=True)
class IntegrationBudget:
    """적분 예산: 방법, 샘플 수, 시드, 청크/스레드, 사분 해상도"""
    method: str = 'mc'
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    chunk_size: int = DEFAULT_CHUNK_SIZE
    workers: int = DEFAULT_WORKERS
    angles: int = QUADRATURE_ANGLES
    radial: int = QUADRATURE_RADIAL

    def __post_init__(self):
        if self.method not in ('mc', 'quadrature'):
            raise UsageError(f"budget.method 는 'mc' 또는 'quadrature' 여야 합니다: {self.method}")
        for name in ('samples', 'chunk_size', 'workers', 'angles', 'radial'):
            if getattr(self, name) < 1:
                raise UsageError(f"budget.{name} 는 양수여야 합니다")


@dataclass(frozen=True)
class WeightedSample:
    """
    사전분포 가중 표본

    points: (n, d) 재구성 좌표
    weights: (n,) 사전밀도/제안밀도 비 (MC) 또는 사분 질량 (quadrature)
    deterministic: 사분 노드이면 True (표준오차 0으로 보고)
    """
    points: np.ndarray
    weights: np.ndarray
    deterministic: bool = False
    redrawn: int = 0
    grid_shape: Optional[Tuple[int, int]] = field(default=None, compare=False)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    def combined(self, extra: Optional[np.ndarray] = None) -> np.ndarray:
        return self.weights if extra is None else self.weights * extra

    def effective_size(self, extra: Optional[np.ndarray] = None) -> float:
        """Kish 유효 샘플 수 (Σa)²/Σa²"""
        a = self.combined(extra)
        denom = float(np.sum(a ** 2))
        return float(np.sum(a) ** 2 / denom) if denom > 0 else 0.0

    def expectation(self, values: np.ndarray, extra: Optional[np.ndarray] = None) -> Tuple[float, float]:
        """
        자기정규화 가중 평균과 표준오차 (delta method)

        μ = Σ a f / Σ a,  se² = Σ a² (f−μ)² / (Σ a)²
        """
        a = self.combined(extra)
        total = float(np.sum(a))
        if not math.isfinite(total) or total <= 0.0:
            raise IntegrationError(f"가중치 합이 유효하지 않습니다: {total}")
        values = np.asarray(values, dtype=float)
        mean = float(np.sum(a * values) / total)
        if self.deterministic:
            return mean, 0.0
        se = float(np.sqrt(np.sum(a ** 2 * (values - mean) ** 2)) / total)
        return mean, se


# ============================================================
# 청크 단위 시드 분할
# ============================================================

def chunk_plan(count: int, chunk_size: int) -> List[int]:
    n_chunks = max(1, math.ceil(count / chunk_size))
    sizes = [chunk_size] * (n_chunks - 1)
    sizes.append(count - chunk_size * (n_chunks - 1))
    return sizes


def spawn_generators(seed: int, n: int) -> List[np.random.Generator]:
    """seed → n개의 독립 Generator (청크 i 는 항상 i번째 자식 시드)"""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(n)]


def draw_flat(pom: Pom, rng: np.random.Generator, size: int) -> np.ndarray:
    """평탄 제안분포 추출 (원판: s²·φ 균일, 선분: u 균일)"""
    if pom.is_disk:
        s = np.sqrt(rng.random(size))
        phi = 2.0 * math.pi * rng.random(size)
        return from_polar(s, phi)
    return (2.0 * rng.random(size) - 1.0)[:, None]


def sample_weighted(pom: Pom, density: DensityFn, count: int, budget: IntegrationBudget,
                    norm: float = 1.0) -> WeightedSample:
    """
    평탄 제안분포로부터 중요도 표본 추출

    가중치 = area · density(pt) / norm. 비유한 가중치(특이점 정확히 추출)는
    같은 청크 Generator 로 재추출하고 그 개수를 기록한다.
    """
    if count < 1:
        raise UsageError("샘플 수는 1 이상이어야 합니다")

    sizes = chunk_plan(count, budget.chunk_size)
    rngs = spawn_generators(budget.seed, len(sizes))
    scale = pom.space_area / norm

    def run_chunk(job):
        rng, size = job
        pts = draw_flat(pom, rng, size)
        w = scale * density(pts)
        redrawn = 0
        for _ in range(MAX_REDRAW_ROUNDS):
            bad = ~np.isfinite(w)
            if not bad.any():
                break
            n_bad = int(bad.sum())
            redrawn += n_bad
            pts[bad] = draw_flat(pom, rng, n_bad)
            w[bad] = scale * density(pts[bad])
        else:
            raise IntegrationError("비유한 가중치 재추출이 수렴하지 않습니다")
        return pts, w, redrawn

    jobs = list(zip(rngs, sizes))
    if budget.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=budget.workers) as executor:
            results = list(executor.map(run_chunk, jobs))
    else:
        results = [run_chunk(job) for job in jobs]

    points = np.concatenate([r[0] for r in results])
    weights = np.concatenate([r[1] for r in results])
    redrawn = sum(r[2] for r in results)
    if redrawn:
        logger.warning(f"비유한 가중치 {redrawn}개를 재추출했습니다")

    return WeightedSample(points=points, weights=weights, redrawn=redrawn)


# ============================================================
# 결정론적 사분 노드
# ============================================================

def quadrature_grid(pom: Pom, density: DensityFn, radial: int, angles: int,
                    norm: float = 1.0) -> WeightedSample:
    """
    사분 노드 집합 (가중치 = 노드가 대표하는 사전 질량)

    - coin: u = −cos θ, θ∈[0,π] Gauss–Legendre (radial 노드)
    - 원판: s = sin θ, θ∈[0,π/2] × φ∈[0,2π) 중점 규칙 (radial × angles 셀)
      dx dy = s cos θ dθ dφ
    원판 노드는 (θ 인덱스, φ 인덱스) 순서의 C-order 이며 grid_shape 에 기록된다.
    """
    if not pom.is_disk:
        nodes, gl_w = np.polynomial.legendre.leggauss(radial)
        theta = 0.5 * math.pi * (nodes + 1.0)
        u = -np.cos(theta)
        pts = u[:, None]
        w = density(pts) * np.sin(theta) * gl_w * 0.5 * math.pi / norm
        return WeightedSample(points=pts, weights=w, deterministic=True)

    d_theta = 0.5 * math.pi / radial
    d_phi = 2.0 * math.pi / angles
    theta = (np.arange(radial) + 0.5) * d_theta
    phi = (np.arange(angles) + 0.5) * d_phi
    tt, pp = np.meshgrid(theta, phi, indexing='ij')
    s = np.sin(tt)
    pts = from_polar(s, pp).reshape(-1, 2)
    jac = (s * np.cos(tt)).reshape(-1) * d_theta * d_phi
    w = density(pts) * jac / norm

    if not np.all(np.isfinite(w)):
        raise IntegrationError("사분 노드에서 비유한 밀도가 발생했습니다")
    return WeightedSample(points=pts, weights=w, deterministic=True, grid_shape=(radial, angles))
