"""
coin 기준값 모듈 - 닫힌 형태 곡선과 1D 적응 사분
================================================

counts (1,1) 닫힌 형태:
- primitive: s = √(1−λ),               c = ½(2+λ)√(1−λ)
- Jeffreys:  s = 1 − (2/π)sin⁻¹√λ,     c = s + (2/π)√(λ(1−λ))

임의 counts 는 p₁ = sin²θ (θ∈[0, π/2]) 치환 후 scipy.integrate.quad 로 적분한다.
BLR 구간 끝점은 MLE 양쪽에서 brentq 로 찾는다 (로그우도의 오목성).
치환 후 사전밀도:
- primitive: sin 2θ
- Jeffreys:  2/π
- hedged:    (4/π) sin² 2θ
"""

import math
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import integrate, optimize

from .errors import UsageError
from .pom import Counts
from .prior import PriorKind, PriorSpec
from .blr import CURVE_COLUMNS

logger = logging.getLogger(__name__)

HALF_PI = 0.5 * math.pi
ROOT_XTOL = 1e-12
QUAD_TOL = 1e-12

_THETA_DENSITY = {
    PriorKind.PRIMITIVE: lambda t: np.sin(2.0 * t),
    PriorKind.JEFFREYS_COIN: lambda t: np.full_like(np.asarray(t, dtype=float), 2.0 / math.pi),
    PriorKind.HEDGED_COIN: lambda t: (4.0 / math.pi) * np.sin(2.0 * t) ** 2,
}


def _kind(prior) -> PriorKind:
    kind = prior.kind if isinstance(prior, PriorSpec) else {
        'primitive': PriorKind.PRIMITIVE,
        'jeffreys': PriorKind.JEFFREYS_COIN,
        'hedged': PriorKind.HEDGED_COIN,
    }.get(prior)
    if kind not in _THETA_DENSITY:
        raise UsageError(f"coin 기준값은 primitive / jeffreys / hedged 사전분포만 지원합니다: {prior}")
    return kind


def coin_closed_form(prior, lam) -> Tuple[np.ndarray, np.ndarray]:
    """counts (1,1) 의 (s, c) 닫힌 형태"""
    kind = _kind(prior)
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0.0) or np.any(lam > 1.0):
        raise UsageError("λ 는 [0, 1] 범위여야 합니다")
    root = np.sqrt(1.0 - lam)
    if kind is PriorKind.PRIMITIVE:
        return root, 0.5 * (2.0 + lam) * root
    if kind is PriorKind.JEFFREYS_COIN:
        s = 1.0 - (2.0 / math.pi) * np.arcsin(np.sqrt(lam))
        return s, s + (2.0 / math.pi) * np.sqrt(lam * (1.0 - lam))
    raise UsageError("닫힌 형태는 primitive / jeffreys 사전분포에만 있습니다")


# ============================================================
# 1D 사분 기준값
# ============================================================

class _CoinProblem:
    """θ 치환된 coin 적분 문제 (counts, 사전분포 고정)"""

    def __init__(self, kind: PriorKind, counts: Counts):
        self.kind = kind
        self.n1, self.n2 = counts.n
        self.total = counts.total
        self.density = _THETA_DENSITY[kind]
        p_hat = self.n1 / self.total if self.total else 0.5
        self.theta_hat = math.asin(math.sqrt(p_hat))
        self.log_L_max = self.log_l(self.theta_hat) if self.total else 0.0
        self.evidence_ratio = self._integral(lambda t: self.relative(t), 0.0, HALF_PI)

    def log_l(self, theta: float) -> float:
        p = math.sin(theta) ** 2
        value = 0.0
        for n, q in ((self.n1, p), (self.n2, 1.0 - p)):
            if n:
                if q <= 0.0:
                    return -math.inf
                value += n * math.log(q)
        return value

    def relative(self, theta: float) -> float:
        return float(self.density(theta)) * math.exp(self.log_l(theta) - self.log_L_max)

    def _integral(self, fn, a: float, b: float) -> float:
        if b <= a:
            return 0.0
        pts = [self.theta_hat] if a < self.theta_hat < b else None
        value, _ = integrate.quad(fn, a, b, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200, points=pts)
        return value

    def region(self, lam: float) -> Tuple[float, float]:
        """BLR 의 θ 구간"""
        if self.total == 0 or lam <= 0.0:
            return 0.0, HALF_PI
        if lam >= 1.0:
            return self.theta_hat, self.theta_hat
        level = math.log(lam) + self.log_L_max
        g = lambda t: self.log_l(t) - level

        def edge(end: float) -> float:
            if g(end) >= 0.0:
                return end
            lo, hi = sorted((end, self.theta_hat))
            # 끝점에서 −∞ 가 될 수 있어 부호만 쓰는 이분법 사용
            return optimize.bisect(g, lo, hi, xtol=ROOT_XTOL, maxiter=500)

        return edge(0.0), edge(HALF_PI)

    def size(self, lam: float) -> float:
        a, b = self.region(lam)
        return self._integral(lambda t: float(self.density(t)), a, b)

    def credibility(self, lam: float) -> float:
        a, b = self.region(lam)
        return self._integral(self.relative, a, b) / self.evidence_ratio


@dataclass(frozen=True)
class CoinCurve:
    """coin 기준 곡선 (s, c 는 임의 λ 에서 호출 가능)"""
    prior_kind: PriorKind
    counts: Tuple[int, int]
    lambdas: np.ndarray
    s_values: np.ndarray
    c_values: np.ndarray
    log_L_max: float
    log_L_D: float
    problem: _CoinProblem

    def s(self, lam: float) -> float:
        return self.problem.size(lam)

    def c(self, lam: float) -> float:
        return self.problem.credibility(lam)

    def interval(self, lam: float) -> Tuple[float, float]:
        """p₁ 구간"""
        a, b = self.problem.region(lam)
        return math.sin(a) ** 2, math.sin(b) ** 2

    def to_frame(self) -> pd.DataFrame:
        n = len(self.lambdas)
        return pd.DataFrame({
            'lambda': self.lambdas,
            's': self.s_values,
            's_stderr': np.zeros(n),
            'c_direct': self.c_values,
            'c_fit': np.full(n, np.nan),
        }, columns=CURVE_COLUMNS)

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, na_rep='', float_format='%.12g')


def coin_quadrature(prior, counts: Counts, lambda_grid: Sequence[float]) -> CoinCurve:
    """
    임의 coin counts 의 (s, c) 곡선

    N=0 이면 모든 λ 에서 s=c=1.
    """
    kind = _kind(prior)
    if len(counts) != 2:
        raise UsageError("coin counts 는 (n₁, n₂) 두 값이어야 합니다")
    grid = np.asarray(lambda_grid, dtype=float)
    problem = _CoinProblem(kind, counts)

    if counts.total == 0:
        ones = np.ones_like(grid)
        return CoinCurve(kind, counts.n, grid, ones, ones, 0.0, 0.0, problem)

    s = np.array([problem.size(float(l)) for l in grid])
    c = np.array([problem.credibility(float(l)) for l in grid])
    log_L_D = problem.log_L_max + math.log(problem.evidence_ratio)
    logger.info(f"coin 기준값 {kind.value} {counts.n}: L(D)={math.exp(log_L_D):.6g}")
    return CoinCurve(kind, counts.n, grid, np.clip(s, 0.0, 1.0), np.clip(c, 0.0, 1.0),
                     problem.log_L_max, log_L_D, problem)


def coin_prior_likelihood(prior, counts: Counts) -> float:
    """L(D) (1D 적응 사분)"""
    problem = _CoinProblem(_kind(prior), counts)
    if counts.total == 0:
        return 1.0
    return math.exp(problem.log_L_max) * problem.evidence_ratio


def coin_find_lambda(prior, counts: Counts, target: float, mode: str = 'credibility') -> float:
    """정확한 s(λ)=target 또는 c(λ)=target"""
    if not 0.0 < target < 1.0:
        raise UsageError(f"target 은 (0, 1) 범위여야 합니다: {target}")
    if mode not in ('size', 'credibility'):
        raise UsageError(f"mode 는 'size' 또는 'credibility' 여야 합니다: {mode}")
    if counts.total == 0:
        raise UsageError("N=0 이면 BLR 이 항상 공간 전체라 λ 를 역산할 수 없습니다")
    problem = _CoinProblem(_kind(prior), counts)
    value = problem.size if mode == 'size' else problem.credibility
    return float(optimize.brentq(lambda l: value(l) - target, 0.0, 1.0, xtol=ROOT_XTOL, maxiter=500))


def coin_region(prior, counts: Counts, lam: float) -> Tuple[float, float]:
    """BLR 의 p₁ 구간 (닫힌 구간)"""
    problem = _CoinProblem(_kind(prior), counts)
    a, b = problem.region(lam)
    return math.sin(a) ** 2, math.sin(b) ** 2
