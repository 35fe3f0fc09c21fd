"""
BLR 모듈 - bounded-likelihood region 의 λ₀, 크기 곡선, 신용도, 멤버십, 경계선
=============================================================================

R_λ = {ρ : L(D|ρ) ≥ λ·L_max}

- λ₀: λ ≤ λ₀ 이면 R_λ 가 재구성 공간 전체 (min L = λ₀·L_max)
- 크기 s_λ: R_λ 의 사전 질량
- 신용도 c_λ: R_λ 의 사후 질량 (L(D) 로 정규화)

곡선 계산:
1. 하나의 가중 표본을 모든 λ 에 공유 (공통 난수)
2. 상대 로그우도 ℓ−ℓ_max 를 정렬하고 누적 가중치로 s(λ), c(λ) 를 한 번에 계산
3. s 에 isotonic regression(단조 감소) 적용, 원시값은 s_raw 로 보존

경계선:
- MLE 에서 나가는 반직선마다 log L = log λ + log L_max 를 이분법으로 탐색
- 원판을 먼저 벗어나는 반직선은 단위원 위의 점으로 잘라냄 (clipped)
"""

import math
import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import optimize
from sklearn.isotonic import isotonic_regression

from config.numerics import (
    LAMBDA_GRID_POINTS,
    MEMBERSHIP_TOL,
    CONTOUR_ANGLES,
    CONTOUR_INWARD_OFFSET,
)
from .errors import UsageError, DomainError
from .pom import Pom, Counts, in_space
from .prior import PriorSpec, prior_sample
from .sampling import IntegrationBudget, WeightedSample
from .likelihood import (
    log_likelihood,
    mle,
    boundary_extremum,
    prior_likelihood,
)

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ['lambda', 's', 's_stderr', 'c_direct', 'c_fit']
CONTOUR_COLUMNS = ['angle', 'x', 'y', 'clipped']


@dataclass(frozen=True)
class BlrCurve:
    """λ 격자 위의 크기/신용도 곡선 (생성 후 불변)"""
    lambdas: np.ndarray
    s: np.ndarray
    s_stderr: np.ndarray
    s_raw: np.ndarray
    lambda0: float
    log_L_max: float
    mle: Optional[np.ndarray] = None
    mle_on_boundary: bool = False
    log_L_D: Optional[float] = None
    log_L_D_stderr: Optional[float] = None
    c_direct: Optional[np.ndarray] = None
    c_direct_stderr: Optional[np.ndarray] = None
    c_fit: Optional[np.ndarray] = None
    degenerate: bool = False

    def with_direct(self, direct: 'DirectCredibility') -> 'BlrCurve':
        return replace(self, c_direct=direct.c, c_direct_stderr=direct.stderr,
                       log_L_D=direct.log_L_D, log_L_D_stderr=direct.log_L_D_stderr)

    def with_fit(self, c_fit: np.ndarray) -> 'BlrCurve':
        return replace(self, c_fit=np.asarray(c_fit, dtype=float))

    def to_frame(self) -> pd.DataFrame:
        n = len(self.lambdas)
        blank = np.full(n, np.nan)
        return pd.DataFrame({
            'lambda': self.lambdas,
            's': self.s,
            's_stderr': self.s_stderr,
            'c_direct': self.c_direct if self.c_direct is not None else blank,
            'c_fit': self.c_fit if self.c_fit is not None else blank,
        }, columns=CURVE_COLUMNS)

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, na_rep='', float_format='%.12g')


@dataclass(frozen=True)
class DirectCredibility:
    c: np.ndarray
    stderr: np.ndarray
    log_L_D: float
    log_L_D_stderr: float


@dataclass(frozen=True)
class Contour:
    """경계선 폴리라인 (coin 이면 구간 양 끝 2점)"""
    lam: float
    angles: np.ndarray
    points: np.ndarray
    clipped: np.ndarray
    approximate: bool = False

    def to_frame(self) -> pd.DataFrame:
        y = self.points[:, 1] if self.points.shape[1] > 1 else np.full(len(self.angles), np.nan)
        return pd.DataFrame({
            'angle': self.angles,
            'x': self.points[:, 0],
            'y': y,
            'clipped': self.clipped.astype(bool),
        }, columns=CONTOUR_COLUMNS)

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, na_rep='', float_format='%.12g')


# ============================================================
# λ₀ / 멤버십
# ============================================================

def lambda0(pom: Pom, counts: Counts, log_L_max: Optional[float] = None) -> float:
    """
    min L / L_max - 오목 로그우도의 최소는 경계에서 얻어진다

    N=0 (상수 우도) 이면 1.0.
    """
    if counts.total == 0:
        return 1.0
    if log_L_max is None:
        log_L_max = log_likelihood(pom, counts, mle(pom, counts)[0])
    _, log_min = boundary_extremum(pom, counts, maximize=False)
    if not math.isfinite(log_min):
        return 0.0
    return float(min(1.0, math.exp(log_min - log_L_max)))


def _log_threshold(lam: float) -> float:
    if not 0.0 <= lam <= 1.0:
        raise UsageError(f"λ 는 [0, 1] 범위여야 합니다: {lam}")
    return -math.inf if lam == 0.0 else math.log(lam)


def membership(pom: Pom, counts: Counts, pt, lam: float, log_L_max: Optional[float] = None):
    """log L(D|pt) ≥ log λ + log L_max (배치 입력이면 bool 배열)"""
    thr = _log_threshold(lam)
    pts = np.asarray(pt, dtype=float)
    if not np.all(in_space(pom, pts)):
        raise DomainError(f"재구성 공간 밖의 점입니다: {pts.tolist()}")
    if counts.total == 0:
        inside = np.ones(pts.shape[:-1], dtype=bool)
        return bool(inside) if inside.ndim == 0 else inside
    if log_L_max is None:
        log_L_max = log_likelihood(pom, counts, mle(pom, counts)[0])
    ll = log_likelihood(pom, counts, pts)
    inside = np.asarray(ll >= thr + log_L_max - MEMBERSHIP_TOL)
    return bool(inside) if inside.ndim == 0 else inside


def default_lambda_grid(points: int = LAMBDA_GRID_POINTS, lambda0_: float = 0.0) -> np.ndarray:
    """√(1−λ) 에 대해 균일한 λ 격자 (0 과 1 포함, λ₀ 삽입)"""
    if points < 2:
        raise UsageError("λ 격자는 2점 이상이어야 합니다")
    v = np.linspace(1.0, 0.0, points)
    grid = 1.0 - v * v
    grid[0], grid[-1] = 0.0, 1.0
    return np.union1d(grid, [float(lambda0_)])


def _check_grid(lambda_grid) -> np.ndarray:
    grid = np.asarray(lambda_grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise UsageError("λ 격자는 1차원 비어있지 않은 배열이어야 합니다")
    if np.any(grid < 0.0) or np.any(grid > 1.0) or np.any(np.diff(grid) <= 0.0):
        raise UsageError("λ 격자는 [0, 1] 안에서 순증가해야 합니다")
    return grid


# ============================================================
# 크기 / 신용도 곡선
# ============================================================

def _superlevel_fractions(rel: np.ndarray, weights: np.ndarray, grid: np.ndarray,
                          deterministic: bool) -> Tuple[np.ndarray, np.ndarray]:
    """
    각 λ 에 대해 Σ a·[rel ≥ log λ] / Σ a 와 그 표준오차

    se² = (A(1−f)² + B f²) / W², A/B 는 안/밖 가중치 제곱합
    """
    order = np.argsort(rel, kind='stable')
    rel_sorted = rel[order]
    a = weights[order]
    cum = np.concatenate([[0.0], np.cumsum(a)])
    cum2 = np.concatenate([[0.0], np.cumsum(a * a)])
    total, total2 = cum[-1], cum2[-1]

    with np.errstate(divide='ignore'):
        thr = np.log(grid) - MEMBERSHIP_TOL
    idx = np.searchsorted(rel_sorted, thr, side='left')
    inside = total - cum[idx]
    frac = np.clip(inside / total, 0.0, 1.0)
    if deterministic:
        return frac, np.zeros_like(frac)
    inside2 = total2 - cum2[idx]
    var = inside2 * (1.0 - frac) ** 2 + (total2 - inside2) * frac ** 2
    return frac, np.sqrt(var) / total


def _degenerate_curve(grid: np.ndarray) -> BlrCurve:
    logger.warning("N=0: 우도가 상수이므로 모든 λ 에서 s=c=1 (재구성 공간 전체)")
    ones, zeros = np.ones_like(grid), np.zeros_like(grid)
    return BlrCurve(grid, ones, zeros, ones, lambda0=1.0, log_L_max=0.0, log_L_D=0.0,
                    log_L_D_stderr=0.0, c_direct=ones, c_direct_stderr=zeros, degenerate=True)


def size_curve(pom: Pom, prior: PriorSpec, counts: Counts, lambda_grid: Optional[Sequence[float]] = None,
               budget: Optional[IntegrationBudget] = None,
               sample: Optional[WeightedSample] = None) -> BlrCurve:
    """
    s_λ 곡선 (공유 표본 위의 가중 비율 + 단조 정리)

    λ ≤ λ₀ 에서는 s=1 로 고정한다.
    """
    if counts.total == 0:
        return _degenerate_curve(_check_grid(lambda_grid if lambda_grid is not None else default_lambda_grid()))

    point, on_boundary = mle(pom, counts)
    log_L_max = log_likelihood(pom, counts, point)
    lam0 = lambda0(pom, counts, log_L_max)
    grid = _check_grid(lambda_grid if lambda_grid is not None else default_lambda_grid(lambda0_=lam0))

    sample = sample or prior_sample(prior, pom, budget or IntegrationBudget())
    rel = log_likelihood(pom, counts, sample.points) - log_L_max
    raw, se = _superlevel_fractions(rel, sample.weights, grid, sample.deterministic)

    s = isotonic_regression(raw, y_min=0.0, y_max=1.0, increasing=False)
    s = np.where(grid <= lam0, 1.0, s)
    se = np.where(grid <= lam0, 0.0, se)
    logger.info(f"크기 곡선: {len(grid)}점, λ₀={lam0:.6g}, 표본 {sample.size}개")

    return BlrCurve(grid, s, se, raw, lambda0=lam0, log_L_max=log_L_max,
                    mle=point, mle_on_boundary=on_boundary)


def credibility_direct(pom: Pom, prior: PriorSpec, counts: Counts, lambda_grid: Sequence[float],
                       budget: Optional[IntegrationBudget] = None,
                       sample: Optional[WeightedSample] = None) -> DirectCredibility:
    """c_λ = Σ w·L·η / Σ w·L (같은 표본에서 L(D) 도 함께 추정)"""
    grid = _check_grid(lambda_grid)
    if counts.total == 0:
        ones = np.ones_like(grid)
        return DirectCredibility(ones, np.zeros_like(grid), 0.0, 0.0)

    budget = budget or IntegrationBudget()
    sample = sample or prior_sample(prior, pom, budget)
    log_L_max = log_likelihood(pom, counts, mle(pom, counts)[0])
    rel = log_likelihood(pom, counts, sample.points) - log_L_max
    log_L_D, log_se = prior_likelihood(pom, prior, counts, budget, sample=sample, log_L_max=log_L_max)

    c, se = _superlevel_fractions(rel, sample.weights * np.exp(rel), grid, sample.deterministic)
    lam0 = lambda0(pom, counts, log_L_max)
    c = np.where(grid <= lam0, 1.0, c)
    return DirectCredibility(c, np.where(grid <= lam0, 0.0, se), log_L_D, log_se)


# ============================================================
# 경계선
# ============================================================

def coin_interval(pom: Pom, counts: Counts, lam: float,
                  log_L_max: Optional[float] = None) -> Tuple[float, float]:
    """coin BLR 의 u 구간 [u_lo, u_hi]"""
    thr = _log_threshold(lam)
    if counts.total == 0 or thr == -math.inf:
        return -1.0, 1.0
    point, _ = mle(pom, counts)
    u_hat = float(point[0])
    if log_L_max is None:
        log_L_max = log_likelihood(pom, counts, point)
    level = thr + log_L_max
    f = lambda u: log_likelihood(pom, counts, [u]) - level

    def endpoint(edge: float) -> float:
        if f(edge) >= 0.0:
            return edge
        lo, hi = sorted((edge, u_hat))
        return float(optimize.bisect(f, lo, hi, xtol=1e-15, maxiter=200))

    return endpoint(-1.0), endpoint(1.0)


def _ray_exit(center: np.ndarray, direction: np.ndarray) -> float:
    """|c + t·d| = 1 인 양의 t"""
    b = float(center @ direction)
    c = float(center @ center) - 1.0
    return -b + math.sqrt(max(b * b - c, 0.0))


def boundary_contour(pom: Pom, counts: Counts, lam: float, n_angles: int = CONTOUR_ANGLES,
                     log_L_max: Optional[float] = None) -> Contour:
    """
    R_λ 의 경계 폴리라인

    초수준 집합이 볼록이므로 내부 MLE 에 대해 별 모양이다. MLE 가 경계에 있으면
    안쪽으로 조금 옮긴 점에서 추적하고 approximate 로 표시한다.
    """
    if not 0.0 < lam < 1.0:
        raise UsageError(f"경계선은 0 < λ < 1 에서만 정의됩니다: {lam}")
    if counts.total == 0:
        raise UsageError("N=0 이면 BLR 이 항상 공간 전체라 경계선이 없습니다")

    point, on_boundary = mle(pom, counts)
    if log_L_max is None:
        log_L_max = log_likelihood(pom, counts, point)

    if not pom.is_disk:
        lo, hi = coin_interval(pom, counts, lam, log_L_max)
        pts = np.array([[lo], [hi]])
        return Contour(lam, np.array([math.pi, 0.0]), pts, np.abs(pts[:, 0]) >= 1.0)

    level = math.log(lam) + log_L_max
    center = point
    if on_boundary:
        center = (1.0 - CONTOUR_INWARD_OFFSET) * point
        logger.warning("MLE 가 경계에 있어 안쪽 점에서 경계선을 추적합니다 (근사)")
    if log_likelihood(pom, counts, center) <= level:
        raise UsageError(f"λ={lam} 이 1에 너무 가까워 경계선을 추적할 수 없습니다")

    angles = np.linspace(0.0, 2.0 * math.pi, n_angles, endpoint=False)
    pts = np.empty((n_angles, 2))
    clipped = np.zeros(n_angles, dtype=bool)
    for i, a in enumerate(angles):
        d = np.array([math.cos(a), math.sin(a)])
        t_exit = _ray_exit(center, d) * (1.0 - 1e-14)
        f = lambda t: log_likelihood(pom, counts, center + t * d) - level
        if f(t_exit) >= 0.0:
            pts[i], clipped[i] = center + t_exit * d, True
            continue
        t = optimize.bisect(f, 0.0, t_exit, xtol=1e-15, maxiter=200)
        pts[i] = center + t * d

    logger.info(f"경계선 λ={lam:.6g}: {n_angles}점 중 {int(clipped.sum())}점이 단위원에서 잘림")
    return Contour(lam, angles, pts, clipped, approximate=on_boundary)
