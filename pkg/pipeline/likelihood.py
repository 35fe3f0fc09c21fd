"""
우도 모듈 - 점 우도, MLE, 사전우도 L(D), 베이지안 평균, 다항 데이터 시뮬레이션
============================================================================

수식:
- 점 우도: log L(D|ρ) = Σ n_k log p_k   (0·log 0 = 0, n_k>0 & p_k=0 이면 −∞)
- 사전우도: L(D) = ∫(dρ) L(D|ρ)
- 베이지안 평균: ∫(dρ) ρ (데이터가 있으면 L(D|ρ) 가중 사후평균)

모든 우도 연산은 로그 공간에서 수행한다 (N=10⁴ 수준에서도 언더플로 없음).

MLE 전략:
1. 상대도수 정상점이 재구성 공간 안에 있으면 그 점 (오목 함수의 정상점)
2. 아니면 경계 원 위에서 각도에 대한 1D 최대화 (격자 탐색 + 유계 황금분할)
"""

import math
import logging
import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np
from scipy import optimize
from scipy.special import gammaln

from config.numerics import (
    MLE_TOL,
    BOUNDARY_ANGLE_TOL,
    BOUNDARY_SCAN_POINTS,
    MIN_EFFECTIVE_SAMPLES,
)
from .errors import UsageError, DomainError, IntegrationError
from .pom import (
    Pom,
    PomKind,
    Counts,
    probabilities,
    coordinates_from_frequencies,
    in_space,
    radius_squared,
    from_polar,
)
from .prior import PriorSpec, prior_sample, purity
from .sampling import IntegrationBudget, WeightedSample

logger = logging.getLogger(__name__)

# 경계 MLE 판정 (r² ≥ 1 − ε)
BOUNDARY_EPS = 1e-12


@dataclass(frozen=True)
class LikelihoodSummary:
    """MLE 요약: log L_max, MLE 좌표, 경계 여부, (선택) log L(D)"""
    log_L_max: float
    mle: np.ndarray
    mle_on_boundary: bool
    log_L_D: Optional[float] = None
    log_L_D_stderr: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            'mle': self.mle.tolist(),
            'on_boundary': self.mle_on_boundary,
            'log_L_max': self.log_L_max,
            'log_L_D': self.log_L_D,
        }


@dataclass(frozen=True)
class BayesianMean:
    point: np.ndarray
    stderr: np.ndarray
    effective_samples: float
    low_ess: bool
    purity: Optional[float] = None


def log_likelihood(pom: Pom, counts: Counts, coords):
    """Σ n_k log p_k (배치 입력이면 배열)"""
    p = np.clip(probabilities(pom, coords), 0.0, None)
    n = counts.array
    with np.errstate(divide='ignore', invalid='ignore'):
        terms = np.where(n > 0, n * np.log(p), 0.0)
    value = np.sum(terms, axis=-1)
    return float(value) if np.ndim(value) == 0 else value


def log_data_probability(pom: Pom, counts: Counts, coords):
    """다항 계수를 포함한 계수 벡터의 확률 (log) - 모든 D 에 대해 합이 1"""
    n = counts.array
    log_coeff = gammaln(counts.total + 1.0) - float(np.sum(gammaln(n + 1.0)))
    return log_coeff + log_likelihood(pom, counts, coords)


def enumerate_counts(pom: Pom, total: int) -> Iterator[Counts]:
    """총합이 total 인 모든 계수 벡터"""
    k = pom.num_outcomes
    for bars in itertools.combinations(range(total + k - 1), k - 1):
        edges = (-1,) + bars + (total + k - 1,)
        yield Counts(tuple(edges[i + 1] - edges[i] - 1 for i in range(k)))


# ============================================================
# 경계 탐색
# ============================================================

def _circle(phi) -> np.ndarray:
    return from_polar(np.ones_like(np.asarray(phi, dtype=float)), phi)


def _outcome_zero_points(pom: Pom) -> np.ndarray:
    """경계에서 각 결과 확률이 0이 되는 점들"""
    if pom.kind is PomKind.COIN:
        return np.array([[-1.0], [1.0]])
    if pom.kind is PomKind.CROSSHAIR4:
        return np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, -1.0], [0.0, 1.0]])
    return _circle(np.array([math.pi, -math.pi / 3.0, math.pi / 3.0]))


def boundary_extremum(pom: Pom, counts: Counts, maximize: bool = True,
                      xatol: float = BOUNDARY_ANGLE_TOL) -> Tuple[np.ndarray, float]:
    """
    경계(원 / 선분 양 끝) 위의 log L 최대 또는 최소

    원판: 각도 격자 + 확률이 0이 되는 점들을 후보로 평가한 뒤, 최적 후보 주변을
    유계 1D 최소화(scipy minimize_scalar)로 다듬는다.
    """
    sign = 1.0 if maximize else -1.0

    if not pom.is_disk:
        ends = np.array([[-1.0], [1.0]])
        vals = sign * log_likelihood(pom, counts, ends)
        i = int(np.argmax(vals))
        return ends[i], float(sign * vals[i])

    phis = np.linspace(0.0, 2.0 * math.pi, BOUNDARY_SCAN_POINTS, endpoint=False)
    zeros = _outcome_zero_points(pom)
    cand_phi = np.concatenate([phis, np.arctan2(zeros[:, 1], zeros[:, 0])])
    vals = sign * log_likelihood(pom, counts, _circle(cand_phi))
    i = int(np.argmax(vals))
    best_phi, best_val = float(cand_phi[i]), float(vals[i])

    if math.isfinite(best_val):
        step = 2.0 * math.pi / BOUNDARY_SCAN_POINTS
        res = optimize.minimize_scalar(
            lambda a: -sign * log_likelihood(pom, counts, _circle(a)),
            bounds=(best_phi - step, best_phi + step),
            method='bounded',
            options={'xatol': xatol},
        )
        if res.success and -res.fun >= best_val:
            best_phi, best_val = float(res.x), float(-res.fun)

    return _circle(best_phi), float(sign * best_val)


# ============================================================
# MLE
# ============================================================

def mle(pom: Pom, counts: Counts, tol: float = MLE_TOL) -> Tuple[np.ndarray, bool]:
    """
    재구성 공간 위의 log L 최대점과 경계 여부

    N=0 이면 우도가 상수이므로 UsageError.
    """
    if counts.total == 0:
        raise UsageError("N=0 이면 우도가 상수라 MLE 가 정의되지 않습니다")

    cand = coordinates_from_frequencies(pom, counts)
    if cand is not None:
        return cand, bool(radius_squared(pom, cand) >= 1.0 - BOUNDARY_EPS)

    if pom.kind is PomKind.CROSSHAIR4:
        n = counts.array
        nx, ny = n[0] + n[1], n[2] + n[3]
        # 분모가 0인 축은 우도에 영향이 없으므로 0으로 둔다
        if nx == 0 or ny == 0:
            pt = np.array([0.0 if nx == 0 else (n[0] - n[1]) / nx,
                           0.0 if ny == 0 else (n[2] - n[3]) / ny])
            return pt, bool(radius_squared(pom, pt) >= 1.0 - BOUNDARY_EPS)

    pt, _ = boundary_extremum(pom, counts, maximize=True, xatol=min(tol, BOUNDARY_ANGLE_TOL))
    return pt, True


def summarize(pom: Pom, counts: Counts, prior: Optional[PriorSpec] = None,
              budget: Optional[IntegrationBudget] = None,
              sample: Optional[WeightedSample] = None) -> LikelihoodSummary:
    point, on_boundary = mle(pom, counts)
    log_L_max = log_likelihood(pom, counts, point)
    logger.info(f"MLE {np.round(point, 6).tolist()} (경계={on_boundary}), log L_max={log_L_max:.6f}")
    if prior is None:
        return LikelihoodSummary(log_L_max, point, on_boundary)
    log_L_D, se = prior_likelihood(pom, prior, counts, budget or IntegrationBudget(), sample=sample,
                                   log_L_max=log_L_max)
    return LikelihoodSummary(log_L_max, point, on_boundary, log_L_D, se)


def relative_likelihood(pom: Pom, counts: Counts, points: np.ndarray, log_L_max: float) -> np.ndarray:
    """L(D|ρ)/L_max (언더플로 없이)"""
    return np.exp(log_likelihood(pom, counts, points) - log_L_max)


# ============================================================
# 사전우도 / 베이지안 평균
# ============================================================

def prior_likelihood(pom: Pom, prior: PriorSpec, counts: Counts, budget: IntegrationBudget,
                     sample: Optional[WeightedSample] = None,
                     log_L_max: Optional[float] = None) -> Tuple[float, float]:
    """
    log L(D) 와 그 표준오차 (log 스케일, 즉 상대 오차)

    L(D) = L_max · E_prior[L(D|ρ)/L_max]
    """
    sample = sample or prior_sample(prior, pom, budget)
    if log_L_max is None:
        log_L_max = log_likelihood(pom, counts, mle(pom, counts)[0]) if counts.total else 0.0

    mean, se = sample.expectation(relative_likelihood(pom, counts, sample.points, log_L_max))
    if not math.isfinite(mean) or mean <= 0.0:
        raise IntegrationError(f"사전우도 추정값이 유효하지 않습니다: {mean}")
    return log_L_max + math.log(mean), se / mean


def bayesian_mean(pom: Pom, prior: PriorSpec, counts: Optional[Counts] = None,
                  budget: Optional[IntegrationBudget] = None,
                  sample: Optional[WeightedSample] = None) -> BayesianMean:
    """
    사전평균 (counts 없음) 또는 사후평균 (counts 있음)

    유효 샘플 수가 100 미만이면 low_ess 플래그와 경고 로그.
    """
    sample = sample or prior_sample(prior, pom, budget or IntegrationBudget())
    extra = None
    if counts is not None and counts.total > 0:
        log_L_max = log_likelihood(pom, counts, mle(pom, counts)[0])
        extra = relative_likelihood(pom, counts, sample.points, log_L_max)

    coords, errs = [], []
    for axis in range(pom.dimension):
        m, se = sample.expectation(sample.points[:, axis], extra)
        coords.append(m)
        errs.append(se)

    ess = sample.effective_size(extra)
    low_ess = (not sample.deterministic) and ess < MIN_EFFECTIVE_SAMPLES
    if low_ess:
        logger.warning(f"베이지안 평균의 유효 샘플 수가 부족합니다 (ESS={ess:.1f})")

    point = np.array(coords)
    xi = purity(point) if pom.is_disk else None
    return BayesianMean(point, np.array(errs), ess, low_ess, xi)


# ============================================================
# 시뮬레이션
# ============================================================

def simulate(pom: Pom, true_pt, total: int, seed: int) -> Counts:
    """probabilities(true_pt) 로부터 N 클릭의 다항 추출 (시드 결정론적)"""
    if total < 0:
        raise UsageError("N 은 0 이상이어야 합니다")
    pt = np.asarray(true_pt, dtype=float)
    if not in_space(pom, pt):
        raise DomainError(f"참 상태 {pt.tolist()} 가 재구성 공간 밖입니다")
    p = np.clip(probabilities(pom, pt), 0.0, None)
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(total, p)
    logger.info(f"{pom.key} 시뮬레이션: N={total}, counts={draws.tolist()}")
    return Counts(tuple(int(v) for v in draws))
