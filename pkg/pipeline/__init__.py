"""
최적 오차 영역 계산 파이프라인
==============================

다항 데이터(검출기 클릭 수)로부터 bounded-likelihood region(BLR)을 구성하고
크기 s_λ, 신용도 c_λ 를 계산한다. BLR 은 최대우도영역(MLR)이면서 동시에
최소신용영역(SCR)이다.

파이프라인 구조:
1. pom: 측정 모델과 재구성 공간 좌표 → 확률 사상
2. prior / sampling: 사전분포 밀도, 정규화, 가중 표본, 균등 타일링
3. likelihood: 점 우도, MLE, 사전우도 L(D), 베이지안 평균, 시뮬레이션
4. blr: λ₀, 크기/신용도 곡선, 멤버십, 경계선
5. curvefit: s_λ 피팅, s 로부터 c_λ, λ 역산
6. oracle / confidence: coin 기준값, 신뢰수준 평가
7. processors: 설정 하나로 전체 계산을 조율하는 ErrorRegionProcessor
"""

from .errors import (
    ErrorRegionError,
    UsageError,
    DomainError,
    IntegrationError,
    TilingError,
    CurveFitError,
)
from .pom import Pom, PomKind, Counts, get_pom, probabilities, is_permissible, coordinates_from_frequencies
from .prior import PriorKind, PriorSpec, resolve_prior, density, normalize, sample, tiling, purity
from .sampling import IntegrationBudget, WeightedSample
from .likelihood import log_likelihood, mle, summarize, prior_likelihood, bayesian_mean, simulate
from .blr import BlrCurve, Contour, lambda0, membership, size_curve, credibility_direct, boundary_contour
from .curvefit import SizeFit, fit_size, credibility_from_size, ratio_limit, find_lambda
from .oracle import CoinCurve, coin_closed_form, coin_quadrature
from .confidence import RegionSet, confidence_level, scr_interval_set
from .processors import ErrorRegionProcessor

__all__ = [
    'ErrorRegionError',
    'UsageError',
    'DomainError',
    'IntegrationError',
    'TilingError',
    'CurveFitError',
    'Pom',
    'PomKind',
    'Counts',
    'get_pom',
    'probabilities',
    'is_permissible',
    'coordinates_from_frequencies',
    'PriorKind',
    'PriorSpec',
    'resolve_prior',
    'density',
    'normalize',
    'sample',
    'tiling',
    'purity',
    'IntegrationBudget',
    'WeightedSample',
    'log_likelihood',
    'mle',
    'summarize',
    'prior_likelihood',
    'bayesian_mean',
    'simulate',
    'BlrCurve',
    'Contour',
    'lambda0',
    'membership',
    'size_curve',
    'credibility_direct',
    'boundary_contour',
    'SizeFit',
    'fit_size',
    'credibility_from_size',
    'ratio_limit',
    'find_lambda',
    'CoinCurve',
    'coin_closed_form',
    'coin_quadrature',
    'RegionSet',
    'confidence_level',
    'scr_interval_set',
    'ErrorRegionProcessor',
]
