"""
곡선 피팅 모듈 - s_λ 의 매끄러운 단조 모델, s 로부터의 c_λ, λ 역산
==================================================================

모델 (x = (λ−λ₀)/(1−λ₀), y = √x):

    s(λ) = (1−x)^ζ · P(y)/Q(y),   P(y) = 1 + p₁y + p₂y²,  Q(y) = 1 + q₁y + q₂y²

- ζ: 내부 MLE 이면 d/2 로 고정, 경계 MLE 이면 [0.25, 2] 에서 자유 파라미터
- P(0)=Q(0)=1 이므로 s(λ₀)=1 이 자동으로 성립
- 가중 최소제곱: log s 잔차에 s/se 가중 (scipy least_squares)

검증 실패(비단조, [0,1] 이탈, Q≤0, 잔차 과대) 시 단조 구간별 3차 보간
(PCHIP)으로 대체하고 fallback_used 로 표시한다.

신용도:  c_λ = [λ s_λ + ∫_λ¹ s] / ∫₀¹ s
비율 극한: c_λ/s_λ → 1/∫₀¹ s = L_max / L(D)   (λ → 1)
"""

import math
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Optional

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator

from config.numerics import (
    FIT_MIN_POINTS,
    FIT_ZETA_BOUNDS,
    FIT_RESIDUAL_FACTOR,
    FIT_STDERR_FLOOR,
    QUAD_ABS_TOL,
    FIND_LAMBDA_TOL,
)
from .errors import UsageError, CurveFitError
from .pom import Pom
from .blr import BlrCurve

logger = logging.getLogger(__name__)

# 단조성/범위 검사 격자
CHECK_POINTS = 2001


@dataclass(frozen=True)
class SizeFit:
    lambda0: float
    zeta: float
    num_coeffs: tuple
    den_coeffs: tuple
    residual: float
    integral_total: float = 1.0
    fallback_used: bool = False
    zeta_fitted: bool = False
    trivial: bool = False
    interpolant: Optional[PchipInterpolator] = field(default=None, compare=False, repr=False)

    def _x(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        return np.clip((lam - self.lambda0) / (1.0 - self.lambda0), 0.0, 1.0)

    def size(self, lam):
        """적합된 s(λ) (벡터화, λ ≤ λ₀ 이면 1)"""
        x = self._x(lam)
        if self.trivial:
            value = np.ones_like(x)
        elif self.interpolant is not None:
            value = np.clip(self.interpolant(x), 0.0, 1.0)
        else:
            value = np.clip(_rational(x, self.zeta, self.num_coeffs[1:], self.den_coeffs[1:]), 0.0, 1.0)
        return float(value) if np.ndim(value) == 0 else value

    def tail_integral(self, lam: float) -> float:
        """∫_λ¹ s(λ') dλ'"""
        if self.trivial:
            return 1.0 - lam
        head = max(self.lambda0 - lam, 0.0)
        start = max(lam, self.lambda0)
        if self.interpolant is not None:
            x0 = float(self._x(start))
            return head + (1.0 - self.lambda0) * float(self.interpolant.integrate(x0, 1.0))
        value, _ = integrate.quad(self.size, start, 1.0, epsabs=QUAD_ABS_TOL, limit=200)
        return head + value

    def to_dict(self) -> Dict:
        return {
            'zeta': self.zeta,
            'num_coeffs': list(self.num_coeffs),
            'den_coeffs': list(self.den_coeffs),
            'integral_total': self.integral_total,
            'fallback_used': self.fallback_used,
            'lambda0': self.lambda0,
            'residual': self.residual,
        }


def _rational(x, zeta, p, q) -> np.ndarray:
    y = np.sqrt(x)
    num = 1.0 + p[0] * y + p[1] * y * y
    den = 1.0 + q[0] * y + q[1] * y * y
    with np.errstate(divide='ignore', invalid='ignore'):
        return (1.0 - x) ** zeta * num / den


def _finish(fit: SizeFit) -> SizeFit:
    total = fit.tail_integral(0.0)
    if not math.isfinite(total) or total <= 0.0:
        raise CurveFitError(f"∫s dλ 가 유효하지 않습니다: {total}")
    return replace(fit, integral_total=min(total, 1.0))


def _valid_rational(zeta, p, q) -> bool:
    x = np.linspace(0.0, 1.0, CHECK_POINTS)
    y = np.sqrt(x)
    if np.any(1.0 + q[0] * y + q[1] * y * y <= 0.0):
        return False
    s = _rational(x, zeta, p, q)
    if not np.all(np.isfinite(s)) or np.any(s < -1e-9) or np.any(s > 1.0 + 1e-9):
        return False
    return bool(np.all(np.diff(s) <= 1e-12))


def fit_size(curve: BlrCurve, pom: Pom) -> SizeFit:
    """
    크기 곡선 → SizeFit

    유리함수 적합이 검증을 통과하지 못하면 PCHIP 으로 대체한다.
    모든 s 가 1 이면 (N=0) trivial 로 표시된 상수 모델을 돌려준다.
    """
    lam0 = float(curve.lambda0)
    if np.all(curve.s >= 1.0) or curve.degenerate or lam0 >= 1.0:
        logger.warning("크기 곡선이 상수 1이므로 trivial 모델을 사용합니다")
        return SizeFit(lam0 if lam0 < 1.0 else 0.0, 0.0, (1.0,), (1.0,), 0.0,
                       integral_total=1.0, fallback_used=True, trivial=True)

    use = curve.lambdas >= lam0
    lam = curve.lambdas[use]
    s = curve.s[use]
    se = np.maximum(np.nan_to_num(curve.s_stderr[use], nan=FIT_STDERR_FLOOR), FIT_STDERR_FLOOR)
    if len(lam) < FIT_MIN_POINTS:
        raise UsageError(f"피팅에는 λ ≥ λ₀ 인 격자점이 {FIT_MIN_POINTS}개 이상 필요합니다 ({len(lam)}개)")

    x = (lam - lam0) / (1.0 - lam0)
    fit_mask = (x > 0.0) & (x < 1.0) & (s > 0.0)
    xf, sf = x[fit_mask], s[fit_mask]
    weight = sf / se[fit_mask]

    free_zeta = bool(curve.mle_on_boundary)
    zeta_fixed = pom.dimension / 2.0

    def unpack(theta):
        zeta = float(theta[4]) if free_zeta else zeta_fixed
        return zeta, theta[0:2], theta[2:4]

    def residuals(theta):
        zeta, p, q = unpack(theta)
        model = _rational(xf, zeta, p, q)
        log_model = np.log(np.where(np.isfinite(model) & (model > 0.0), model, 1e-300))
        return (log_model - np.log(sf)) * weight

    starts = [np.zeros(4), np.array([0.0, 0.0, 1.0, 0.0])]
    lower, upper = [-np.inf] * 4, [np.inf] * 4
    if free_zeta:
        starts = [np.append(t, np.clip(1.0, *FIT_ZETA_BOUNDS)) for t in starts]
        lower.append(FIT_ZETA_BOUNDS[0])
        upper.append(FIT_ZETA_BOUNDS[1])

    best = None
    for theta0 in starts:
        try:
            res = optimize.least_squares(residuals, theta0, bounds=(lower, upper), method='trf')
        except (ValueError, FloatingPointError) as e:
            logger.debug(f"유리함수 적합 실패 (시작점 {theta0.tolist()}): {e}")
            continue
        zeta, p, q = unpack(res.x)
        if _valid_rational(zeta, p, q) and (best is None or res.cost < best[0]):
            best = (res.cost, zeta, p, q)

    limit = FIT_RESIDUAL_FACTOR * max(float(np.median(se)), FIT_STDERR_FLOOR)
    if best is not None:
        _, zeta, p, q = best
        rms = float(np.sqrt(np.mean((_rational(x, zeta, p, q) - s) ** 2)))
        if rms <= limit:
            fit = SizeFit(lam0, zeta, (1.0, float(p[0]), float(p[1])), (1.0, float(q[0]), float(q[1])),
                          rms, zeta_fitted=free_zeta)
            logger.info(f"유리함수 적합: ζ={zeta:.4g}, RMS={rms:.3g}")
            return _finish(fit)
        logger.debug(f"유리함수 적합 잔차 과대: RMS={rms:.3g} > {limit:.3g}")

    xs, order = np.unique(x, return_index=True)
    ys = s[order]
    # 보간 구간이 [0, 1] 전체를 덮도록 양 끝 (0, 1), (1, 0) 보강
    if xs[0] > 0.0:
        xs, ys = np.insert(xs, 0, 0.0), np.insert(ys, 0, 1.0)
    if xs[-1] < 1.0:
        xs, ys = np.append(xs, 1.0), np.append(ys, 0.0)
    interp = PchipInterpolator(xs, ys, extrapolate=False)
    rms = float(np.sqrt(np.mean((np.clip(interp(x), 0.0, 1.0) - s) ** 2)))
    logger.warning(f"유리함수 적합이 검증을 통과하지 못해 PCHIP 보간으로 대체합니다 (RMS={rms:.3g})")
    fit = SizeFit(lam0, zeta_fixed, (), (), rms, fallback_used=True, zeta_fitted=False, interpolant=interp)
    return _finish(fit)


# ============================================================
# 신용도 / 비율 극한 / λ 역산
# ============================================================

def credibility_from_size(fit: SizeFit, lam: float) -> float:
    """c_λ = [λ s_λ + ∫_λ¹ s] / ∫₀¹ s"""
    if not 0.0 <= lam <= 1.0:
        raise UsageError(f"λ 는 [0, 1] 범위여야 합니다: {lam}")
    if lam <= fit.lambda0:
        return 1.0
    c = (lam * fit.size(lam) + fit.tail_integral(lam)) / fit.integral_total
    return float(min(max(c, 0.0), 1.0))


def credibility_curve(fit: SizeFit, lambdas) -> np.ndarray:
    return np.array([credibility_from_size(fit, float(lam)) for lam in np.asarray(lambdas, dtype=float)])


@dataclass(frozen=True)
class RatioLimit:
    ratio: float
    log_L_D: Optional[float] = None


def ratio_limit(fit: SizeFit, log_L_max: Optional[float] = None) -> RatioLimit:
    """L_max/L(D) = 1/∫₀¹ s, log_L_max 가 주어지면 함축된 log L(D) 도 계산"""
    ratio = 1.0 / fit.integral_total
    implied = None if log_L_max is None else log_L_max + math.log(fit.integral_total)
    return RatioLimit(ratio, implied)


def find_lambda(fit: SizeFit, target: float, mode: str = 'size') -> float:
    """
    단조 적합 곡선에서 s(λ)=target 또는 c(λ)=target 인 λ

    mode: 'size' | 'credibility'
    """
    if not 0.0 < target < 1.0:
        raise UsageError(f"target 은 (0, 1) 범위여야 합니다: {target}")
    if mode not in ('size', 'credibility'):
        raise UsageError(f"mode 는 'size' 또는 'credibility' 여야 합니다: {mode}")
    if fit.trivial:
        raise UsageError("상수 크기 곡선(N=0)에서는 λ 를 역산할 수 없습니다")

    value = fit.size if mode == 'size' else (lambda lam: credibility_from_size(fit, lam))
    lam = optimize.bisect(lambda l: float(value(l)) - target, fit.lambda0, 1.0,
                          xtol=FIND_LAMBDA_TOL, maxiter=200)
    logger.info(f"{mode}={target} → λ={lam:.10g}")
    return float(lam)
