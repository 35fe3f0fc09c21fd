"""
사전분포 모듈 - 밀도 평가, 정규화, 표본 추출, 순도, 균등 크기 타일링
====================================================================

모든 밀도는 평탄 좌표 측도(원판: dx dy, 선분: du)에 대한 비정규화 밀도이다.

사전분포 종류:
- Primitive:          원판 1/π, 선분 ½ (좌표에 대해 균일)
- JeffreysCoin:       1/(π√(1−u²))                       (Z=1)
- HedgedCoin:         (2/π)√(1−u²)                        (Z=1)
- JeffreysCrossHair4: [1−s²+¼s⁴sin²(2φ)]^(−1/2) = [(1−x²)(1−y²)]^(−1/2)
- JeffreysTrine3:     [1−¾s²+¼s³cos(3φ)]^(−1/2)
- Hedged (원판):      √(p₁⋯p_K)
- Conjugate:          (Π p_k^{t_k})^α, α>0, 목표 확률 t에서 최대
- MarginalPurityDisk: (1/π)cosh⁻¹(1/s)                    (Z=1)

타일링:
- 8개의 "나이테"(ring)와 12개의 "파이 조각"(slice)으로 96개의 같은 크기 셀 구성
- RadialRays: 조각 경계가 직선 반직선, 조각 안에서 조건부 반경 누적으로 나이테 결정
- ConcentricRings: 나이테 경계가 동심원, 나이테 안에서 조건부 각 누적으로 조각 결정
"""

import math
import logging
from enum import Enum
from dataclasses import dataclass, replace
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import RegularGridInterpolator

from config.numerics import CONSTRAINT_TOL, TILING_ANGLES, TILING_RADIAL
from .errors import UsageError, DomainError, IntegrationError, TilingError
from .pom import Pom, PomKind, get_pom, in_space, is_permissible, probabilities, radius_squared
from .sampling import IntegrationBudget, WeightedSample, sample_weighted, quadrature_grid

logger = logging.getLogger(__name__)


class PriorKind(str, Enum):
    PRIMITIVE = 'primitive'
    JEFFREYS_COIN = 'jeffreys-coin'
    JEFFREYS_CROSSHAIR4 = 'jeffreys-crosshair4'
    JEFFREYS_TRINE3 = 'jeffreys-trine3'
    HEDGED_COIN = 'hedged-coin'
    HEDGED = 'hedged'
    CONJUGATE = 'conjugate'
    MARGINAL_PURITY = 'marginal-purity'


# POM 전용 종류 → 허용 POM
_POM_SPECIFIC = {
    PriorKind.JEFFREYS_COIN: PomKind.COIN,
    PriorKind.HEDGED_COIN: PomKind.COIN,
    PriorKind.JEFFREYS_CROSSHAIR4: PomKind.CROSSHAIR4,
    PriorKind.JEFFREYS_TRINE3: PomKind.TRINE3,
}

_JEFFREYS_BY_POM = {
    PomKind.COIN: PriorKind.JEFFREYS_COIN,
    PomKind.CROSSHAIR4: PriorKind.JEFFREYS_CROSSHAIR4,
    PomKind.TRINE3: PriorKind.JEFFREYS_TRINE3,
}

# 닫힌 형태 정규화 상수 (모두 1이 되도록 상수 인자를 골랐다)
_CLOSED_FORM_NORM = {
    PriorKind.PRIMITIVE: 1.0,
    PriorKind.JEFFREYS_COIN: 1.0,
    PriorKind.HEDGED_COIN: 1.0,
    PriorKind.MARGINAL_PURITY: 1.0,
}


@dataclass(frozen=True)
class PriorSpec:
    """이름 있는 사전분포 + (계산되었다면) 정규화 상수 Z"""
    kind: PriorKind
    target: Optional[Tuple[float, ...]] = None
    alpha: Optional[float] = None
    norm: Optional[float] = None
    norm_stderr: float = 0.0

    @property
    def key(self) -> str:
        if self.kind.value.startswith('jeffreys'):
            return 'jeffreys'
        if self.kind.value.startswith('hedged'):
            return 'hedged'
        return self.kind.value

    def with_norm(self, norm: float, stderr: float = 0.0) -> 'PriorSpec':
        return replace(self, norm=float(norm), norm_stderr=float(stderr))


@dataclass(frozen=True)
class NormResult:
    z: float
    stderr: float
    method: str


def resolve_prior(key: str, pom: Pom, target: Optional[Sequence[float]] = None,
                  alpha: Optional[float] = None) -> PriorSpec:
    """
    설정 키 → PriorSpec

    "jeffreys"/"hedged" 는 POM에 맞는 종류로 해석된다.
    "conjugate" 는 target(허용 확률 벡터)과 alpha>0 이 필요하다.
    """
    if key == 'jeffreys':
        return PriorSpec(_JEFFREYS_BY_POM[pom.kind])
    if key == 'hedged':
        return PriorSpec(PriorKind.HEDGED_COIN if pom.kind is PomKind.COIN else PriorKind.HEDGED)
    if key == 'conjugate':
        if target is None or alpha is None:
            raise UsageError("conjugate 사전분포에는 target 과 alpha 가 필요합니다")
        if alpha <= 0:
            raise UsageError(f"conjugate alpha 는 양수여야 합니다: {alpha}")
        t = np.asarray(target, dtype=float)
        if t.shape != (pom.num_outcomes,) or not is_permissible(pom, t):
            raise UsageError(f"conjugate target 이 {pom.key} 의 허용 확률 벡터가 아닙니다: {list(t)}")
        return PriorSpec(PriorKind.CONJUGATE, target=tuple(float(v) for v in t), alpha=float(alpha))
    try:
        kind = PriorKind(key)
    except ValueError:
        raise UsageError(f"알 수 없는 사전분포 키: '{key}'")
    prior = PriorSpec(kind)
    check_compatible(prior, pom)
    return prior


def check_compatible(prior: PriorSpec, pom: Pom) -> None:
    required = _POM_SPECIFIC.get(prior.kind)
    if required is not None and required is not pom.kind:
        raise UsageError(f"{prior.kind.value} 사전분포는 {required.value} 전용입니다 (pom={pom.key})")
    if prior.kind is PriorKind.HEDGED and not pom.is_disk:
        raise UsageError("coin 에는 hedged-coin 을 사용하세요")
    if prior.kind is PriorKind.MARGINAL_PURITY and not pom.is_disk:
        raise UsageError("marginal-purity 사전분포는 원판 POM 전용입니다")


# ============================================================
# 밀도
# ============================================================

def _safe_inv_sqrt(bracket: np.ndarray) -> np.ndarray:
    with np.errstate(divide='ignore', invalid='ignore'):
        return np.where(bracket > 0.0, 1.0 / np.sqrt(np.maximum(bracket, 0.0)), np.inf)


def density(prior: PriorSpec, pom: Pom, coords) -> np.ndarray:
    """
    비정규화 사전밀도 (평탄 좌표 측도 기준)

    재구성 공간 밖의 점은 DomainError. 측도 0 집합(경계의 고립점, 원판 중심)
    에서는 +∞ 를 돌려줄 수 있다 (적분 가능한 발산).
    """
    check_compatible(prior, pom)
    pts = np.asarray(coords, dtype=float)
    if not np.all(in_space(pom, pts)):
        raise DomainError("재구성 공간 밖의 점에서 사전밀도를 평가할 수 없습니다")

    kind = prior.kind
    r2 = radius_squared(pom, pts)

    if kind is PriorKind.PRIMITIVE:
        value = 1.0 / math.pi if pom.is_disk else 0.5
        return np.full(np.shape(r2), value)

    if kind is PriorKind.JEFFREYS_COIN:
        return _safe_inv_sqrt(1.0 - r2) / math.pi

    if kind is PriorKind.HEDGED_COIN:
        return (2.0 / math.pi) * np.sqrt(np.maximum(1.0 - r2, 0.0))

    if kind is PriorKind.MARGINAL_PURITY:
        s = np.sqrt(r2)
        with np.errstate(divide='ignore'):
            return np.where(s > 0.0, np.arccosh(1.0 / np.clip(s, 1e-300, 1.0)), np.inf) / math.pi

    if kind is PriorKind.JEFFREYS_CROSSHAIR4:
        x, y = pts[..., 0], pts[..., 1]
        # 1 − s² + ¼s⁴sin²(2φ) = (1−x²)(1−y²)
        return _safe_inv_sqrt((1.0 - x * x) * (1.0 - y * y))

    if kind is PriorKind.JEFFREYS_TRINE3:
        x, y = pts[..., 0], pts[..., 1]
        # s³cos(3φ) = x³ − 3xy²
        return _safe_inv_sqrt(1.0 - 0.75 * r2 + 0.25 * (x ** 3 - 3.0 * x * y * y))

    p = np.clip(probabilities(pom, pts), 0.0, None)
    if kind is PriorKind.HEDGED:
        return np.sqrt(np.prod(p, axis=-1))

    # CONJUGATE: exp(α Σ t_k log p_k), t_k=0 인 항은 1
    t = np.asarray(prior.target, dtype=float)
    with np.errstate(divide='ignore'):
        logp = np.where(t > 0.0, np.log(p), 0.0)
    return np.exp(prior.alpha * np.sum(t * logp, axis=-1))


def jeffreys_from_probabilities(pom: Pom, coords) -> np.ndarray:
    """Jeffreys 곱 형태 1/√(p₁⋯p_K) - POM별 닫힌 형태와 상수배 차이"""
    p = np.clip(probabilities(pom, coords), 0.0, None)
    return _safe_inv_sqrt(np.prod(p, axis=-1))


# ============================================================
# 정규화 / 표본 추출
# ============================================================

def normalize(prior: PriorSpec, pom: Pom, budget: Optional[IntegrationBudget] = None) -> NormResult:
    """
    정규화 상수 Z = ∫ density 계산

    닫힌 형태가 있으면 그대로 쓰고, 아니면 budget.method 에 따라
    Monte Carlo (표준오차 보고) 또는 결정론적 사분으로 계산한다.
    """
    check_compatible(prior, pom)
    if prior.kind in _CLOSED_FORM_NORM:
        return NormResult(_CLOSED_FORM_NORM[prior.kind], 0.0, 'closed-form')

    budget = budget or IntegrationBudget()
    dens = lambda pts: density(prior, pom, pts)

    if budget.method == 'quadrature':
        nodes = quadrature_grid(pom, dens, budget.radial, budget.angles)
        z, se, method = nodes.total_weight, 0.0, 'quadrature'
    else:
        draws = sample_weighted(pom, dens, budget.samples, budget)
        z = float(np.mean(draws.weights))
        se = float(np.std(draws.weights, ddof=1) / math.sqrt(draws.size)) if draws.size > 1 else 0.0
        method = 'mc'

    if not math.isfinite(z) or z <= 0.0:
        raise IntegrationError(f"{prior.kind.value} 정규화 추정값이 유효하지 않습니다: {z}")
    logger.info(f"{prior.kind.value} 정규화: Z={z:.6g} ± {se:.2g} ({method})")
    return NormResult(z, se, method)


def ensure_normalized(prior: PriorSpec, pom: Pom, budget: Optional[IntegrationBudget] = None) -> PriorSpec:
    """Z 가 없으면 결정론적 사분으로 채운 PriorSpec 반환"""
    if prior.norm is not None:
        return prior
    base = budget or IntegrationBudget()
    result = normalize(prior, pom, replace(base, method='quadrature'))
    return prior.with_norm(result.z, result.stderr)


def sample(prior: PriorSpec, pom: Pom, count: int, seed: int,
           budget: Optional[IntegrationBudget] = None) -> WeightedSample:
    """
    평탄 제안분포 중요도 표본 (가중치 = 정규화 사전밀도 / primitive 밀도)

    Primitive 이면 가중치가 모두 1. 같은 seed → 같은 표본.
    """
    if count < 1:
        raise UsageError("count 는 1 이상이어야 합니다")
    budget = replace(budget or IntegrationBudget(), method='mc', samples=count, seed=seed)
    prior = ensure_normalized(prior, pom, budget)
    return sample_weighted(pom, lambda pts: density(prior, pom, pts), count, budget, norm=prior.norm)


def quadrature_nodes(prior: PriorSpec, pom: Pom, radial: int, angles: int) -> WeightedSample:
    """결정론적 사분 노드 (sample 과 같은 반환형, 가중치 합 = 1)"""
    prior = ensure_normalized(prior, pom)
    return quadrature_grid(pom, lambda pts: density(prior, pom, pts), radial, angles, norm=prior.norm)


def prior_sample(prior: PriorSpec, pom: Pom, budget: IntegrationBudget) -> WeightedSample:
    """budget.method 에 따른 가중 표본 (MC 또는 사분 노드)"""
    prior = ensure_normalized(prior, pom, budget)
    if budget.method == 'quadrature':
        return quadrature_nodes(prior, pom, budget.radial, budget.angles)
    return sample_weighted(pom, lambda pts: density(prior, pom, pts), budget.samples, budget,
                           norm=prior.norm)


# ============================================================
# 순도
# ============================================================

def purity(coords, z: float = 0.0) -> float:
    """큐비트 순도 ξ = ½(1 + x² + y² + z²)"""
    r2 = float(np.sum(np.asarray(coords, dtype=float) ** 2) + z * z)
    if r2 > 1.0 + CONSTRAINT_TOL:
        raise DomainError(f"Bloch 구 밖의 점입니다 (r²={r2:.6g})")
    return 0.5 * (1.0 + r2)


def marginal_purity_radial(s) -> np.ndarray:
    """s²cosh⁻¹(1/s) − √(1−s²): 중심 −1 에서 경계 0 까지 단조 증가"""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide='ignore'):
        head = np.where(s > 0.0, s * s * np.arccosh(1.0 / np.clip(s, 1e-300, 1.0)), 0.0)
    return head - np.sqrt(np.clip(1.0 - s * s, 0.0, None))


def radial_content(prior: PriorSpec, r) -> Optional[np.ndarray]:
    """회전대칭 사전분포의 반경 r 원판 크기 (닫힌 형태가 없으면 None)"""
    if prior.kind is PriorKind.PRIMITIVE:
        return np.asarray(r, dtype=float) ** 2
    if prior.kind is PriorKind.MARGINAL_PURITY:
        return marginal_purity_radial(r) + 1.0
    return None


# ============================================================
# 균등 크기 타일링
# ============================================================

class TilingVariant(str, Enum):
    RADIAL_RAYS = 'radial-rays'
    CONCENTRIC_RINGS = 'concentric-rings'


@dataclass(frozen=True)
class Tiling:
    """
    rings × slices 개의 같은 크기 셀

    RadialRays:      slice_boundaries (slices,) 반직선 각도 상한,
                     ring_radii (slices, rings) 조각별 나이테 반경 상한
    ConcentricRings: ring_radii (rings,) 동심원 반경 상한,
                     slice_boundaries (rings, slices) 나이테별 각도 상한
    각도는 [0, 2π), 마지막 각도 경계는 2π, 마지막 반경은 1.
    """
    variant: TilingVariant
    rings: int
    slices: int
    ring_radii: np.ndarray
    slice_boundaries: np.ndarray

    @property
    def num_cells(self) -> int:
        return self.rings * self.slices

    def cell_index(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        s = np.hypot(pts[:, 0], pts[:, 1])
        phi = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2.0 * math.pi)

        def locate(upper, value, count):
            return np.minimum(np.searchsorted(upper, value, side='right'), count - 1)

        ring = np.empty(len(s), dtype=int)
        piece = np.empty(len(s), dtype=int)
        if self.variant is TilingVariant.RADIAL_RAYS:
            piece[:] = locate(self.slice_boundaries, phi, self.slices)
            for j in range(self.slices):
                mask = piece == j
                ring[mask] = locate(self.ring_radii[j], s[mask], self.rings)
        else:
            ring[:] = locate(self.ring_radii, s, self.rings)
            for i in range(self.rings):
                mask = ring == i
                piece[mask] = locate(self.slice_boundaries[i], phi[mask], self.slices)
        return ring * self.slices + piece

    def to_dict(self) -> Dict:
        return {
            'variant': self.variant.value,
            'rings': self.rings,
            'slices': self.slices,
            'ring_radii': np.asarray(self.ring_radii).tolist(),
            'slice_boundaries': np.asarray(self.slice_boundaries).tolist(),
        }


def _bisect_level(fn, target: float, lo: float, hi: float, what: str) -> float:
    f_lo, f_hi = fn(lo) - target, fn(hi) - target
    if f_lo > 0.0 or f_hi < 0.0:
        raise TilingError(f"{what}: 누적 적분이 단조가 아닙니다 (f(lo)={f_lo:.3g}, f(hi)={f_hi:.3g})")
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    return optimize.bisect(lambda v: fn(v) - target, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def _symmetric_tiling(prior: PriorSpec, rings: int, slices: int, variant: TilingVariant) -> Tiling:
    radii = np.array([
        _bisect_level(lambda r: float(radial_content(prior, r)), i / rings, 0.0, 1.0, f"ring {i}")
        for i in range(1, rings)
    ] + [1.0])
    rays = 2.0 * math.pi * np.arange(1, slices + 1) / slices

    if variant is TilingVariant.RADIAL_RAYS:
        return Tiling(variant, rings, slices, np.tile(radii, (slices, 1)), rays)
    return Tiling(variant, rings, slices, radii, np.tile(rays, (rings, 1)))


def _cumulative_table(prior: PriorSpec, pom: Pom, radial: int, angles: int):
    """(θ, φ) 격자 위의 누적 사전 질량 C[i, j] = 질량([0,θ_i]×[0,φ_j])"""
    nodes = quadrature_grid(pom, lambda pts: density(prior, pom, pts), radial, angles)
    cells = nodes.weights.reshape(nodes.grid_shape)
    if not np.all(np.isfinite(cells)) or np.any(cells < 0.0):
        raise TilingError("셀 질량이 유한한 비음수가 아닙니다")
    cells = cells / cells.sum()

    table = np.zeros((radial + 1, angles + 1))
    table[1:, 1:] = np.cumsum(np.cumsum(cells, axis=0), axis=1)
    theta_edges = np.linspace(0.0, 0.5 * math.pi, radial + 1)
    phi_edges = np.linspace(0.0, 2.0 * math.pi, angles + 1)
    return theta_edges, phi_edges, table


def tiling(prior: PriorSpec, pom: Pom, rings: int = 8, slices: int = 12,
           variant: TilingVariant = TilingVariant.RADIAL_RAYS,
           budget: Optional[IntegrationBudget] = None) -> Tiling:
    """
    원판을 rings × slices 개의 같은 크기 셀로 나누는 타일링

    회전대칭 사전분포(primitive, marginal-purity)는 닫힌 형태 반경 누적의
    이분법, 나머지는 (θ, φ) 누적 질량표 위의 이분법으로 경계를 찾는다.
    """
    if not pom.is_disk:
        raise UsageError("tiling 은 원판 POM 전용입니다 (coin 은 coin_segments 사용)")
    if rings < 1 or slices < 1:
        raise UsageError("rings, slices 는 1 이상이어야 합니다")
    check_compatible(prior, pom)
    variant = TilingVariant(variant)

    if radial_content(prior, 0.5) is not None:
        result = _symmetric_tiling(prior, rings, slices, variant)
        logger.info(f"{prior.kind.value} 타일링 (닫힌 형태): 반경 {np.round(result.ring_radii, 6).tolist()}")
        return result

    radial = budget.radial if budget and budget.method == 'quadrature' else TILING_RADIAL
    angles = budget.angles if budget and budget.method == 'quadrature' else TILING_ANGLES
    theta_edges, phi_edges, table = _cumulative_table(prior, pom, radial, angles)
    cum = RegularGridInterpolator((theta_edges, phi_edges), table)
    half_pi, two_pi = 0.5 * math.pi, 2.0 * math.pi

    def mass(theta: float, phi: float) -> float:
        return float(cum([[theta, phi]])[0])

    if variant is TilingVariant.RADIAL_RAYS:
        rays = [
            _bisect_level(lambda a: mass(half_pi, a), j / slices, 0.0, two_pi, f"slice {j}")
            for j in range(1, slices)
        ] + [two_pi]
        lower = [0.0] + rays[:-1]
        radii = np.empty((slices, rings))
        for j in range(slices):
            a, b = lower[j], rays[j]
            in_slice = lambda t: (mass(t, b) - mass(t, a)) * slices
            thetas = [
                _bisect_level(in_slice, i / rings, 0.0, half_pi, f"slice {j} ring {i}")
                for i in range(1, rings)
            ]
            radii[j] = np.append(np.sin(thetas), 1.0)
        result = Tiling(variant, rings, slices, radii, np.asarray(rays))
    else:
        thetas = [
            _bisect_level(lambda t: mass(t, two_pi), i / rings, 0.0, half_pi, f"ring {i}")
            for i in range(1, rings)
        ] + [half_pi]
        lower = [0.0] + thetas[:-1]
        bounds = np.empty((rings, slices))
        for i in range(rings):
            t0, t1 = lower[i], thetas[i]
            in_ring = lambda a: (mass(t1, a) - mass(t0, a)) * rings
            bounds[i] = [
                _bisect_level(in_ring, j / slices, 0.0, two_pi, f"ring {i} slice {j}")
                for j in range(1, slices)
            ] + [two_pi]
        radii = np.append(np.sin(thetas[:-1]), 1.0)
        result = Tiling(variant, rings, slices, radii, bounds)

    logger.info(f"{prior.kind.value} 타일링 완료 ({variant.value}, {rings}×{slices})")
    return result


def tiling_cell_sizes(tiling_: Tiling, sample_: WeightedSample) -> Tuple[np.ndarray, np.ndarray]:
    """각 셀의 사전 크기 추정값과 표준오차"""
    idx = tiling_.cell_index(sample_.points)
    w = sample_.weights
    total = float(np.sum(w))
    sizes = np.bincount(idx, weights=w, minlength=tiling_.num_cells) / total
    if sample_.deterministic:
        return sizes, np.zeros_like(sizes)
    w2_in = np.bincount(idx, weights=w * w, minlength=tiling_.num_cells)
    w2_all = float(np.sum(w * w))
    var = (1.0 - sizes) ** 2 * w2_in + sizes ** 2 * (w2_all - w2_in)
    return sizes, np.sqrt(var) / total


def coin_segments(prior: PriorSpec, count: int) -> np.ndarray:
    """coin 선분을 count 개의 같은 크기 구간으로 나누는 경계 u₀=−1 < … < u_count=1"""
    if count < 1:
        raise UsageError("count 는 1 이상이어야 합니다")
    frac = np.arange(count + 1) / count
    if prior.kind is PriorKind.PRIMITIVE:
        return 2.0 * frac - 1.0
    if prior.kind is PriorKind.JEFFREYS_COIN:
        return -np.cos(math.pi * frac)

    pom = get_pom(PomKind.COIN)
    prior = ensure_normalized(prior, pom)
    cdf = lambda u: integrate.quad(
        lambda v: float(density(prior, pom, [v])), -1.0, u, epsabs=1e-12
    )[0] / prior.norm
    inner = [_bisect_level(cdf, f, -1.0, 1.0, f"segment {i}") for i, f in enumerate(frac[1:-1], 1)]
    return np.array([-1.0] + inner + [1.0])
