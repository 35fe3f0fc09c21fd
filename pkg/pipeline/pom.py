"""
측정 모델(POM) 모듈 - 재구성 공간 좌표와 Born 규칙 확률 사상
============================================================

내장 측정 3종:
- Coin (K=2, d=1): u∈[−1,1], p₁=(1+u)/2, p₂=(1−u)/2
- CrossHair4 (K=4, d=2): p₁,p₂=¼(1±x), p₃,p₄=¼(1±y)
- Trine3 (K=3, d=2): p₁=⅓(1+x), p₂,p₃=⅙(2−x±√3y)

원판 POM의 재구성 공간은 x²+y²≤1 인 단위 원판이고, 허용 확률 제약은
- CrossHair4: p₁+p₂=½, p₃+p₄=½, 3−8p²≥0  (3−8p² = 1−x²−y²)
- Trine3:     Σp=1, 1−2p²≥0              (1−2p² = (1−x²−y²)/3)
으로 요약된다 (p² = Σ p_k²).

좌표와 확률은 numpy 배열로 다룬다. 모든 함수는 마지막 축이 좌표/결과 축인
(n, d) / (n, K) 배치 입력도 받는다.
"""

import math
import logging
from enum import Enum
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from config.poms import POM_CATALOG
from config.numerics import CONSTRAINT_TOL
from .errors import UsageError

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)

# 재구성 공간의 점 (coin: (u,), 원판: (x, y)) / 확률 벡터
ReconstructionPoint = np.ndarray
ProbabilityVector = np.ndarray
ArrayLike = Union[Sequence[float], np.ndarray]


class PomKind(str, Enum):
    COIN = 'coin'
    CROSSHAIR4 = 'crosshair4'
    TRINE3 = 'trine3'


@dataclass(frozen=True)
class Pom:
    """측정 모델: 결과 수 K, 독립 좌표 수 d"""
    kind: PomKind
    num_outcomes: int
    dimension: int

    @property
    def key(self) -> str:
        return self.kind.value

    @property
    def is_disk(self) -> bool:
        return self.dimension == 2

    @property
    def symmetry_order(self) -> int:
        return POM_CATALOG[self.kind.value]['symmetry_order']

    @property
    def space_area(self) -> float:
        """평탄 좌표 측도에서 재구성 공간의 넓이 (원판 π, 선분 2)"""
        return math.pi if self.is_disk else 2.0


POMS = {
    PomKind(key): Pom(PomKind(key), info['num_outcomes'], info['dimension'])
    for key, info in POM_CATALOG.items()
}


def get_pom(key: Union[str, PomKind, Pom]) -> Pom:
    """설정 문자열 키 → Pom"""
    if isinstance(key, Pom):
        return key
    try:
        return POMS[PomKind(key)]
    except ValueError:
        raise UsageError(f"알 수 없는 POM 키: '{key}' (가능: {', '.join(POM_CATALOG)})")


@dataclass(frozen=True)
class Counts:
    """검출기별 클릭 수 n_k 와 총합 N"""
    n: tuple

    @classmethod
    def of(cls, pom: Pom, values: ArrayLike) -> 'Counts':
        values = [int(v) for v in values]
        if len(values) != pom.num_outcomes:
            raise UsageError(
                f"counts 길이 {len(values)} 가 {pom.key} 의 결과 수 {pom.num_outcomes} 와 다릅니다"
            )
        if any(v < 0 for v in values):
            raise UsageError(f"counts 는 음이 아닌 정수여야 합니다: {values}")
        return cls(tuple(values))

    @property
    def total(self) -> int:
        return int(sum(self.n))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.n, dtype=float)

    @property
    def frequencies(self) -> np.ndarray:
        if self.total == 0:
            raise UsageError("N=0 인 데이터에는 상대도수가 정의되지 않습니다")
        return self.array / self.total

    def __len__(self) -> int:
        return len(self.n)


def _as_coords(pom: Pom, coords: ArrayLike) -> np.ndarray:
    pts = np.asarray(coords, dtype=float)
    if pts.ndim == 0 or pts.shape[-1] != pom.dimension:
        raise UsageError(
            f"좌표 차원 {pts.shape[-1] if pts.ndim else 0} 이(가) {pom.key} 의 차원 {pom.dimension} 과 다릅니다"
        )
    return pts


def radius_squared(pom: Pom, coords: ArrayLike) -> np.ndarray:
    pts = _as_coords(pom, coords)
    return np.sum(pts ** 2, axis=-1)


def in_space(pom: Pom, coords: ArrayLike, tol: float = CONSTRAINT_TOL) -> Union[bool, np.ndarray]:
    """닫힌 단위 원판 (coin: 닫힌 선분) 포함 여부"""
    r2 = radius_squared(pom, coords)
    inside = r2 <= 1.0 + tol
    return bool(inside) if np.ndim(inside) == 0 else inside


def probabilities(pom: Pom, coords: ArrayLike) -> ProbabilityVector:
    """재구성 좌표 → 확률 벡터 (POM별 아핀 사상)"""
    pts = _as_coords(pom, coords)

    if pom.kind is PomKind.COIN:
        u = pts[..., 0]
        return np.stack([(1.0 + u) / 2.0, (1.0 - u) / 2.0], axis=-1)

    x, y = pts[..., 0], pts[..., 1]
    if pom.kind is PomKind.CROSSHAIR4:
        return np.stack([(1.0 + x) / 4.0, (1.0 - x) / 4.0,
                         (1.0 + y) / 4.0, (1.0 - y) / 4.0], axis=-1)

    return np.stack([(1.0 + x) / 3.0,
                     (2.0 - x + SQRT3 * y) / 6.0,
                     (2.0 - x - SQRT3 * y) / 6.0], axis=-1)


def purity_constraint(pom: Pom, p: ArrayLike) -> np.ndarray:
    """POM별 step 제약의 좌변 (CrossHair4: 3−8p², Trine3: 1−2p², Coin: 1)"""
    p = np.asarray(p, dtype=float)
    p2 = np.sum(p ** 2, axis=-1)
    if pom.kind is PomKind.CROSSHAIR4:
        return 3.0 - 8.0 * p2
    if pom.kind is PomKind.TRINE3:
        return 1.0 - 2.0 * p2
    return np.ones_like(p2)


def is_permissible(pom: Pom, p: ArrayLike, tol: float = CONSTRAINT_TOL) -> Union[bool, np.ndarray]:
    """확률 벡터가 POM의 delta/step 제약을 모두 만족하는지"""
    p = np.asarray(p, dtype=float)
    if p.ndim == 0 or p.shape[-1] != pom.num_outcomes:
        raise UsageError(f"확률 벡터 길이가 {pom.key} 의 결과 수 {pom.num_outcomes} 와 다릅니다")

    ok = np.all(p >= -tol, axis=-1) & (np.abs(np.sum(p, axis=-1) - 1.0) <= tol)
    if pom.kind is PomKind.CROSSHAIR4:
        ok &= np.abs(p[..., 0] + p[..., 1] - 0.5) <= tol
        ok &= np.abs(p[..., 2] + p[..., 3] - 0.5) <= tol
    if pom.is_disk:
        ok &= purity_constraint(pom, p) >= -tol

    return bool(ok) if np.ndim(ok) == 0 else ok


def coordinates_from_frequencies(pom: Pom, counts: Counts) -> Optional[ReconstructionPoint]:
    """
    상대도수로부터 우도 정상점(stationary point) 좌표 계산

    - CrossHair4: x=(n₁−n₂)/(n₁+n₂), y=(n₃−n₄)/(n₃+n₄)
    - Trine3:     x=3ν₁−1, y=√3(ν₂−ν₃)
    - Coin:       u=2ν₁−1

    재구성 공간 밖이거나 분모가 0이면 None
    """
    if counts.total == 0:
        raise UsageError("N=0 데이터는 MLE 후보를 갖지 않습니다")
    n = counts.array

    if pom.kind is PomKind.COIN:
        nu = counts.frequencies
        return np.array([2.0 * nu[0] - 1.0])

    if pom.kind is PomKind.CROSSHAIR4:
        nx, ny = n[0] + n[1], n[2] + n[3]
        if nx == 0 or ny == 0:
            return None
        pt = np.array([(n[0] - n[1]) / nx, (n[2] - n[3]) / ny])
    else:
        nu = counts.frequencies
        pt = np.array([3.0 * nu[0] - 1.0, SQRT3 * (nu[1] - nu[2])])

    if not in_space(pom, pt):
        return None
    return pt


def polar(coords: ArrayLike) -> tuple:
    """원판 좌표 → (s, φ)"""
    pts = np.asarray(coords, dtype=float)
    return np.hypot(pts[..., 0], pts[..., 1]), np.arctan2(pts[..., 1], pts[..., 0])


def from_polar(s: ArrayLike, phi: ArrayLike) -> np.ndarray:
    s, phi = np.asarray(s, dtype=float), np.asarray(phi, dtype=float)
    return np.stack([s * np.cos(phi), s * np.sin(phi)], axis=-1)
