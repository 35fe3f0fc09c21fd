"""
프로세서 모듈 - 실험 설정 하나로 전체 계산을 조율
================================================

ErrorRegionProcessor 가 CLI 서브커맨드와 API 엔드포인트 양쪽의 공통 진입점이다.

파이프라인 (regions):
1. counts 확정 (설정값 또는 시뮬레이션)
2. 사전분포 정규화 + 공유 가중 표본 1회 생성
3. MLE → λ₀ → 크기 곡선 s_λ (+ 직접 신용도 c_λ)
4. 크기 곡선 피팅 → s 로부터 c_λ, 비율 극한, 함축 L(D)
5. curve.csv / fit.json / summary.json 저장

출력 결정론:
- JSON 은 sort_keys, 타임스탬프 없음
- CSV 는 고정 float 형식
같은 설정 + 시드 → 바이트 단위로 같은 파일
"""

import json
import math
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from config.experiment import ExperimentConfig
from .errors import UsageError
from .pom import Counts, get_pom
from .prior import (
    PriorSpec,
    TilingVariant,
    resolve_prior,
    ensure_normalized,
    prior_sample,
    tiling as build_tiling,
    tiling_cell_sizes,
    coin_segments,
)
from .sampling import IntegrationBudget, WeightedSample
from .likelihood import simulate, summarize, bayesian_mean
from .blr import (
    BlrCurve,
    Contour,
    size_curve,
    credibility_direct,
    default_lambda_grid,
    lambda0,
    membership,
    boundary_contour,
)
from .curvefit import SizeFit, fit_size, credibility_curve, ratio_limit, find_lambda
from .oracle import CoinCurve, coin_quadrature
from .confidence import RegionSet, confidence_level, scr_interval_set

logger = logging.getLogger(__name__)


def to_jsonable(value):
    """numpy 값 → JSON 직렬화 가능한 값 (NaN 은 null)"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def write_json(path: Path, data: Dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(to_jsonable(data), f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write('\n')
    logger.info(f"저장: {path}")
    return path


@dataclass(frozen=True)
class RegionsResult:
    curve: BlrCurve
    fit: SizeFit
    summary: Dict

    def to_dict(self) -> Dict:
        frame = self.curve.to_frame()
        return {
            'summary': self.summary,
            'fit': self.fit.to_dict(),
            'curve': {col: frame[col].tolist() for col in frame.columns},
        }


@dataclass(frozen=True)
class FindResult:
    mode: str
    target: float
    lam: float
    contour: Optional[Contour]

    def to_dict(self) -> Dict:
        data = {'mode': self.mode, 'target': self.target, 'lambda': self.lam}
        if self.contour is not None:
            data['contour_points'] = len(self.contour.angles)
            data['contour_approximate'] = self.contour.approximate
        return data


class ErrorRegionProcessor:
    """
    설정 하나에 대한 오차 영역 계산기

    같은 인스턴스 안에서는 counts, 가중 표본, regions 결과를 캐시해서
    find / member / boundary 가 같은 곡선을 공유한다.
    """

    def __init__(self, config: ExperimentConfig, out_dir: Optional[str] = None):
        self.config = config
        self.out_dir = Path(out_dir) if out_dir else None
        self.pom = get_pom(config.pom)
        self.prior: PriorSpec = resolve_prior(config.prior_key, self.pom, **config.prior_params)

        seeds = config.child_seeds()
        self.simulation_seed = seeds['simulation']
        b = config.budget
        self.budget = IntegrationBudget(
            method=b.method, samples=b.samples, seed=seeds['sampler'],
            chunk_size=b.chunk_size, workers=b.workers, angles=b.angles, radial=b.radial,
        )
        self.warnings: List[str] = []
        self._counts: Optional[Counts] = None
        self._sample: Optional[WeightedSample] = None
        self._regions: Optional[RegionsResult] = None

    # ============== 입력 ==============

    @property
    def counts(self) -> Counts:
        if self._counts is None:
            if self.config.counts is not None:
                self._counts = Counts.of(self.pom, self.config.counts)
            elif self.config.simulation is not None:
                sim = self.config.simulation
                self._counts = simulate(self.pom, sim.true_point, sim.N, self.simulation_seed)
            else:
                raise UsageError("이 명령에는 counts 또는 simulation 설정이 필요합니다")
        return self._counts

    def lambda_grid(self, lam0: float = 0.0) -> np.ndarray:
        grid = self.config.lambda_grid
        if grid.values is not None:
            return np.asarray(grid.values, dtype=float)
        return default_lambda_grid(grid.points, lam0)

    def sample(self) -> WeightedSample:
        if self._sample is None:
            self.prior = ensure_normalized(self.prior, self.pom, self.budget)
            self._sample = prior_sample(self.prior, self.pom, self.budget)
            logger.info(f"{self.prior.kind.value} 표본 {self._sample.size}개 ({self.budget.method})")
            if self._sample.redrawn:
                self._warn(f"비유한 가중치 {self._sample.redrawn}개 재추출")
        return self._sample

    def _warn(self, message: str) -> None:
        if message not in self.warnings:
            logger.warning(message)
            self.warnings.append(message)

    # ============== 명령 ==============

    def simulate(self) -> Dict:
        if self.config.simulation is None:
            raise UsageError("simulate 명령에는 simulation 설정이 필요합니다")
        return {'pom': self.pom.key, 'counts': list(self.counts.n), 'seed': self.simulation_seed}

    def regions(self) -> RegionsResult:
        if self._regions is not None:
            return self._regions

        counts = self.counts
        sample = self.sample()
        curve = size_curve(self.pom, self.prior, counts, self._grid_for(counts), self.budget, sample=sample)
        if curve.degenerate:
            self._warn("N=0: 모든 λ 에서 재구성 공간 전체")

        if self.config.direct_credibility and not curve.degenerate:
            direct = credibility_direct(self.pom, self.prior, counts, curve.lambdas, self.budget, sample=sample)
            curve = curve.with_direct(direct)

        fit = fit_size(curve, self.pom)
        if fit.fallback_used and not fit.trivial:
            self._warn("유리함수 적합 실패: PCHIP 보간 사용")
        curve = curve.with_fit(credibility_curve(fit, curve.lambdas))

        summary = self._summary(curve, fit, counts, sample)
        self._regions = RegionsResult(curve, fit, summary)

        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            curve.to_csv(self.out_dir / 'curve.csv')
            write_json(self.out_dir / 'fit.json', fit.to_dict())
            write_json(self.out_dir / 'summary.json', summary)
        return self._regions

    def _grid_for(self, counts: Counts) -> np.ndarray:
        if self.config.lambda_grid.values is not None or counts.total == 0:
            return self.lambda_grid()
        return self.lambda_grid(lambda0(self.pom, counts))

    def _summary(self, curve: BlrCurve, fit: SizeFit, counts: Counts, sample: WeightedSample) -> Dict:
        summary = {
            'pom': self.pom.key,
            'prior': self.prior.kind.value,
            'counts': list(counts.n),
            'lambda0': curve.lambda0,
            'log_L_max': curve.log_L_max,
            'fit_fallback': fit.fallback_used,
            'samples': sample.size,
            'method': self.budget.method,
        }
        if counts.total == 0:
            summary.update({'mle': None, 'on_boundary': False, 'log_L_D': 0.0, 'ratio_limit': 1.0,
                            'low_ess': False})
        else:
            limit = ratio_limit(fit, curve.log_L_max)
            info = summarize(self.pom, counts)
            posterior = bayesian_mean(self.pom, self.prior, counts, self.budget, sample=sample)
            if posterior.low_ess:
                self._warn(f"사후 유효 샘플 수 부족 (ESS={posterior.effective_samples:.1f})")
            summary.update({
                'mle': info.mle,
                'on_boundary': info.mle_on_boundary,
                'log_L_D': limit.log_L_D,
                'ratio_limit': limit.ratio,
                'log_L_D_direct': curve.log_L_D,
                'bayesian_mean': posterior.point,
                'effective_samples': posterior.effective_samples,
                'low_ess': posterior.low_ess,
            })
            if posterior.purity is not None:
                summary['bayesian_mean_purity'] = posterior.purity
            if info.mle_on_boundary:
                self._warn("MLE 가 재구성 공간 경계에 있음")
        summary['warnings'] = list(self.warnings)
        return summary

    def _resolve_target(self, mode: Optional[str], target: Optional[float]):
        mode = mode or self.config.mode
        target = self.config.target if target is None else target
        if target is None:
            raise UsageError("target 이 필요합니다 (--target 또는 설정의 target)")
        if not 0.0 < target < 1.0:
            raise UsageError(f"target 은 (0, 1) 범위여야 합니다: {target}")
        if mode not in ('size', 'credibility'):
            raise UsageError(f"mode 는 'size' 또는 'credibility' 여야 합니다: {mode}")
        return mode, float(target)

    def find(self, mode: Optional[str] = None, target: Optional[float] = None,
             with_contour: bool = True) -> FindResult:
        mode, target = self._resolve_target(mode, target)
        result = self.regions()
        lam = find_lambda(result.fit, target, mode)

        contour = None
        if with_contour and 0.0 < lam < 1.0:
            contour = boundary_contour(self.pom, self.counts, lam, self.config.contour_angles,
                                       result.curve.log_L_max)
            if contour.approximate:
                self._warn("경계 MLE: 경계선은 근사값")
        found = FindResult(mode, target, lam, contour)

        if self.out_dir is not None:
            write_json(self.out_dir / 'find.json', found.to_dict())
            if contour is not None:
                contour.to_csv(self.out_dir / 'contour.csv')
        return found

    def member(self, point, mode: Optional[str] = None, target: Optional[float] = None) -> Dict:
        point = self.config.point if point is None else point
        if point is None:
            raise UsageError("member 명령에는 point 가 필요합니다")
        found = self.find(mode, target, with_contour=False)
        inside = membership(self.pom, self.counts, point, found.lam, self.regions().curve.log_L_max)
        result = {'point': list(point), 'mode': found.mode, 'target': found.target,
                  'lambda': found.lam, 'inside': bool(inside)}
        if self.out_dir is not None:
            write_json(self.out_dir / 'member.json', result)
        return result

    def boundary(self, lam: Optional[float] = None) -> Contour:
        lam = self.config.lambda_value if lam is None else lam
        if lam is None:
            lam = self.find(with_contour=False).lam
        contour = boundary_contour(self.pom, self.counts, lam, self.config.contour_angles)
        if self.out_dir is not None:
            contour.to_csv(self.out_dir / 'contour.csv')
        return contour

    def tiling(self) -> Dict:
        cfg = self.config.tiling
        if not self.pom.is_disk:
            result = {'pom': self.pom.key, 'prior': self.prior.kind.value,
                      'segments': coin_segments(self.prior, cfg.segments)}
        else:
            tiles = build_tiling(self.prior, self.pom, cfg.rings, cfg.slices,
                                 TilingVariant(cfg.variant), self.budget)
            sizes, stderr = tiling_cell_sizes(tiles, self.sample())
            result = {'pom': self.pom.key, 'prior': self.prior.kind.value, **tiles.to_dict(),
                      'cell_sizes': sizes, 'cell_stderr': stderr}
        if self.out_dir is not None:
            write_json(self.out_dir / 'tiling.json', result)
        return to_jsonable(result)

    def oracle(self) -> CoinCurve:
        if self.pom.key != 'coin':
            raise UsageError("oracle 명령은 coin 전용입니다")
        curve = coin_quadrature(self.prior, self.counts, self.lambda_grid())
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            curve.to_csv(self.out_dir / 'oracle.csv')
        return curve

    def confidence(self) -> Dict:
        if self.pom.key != 'coin':
            raise UsageError("confidence 명령은 coin 전용입니다")
        cfg = self.config.confidence
        if cfg is None:
            raise UsageError("confidence 명령에는 confidence 설정 블록이 필요합니다")
        if cfg.region_set is not None:
            region_set = RegionSet.from_json(cfg.region_set)
        else:
            region_set = scr_interval_set(cfg.N, self.prior, cfg.credibility)
        gamma = confidence_level(region_set, cfg.grid)
        result = {'gamma': gamma, 'grid': cfg.grid, 'region_set': region_set.to_dict()}
        if self.out_dir is not None:
            write_json(self.out_dir / 'confidence.json', result)
        return result
