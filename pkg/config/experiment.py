"""
실험 설정 스키마 (pydantic)
===========================

CLI(--config JSON)와 API 요청 본문이 공유하는 단일 설정 문서.

시드 분할:
- 최상위 seed → SeedSequence(seed).spawn(2)
  - 자식 0: 시뮬레이션 (simulation.seed 가 있으면 그것을 우선)
  - 자식 1: 사전분포 표본 (budget.seed 가 있으면 그것을 우선)
"""

from typing import Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .poms import POM_CATALOG, PRIOR_CATALOG
from .numerics import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_CHUNK_SIZE,
    DEFAULT_WORKERS,
    LAMBDA_GRID_POINTS,
    QUADRATURE_ANGLES,
    QUADRATURE_RADIAL,
    CONTOUR_ANGLES,
)

PomKey = Literal['coin', 'crosshair4', 'trine3']
Mode = Literal['size', 'credibility']


class PriorConfig(BaseModel):
    """사전분포 (키 + conjugate 파라미터)"""
    model_config = ConfigDict(extra='forbid')

    kind: str
    target: Optional[List[float]] = None
    alpha: Optional[float] = None

    @field_validator('kind')
    @classmethod
    def known_kind(cls, v: str) -> str:
        if v not in PRIOR_CATALOG:
            raise ValueError(f"알 수 없는 사전분포 키 '{v}' (가능: {', '.join(PRIOR_CATALOG)})")
        return v


class SimulationConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    true_point: List[float]
    N: int = Field(ge=0)
    seed: Optional[int] = None


class BudgetConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    method: Literal['mc', 'quadrature'] = 'mc'
    samples: int = Field(DEFAULT_SAMPLES, ge=1)
    seed: Optional[int] = None
    chunk_size: int = Field(DEFAULT_CHUNK_SIZE, ge=1)
    workers: int = Field(DEFAULT_WORKERS, ge=1)
    angles: int = Field(QUADRATURE_ANGLES, ge=1)
    radial: int = Field(QUADRATURE_RADIAL, ge=1)


class LambdaGridConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    points: int = Field(LAMBDA_GRID_POINTS, ge=2)
    values: Optional[List[float]] = None

    @field_validator('values')
    @classmethod
    def increasing_unit(cls, v):
        if v is not None:
            arr = np.asarray(v, dtype=float)
            if len(arr) < 2 or np.any(arr < 0) or np.any(arr > 1) or np.any(np.diff(arr) <= 0):
                raise ValueError("lambda_grid.values 는 [0, 1] 안에서 순증가하는 2개 이상의 값이어야 합니다")
        return v


class TilingConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    rings: int = Field(8, ge=1)
    slices: int = Field(12, ge=1)
    variant: Literal['radial-rays', 'concentric-rings'] = 'radial-rays'
    segments: int = Field(8, ge=1)


class ConfidenceConfig(BaseModel):
    """영역 집합을 직접 주거나 (N, credibility) 로 SCR 집합 생성"""
    model_config = ConfigDict(extra='forbid')

    N: Optional[int] = Field(None, ge=1)
    credibility: Optional[float] = Field(None, gt=0.0, lt=1.0)
    region_set: Optional[Dict] = None
    grid: int = Field(10_000, ge=1000)

    @model_validator(mode='after')
    def one_source(self):
        if (self.region_set is None) == (self.N is None or self.credibility is None):
            raise ValueError("confidence 에는 region_set 또는 (N, credibility) 중 하나만 지정하세요")
        return self


class ExperimentConfig(BaseModel):
    """실험 설정 문서"""
    model_config = ConfigDict(extra='forbid')

    pom: PomKey
    prior: Union[str, PriorConfig] = 'primitive'
    counts: Optional[List[int]] = None
    simulation: Optional[SimulationConfig] = None
    budget: BudgetConfig = Field(default_factory=BudgetConfig)
    lambda_grid: LambdaGridConfig = Field(default_factory=LambdaGridConfig)
    direct_credibility: bool = True
    seed: int = DEFAULT_SEED

    # 서브커맨드 블록
    tiling: TilingConfig = Field(default_factory=TilingConfig)
    confidence: Optional[ConfidenceConfig] = None
    target: Optional[float] = Field(None, gt=0.0, lt=1.0)
    mode: Mode = 'credibility'
    point: Optional[List[float]] = None
    lambda_value: Optional[float] = Field(None, gt=0.0, lt=1.0)
    contour_angles: int = Field(CONTOUR_ANGLES, ge=8)

    @field_validator('prior', mode='before')
    @classmethod
    def prior_object(cls, v):
        if isinstance(v, str):
            if v not in PRIOR_CATALOG:
                raise ValueError(f"알 수 없는 사전분포 키 '{v}' (가능: {', '.join(PRIOR_CATALOG)})")
        return v

    @field_validator('counts')
    @classmethod
    def non_negative(cls, v):
        if v is not None and any(n < 0 for n in v):
            raise ValueError("counts 는 음이 아닌 정수여야 합니다")
        return v

    @model_validator(mode='after')
    def consistent(self):
        info = POM_CATALOG[self.pom]
        if self.counts is not None and self.simulation is not None:
            raise ValueError("counts 와 simulation 중 하나만 지정하세요")
        if self.counts is not None and len(self.counts) != info['num_outcomes']:
            raise ValueError(f"counts 길이는 {self.pom} 의 결과 수 {info['num_outcomes']} 여야 합니다")
        if self.simulation is not None and len(self.simulation.true_point) != info['dimension']:
            raise ValueError(f"simulation.true_point 차원은 {info['dimension']} 이어야 합니다")
        if self.point is not None and len(self.point) != info['dimension']:
            raise ValueError(f"point 차원은 {info['dimension']} 이어야 합니다")
        if self.prior_key not in info['priors']:
            raise ValueError(f"{self.prior_key} 사전분포는 {self.pom} 에서 쓸 수 없습니다")
        return self

    @property
    def prior_key(self) -> str:
        return self.prior if isinstance(self.prior, str) else self.prior.kind

    @property
    def prior_params(self) -> Dict:
        if isinstance(self.prior, str):
            return {}
        return {'target': self.prior.target, 'alpha': self.prior.alpha}

    def child_seeds(self) -> Dict[str, int]:
        """최상위 seed 에서 시뮬레이션/표본 시드 분할"""
        children = np.random.SeedSequence(self.seed).spawn(2)
        simulation, sampler = (int(c.generate_state(1)[0]) for c in children)
        if self.simulation is not None and self.simulation.seed is not None:
            simulation = self.simulation.seed
        if self.budget.seed is not None:
            sampler = self.budget.seed
        return {'simulation': simulation, 'sampler': sampler}
