"""
설정 모듈 - 측정 모델, 사전분포, 수치 기본값
============================================

poms.py:
- POM_CATALOG: 내장 측정 3종 (coin, crosshair4, trine3)
- PRIOR_CATALOG: 사전분포 키 5종

numerics.py:
- 허용오차, λ 격자, 피팅/경계선 설정
- 환경 변수 기반 샘플 수/시드/서버 설정

experiment.py:
- ExperimentConfig: CLI와 API가 공유하는 실험 설정 스키마 (pydantic)
"""
from .poms import POM_CATALOG, PRIOR_CATALOG
from .numerics import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_CHUNK_SIZE,
    DEFAULT_WORKERS,
    LAMBDA_GRID_POINTS,
)
