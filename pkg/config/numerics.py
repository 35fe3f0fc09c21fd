"""
수치 계산 설정
==============

BLR(bounded-likelihood region) 계산에 쓰이는 허용오차와 기본 예산

주요 설정:
- 확률 등식 제약: 절대 허용오차 1e-9
- MLE: 좌표 허용오차 1e-10, 경계 탐색 각도 허용오차 1e-12
- λ 격자: 101점, √(1−λ)에 대해 균일
- Monte Carlo: 기본 10만 샘플, 청크 65536개 단위

환경 변수 (.env):
- OER_SAMPLES: Monte Carlo 샘플 수
- OER_SEED: 기본 시드
- OER_CHUNK_SIZE: 샘플링 청크 크기
- OER_WORKERS: 청크 병렬 처리 스레드 수
- OER_LOG_LEVEL: CLI 로그 레벨
- OER_HOST / OER_PORT: API 서버 주소
"""
import os
from pathlib import Path

try:
    from dotenv import load_dotenv
    # 프로젝트 루트의 .env 파일 명시적 로드
    load_dotenv(Path(__file__).parent.parent / ".env")
except ImportError:
    pass

# 확률/제약 허용오차
CONSTRAINT_TOL = 1e-9
MEMBERSHIP_TOL = 1e-12

# MLE / λ₀ 탐색
MLE_TOL = 1e-10
BOUNDARY_ANGLE_TOL = 1e-12
BOUNDARY_SCAN_POINTS = 2048

# λ 격자
LAMBDA_GRID_POINTS = 101

# 곡선 피팅
FIT_MIN_POINTS = 20
FIT_ZETA_BOUNDS = (0.25, 2.0)
FIT_RESIDUAL_FACTOR = 5.0
FIT_STDERR_FLOOR = 1e-4
QUAD_ABS_TOL = 1e-8
FIND_LAMBDA_TOL = 1e-10

# 경계선 추적
CONTOUR_ANGLES = 360
CONTOUR_INWARD_OFFSET = 1e-4

# 유효 샘플 수 경고 기준
MIN_EFFECTIVE_SAMPLES = 100

# 사분 격자 (θ, φ) 기본 해상도
QUADRATURE_ANGLES = 512
QUADRATURE_RADIAL = 1024
TILING_ANGLES = 1152
TILING_RADIAL = 1024

# 환경 변수 기반 기본값
DEFAULT_SAMPLES: int = int(os.getenv("OER_SAMPLES", 100_000))
DEFAULT_SEED: int = int(os.getenv("OER_SEED", 20130))
DEFAULT_CHUNK_SIZE: int = int(os.getenv("OER_CHUNK_SIZE", 65_536))
DEFAULT_WORKERS: int = int(os.getenv("OER_WORKERS", 1))
LOG_LEVEL: str = os.getenv("OER_LOG_LEVEL", "INFO")
SERVER_HOST: str = os.getenv("OER_HOST", "0.0.0.0")
SERVER_PORT: int = int(os.getenv("OER_PORT", 8000))
