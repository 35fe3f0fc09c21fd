"""
API 라우터 - 최적 오차 영역 계산 API
====================================

엔드포인트:
- GET  /poms: 내장 측정 모델 목록
- GET  /priors: 사전분포 키 목록
- POST /simulate: 다항 데이터 시뮬레이션
- POST /regions: s_λ / c_λ 곡선 + 피팅 + 요약
- POST /find: 목표 크기/신용도의 λ + 경계선
- POST /member: 점의 영역 포함 여부
- POST /oracle: coin 기준 곡선
- POST /confidence: coin 영역 집합의 신뢰수준
- POST /tiling: 균등 크기 타일링

요청 본문은 CLI 설정 파일과 같은 ExperimentConfig 문서이다.
"""

from fastapi import APIRouter, HTTPException
import logging

from config.poms import POM_CATALOG, PRIOR_CATALOG
from config.experiment import ExperimentConfig
from pipeline.errors import ErrorRegionError
from pipeline.processors import ErrorRegionProcessor, to_jsonable

logger = logging.getLogger(__name__)

router = APIRouter()


def _processor(config: ExperimentConfig) -> ErrorRegionProcessor:
    """요청마다 새 프로세서 (출력 파일 없음)"""
    return ErrorRegionProcessor(config)


def _fail(e: ErrorRegionError) -> HTTPException:
    logger.warning(f"요청 처리 실패 ({type(e).__name__}): {e}")
    return HTTPException(status_code=e.http_status, detail=str(e))


# ============== 카탈로그 API ==============

@router.get("/poms")
async def get_poms():
    """측정 모델 목록"""
    return {"poms": POM_CATALOG}


@router.get("/priors")
async def get_priors():
    """사전분포 키 목록"""
    return {"priors": PRIOR_CATALOG}


# ============== 계산 API ==============

@router.post("/simulate")
def simulate_counts(config: ExperimentConfig):
    try:
        return to_jsonable(_processor(config).simulate())
    except ErrorRegionError as e:
        raise _fail(e)


@router.post("/regions")
def compute_regions(config: ExperimentConfig):
    """
    크기/신용도 곡선 계산

    응답: summary (mle, on_boundary, lambda0, log_L_max, log_L_D, ratio_limit, ...),
          fit (zeta, num_coeffs, den_coeffs, integral_total, fallback_used),
          curve (lambda, s, s_stderr, c_direct, c_fit 열)
    """
    try:
        return to_jsonable(_processor(config).regions().to_dict())
    except ErrorRegionError as e:
        raise _fail(e)


@router.post("/find")
def find_region(config: ExperimentConfig):
    try:
        found = _processor(config).find()
        result = found.to_dict()
        if found.contour is not None:
            frame = found.contour.to_frame()
            result["contour"] = {col: frame[col].tolist() for col in frame.columns}
        return to_jsonable(result)
    except ErrorRegionError as e:
        raise _fail(e)


@router.post("/member")
def check_member(config: ExperimentConfig):
    """config.point 가 목표 영역 안에 있는지"""
    try:
        return to_jsonable(_processor(config).member(None))
    except ErrorRegionError as e:
        raise _fail(e)


@router.post("/oracle")
def coin_oracle(config: ExperimentConfig):
    try:
        curve = _processor(config).oracle()
        frame = curve.to_frame()
        return to_jsonable({
            "log_L_max": curve.log_L_max,
            "log_L_D": curve.log_L_D,
            "curve": {col: frame[col].tolist() for col in frame.columns},
        })
    except ErrorRegionError as e:
        raise _fail(e)


@router.post("/confidence")
def evaluate_confidence(config: ExperimentConfig):
    try:
        return to_jsonable(_processor(config).confidence())
    except ErrorRegionError as e:
        raise _fail(e)


@router.post("/tiling")
def uniform_tiling(config: ExperimentConfig):
    try:
        return _processor(config).tiling()
    except ErrorRegionError as e:
        raise _fail(e)
