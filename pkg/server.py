"""
최적 오차 영역 계산 - FastAPI 서버
==================================

다항 데이터로부터 bounded-likelihood region 의 크기/신용도 곡선,
λ 역산, 경계선, 타일링, coin 신뢰수준을 계산하는 HTTP API

파이프라인:
1. 설정: ExperimentConfig (CLI 설정 파일과 같은 JSON)
2. 사전분포: 정규화 + 공유 가중 표본
3. 우도: MLE, λ₀, L(D)
4. BLR: s_λ, c_λ 곡선 → 피팅 → λ 역산 → 경계선

실행: python server.py
API 문서: http://localhost:8000/docs
"""

import os
import sys

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

# 경로 설정
BASE_DIR = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, BASE_DIR)

from config.numerics import SERVER_HOST, SERVER_PORT, LOG_LEVEL, DEFAULT_SAMPLES
from config.poms import POM_CATALOG
from api.routes import router


# ============== 앱 생성 ==============

app = FastAPI(
    title="최적 오차 영역 계산기",
    description="다항 데이터의 MLR/SCR(bounded-likelihood region) 계산 API",
    version="1.0.0"
)

# CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)

app.include_router(router, prefix="/api")


@app.get("/health")
async def health_check():
    """헬스 체크"""
    return {
        "status": "healthy",
        "poms": list(POM_CATALOG),
        "default_samples": DEFAULT_SAMPLES,
    }


# ============== 서버 실행 ==============

def main():
    """서버 실행"""
    import uvicorn

    print()
    print("=" * 50)
    print("  최적 오차 영역 계산기")
    print("=" * 50)
    print(f"  서버 주소: http://localhost:{SERVER_PORT}")
    print(f"  API 문서:  http://localhost:{SERVER_PORT}/docs")
    print("  종료하려면 Ctrl+C를 누르세요")
    print("=" * 50)
    print()

    uvicorn.run(
        "server:app",
        host=SERVER_HOST,
        port=SERVER_PORT,
        reload=False,
        log_level=LOG_LEVEL.lower()
    )


if __name__ == "__main__":
    main()
