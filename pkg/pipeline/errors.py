"""
오류 계층
=========

ErrorRegionError
├── UsageError (ValueError)           → CLI exit 2 / HTTP 400
│   └── DomainError                   → 재구성 공간 밖의 점
└── IntegrationError (ArithmeticError) → CLI exit 3 / HTTP 422
    ├── TilingError                   → 누적 적분이 단조가 아님
    └── CurveFitError                 → 크기 곡선 피팅 불가
"""


class ErrorRegionError(Exception):
    """모든 계산 오류의 기반 클래스"""
    exit_code = 1
    http_status = 500


class UsageError(ErrorRegionError, ValueError):
    """잘못된 인자 / 차원 불일치 / 범위 밖 목표값"""
    exit_code = 2
    http_status = 400


class DomainError(UsageError):
    """재구성 공간(또는 Bloch 구) 밖의 점"""


class IntegrationError(ErrorRegionError, ArithmeticError):
    """적분 추정값이 유한하지 않음"""
    exit_code = 3
    http_status = 422


class TilingError(IntegrationError):
    """타일링용 누적 적분이 단조가 아님 (적분 해상도 부족)"""


class CurveFitError(IntegrationError):
    """크기 곡선 피팅 실패"""
