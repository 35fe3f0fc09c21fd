"""API 라우터 모듈"""
from .routes import router
