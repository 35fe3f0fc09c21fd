"""
내장 측정(POM) 및 사전분포 카탈로그
===================================

측정별 구성:
- coin: 2-결과 (동전 / 조화진동자 바닥상태 여부), 재구성 공간 = 선분 u∈[−1,1]
- crosshair4: σx, σy 사영측정을 합친 4-결과 POM, 재구성 공간 = 단위 원판
- trine3: 3-결과 trine 측정, 재구성 공간 = 단위 원판

사전분포 키:
- primitive, jeffreys, hedged, conjugate, marginal-purity
"""

# 측정 모델 카탈로그
POM_CATALOG = {
    'coin': {
        'description': '2-결과 측정 (p₁=(1+u)/2)',
        'num_outcomes': 2,
        'dimension': 1,
        'space': 'segment',
        'symmetry_order': 2,
        'priors': ['primitive', 'jeffreys', 'hedged', 'conjugate'],
    },
    'crosshair4': {
        'description': 'σx, σy 사영측정 결합 4-결과 POM (p₁,p₂=¼(1±x), p₃,p₄=¼(1±y))',
        'num_outcomes': 4,
        'dimension': 2,
        'space': 'disk',
        'symmetry_order': 4,
        'priors': ['primitive', 'jeffreys', 'hedged', 'conjugate', 'marginal-purity'],
    },
    'trine3': {
        'description': '3-결과 trine 측정 (p₁=⅓(1+x), p₂,p₃=⅙(2−x±√3y))',
        'num_outcomes': 3,
        'dimension': 2,
        'space': 'disk',
        'symmetry_order': 3,
        'priors': ['primitive', 'jeffreys', 'hedged', 'conjugate', 'marginal-purity'],
    },
}

# 사전분포 카탈로그
PRIOR_CATALOG = {
    'primitive': {
        'description': '좌표에 대해 균일 (원판: 1/π, 선분: ½)',
    },
    'jeffreys': {
        'description': '1/√(p₁⋯p_K) - POM별 닫힌 형태',
    },
    'hedged': {
        'description': '√(p₁⋯p_K) - hedged likelihood 유사',
    },
    'conjugate': {
        'description': '(Π p_k^{t_k})^α - 목표 확률 t에서 최대',
        'params': ['target', 'alpha'],
    },
    'marginal-purity': {
        'description': '순도 균일 사전분포를 z에 대해 적분한 원판 위 주변분포',
    },
}
