"""
예제 실험 설정 생성 스크립트
============================

data/experiments/ 아래에 CLI/API 공용 ExperimentConfig JSON 을 만든다.

구성:
1. coin: (1,1) primitive / Jeffreys, (2,0) primitive - 닫힌 형태와 비교용
2. 원판 4종 데이터: 참 상태 (0.6, 0.2), N=24 에서 얻은 계수
   - crosshair4: (8,5,10,1), (6,3,10,5)
   - trine3: (15,8,1), (13,7,4)
3. 시뮬레이션 설정, 타일링 설정, coin 신뢰수준 설정

실행: python scripts/generate_sample_data.py
"""

import json
from pathlib import Path


# ============================================================
# 실험 정의
# ============================================================

TRUE_POINT = [0.6, 0.2]
COPIES = 24

DISK_DATASETS = [
    ("crosshair4", [8, 5, 10, 1]),
    ("crosshair4", [6, 3, 10, 5]),
    ("trine3", [15, 8, 1]),
    ("trine3", [13, 7, 4]),
]


def coin_experiments() -> dict:
    return {
        "coin_1_1_primitive": {"pom": "coin", "prior": "primitive", "counts": [1, 1], "target": 0.5,
                               "mode": "size"},
        "coin_1_1_jeffreys": {"pom": "coin", "prior": "jeffreys", "counts": [1, 1]},
        "coin_2_0_primitive": {"pom": "coin", "prior": "primitive", "counts": [2, 0]},
    }


def disk_experiments() -> dict:
    experiments = {}
    for pom, counts in DISK_DATASETS:
        for prior in ("primitive", "jeffreys"):
            name = f"{pom}_{'_'.join(map(str, counts))}_{prior}"
            experiments[name] = {
                "pom": pom,
                "prior": prior,
                "counts": counts,
                "target": 0.9,
                "mode": "credibility",
            }
    return experiments


def other_experiments() -> dict:
    return {
        "crosshair4_simulation": {
            "pom": "crosshair4",
            "prior": "jeffreys",
            "simulation": {"true_point": TRUE_POINT, "N": COPIES},
            "seed": 20130,
        },
        "tiling_crosshair4_jeffreys": {
            "pom": "crosshair4",
            "prior": "jeffreys",
            "tiling": {"rings": 8, "slices": 12, "variant": "radial-rays"},
        },
        "confidence_coin_N2": {
            "pom": "coin",
            "prior": "primitive",
            "confidence": {"N": 2, "credibility": 0.8, "grid": 10000},
        },
    }


def main():
    """메인 실행"""
    out_dir = Path(__file__).parent.parent / "data" / "experiments"
    out_dir.mkdir(parents=True, exist_ok=True)

    experiments = {**coin_experiments(), **disk_experiments(), **other_experiments()}
    for name, config in experiments.items():
        path = out_dir / f"{name}.json"
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(config, f, ensure_ascii=False, indent=2)
            f.write('\n')

    print("=" * 60)
    print(f"실험 설정 {len(experiments)}개 생성: {out_dir}")
    print("=" * 60)
    for name in experiments:
        print(f"   - {name}.json")


if __name__ == "__main__":
    main()
