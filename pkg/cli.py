"""
최적 오차 영역 CLI
==================

서브커맨드:
- simulate:   참 상태에서 다항 데이터 시뮬레이션 → counts.json
- regions:    s_λ / c_λ 곡선, 피팅, 요약 → curve.csv, fit.json, summary.json
- find:       목표 크기/신용도의 λ + 경계선 → find.json, contour.csv
- member:     점이 목표 영역 안에 있는지 → member.json
- boundary:   주어진 λ 의 경계선 → contour.csv
- tiling:     사전분포 균등 크기 타일링 → tiling.json
- oracle:     coin 기준 곡선 → oracle.csv
- confidence: coin 영역 집합의 신뢰수준 γ → confidence.json

종료 코드: 0 정상, 2 사용 오류(설정 검증 포함), 3 수치 실패

우선순위: CLI 플래그 > 설정 파일 > 환경 변수(.env) > 기본값

실행: python cli.py regions --config data/experiments/crosshair4_6_3_10_5.json --out out/
"""

import os
import sys
import json
import logging
import argparse
from pathlib import Path

from pydantic import ValidationError

# 경로 설정
BASE_DIR = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, BASE_DIR)

from config.numerics import LOG_LEVEL
from config.experiment import ExperimentConfig
from pipeline.errors import ErrorRegionError, UsageError
from pipeline.processors import ErrorRegionProcessor, write_json

logger = logging.getLogger("cli")

COMMANDS = ['simulate', 'regions', 'find', 'member', 'boundary', 'tiling', 'oracle', 'confidence']


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Bounded-likelihood 최적 오차 영역 계산")
    parser.add_argument("command", choices=COMMANDS, help="실행할 서브커맨드")
    parser.add_argument("--config", required=True, help="실험 설정 JSON 경로")
    parser.add_argument("--out", default="out", help="출력 디렉터리 (기본: out)")
    parser.add_argument("--samples", type=int, help="Monte Carlo 샘플 수 (설정/환경변수보다 우선)")
    parser.add_argument("--seed", type=int, help="최상위 시드 (설정보다 우선)")
    parser.add_argument("--target", type=float, help="목표 크기 또는 신용도 (0, 1)")
    parser.add_argument("--mode", choices=['size', 'credibility'], help="목표 종류")
    parser.add_argument("--lam", type=float, help="boundary 명령의 λ")
    parser.add_argument("--point", type=float, nargs='+', help="member 명령의 좌표")
    parser.add_argument("--verbose", "-v", action="store_true", help="DEBUG 로그 출력")
    return parser


def load_config(path: str, args: argparse.Namespace) -> ExperimentConfig:
    """설정 파일 + CLI 덮어쓰기 → 검증된 ExperimentConfig"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except FileNotFoundError:
        raise UsageError(f"설정 파일을 찾을 수 없습니다: {path}")
    except json.JSONDecodeError as e:
        raise UsageError(f"설정 JSON 파싱 실패 ({path}:{e.lineno}:{e.colno}): {e.msg}")

    if args.samples is not None:
        doc.setdefault("budget", {})["samples"] = args.samples
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.target is not None:
        doc["target"] = args.target
    if args.mode is not None:
        doc["mode"] = args.mode
    if args.lam is not None:
        doc["lambda_value"] = args.lam
    if args.point is not None:
        doc["point"] = args.point
    return ExperimentConfig.model_validate(doc)


def format_validation_error(error: ValidationError) -> str:
    lines = ["설정 검증 실패:"]
    for item in error.errors():
        field = ".".join(str(part) for part in item["loc"]) or "(root)"
        lines.append(f"  - {field}: {item['msg']}")
    return "\n".join(lines)


def run(command: str, processor: ErrorRegionProcessor, out_dir: Path) -> None:
    if command == 'simulate':
        result = processor.simulate()
        write_json(out_dir / 'counts.json', {'counts': result['counts'], 'seed': result['seed']})
        print(f"  counts: {result['counts']}")

    elif command == 'regions':
        result = processor.regions()
        s = result.summary
        print(f"  MLE: {s['mle']} (경계: {s['on_boundary']})")
        print(f"  λ₀={s['lambda0']:.6g}, L_max/L(D)={s['ratio_limit']:.6g}")
        for warning in s['warnings']:
            print(f"  [경고] {warning}")

    elif command == 'find':
        found = processor.find()
        print(f"  {found.mode}={found.target} → λ={found.lam:.10g}")

    elif command == 'member':
        result = processor.member(None)
        print(f"  {result['point']} → {'안' if result['inside'] else '밖'} (λ={result['lambda']:.10g})")

    elif command == 'boundary':
        contour = processor.boundary()
        print(f"  경계선 {len(contour.angles)}점, 잘림 {int(contour.clipped.sum())}점")

    elif command == 'tiling':
        result = processor.tiling()
        print(f"  타일링 저장 ({result['prior']})")

    elif command == 'oracle':
        curve = processor.oracle()
        print(f"  coin 기준 곡선 {len(curve.lambdas)}점, L(D)={curve.log_L_D:.6g} (log)")

    elif command == 'confidence':
        result = processor.confidence()
        print(f"  γ = {result['gamma']:.6f}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        config = load_config(args.config, args)
    except ValidationError as e:
        print(format_validation_error(e), file=sys.stderr)
        return 2
    except ErrorRegionError as e:
        print(f"오류: {e}", file=sys.stderr)
        return e.exit_code

    out_dir = Path(args.out)
    print()
    print("=" * 50)
    print(f"  {args.command}: {config.pom} / {config.prior_key}")
    print("=" * 50)

    try:
        processor = ErrorRegionProcessor(config, out_dir=str(out_dir))
        run(args.command, processor, out_dir)
    except ErrorRegionError as e:
        logger.debug("계산 실패", exc_info=True)
        print(f"오류: {e}", file=sys.stderr)
        return e.exit_code

    print(f"  출력: {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
