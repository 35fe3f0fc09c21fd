"""
ErrorRegionProcessor 종단 테스트 - 참 상태 (0.6, 0.2), N=24 의 원판 데이터 4종
"""

import numpy as np
import pytest

from config.experiment import ExperimentConfig
from pipeline.errors import UsageError, DomainError
from pipeline.blr import membership
from pipeline.oracle import coin_closed_form
from pipeline.processors import ErrorRegionProcessor

TRUE_POINT = [0.6, 0.2]

DATASETS = [
    ('crosshair4', [8, 5, 10, 1]),
    ('crosshair4', [6, 3, 10, 5]),
    ('trine3', [15, 8, 1]),
    ('trine3', [13, 7, 4]),
]

# 0.9 신용 영역이 참 상태를 포함하는 데이터
CONTAINING = {(6, 3, 10, 5), (15, 8, 1), (13, 7, 4)}


def processor_for(pom, counts, prior, samples=100_000, method='mc', **extra):
    config = ExperimentConfig(pom=pom, prior=prior, counts=counts,
                              budget={'method': method, 'samples': samples}, contour_angles=72, **extra)
    return ErrorRegionProcessor(config)


@pytest.mark.parametrize('pom, counts', DATASETS)
@pytest.mark.parametrize('prior', ['primitive', 'jeffreys'])
def test_disk_datasets(pom, counts, prior):
    proc = processor_for(pom, counts, prior)
    result = proc.regions()
    curve = result.curve

    interior = (curve.lambdas > curve.lambda0) & (curve.lambdas < 1.0)
    se = np.maximum(curve.s_stderr, curve.c_direct_stderr)
    # 신용도는 크기 이상
    assert np.all(curve.c_direct[interior] >= curve.s[interior] - 3.0 * se[interior] - 1e-12)
    assert np.all(np.diff(curve.s) <= 0.0)
    assert np.all(np.diff(curve.c_direct) <= 1e-12)
    assert np.all(np.diff(curve.c_fit) <= 1e-7)
    assert np.all(np.abs(curve.c_fit - curve.c_direct) <= np.maximum(3.0 * curve.c_direct_stderr, 0.01))

    wide = proc.find('credibility', 0.9)
    narrow = proc.find('credibility', 0.5)
    assert narrow.lam > wide.lam
    log_L_max = curve.log_L_max
    counts_ = proc.counts
    # c=0.5 영역은 c=0.9 영역 안에 있다
    assert np.all(membership(proc.pom, counts_, narrow.contour.points * (1.0 - 1e-12), wide.lam, log_L_max))

    if tuple(counts) in CONTAINING:
        assert membership(proc.pom, counts_, TRUE_POINT, wide.lam, log_L_max)

    summary = result.summary
    for key in ('mle', 'on_boundary', 'lambda0', 'log_L_max', 'log_L_D', 'ratio_limit'):
        assert key in summary
    assert summary['on_boundary'] == (tuple(counts) == (15, 8, 1))
    assert summary['ratio_limit'] > 1.0


def test_coin_curve_through_processor():
    proc = processor_for('coin', [1, 1], 'primitive', lambda_grid={'values': list(np.linspace(0.0, 1.0, 41))})
    result = proc.regions()
    s, c = coin_closed_form('primitive', result.curve.lambdas)
    assert np.all(np.abs(result.curve.s - s) <= np.maximum(3.0 * result.curve.s_stderr, 0.01))
    assert result.curve.c_fit == pytest.approx(c, abs=0.02)
    assert result.summary['ratio_limit'] == pytest.approx(1.5, rel=0.05)
    assert np.exp(result.summary['log_L_D']) == pytest.approx(1 / 6, rel=0.05)

    found = proc.find('size', 0.5)
    assert found.lam == pytest.approx(0.75, abs=0.02)
    assert found.contour.points.shape == (2, 1)


def test_coin_jeffreys_ratio_limit():
    proc = processor_for('coin', [1, 1], 'jeffreys', method='quadrature')
    result = proc.regions()
    assert result.summary['ratio_limit'] == pytest.approx(2.0, rel=0.05)
    assert np.exp(result.summary['log_L_D']) == pytest.approx(1 / 8, rel=0.05)


def test_simulation_seed_flows_from_config():
    config = ExperimentConfig(pom='crosshair4', prior='jeffreys',
                              simulation={'true_point': TRUE_POINT, 'N': 24}, seed=20130)
    first = ErrorRegionProcessor(config).simulate()
    second = ErrorRegionProcessor(config).simulate()
    assert first == second
    assert sum(first['counts']) == 24

    pinned = config.model_copy(update={'simulation': config.simulation.model_copy(update={'seed': 7})})
    assert ErrorRegionProcessor(pinned).simulate()['seed'] == 7


def test_member_and_boundary_commands():
    proc = processor_for('crosshair4', [6, 3, 10, 5], 'primitive', samples=20_000, target=0.9)
    inside = proc.member([1 / 3, 1 / 3])
    assert inside['inside'] is True
    assert proc.member([-0.7, -0.7])['inside'] is False
    with pytest.raises(DomainError):
        proc.member([0.9, 0.9])

    contour = proc.boundary(0.4)
    assert len(contour.angles) == 72


def test_degenerate_data_summary():
    proc = processor_for('trine3', [0, 0, 0], 'primitive', samples=5_000)
    result = proc.regions()
    assert result.fit.trivial
    assert result.summary['mle'] is None
    assert result.summary['warnings']
    with pytest.raises(UsageError):
        proc.find('credibility', 0.9)


def test_coin_only_commands_reject_disks():
    proc = processor_for('trine3', [1, 1, 1], 'primitive', samples=1_000)
    with pytest.raises(UsageError):
        proc.oracle()
    with pytest.raises(UsageError):
        proc.confidence()


def test_tiling_command():
    config = ExperimentConfig(pom='trine3', prior='primitive', budget={'samples': 50_000})
    result = ErrorRegionProcessor(config).tiling()
    assert len(result['cell_sizes']) == 96
    assert np.allclose(result['cell_sizes'], 1 / 96, atol=5e-3)

    coin = ErrorRegionProcessor(ExperimentConfig(pom='coin', prior='jeffreys')).tiling()
    assert len(coin['segments']) == 9


def test_coin_member_by_size():
    proc = processor_for('coin', [1, 1], 'primitive', samples=20_000, target=0.5, mode='size')
    # λ=0.75 → |u| ≤ 0.5
    assert proc.member([0.4])['inside'] is True
    assert proc.member([0.9])['inside'] is False


def test_simulate_certain_outcome():
    config = ExperimentConfig(pom='coin', simulation={'true_point': [1.0], 'N': 5})
    assert ErrorRegionProcessor(config).simulate()['counts'] == [5, 0]
