import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats
from scipy.special import comb

from conftest import SEED, disk_points
from pipeline.errors import UsageError, DomainError
from pipeline.pom import Counts, get_pom, probabilities
from pipeline.prior import resolve_prior
from pipeline.sampling import IntegrationBudget
from pipeline.likelihood import (
    log_likelihood,
    log_data_probability,
    enumerate_counts,
    mle,
    summarize,
    prior_likelihood,
    bayesian_mean,
    simulate,
)


# ============== 점 우도 ==============

def test_zero_probability_conventions(coin, crosshair4):
    assert log_likelihood(coin, Counts((2, 0)), [1.0]) == 0.0
    assert log_likelihood(coin, Counts((2, 0)), [-1.0]) == -math.inf
    assert log_likelihood(crosshair4, Counts((8, 5, 10, 1)), [1.0, 0.0]) == -math.inf


def test_batch_log_likelihood(trine3):
    counts = Counts((3, 2, 1))
    pts = np.array([[0.0, 0.0], [0.3, -0.2]])
    batch = log_likelihood(trine3, counts, pts)
    assert batch.shape == (2,)
    assert batch[0] == pytest.approx(6 * math.log(1 / 3))
    assert batch[1] == pytest.approx(log_likelihood(trine3, counts, pts[1]))


@pytest.mark.parametrize('key', ['coin', 'crosshair4', 'trine3'])
def test_enumerate_counts_size(key):
    pom = get_pom(key)
    for total in range(5):
        vectors = list(enumerate_counts(pom, total))
        assert len(vectors) == comb(total + pom.num_outcomes - 1, pom.num_outcomes - 1, exact=True)
        assert all(c.total == total for c in vectors)
        assert len(set(c.n for c in vectors)) == len(vectors)


@pytest.mark.parametrize('key', ['crosshair4', 'trine3'])
@settings(max_examples=25, deadline=None)
@given(pt=disk_points(), total=st.integers(0, 4))
def test_data_probabilities_sum_to_one(key, pt, total):
    pom = get_pom(key)
    probs = [math.exp(log_data_probability(pom, c, pt)) for c in enumerate_counts(pom, total)]
    assert sum(probs) == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(u=st.floats(-1.0, 1.0), total=st.integers(0, 4))
def test_coin_data_probabilities_sum_to_one(u, total):
    pom = get_pom('coin')
    probs = [math.exp(log_data_probability(pom, c, [u])) for c in enumerate_counts(pom, total)]
    assert sum(probs) == pytest.approx(1.0, abs=1e-10)


# ============== MLE ==============

def test_crosshair_interior_mle(crosshair4):
    counts = Counts((8, 5, 10, 1))
    point, on_boundary = mle(crosshair4, counts)
    assert point == pytest.approx([3 / 13, 9 / 11], abs=1e-12)
    assert not on_boundary

    # 400×400 격자 위의 최댓값은 MLE 를 넘지 않고, 격자 최대점은 MLE 근처
    axis = np.linspace(-1.0, 1.0, 400)
    xx, yy = np.meshgrid(axis, axis)
    grid = np.stack([xx.ravel(), yy.ravel()], axis=-1)
    grid = grid[np.sum(grid ** 2, axis=-1) <= 1.0]
    values = log_likelihood(crosshair4, counts, grid)
    best = grid[int(np.argmax(values))]
    assert values.max() <= log_likelihood(crosshair4, counts, point) + 1e-12
    assert np.linalg.norm(best - point) <= 2.0 * (axis[1] - axis[0])


def test_trine_boundary_mle(trine3):
    counts = Counts((15, 8, 1))
    point, on_boundary = mle(trine3, counts)
    assert on_boundary
    assert np.hypot(*point) == pytest.approx(1.0, abs=1e-9)

    phis = np.linspace(0.0, 2.0 * math.pi, 20_000, endpoint=False)
    circle = np.stack([np.cos(phis), np.sin(phis)], axis=-1)
    best = log_likelihood(trine3, counts, point)
    assert np.max(log_likelihood(trine3, counts, circle)) <= best + 1e-9

    inside = circle * 0.999
    assert np.max(log_likelihood(trine3, counts, inside)) <= best


def test_coin_mle(coin):
    assert mle(coin, Counts((3, 1)))[0] == pytest.approx([0.5])
    point, on_boundary = mle(coin, Counts((2, 0)))
    assert point == pytest.approx([1.0]) and on_boundary


def test_crosshair_mle_with_unobserved_axis(crosshair4):
    point, on_boundary = mle(crosshair4, Counts((3, 1, 0, 0)))
    assert point == pytest.approx([0.5, 0.0])
    assert not on_boundary


def test_mle_requires_data(trine3):
    with pytest.raises(UsageError):
        mle(trine3, Counts((0, 0, 0)))


def test_summary_dict(crosshair4):
    info = summarize(crosshair4, Counts((8, 5, 10, 1)))
    data = info.to_dict()
    assert set(data) == {'mle', 'on_boundary', 'log_L_max', 'log_L_D'}
    assert data['log_L_D'] is None
    assert data['on_boundary'] is False


# ============== 사전우도 ==============

@pytest.mark.parametrize('prior_key, counts, expected', [
    ('primitive', (1, 1), 1 / 6),
    ('jeffreys', (1, 1), 1 / 8),
    ('primitive', (2, 0), 1 / 3),
])
def test_coin_prior_likelihood_quadrature(coin, prior_key, counts, expected):
    budget = IntegrationBudget(method='quadrature', radial=256)
    log_L_D, se = prior_likelihood(coin, resolve_prior(prior_key, coin), Counts(counts), budget)
    assert math.exp(log_L_D) == pytest.approx(expected, rel=1e-6)
    assert se == 0.0


def test_coin_prior_likelihood_monte_carlo(coin, mc_budget):
    log_L_D, rel_se = prior_likelihood(coin, resolve_prior('primitive', coin), Counts((1, 1)), mc_budget)
    assert rel_se > 0.0
    assert abs(log_L_D - math.log(1 / 6)) <= 4.0 * rel_se


def test_summarize_with_prior(coin, quad_budget):
    info = summarize(coin, Counts((1, 1)), resolve_prior('primitive', coin), quad_budget)
    assert info.log_L_max == pytest.approx(math.log(0.25))
    assert info.log_L_D == pytest.approx(math.log(1 / 6), abs=1e-6)


# ============== 베이지안 평균 ==============

def test_posterior_mean_is_symmetric(coin):
    budget = IntegrationBudget(samples=50_000, seed=SEED)
    result = bayesian_mean(coin, resolve_prior('primitive', coin), Counts((1, 1)), budget)
    assert abs(result.point[0]) <= 4.0 * result.stderr[0] + 1e-12
    assert not result.low_ess
    assert result.purity is None


def test_conjugate_prior_mean_sits_at_target(coin):
    prior = resolve_prior('conjugate', coin, target=[0.5, 0.5], alpha=50.0)
    result = bayesian_mean(coin, prior, budget=IntegrationBudget(samples=50_000, seed=SEED))
    assert abs(result.point[0]) <= 4.0 * result.stderr[0] + 1e-3


def test_disk_prior_mean_and_purity(trine3, quad_budget):
    result = bayesian_mean(trine3, resolve_prior('primitive', trine3), budget=quad_budget)
    assert result.point == pytest.approx([0.0, 0.0], abs=1e-9)
    assert result.purity == pytest.approx(0.5, abs=1e-9)
    assert not result.low_ess


def test_low_effective_sample_size_is_flagged(trine3):
    budget = IntegrationBudget(samples=200, seed=SEED)
    result = bayesian_mean(trine3, resolve_prior('primitive', trine3), Counts((300, 150, 10)), budget)
    assert result.low_ess
    assert result.effective_samples < 100


# ============== 시뮬레이션 ==============

def test_simulation_is_seed_deterministic(crosshair4):
    a = simulate(crosshair4, [0.6, 0.2], 24, seed=3)
    b = simulate(crosshair4, [0.6, 0.2], 24, seed=3)
    assert a == b
    assert a.total == 24
    assert len(a) == 4


def test_simulation_edge_cases(trine3):
    assert simulate(trine3, [0.0, 0.0], 0, seed=1).n == (0, 0, 0)
    with pytest.raises(DomainError):
        simulate(trine3, [0.9, 0.9], 10, seed=1)


def test_simulation_mean_counts(crosshair4):
    replicates = np.array([simulate(crosshair4, [0.6, 0.2], 24, seed=i).n for i in range(10_000)])
    p = np.array([0.4, 0.1, 0.3, 0.2])
    expected = 24 * p
    assert expected == pytest.approx([9.6, 2.4, 7.2, 4.8])
    sigma = np.sqrt(24 * p * (1.0 - p) / len(replicates))
    assert np.all(np.abs(replicates.mean(axis=0) - expected) <= 3.0 * sigma)


def test_simulation_passes_chi_square(crosshair4, trine3):
    for pom, pt in ((crosshair4, [0.6, 0.2]), (trine3, [-0.3, 0.5])):
        draws = np.array(simulate(pom, pt, 100_000, seed=SEED).n)
        expected = 100_000 * probabilities(pom, pt)
        assert stats.chisquare(draws, expected).pvalue > 1e-3


@pytest.mark.parametrize('key, counts', [
    ('coin', (1, 1)),
    ('coin', (2, 0)),
    ('crosshair4', (8, 5, 10, 1)),
    ('crosshair4', (6, 3, 10, 5)),
    ('crosshair4', (0, 0, 4, 1)),
    ('trine3', (15, 8, 1)),
    ('trine3', (13, 7, 4)),
])
def test_mle_dominates_random_points(key, counts):
    pom = get_pom(key)
    counts = Counts(counts)
    point, _ = mle(pom, counts)
    best = log_likelihood(pom, counts, point)

    rng = np.random.default_rng(SEED)
    if pom.is_disk:
        radius = np.sqrt(rng.uniform(0.0, 1.0, 1000))
        phi = rng.uniform(0.0, 2.0 * math.pi, 1000)
        others = np.column_stack([radius * np.cos(phi), radius * np.sin(phi)])
    else:
        others = rng.uniform(-1.0, 1.0, (1000, 1))
    assert np.all(log_likelihood(pom, counts, others) <= best + 1e-9)
