import math

import numpy as np
import pytest
from scipy import optimize

from conftest import SEED
from pipeline.errors import UsageError
from pipeline.pom import Counts, get_pom
from pipeline.prior import resolve_prior
from pipeline.sampling import IntegrationBudget
from pipeline.blr import BlrCurve, default_lambda_grid, size_curve
from pipeline.oracle import coin_closed_form, coin_quadrature
from pipeline.curvefit import (
    fit_size,
    credibility_from_size,
    credibility_curve,
    ratio_limit,
    find_lambda,
)


def analytic_curve(s_fn, on_boundary=False, stderr=1e-3, grid=None, log_L_max=math.log(0.25)):
    lambdas = default_lambda_grid() if grid is None else np.asarray(grid, dtype=float)
    s = np.asarray(s_fn(lambdas), dtype=float)
    return BlrCurve(lambdas, s, np.full(len(s), stderr), s, lambda0=0.0, log_L_max=log_L_max,
                    mle=np.array([1.0 if on_boundary else 0.0]), mle_on_boundary=on_boundary)


@pytest.fixture
def coin_primitive_fit(coin):
    return fit_size(analytic_curve(lambda lam: np.sqrt(1.0 - lam)), coin)


def test_interior_fit_is_exact_for_square_root(coin_primitive_fit):
    fit = coin_primitive_fit
    assert not fit.fallback_used
    assert not fit.zeta_fitted
    assert fit.zeta == 0.5
    assert fit.integral_total == pytest.approx(2.0 / 3.0, abs=1e-7)
    grid = np.linspace(0.0, 1.0, 57)
    assert fit.size(grid) == pytest.approx(np.sqrt(1.0 - grid), abs=1e-6)


def test_credibility_from_size_matches_closed_form(coin_primitive_fit):
    grid = np.linspace(0.0, 1.0, 21)
    _, expected = coin_closed_form('primitive', grid)
    assert credibility_curve(coin_primitive_fit, grid) == pytest.approx(expected, abs=1e-6)
    assert credibility_from_size(coin_primitive_fit, 0.0) == 1.0
    assert credibility_from_size(coin_primitive_fit, 1.0) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(UsageError):
        credibility_from_size(coin_primitive_fit, -0.1)


def test_ratio_limit(coin_primitive_fit):
    limit = ratio_limit(coin_primitive_fit, log_L_max=math.log(0.25))
    assert limit.ratio == pytest.approx(1.5, rel=1e-6)
    assert math.exp(limit.log_L_D) == pytest.approx(1 / 6, rel=1e-6)
    assert ratio_limit(coin_primitive_fit).log_L_D is None


def test_boundary_fit_frees_exponent(coin):
    fit = fit_size(analytic_curve(lambda lam: 1.0 - np.sqrt(lam), on_boundary=True), coin)
    assert fit.zeta_fitted
    assert 0.25 <= fit.zeta <= 2.0
    grid = np.linspace(0.0, 1.0, 41)
    assert fit.size(grid) == pytest.approx(1.0 - np.sqrt(grid), abs=0.01)
    assert ratio_limit(fit).ratio == pytest.approx(3.0, rel=0.01)
    assert credibility_from_size(fit, 0.25) == pytest.approx(0.875, abs=0.01)


def test_jeffreys_fit_reproduces_credibility(coin):
    s_fn = lambda lam: coin_closed_form('jeffreys', lam)[0]
    fit = fit_size(analytic_curve(s_fn), coin)
    grid = np.linspace(0.0, 1.0, 21)
    _, expected = coin_closed_form('jeffreys', grid)
    assert credibility_curve(fit, grid) == pytest.approx(expected, abs=0.02)
    assert ratio_limit(fit).ratio == pytest.approx(2.0, rel=0.05)


def test_unfittable_curve_falls_back_to_pchip(crosshair4):
    fit = fit_size(analytic_curve(lambda lam: np.clip(1.0 - 2.0 * lam, 0.0, 1.0), stderr=1e-4), crosshair4)
    assert fit.fallback_used
    assert fit.to_dict()['num_coeffs'] == []
    grid = np.linspace(0.0, 1.0, 101)
    values = fit.size(grid)
    assert values[0] == pytest.approx(1.0)
    assert np.all(np.diff(values) <= 1e-12)
    assert fit.integral_total == pytest.approx(0.25, abs=1e-3)
    c = credibility_curve(fit, grid)
    assert np.all((c >= 0.0) & (c <= 1.0))


def test_constant_curve_is_trivial(trine3):
    lambdas = default_lambda_grid()
    ones = np.ones_like(lambdas)
    curve = BlrCurve(lambdas, ones, np.zeros_like(lambdas), ones, lambda0=1.0, log_L_max=0.0, degenerate=True)
    fit = fit_size(curve, trine3)
    assert fit.trivial
    assert fit.size(0.7) == 1.0
    assert credibility_from_size(fit, 0.7) == 1.0
    with pytest.raises(UsageError):
        find_lambda(fit, 0.5)


def test_too_few_points(coin):
    curve = analytic_curve(lambda lam: np.sqrt(1.0 - lam), grid=np.linspace(0.0, 1.0, 10))
    with pytest.raises(UsageError):
        fit_size(curve, coin)


def test_find_lambda_by_size(coin_primitive_fit):
    assert find_lambda(coin_primitive_fit, 0.5, mode='size') == pytest.approx(0.75, abs=1e-8)


def test_find_lambda_by_credibility(coin_primitive_fit):
    exact = optimize.brentq(lambda lam: coin_closed_form('primitive', lam)[1] - 0.8, 0.0, 1.0, xtol=1e-14)
    assert exact == pytest.approx(0.6299, abs=1e-4)
    assert find_lambda(coin_primitive_fit, 0.8, mode='credibility') == pytest.approx(exact, abs=1e-6)


def test_find_lambda_argument_errors(coin_primitive_fit):
    with pytest.raises(UsageError):
        find_lambda(coin_primitive_fit, 1.2)
    with pytest.raises(UsageError):
        find_lambda(coin_primitive_fit, 0.5, mode='volume')


def test_fit_dict_keys(coin_primitive_fit):
    assert set(coin_primitive_fit.to_dict()) == {
        'zeta', 'num_coeffs', 'den_coeffs', 'integral_total', 'fallback_used', 'lambda0', 'residual',
    }
    assert get_pom('coin').dimension / 2.0 == coin_primitive_fit.zeta


# ============== c 와 s 의 미분 관계 ==============

def assert_slope_identity(lambdas, s, c, L_D, L_max):
    """L(D)·Δc/Δλ = L_max·λ·Δs/Δλ (구간 중점 λ)"""
    dlam = np.diff(lambdas)
    ds, dc = np.diff(s) / dlam, np.diff(c) / dlam
    mid = 0.5 * (lambdas[1:] + lambdas[:-1])
    steep = np.abs(ds) > 0.01
    assert steep.sum() > 10
    assert L_D * dc[steep] == pytest.approx(L_max * mid[steep] * ds[steep], rel=0.01)


@pytest.mark.parametrize('prior', ['primitive', 'jeffreys'])
def test_slope_identity_on_coin_oracle(prior):
    grid = np.linspace(0.05, 1.0, 191)
    curve = coin_quadrature(prior, Counts((1, 1)), grid)
    assert_slope_identity(grid, curve.s_values, curve.c_values,
                          math.exp(curve.log_L_D), math.exp(curve.log_L_max))


@pytest.mark.parametrize('key, counts', [('coin', (1, 1)), ('trine3', (13, 7, 4))])
def test_slope_identity_and_inversion_on_monte_carlo_fit(key, counts):
    pom = get_pom(key)
    budget = IntegrationBudget(samples=100_000, seed=SEED)
    curve = size_curve(pom, resolve_prior('primitive', pom), Counts(counts), budget=budget)
    fit = fit_size(curve, pom)
    limit = ratio_limit(fit, curve.log_L_max)

    grid = np.linspace(0.05, 1.0, 191)
    assert_slope_identity(grid, fit.size(grid), credibility_curve(fit, grid),
                          math.exp(limit.log_L_D), math.exp(curve.log_L_max))

    for target in (0.2, 0.5, 0.8):
        lam = find_lambda(fit, target, mode='size')
        assert fit.size(lam) == pytest.approx(target, abs=1e-6)
        lam = find_lambda(fit, target, mode='credibility')
        assert credibility_from_size(fit, lam) == pytest.approx(target, abs=1e-6)
