import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import disk_points
from pipeline.errors import UsageError
from pipeline.pom import (
    Counts,
    get_pom,
    probabilities,
    is_permissible,
    purity_constraint,
    coordinates_from_frequencies,
    in_space,
)


def test_trine_probabilities_at_reference_state(trine3):
    p = probabilities(trine3, [0.6, 0.2])
    expected = [1.6 / 3, (1.4 + 0.2 * math.sqrt(3)) / 6, (1.4 - 0.2 * math.sqrt(3)) / 6]
    assert p == pytest.approx(expected, abs=1e-12)
    assert p == pytest.approx([0.53333, 0.29107, 0.17560], abs=1e-5)


def test_crosshair_probabilities_at_reference_state(crosshair4):
    assert probabilities(crosshair4, [0.6, 0.2]) == pytest.approx([0.4, 0.1, 0.3, 0.2], abs=1e-12)


def test_coin_probabilities(coin):
    assert probabilities(coin, [0.5]) == pytest.approx([0.75, 0.25])


def test_batch_shape(crosshair4):
    pts = np.zeros((7, 2))
    assert probabilities(crosshair4, pts).shape == (7, 4)


@pytest.mark.parametrize('key', ['crosshair4', 'trine3'])
@settings(max_examples=60, deadline=None)
@given(pt=disk_points())
def test_disk_points_give_permissible_probabilities(key, pt):
    pom = get_pom(key)
    p = probabilities(pom, pt)
    assert abs(p.sum() - 1.0) <= 1e-12
    assert np.all(p >= -1e-15) and np.all(p <= 1.0 + 1e-15)
    assert is_permissible(pom, p)


@settings(max_examples=60, deadline=None)
@given(pt=disk_points())
def test_purity_constraint_tracks_radius(pt):
    r2 = float(pt @ pt)
    cross = get_pom('crosshair4')
    trine = get_pom('trine3')
    assert purity_constraint(cross, probabilities(cross, pt)) == pytest.approx(1.0 - r2, abs=1e-12)
    assert purity_constraint(trine, probabilities(trine, pt)) == pytest.approx((1.0 - r2) / 3.0, abs=1e-12)


def test_outside_disk_is_not_permissible(crosshair4, trine3):
    assert not is_permissible(crosshair4, probabilities(crosshair4, [0.9, 0.9]))
    assert not is_permissible(trine3, probabilities(trine3, [0.8, 0.8]))
    assert not in_space(crosshair4, [0.9, 0.9])


def test_crosshair_pair_sums_are_enforced(crosshair4):
    assert not is_permissible(crosshair4, [0.5, 0.1, 0.2, 0.2])


def test_mle_candidate_inside(crosshair4):
    pt = coordinates_from_frequencies(crosshair4, Counts.of(crosshair4, [8, 5, 10, 1]))
    assert pt == pytest.approx([3 / 13, 9 / 11], abs=1e-12)


def test_mle_candidate_outside_is_absent(trine3):
    assert coordinates_from_frequencies(trine3, Counts.of(trine3, [15, 8, 1])) is None


def test_counts_validation(crosshair4):
    with pytest.raises(UsageError):
        Counts.of(crosshair4, [1, 2, 3])
    with pytest.raises(UsageError):
        Counts.of(crosshair4, [1, -2, 3, 0])
    assert Counts.of(crosshair4, [1, 2, 3, 0]).total == 6


def test_unknown_pom_key():
    with pytest.raises(UsageError):
        get_pom('tetrahedron')


def test_dimension_mismatch(trine3):
    with pytest.raises(UsageError):
        probabilities(trine3, [0.1])
