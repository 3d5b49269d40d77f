import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from unipac.bounds import (
    AccuracyParams,
    adversary_rho_bound,
    per_hypothesis_risk,
    risk_chain,
    risk_chain_holds,
    rho_ceiling,
    sample_bound,
)

from reference import EPSILONS, FROZEN_GRID, ref_sample_bound_mp

GRID = [(i, d, e, FROZEN_GRID[i][d][n]) for i in FROZEN_GRID for d in FROZEN_GRID[i] for n, e in enumerate(EPSILONS)]


def test_accuracy_params_validation():
    AccuracyParams(0.5, 0.25)
    for bad in [(0, 0.1), (1, 0.1), (0.1, 0), (0.1, 0.5), (-0.1, 0.2), (0.1, 0.7)]:
        with pytest.raises(ValueError):
            AccuracyParams(*bad)


@pytest.mark.parametrize("i,delta,epsilon,expected", GRID)
def test_sample_bound_grid(i, delta, epsilon, expected):
    assert sample_bound(i, AccuracyParams(delta, epsilon)) == expected


def test_frozen_grid_matches_high_precision_oracle():
    for i, delta, epsilon, expected in GRID:
        m, interior = ref_sample_bound_mp(i, delta, epsilon)
        assert m == expected
        assert min(interior % 1, 1 - interior % 1) > 1e-6


def test_sample_bound_examples():
    assert sample_bound(1, AccuracyParams(0.1, 0.1)) == 29
    assert sample_bound(2, AccuracyParams(0.1, 0.1)) == 42
    assert sample_bound(3, AccuracyParams(0.2, 0.2)) == 22
    assert sample_bound(16674, AccuracyParams(0.2, 0.2)) == 108
    with pytest.raises(ValueError):
        sample_bound(0, AccuracyParams(0.1, 0.1))


def test_sample_bound_monotone_in_index():
    acc = AccuracyParams(0.1, 0.1)
    values = [sample_bound(i, acc) for i in range(1, 10_001)]
    assert all(a <= b for a, b in zip(values, values[1:]))
    assert values[0] > 0


@given(st.integers(1, 10**6), st.floats(0.01, 0.98), st.floats(0.01, 0.48))
def test_sample_bound_decreasing_in_parameters(i, delta, epsilon):
    acc = AccuracyParams(delta, epsilon)
    # interior value strictly decreasing; ceilings non-increasing
    assert sample_bound(i, AccuracyParams(delta, epsilon + 0.01)) <= sample_bound(i, acc)
    assert sample_bound(i, AccuracyParams(delta + 0.01, epsilon)) <= sample_bound(i, acc)


def test_sample_bound_strictly_decreasing_on_coarse_steps():
    assert sample_bound(5, AccuracyParams(0.1, 0.1)) > sample_bound(5, AccuracyParams(0.1, 0.2))
    assert sample_bound(5, AccuracyParams(0.01, 0.1)) > sample_bound(5, AccuracyParams(0.1, 0.1))


def test_per_hypothesis_risk():
    assert per_hypothesis_risk(1, AccuracyParams(0.5, 0.1)) == pytest.approx(0.303964, abs=1e-6)
    acc = AccuracyParams(0.3, 0.1)
    total = math.fsum(per_hypothesis_risk(i, acc) for i in range(1, 1_000_001))
    assert total <= 0.3
    assert total > 0.3 * (1 - 1e-5)


def test_risk_chain_example():
    acc = AccuracyParams(0.1, 0.1)
    assert sample_bound(10, acc) == 75
    survive, exponential, risk = risk_chain(10, acc)
    assert survive == pytest.approx(0.9**75)
    assert exponential == pytest.approx(math.exp(-7.5))
    assert survive <= exponential <= risk


@given(st.integers(1, 10**8), st.floats(0.001, 0.99), st.floats(0.001, 0.499))
def test_risk_chain_always_holds(i, delta, epsilon):
    assert risk_chain_holds(i, AccuracyParams(delta, epsilon))


def test_adversary_rho_bound_examples():
    acc = AccuracyParams(0.01, 0.01)
    assert adversary_rho_bound(8, 2, acc) == pytest.approx(float(1 - Fraction(16) * Fraction("0.0199") / 6), abs=1e-12)
    assert adversary_rho_bound(8, 2, acc) == pytest.approx(0.9469333333, abs=1e-9)
    assert adversary_rho_bound(6, 2, AccuracyParams(0.2, 0.2)) == pytest.approx(-0.08, abs=1e-12)
    assert adversary_rho_bound(2, 0, acc) == pytest.approx(0.9602, abs=1e-12)
    with pytest.raises(ValueError):
        adversary_rho_bound(4, 4, acc)


def test_rho_ceiling():
    assert rho_ceiling(AccuracyParams(0.01, 0.01)) == pytest.approx(0.9602, abs=1e-12)
    assert rho_ceiling(AccuracyParams(1e-9, 1e-9)) == pytest.approx(1, abs=1e-8)


def test_rho_bound_below_ceiling_on_grid():
    for acc in (AccuracyParams(0.01, 0.01), AccuracyParams(0.2, 0.2), AccuracyParams(0.05, 0.3)):
        ceiling = rho_ceiling(acc)
        for d in range(1, 65):
            assert adversary_rho_bound(d, 0, acc) == pytest.approx(ceiling, abs=1e-12)
            for m in range(1, d):
                assert adversary_rho_bound(d, m, acc) < ceiling


def test_rho_bound_converges_to_ceiling():
    for acc in (AccuracyParams(0.01, 0.01), AccuracyParams(0.1, 0.3)):
        assert abs(adversary_rho_bound(10**6, 2, acc) - rho_ceiling(acc)) < 1e-4
