import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from msrank import (
    BracketExhausted,
    CostsNotIncreasing,
    EULER_GAMMA,
    NonPositiveCost,
    NonPositiveWeight,
    WeightDistribution,
    reservation_price,
    reservation_sequence,
    welfare,
)

UNIT = WeightDistribution((1.0,), (1.0,))


def test_unit_weight_closed_form():
    # (2 + r) / (1 + r) = e^c  =>  r = (2 - e^c) / (e^c - 1)
    assert reservation_price(math.log(2.0), UNIT) == pytest.approx(0.0, abs=1e-10)
    assert reservation_price(math.log(1.5), UNIT) == pytest.approx(1.0, abs=1e-10)


def test_cost_must_be_positive():
    with pytest.raises(NonPositiveCost):
        reservation_price(0.0, UNIT)
    with pytest.raises(NonPositiveCost):
        reservation_price(-0.1, UNIT)


def test_zero_weight_distribution_has_no_root():
    dist = WeightDistribution((0.0,), (1.0,))
    with pytest.raises(BracketExhausted):
        reservation_price(1.0, dist)


def test_residual_within_tolerance():
    dist = WeightDistribution((0.5, 2.0, 5.0), (0.2, 0.5, 0.3))
    for c in (0.05, 0.3, 1.0, 4.0):
        r = reservation_price(c, dist, tol=1e-12)
        resid = sum(p * math.log(1.0 + r + w)
                    for w, p in zip(dist.support, dist.probabilities))
        resid -= math.log(1.0 + r) + c
        assert abs(resid) < 1e-10


@given(st.floats(0.01, 3.0), st.floats(0.01, 3.0))
def test_price_decreases_with_cost(c1, c2):
    lo, hi = sorted((c1, c2))
    assert reservation_price(hi, UNIT) <= reservation_price(lo, UNIT) + 1e-9


def test_sequence_equal_costs_give_equal_prices():
    seq = reservation_sequence((0.3, 0.3, 0.3), UNIT)
    assert seq.prices[0] == seq.prices[1] == seq.prices[2]
    assert seq.floored == (False, False, False)


def test_sequence_closed_form_pair():
    seq = reservation_sequence((math.log(1.5), math.log(2.0)), UNIT)
    assert seq.prices == pytest.approx((1.0, 0.0), abs=1e-10)


def test_sequence_floors_negative_prices():
    seq = reservation_sequence((math.log(1.5), 2.0), UNIT)
    assert seq.prices[1] == 0.0
    assert seq.floored == (False, True)


def test_sequence_rejects_decreasing_costs():
    with pytest.raises(CostsNotIncreasing):
        reservation_sequence((0.5, 0.4), UNIT)
    with pytest.raises(CostsNotIncreasing):
        reservation_sequence((), UNIT)
    with pytest.raises(CostsNotIncreasing):
        reservation_sequence((0.0, 0.5), UNIT)


def test_sequence_prices_weakly_decreasing():
    dist = WeightDistribution((0.2, 1.0, 4.0), (0.3, 0.4, 0.3))
    costs = tuple(0.05 * i for i in range(1, 12))
    seq = reservation_sequence(costs, dist)
    assert all(a >= b for a, b in zip(seq.prices, seq.prices[1:]))


def test_welfare_closed_forms():
    assert welfare(1.0, 0.0) == pytest.approx(EULER_GAMMA)
    assert welfare(math.e, 0.0) == pytest.approx(1.0 + EULER_GAMMA)
    assert welfare(1.0, EULER_GAMMA) == 0.0
    with pytest.raises(NonPositiveWeight):
        welfare(0.0, 0.0)


def test_welfare_matches_gumbel_monte_carlo():
    rng = np.random.Generator(np.random.PCG64(20260815))
    g = rng.gumbel(0.0, 1.0, size=10 ** 6)
    assert welfare(1.0, 0.0) == pytest.approx(g.mean(), abs=3e-3)
    assert welfare(math.e, 0.0) == pytest.approx((1.0 + g).mean(), abs=3e-3)
