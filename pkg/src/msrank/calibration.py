"""Reservation-price calibration from sequential-search primitives.

A position's reservation price is the indifference point of a searcher
who has already accumulated attraction weight r and pays a cost c to
reveal one more product whose weight W is drawn from a known discrete
distribution: r solves

    E[ln(1 + r + W)] - ln(1 + r) = c.

The left side is continuous and strictly decreasing in r on (-1, inf)
whenever P(W > 0) > 0, so a bracketed bisection finds the unique root.
The welfare value of stopping with accumulated weight w after paying
total cost c is ln(w) + euler_gamma - c (Gumbel-max expectation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BracketExhausted,
    CostsNotIncreasing,
    NonPositiveCost,
    NonPositiveWeight,
)

EULER_GAMMA = float(np.euler_gamma)

_R_LO = -1.0 + 1e-9
_R_HI_CAP = 1e12


@dataclass(frozen=True)
class WeightDistribution:
    """Discrete distribution of one product's attraction weight."""

    support: tuple[float, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        if len(self.support) != len(self.probabilities) or not self.support:
            raise ValueError("support and probabilities must be non-empty and equal length")
        if any(s < 0 for s in self.support):
            raise NonPositiveWeight("weight support must be nonnegative")
        if any(p < 0 for p in self.probabilities):
            raise ValueError("negative probability")
        if abs(sum(self.probabilities) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {sum(self.probabilities)}")

    @classmethod
    def constant(cls, value: float) -> "WeightDistribution":
        return cls((float(value),), (1.0,))


def _gap(r: float, dist: WeightDistribution, cost: float) -> float:
    """E[ln(1+r+W)] - ln(1+r) - cost; strictly decreasing in r."""
    acc = 0.0
    for s, p in zip(dist.support, dist.probabilities):
        acc += p * math.log(1.0 + r + s)
    return acc - math.log(1.0 + r) - cost


def reservation_price(cost: float, dist: WeightDistribution, tol: float = 1e-12) -> float:
    """Solve the indifference equation for one search cost.

    Parameters
    ----------
    cost : strictly positive search cost.
    dist : weight distribution of the unrevealed product.
    tol : residual tolerance on the indifference gap.

    Raises
    ------
    NonPositiveCost
        cost <= 0.
    BracketExhausted
        no sign change within (-1 + 1e-9, 1e12]; happens e.g. for W == 0,
        where the gap is identically -cost and no root exists.
    """
    if not cost > 0.0:
        raise NonPositiveCost(f"search cost must be positive, got {cost}")
    lo = _R_LO
    f_lo = _gap(lo, dist, cost)
    if not f_lo > 0.0:
        raise BracketExhausted(
            f"indifference gap already {f_lo:.3e} at the lower bracket; no root in range")
    hi = 1.0
    while _gap(hi, dist, cost) > 0.0:
        hi *= 2.0
        if hi > _R_HI_CAP:
            raise BracketExhausted(f"no sign change up to r = {_R_HI_CAP:.0e}")
    # bisect until the residual (not the interval) is small
    for _ in range(20000):
        mid = 0.5 * (lo + hi)
        f_mid = _gap(mid, dist, cost)
        if abs(f_mid) <= tol:
            return mid
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 0.0:
            break
    raise BracketExhausted("bisection failed to reach the residual tolerance")


@dataclass(frozen=True)
class ReservationSequence:
    """Solved per-position prices plus flags for entries floored at zero."""

    prices: tuple[float, ...]
    floored: tuple[bool, ...]


def reservation_sequence(costs: Sequence[float], dist: WeightDistribution,
                         tol: float = 1e-12) -> ReservationSequence:
    """Price vector for a whole position ladder of cumulative search costs.

    Costs must be strictly positive and weakly increasing, which makes the
    solved prices weakly decreasing (enforced exactly against solver
    jitter).  Negative solutions are floored at zero and flagged.
    """
    costs = list(costs)
    if not costs:
        raise CostsNotIncreasing("need at least one cost")
    if any(not c > 0.0 for c in costs):
        raise CostsNotIncreasing("costs must be strictly positive")
    if any(costs[i + 1] < costs[i] for i in range(len(costs) - 1)):
        raise CostsNotIncreasing(f"costs are not weakly increasing: {costs}")
    prices = []
    floored = []
    for c in costs:
        r = reservation_price(c, dist, tol)
        f = r < 0.0
        r = max(r, 0.0)
        if prices:
            r = min(r, prices[-1])  # kill sub-tolerance wobble
        prices.append(r)
        floored.append(f)
    return ReservationSequence(tuple(prices), tuple(floored))


def welfare(prefix_weight: float, cumulative_cost: float) -> float:
    """Expected best utility when stopping with `prefix_weight` accumulated.

    Gumbel-max closed form: ln(w) + euler_gamma - cost.
    """
    if not prefix_weight > 0.0:
        raise NonPositiveWeight(f"prefix weight must be positive, got {prefix_weight}")
    return math.log(prefix_weight) + EULER_GAMMA - cumulative_cost
