"""Seeded random instance factory for benchmarks and verification suites.

All draws go through numpy's PCG64 so identical seeds give identical
instances on every platform; the generator name is exported so reports can
record it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import BadSpec
from .model import Instance, Segment, validate_instance
from .weight_classes import weight_floor

RNG_ALGORITHM = "pcg64"


@dataclass(frozen=True)
class RandomSpec:
    """Distribution parameters for one random instance.

    Weights are log-uniform over [weight_low, weight_high]; each segment
    draws its occurrence probability from a flat Dirichlet and its prices
    as descending-sorted uniforms over [0, total_weight * price_scale].
    """

    n: int
    num_segments: int
    seed: int
    weight_low: float = 0.01
    weight_high: float = 1.0
    price_scale: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise BadSpec(f"need at least one product, got n={self.n}")
        if self.num_segments < 1:
            raise BadSpec(f"need at least one segment, got {self.num_segments}")
        if not 0.0 < self.weight_low <= self.weight_high:
            raise BadSpec(
                f"weight range [{self.weight_low}, {self.weight_high}] is invalid")
        if self.price_scale < 0.0:
            raise BadSpec(f"price_scale must be nonnegative, got {self.price_scale}")
        if self.seed < 0:
            raise BadSpec(f"seed must be nonnegative, got {self.seed}")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_instance(spec: RandomSpec) -> Instance:
    """Draw one valid float-mode instance; deterministic given the seed."""
    rng = _rng(spec.seed)
    w = np.exp(rng.uniform(np.log(spec.weight_low), np.log(spec.weight_high), spec.n))
    total = float(w.sum())
    theta = rng.dirichlet(np.ones(spec.num_segments))
    theta = theta / theta.sum()                      # pin the simplex sum exactly
    segments = []
    for k in range(spec.num_segments):
        draws = rng.uniform(0.0, total * spec.price_scale, spec.n)
        prices = tuple(float(x) for x in np.sort(draws)[::-1])
        segments.append(Segment(float(theta[k]), prices))
    return validate_instance(tuple(float(x) for x in w), tuple(segments))


def random_bounded_ratio_instance(spec: RandomSpec, eps: float) -> Instance:
    """Instance already in the bounded-ratio regime for this eps.

    The heaviest product sits exactly at weight_high and every weight stays
    above the class floor (eps^2/2n) * w_max, so the rounding transform is
    the identity and class construction never rejects.  Requires
    weight_high <= 1/eps.
    """
    if not 0.0 < eps < 1.0:
        raise BadSpec(f"eps must be in (0,1), got {eps}")
    if spec.weight_high > 1.0 / eps:
        raise BadSpec(f"weight_high {spec.weight_high} exceeds 1/eps = {1.0 / eps}")
    rng = _rng(spec.seed)
    w_max = spec.weight_high
    lo = max(spec.weight_low, weight_floor(eps, spec.n, w_max) * (1.0 + 1e-9))
    if lo > w_max:
        raise BadSpec(f"weight_low {spec.weight_low} leaves no admissible range")
    w = np.exp(rng.uniform(np.log(lo), np.log(w_max), spec.n))
    w[int(rng.integers(spec.n))] = w_max
    total = float(w.sum())
    theta = rng.dirichlet(np.ones(spec.num_segments))
    theta = theta / theta.sum()
    segments = []
    for k in range(spec.num_segments):
        draws = rng.uniform(0.0, total * spec.price_scale, spec.n)
        prices = tuple(float(x) for x in np.sort(draws)[::-1])
        segments.append(Segment(float(theta[k]), prices))
    return validate_instance(tuple(float(x) for x in w), tuple(segments))


def spec_with_seed(spec: RandomSpec, seed: int) -> RandomSpec:
    return replace(spec, seed=seed)
