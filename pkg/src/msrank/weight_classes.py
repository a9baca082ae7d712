"""Geometric weight classes for bounded-ratio instances.

Products are bucketed by powers of (1 + eps) above the smallest allowed
weight base = (eps^2 / 2n) * max_weight.  Class q covers the half-open
interval [base*(1+eps)^(q-1), base*(1+eps)^q); the top classes (from
heavy_min_class up) are the "heavy" ones, and every heavy product has
weight >= eps^2 * max_weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotBoundedRatio
from .model import Instance, Assignment, to_float

# number of occupied classes is tiny at desk scale; boundaries are built by
# repeated multiplication so membership tests and the rounding floor used by
# the bounded-ratio transform share bit-identical values


def weight_floor(eps: float, n: int, max_weight: float) -> float:
    """Smallest admissible weight: (eps^2 / 2n) * max_weight.

    Single shared definition so the rounding transform and the class
    boundaries can never disagree in floating arithmetic.
    """
    return (eps * eps / (2.0 * n)) * max_weight


def _least_power_at_least(ratio: float, target: float) -> int:
    """Smallest integer j >= 0 with ratio**j >= target (exact float compare)."""
    if target <= 1.0:
        return 0
    j = max(0, math.ceil(math.log(target) / math.log(ratio)) - 2)
    p = ratio ** j
    while p < target:
        p *= ratio
        j += 1
    return j


@dataclass(frozen=True)
class ClassStructure:
    """Weight classes of one bounded-ratio instance."""

    eps: float
    n: int
    max_weight: float
    base: float                              # lower boundary of class 1
    num_classes: int                         # Q
    heavy_min_class: int                     # first heavy class id (1-based)
    class_of: tuple[int, ...]                # per product, 1..Q
    members: tuple[tuple[int, ...], ...]     # per class, ascending (weight, index)
    weights: tuple[float, ...]               # the weights this structure was built on

    @property
    def heavy_class_ids(self) -> range:
        return range(self.heavy_min_class, self.num_classes + 1)

    @property
    def light_class_ids(self) -> range:
        return range(1, self.heavy_min_class)

    def is_heavy_class(self, q: int) -> bool:
        return q >= self.heavy_min_class

    def is_heavy_product(self, i: int) -> bool:
        return self.class_of[i] >= self.heavy_min_class

    def class_members(self, q: int) -> tuple[int, ...]:
        return self.members[q - 1]

    def occupied(self, heavy: bool) -> list[int]:
        ids = self.heavy_class_ids if heavy else self.light_class_ids
        return [q for q in ids if self.members[q - 1]]


def build_classes(inst: Instance, eps: float) -> ClassStructure:
    """Bucket the products of a bounded-ratio instance into weight classes.

    Parameters
    ----------
    inst : instance with max_weight <= 1/eps and min_weight >= weight_floor.
    eps : accuracy parameter in (0, 1).

    Raises
    ------
    NotBoundedRatio
        when either precondition on the weight range fails.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0,1), got {eps}")
    f = to_float(inst)
    w = np.array(f.weights, dtype=np.float64)
    n = len(w)
    w_max = float(w.max())
    if w_max > 1.0 / eps:
        raise NotBoundedRatio(f"max weight {w_max} exceeds 1/eps = {1.0 / eps}")
    base = weight_floor(eps, n, w_max)
    if float(w.min()) < base:
        raise NotBoundedRatio(
            f"min weight {w.min()} below the admissible floor {base}")

    ratio = 1.0 + eps
    num_classes = _least_power_at_least(ratio, 2.0 * n / eps ** 3)
    heavy_min = _least_power_at_least(ratio, 2.0 * n) + 1

    bounds = np.empty(num_classes + 1)
    b = base
    for j in range(num_classes + 1):
        bounds[j] = b
        b *= ratio
    # class q owns [bounds[q-1], bounds[q]); float-edge overflow past the top
    # boundary (analytically impossible) clamps into the last class
    cls = np.searchsorted(bounds, w, side="right").astype(np.int64)
    cls[cls > num_classes] = num_classes
    if (cls < 1).any():
        raise NotBoundedRatio("a weight fell below the class floor")

    members = []
    for q in range(1, num_classes + 1):
        ids = [i for i in range(n) if cls[i] == q]
        ids.sort(key=lambda i: (w[i], i))
        members.append(tuple(ids))
    return ClassStructure(
        eps=eps,
        n=n,
        max_weight=w_max,
        base=base,
        num_classes=num_classes,
        heavy_min_class=heavy_min,
        class_of=tuple(int(c) for c in cls),
        members=tuple(members),
        weights=tuple(float(x) for x in w),
    )


def sorted_within_class(inst: Instance, a: Assignment, cs: ClassStructure) -> Assignment:
    """Re-sort each class's products, in place, over the positions they occupy.

    Per class, the occupied position set is unchanged but the class members
    are re-laid ascending by (weight, index).  Idempotent; the result never
    has a larger weight prefix than the input at any class-boundary position.
    """
    order = list(a.order if isinstance(a, Assignment) else a)
    pos_of = {i: p for p, i in enumerate(order)}
    for q in range(1, cs.num_classes + 1):
        mem = cs.members[q - 1]
        if len(mem) < 2:
            continue
        positions = sorted(pos_of[i] for i in mem)
        for p, i in zip(positions, mem):  # members already ascending (w, idx)
            order[p] = i
    return Assignment(tuple(order))
