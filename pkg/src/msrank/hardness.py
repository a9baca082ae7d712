"""Exact reduction from 3-partition to market share ranking.

Given 3K integers strictly between T/4 and T/2 summing to K*T, the factory
emits a 4K-product, K-segment instance whose optimum reaches the threshold
K*alpha exactly when the integers split into K triplets of sum T.  All
arithmetic is Fraction-exact; the price offsets of one half and the big
weights 4(K^3*T+1) fall far outside float-safe territory for larger K.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .baselines import OracleResult, brute_force_opt
from .errors import MalformedThreePartition, NotAValidPartition
from .model import RATIONAL, Assignment, Instance, Segment, evaluate


@dataclass(frozen=True)
class ThreePartitionInstance:
    """3K positive integers in (T/4, T/2) summing to K*T."""

    a: tuple[int, ...]
    T: int

    def __post_init__(self):
        a, T = self.a, self.T
        if not isinstance(T, int) or T <= 0:
            raise MalformedThreePartition(f"T must be a positive integer, got {T!r}")
        if len(a) == 0 or len(a) % 3:
            raise MalformedThreePartition(f"need 3K integers, got {len(a)}")
        for x in a:
            if not isinstance(x, int) or x <= 0:
                raise MalformedThreePartition(f"entries must be positive integers, got {x!r}")
            if not (Fraction(T, 4) < x < Fraction(T, 2)):
                raise MalformedThreePartition(
                    f"entry {x} outside the open interval (T/4, T/2) = ({T}/4, {T}/2)")
        K = len(a) // 3
        if sum(a) != K * T:
            raise MalformedThreePartition(f"sum {sum(a)} != K*T = {K * T}")

    @property
    def K(self) -> int:
        return len(self.a) // 3


@dataclass(frozen=True)
class HardnessInstance:
    """Market share ranking twin of one 3-partition instance."""

    source: ThreePartitionInstance
    instance: Instance              # rational mode, 4K products, K segments
    big_weight: int                 # weight shared by the K large products
    alpha: Fraction                 # segment-probability normalizer
    threshold: Fraction             # K * alpha, the decision cutoff

    @property
    def K(self) -> int:
        return self.source.K


def build_hardness_instance(tp: ThreePartitionInstance) -> HardnessInstance:
    """Products = the 3K integers then K copies of the big weight.

    Segment k has occurrence probability alpha*(k(L+T)+1)/(k(L+T)) and a
    price of (k-1)L + kT + 1/2 at positions 1..4k-1, zero afterwards.
    """
    K, T = tp.K, tp.T
    L_big = 4 * (K ** 3 * T + 1)
    n = 4 * K
    weights = tuple(Fraction(x) for x in tp.a) + tuple(Fraction(L_big) for _ in range(K))
    alpha = 1 / sum(Fraction(k * (L_big + T) + 1, k * (L_big + T)) for k in range(1, K + 1))
    segments = []
    for k in range(1, K + 1):
        theta = alpha * Fraction(k * (L_big + T) + 1, k * (L_big + T))
        lead = (k - 1) * L_big + k * T + Fraction(1, 2)
        prices = tuple(lead if p <= 4 * k - 1 else Fraction(0) for p in range(1, n + 1))
        segments.append(Segment(theta, prices))
    inst = Instance(weights, tuple(segments), numeric_mode=RATIONAL)
    return HardnessInstance(tp, inst, L_big, alpha, K * alpha)


def canonical_yes_assignment(h: HardnessInstance,
                             triplets: Sequence[Sequence[int]]) -> Assignment:
    """Ranking showing the threshold is reachable: triplet k at positions
    4k-3..4k-1 (ascending index), the k-th large product at position 4k.

    `triplets` holds 1-based indices into the small products and must
    partition them into groups of three summing to T each.
    """
    tp = h.source
    K, T = tp.K, tp.T
    if len(triplets) != K:
        raise NotAValidPartition(f"need {K} triplets, got {len(triplets)}")
    seen = set()
    for s in triplets:
        if len(s) != 3:
            raise NotAValidPartition(f"triplet {tuple(s)} does not have three members")
        for i in s:
            if not 1 <= i <= 3 * K or i in seen:
                raise NotAValidPartition(f"index {i} out of range or repeated")
            seen.add(i)
        if sum(tp.a[i - 1] for i in s) != T:
            raise NotAValidPartition(
                f"triplet {tuple(s)} sums to {sum(tp.a[i - 1] for i in s)}, not {T}")
    order = []
    for k, s in enumerate(triplets, start=1):
        order.extend(sorted(s))
        order.append(3 * K + k)
    return Assignment.from_one_based(tuple(order))


@dataclass(frozen=True)
class HardnessDecision:
    """Exact answer of the desk-scale 3-partition decision procedure."""

    yes: bool
    opt: Fraction
    threshold: Fraction
    oracle: OracleResult

    def __bool__(self) -> bool:
        return self.yes


def decide_three_partition(tp: ThreePartitionInstance,
                           budget: int = 10 ** 7) -> HardnessDecision:
    """Brute-force the reduction instance; yes iff OPT reaches K*alpha.

    Exact in both directions at desk scale; (4K)! beyond the budget raises
    BudgetExceeded before any work happens.
    """
    h = build_hardness_instance(tp)
    res = brute_force_opt(h.instance, budget)
    return HardnessDecision(res.opt >= h.threshold, res.opt, h.threshold, res)
