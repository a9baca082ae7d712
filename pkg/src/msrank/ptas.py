"""Structured search over block partitions: the approximation-scheme core.

Pipeline: round to a bounded-ratio instance, bucket products into geometric
weight classes, decompose a (conceptual) reference ranking into prefix
blocks of geometrically growing weight, and enumerate per-block statistics
(heavy-class counts plus light counts or gridded light weights).  Each
statistics guess deterministically induces a candidate partition, each
partition a ranking, and the best ranking under the ORIGINAL instance wins.

The guess stream is enumerated by compiled kernels; the pure-Python
builders in this module exist for single guesses (oracle mode), for
white-box property checking, and as the kernels' reference semantics.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from . import _kernels
from .baselines import DEFAULT_LIMIT, OracleResult, brute_force_opt
from .errors import GuessInfeasible, MissingHeadProduct
from .model import (
    Assignment,
    Evaluation,
    Instance,
    SolveReport,
    as_float_arrays,
    evaluate,
)
from .reduction import BoundedRatioTransform, bounded_ratio_transform, trivial_case
from .weight_classes import ClassStructure, build_classes, sorted_within_class

GRID = "grid"
COUNT = "count"
ORACLE = "oracle"


def block_count(eps: float) -> int:
    """Number of mid blocks L: least ell with (1+eps)^ell * eps^3 > 1/eps."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0,1), got {eps}")
    val = eps ** 3
    bound = 1.0 / eps
    ell = 0
    while val <= bound:
        ell += 1
        val *= 1.0 + eps
    return ell


@dataclass(frozen=True)
class BlockStats:
    """Prefix-block decomposition of one ranking, with per-class tallies.

    Blocks are indexed 0..L; position p (1-based) lies in block ell when
    boundaries[ell-1] < p <= boundaries[ell], and in the tail beyond
    boundaries[L].  Rows of the per-class matrices follow blocks 0..L and
    columns follow class ids 1..Q.
    """

    eps: float
    num_blocks: int                                  # L
    max_weight: float
    order: Assignment                                # the decomposed ranking
    boundaries: tuple[int, ...]                      # p_0..p_L, last position of each block
    sizes: tuple[int, ...]                           # |B_0|..|B_L|
    weights: tuple[float, ...]                       # w(B_0)..w(B_L)
    tail_size: int
    tail_weight: float
    class_counts: tuple[tuple[int, ...], ...]        # [ell][q-1]
    class_weights: tuple[tuple[float, ...], ...]
    tail_class_counts: tuple[int, ...]
    top_class: tuple[int, ...]                       # max occupied class per block, 0 if empty

    def block_of_position(self, p: int) -> int:
        """Block index 0..L holding 1-based position p; L+1 means the tail."""
        for ell, b in enumerate(self.boundaries):
            if p <= b:
                return ell
        return self.num_blocks + 1

    def heavy_count(self, ell: int, q: int) -> int:
        return self.class_counts[ell][q - 1]

    def light_count(self, ell: int, cs: ClassStructure) -> int:
        return sum(self.class_counts[ell][q - 1] for q in cs.light_class_ids)

    def light_class_weight(self, ell: int, q: int) -> float:
        return self.class_weights[ell][q - 1]

    def prefix_products(self) -> frozenset:
        """Products placed in blocks 0..L (everything before the tail)."""
        return frozenset(self.order.order[: self.boundaries[-1]])


def block_decompose(inst: Instance, a: Assignment, cs: ClassStructure) -> BlockStats:
    """Split the positions of ranking `a` into prefix-weight blocks.

    Block ell ends at the last position whose prefix weight is still below
    (1+eps)^ell * eps^3 * w_max; everything past block L is the tail.
    """
    eps = cs.eps
    n = inst.n
    w = np.array(cs.weights, dtype=np.float64)
    order = np.array(a.order, dtype=np.int64)
    prefix = np.cumsum(w[order])
    L = block_count(eps)
    w_max = cs.max_weight

    boundaries = []
    thresh = (eps ** 3) * w_max
    for ell in range(L + 1):
        # max position with prefix weight strictly below the threshold
        p = int(np.searchsorted(prefix, thresh, side="left"))
        boundaries.append(p)
        thresh *= 1.0 + eps
    for ell in range(1, L + 1):                    # thresholds grow, so must p_ell
        boundaries[ell] = max(boundaries[ell], boundaries[ell - 1])

    Q = cs.num_classes
    sizes, weights, counts, cweights, top = [], [], [], [], []
    lo = 0
    for ell in range(L + 1):
        hi = boundaries[ell]
        ids = order[lo:hi]
        row_c = [0] * Q
        row_w = [0.0] * Q
        for i in ids:
            q = cs.class_of[i]
            row_c[q - 1] += 1
            row_w[q - 1] += float(w[i])
        sizes.append(hi - lo)
        weights.append(float(prefix[hi - 1] - (prefix[lo - 1] if lo else 0.0)) if hi > lo else 0.0)
        counts.append(tuple(row_c))
        cweights.append(tuple(row_w))
        top.append(max((q for q in range(1, Q + 1) if row_c[q - 1]), default=0))
        lo = hi
    tail_ids = order[boundaries[-1]:]
    tail_counts = [0] * Q
    for i in tail_ids:
        tail_counts[cs.class_of[i] - 1] += 1
    return BlockStats(
        eps=eps, num_blocks=L, max_weight=w_max, order=a,
        boundaries=tuple(boundaries), sizes=tuple(sizes), weights=tuple(weights),
        tail_size=int(n - boundaries[-1]),
        tail_weight=float(prefix[-1] - (prefix[boundaries[-1] - 1] if boundaries[-1] else 0.0))
        if boundaries[-1] < n else 0.0,
        class_counts=tuple(counts), class_weights=tuple(cweights),
        tail_class_counts=tuple(tail_counts), top_class=tuple(top))


# ---------------------------------------------------------------------------
# guesses

@dataclass(frozen=True)
class StatGuess:
    """Per-block statistics vector driving one candidate partition.

    `heavy[ell-1][j]` counts products of heavy class `heavy_classes[j]`
    guessed into block subset ell; `light[ell-1][j]` analogously holds
    light counts (count mode) or grid multiples (grid mode), where a grid
    multiple mu stands for the weight target mu * light_weight_unit.
    """

    mode: str
    heavy_classes: tuple[int, ...]
    light_classes: tuple[int, ...]
    heavy: tuple[tuple[int, ...], ...]
    light: tuple[tuple[int, ...], ...]
    light_weight_unit: Optional[float] = None     # grid mode only

    def top_heavy_class(self, ell: int) -> Optional[int]:
        """Highest heavy class with a product guessed into subset ell, if any."""
        best = None
        for j, q in enumerate(self.heavy_classes):
            if self.heavy[ell - 1][j] >= 1:
                best = q if best is None else max(best, q)
        return best


@dataclass(frozen=True)
class CandidatePartition:
    """Disjoint cover (S_1..S_L, tail) induced by a StatGuess."""

    subsets: tuple[frozenset, ...]
    tail: frozenset
    heads: tuple[Optional[int], ...]       # per subset, the designated first product
    guess: StatGuess

    def cover(self) -> frozenset:
        out = set(self.tail)
        for s in self.subsets:
            out |= s
        return frozenset(out)


def grid_weight_unit(cs: ClassStructure) -> float:
    """Grid cell width for light weights: eps^4 * w_max / Q."""
    return (cs.eps ** 4) * cs.max_weight / cs.num_classes


def grid_global_cap(cs: ClassStructure) -> int:
    """Upper bound on the sum of all grid multiples: 2Q/eps^5."""
    return int(math.floor(2.0 * cs.num_classes / cs.eps ** 5))


def _light_class_cap(cs: ClassStructure, q: int, unit: float) -> int:
    # any split of multiples summing beyond total class weight / ((1-eps)*unit)
    # cannot meet its thresholds; +1 keeps float-boundary cases enumerable
    total = sum(cs.weights[i] for i in cs.class_members(q))
    return int(math.floor(total / ((1.0 - cs.eps) * unit))) + 1


def guess_layout(cs: ClassStructure, mode: str):
    """Kernel-facing flat arrays describing the guess enumeration space."""
    L = block_count(cs.eps)
    heavy_occ = cs.occupied(heavy=True)
    light_occ = cs.occupied(heavy=False)
    unit = grid_weight_unit(cs)

    def flat(ids):
        members, offsets, sizes = [], [], []
        off = 0
        for q in ids:
            mem = cs.class_members(q)
            offsets.append(off)
            sizes.append(len(mem))
            members.extend(mem)
            off += len(mem)
        return (np.array(members, dtype=np.int64),
                np.array(offsets, dtype=np.int64),
                np.array(sizes, dtype=np.int64))

    h_members, h_off, h_sizes = flat(heavy_occ)
    l_members, l_off, l_sizes = flat(light_occ)
    if mode == GRID:
        l_caps = np.array([_light_class_cap(cs, q, unit) for q in light_occ], dtype=np.int64)
    else:
        l_caps = l_sizes.copy()
    return _GuessLayout(
        num_blocks=L, grid_mode=(mode == GRID),
        global_cap=grid_global_cap(cs) if mode == GRID else 0,
        heavy_ids=np.array(heavy_occ, dtype=np.int64), heavy_sizes=h_sizes,
        heavy_members=h_members, heavy_offsets=h_off,
        light_ids=np.array(light_occ, dtype=np.int64), light_sizes=l_sizes,
        light_members=l_members, light_offsets=l_off,
        unit=unit, one_minus_eps=1.0 - cs.eps,
        heavy_caps=h_sizes.copy(), light_caps=l_caps)


@dataclass
class _GuessLayout:
    num_blocks: int
    grid_mode: bool
    global_cap: int
    heavy_ids: np.ndarray
    heavy_sizes: np.ndarray
    heavy_members: np.ndarray
    heavy_offsets: np.ndarray
    light_ids: np.ndarray
    light_sizes: np.ndarray
    light_members: np.ndarray
    light_offsets: np.ndarray
    unit: float
    one_minus_eps: float
    heavy_caps: np.ndarray
    light_caps: np.ndarray


class GuessStream:
    """Iterator over StatGuess values in kernel stream order.

    Walks the flat (class, block) cell vector as an odometer, rightmost
    cell fastest, under per-class sum caps and (grid mode) the global cap;
    the all-zero guess comes first.  `truncated` turns True when `budget`
    ran out before the space was exhausted.
    """

    def __init__(self, cs: ClassStructure, mode: str, budget: int = DEFAULT_LIMIT):
        if mode not in (GRID, COUNT):
            raise ValueError(f"mode must be grid or count, got {mode!r}")
        if budget <= 0:
            raise ValueError("budget must be positive")
        self.cs = cs
        self.mode = mode
        self.budget = budget
        self.layout = guess_layout(cs, mode)
        self.truncated = False
        self.emitted = 0
        lay = self.layout
        self._ncells = (len(lay.heavy_ids) + len(lay.light_ids)) * lay.num_blocks
        self._state = [0] * self._ncells
        self._sums = [0] * (len(lay.heavy_ids) + len(lay.light_ids))
        self._caps = list(lay.heavy_caps) + list(lay.light_caps)
        self._gsum = 0
        self._done = False

    def __iter__(self) -> Iterator[StatGuess]:
        return self

    def _advance(self) -> bool:
        lay = self.layout
        L = lay.num_blocks
        nh = len(lay.heavy_ids)
        j = self._ncells - 1
        while j >= 0:
            slot = j // L
            light = slot >= nh
            if self._sums[slot] + 1 <= self._caps[slot] and (
                    not (lay.grid_mode and light) or self._gsum + 1 <= lay.global_cap):
                self._state[j] += 1
                self._sums[slot] += 1
                if lay.grid_mode and light:
                    self._gsum += 1
                return True
            self._sums[slot] -= self._state[j]
            if lay.grid_mode and light:
                self._gsum -= self._state[j]
            self._state[j] = 0
            j -= 1
        return False

    def _current(self) -> StatGuess:
        lay = self.layout
        L = lay.num_blocks
        nh = len(lay.heavy_ids)
        nl = len(lay.light_ids)
        heavy = tuple(tuple(self._state[ci * L + (ell - 1)] for ci in range(nh))
                      for ell in range(1, L + 1))
        light = tuple(tuple(self._state[(nh + ci) * L + (ell - 1)] for ci in range(nl))
                      for ell in range(1, L + 1))
        return StatGuess(
            mode=self.mode,
            heavy_classes=tuple(int(q) for q in lay.heavy_ids),
            light_classes=tuple(int(q) for q in lay.light_ids),
            heavy=heavy, light=light,
            light_weight_unit=lay.unit if self.mode == GRID else None)

    def __next__(self) -> StatGuess:
        if self._done:
            raise StopIteration
        if self.emitted >= self.budget:
            self.truncated = True
            self._done = True
            raise StopIteration
        g = self._current()
        self.emitted += 1
        if not self._advance():
            self._done = True
        return g


def enumerate_guesses(cs: ClassStructure, mode: str,
                      budget: int = DEFAULT_LIMIT) -> GuessStream:
    """Stream of statistics guesses; check `.truncated` after exhaustion."""
    return GuessStream(cs, mode, budget)


def stats_of(blocks: BlockStats, cs: ClassStructure, mode: str = COUNT) -> StatGuess:
    """Exact per-block statistics of a decomposed reference ranking.

    Count (and oracle) mode reads the true per-class counts; grid mode
    rounds each light class weight down to a grid multiple, landing within
    one unit below the true value.
    """
    L = blocks.num_blocks
    heavy_occ = cs.occupied(heavy=True)
    light_occ = cs.occupied(heavy=False)
    unit = grid_weight_unit(cs)
    heavy = tuple(tuple(blocks.heavy_count(ell, q) for q in heavy_occ)
                  for ell in range(1, L + 1))
    if mode == GRID:
        light = tuple(tuple(int(math.floor(blocks.light_class_weight(ell, q) / unit))
                            for q in light_occ) for ell in range(1, L + 1))
    else:
        light = tuple(tuple(blocks.class_counts[ell][q - 1] for q in light_occ)
                      for ell in range(1, L + 1))
    return StatGuess(mode=mode, heavy_classes=tuple(heavy_occ),
                     light_classes=tuple(light_occ), heavy=heavy, light=light,
                     light_weight_unit=unit if mode == GRID else None)


def assign_heavy(cs: ClassStructure, g: StatGuess) -> CandidatePartition:
    """Cut each heavy class into consecutive ascending-weight ranges.

    Subset ell takes the next heavy[ell][q] lowest-ranked unconsumed
    products of class q; leftovers and all light products sit in the tail
    until assign_light refines it.
    """
    L = len(g.heavy)
    subsets = [set() for _ in range(L)]
    heads: list[Optional[int]] = [None] * L
    for j, q in enumerate(g.heavy_classes):
        mem = cs.class_members(q)
        need = sum(g.heavy[ell][j] for ell in range(L))
        if need > len(mem):
            raise GuessInfeasible(
                f"class {q} supplies {len(mem)} products but the guess takes {need}")
        pos = 0
        for ell in range(L):
            c = g.heavy[ell][j]
            if c == 0:
                continue
            chunk = mem[pos:pos + c]
            subsets[ell].update(chunk)
            pos += c
            if g.top_heavy_class(ell + 1) == q:
                heads[ell] = min(chunk)
    all_ids = set(range(cs.n))
    used = set()
    for s in subsets:
        used |= s
    tail = all_ids - used
    return CandidatePartition(tuple(frozenset(s) for s in subsets),
                              frozenset(tail), tuple(heads), g)


def assign_light(cs: ClassStructure, g: StatGuess,
                 partial: CandidatePartition) -> CandidatePartition:
    """Consume light classes in ascending weight order per the guess.

    Count mode takes the guessed counts verbatim; grid mode takes, per
    cell, the minimal prefix of the class whose weight reaches
    (1-eps) * (mu * unit), matching the kernel float-for-float.
    """
    L = len(g.light)
    subsets = [set(s) for s in partial.subsets]
    tail = set(partial.tail)
    one_minus_eps = 1.0 - cs.eps
    unit = g.light_weight_unit if g.light_weight_unit is not None else 0.0
    for j, q in enumerate(g.light_classes):
        mem = cs.class_members(q)
        pos = 0
        for ell in range(L):
            v = g.light[ell][j]
            if v == 0:
                continue
            if g.mode == GRID:
                target = one_minus_eps * (v * unit)
                acc = 0.0
                cnt = 0
                met = False
                while pos + cnt < len(mem):
                    acc += cs.weights[mem[pos + cnt]]
                    cnt += 1
                    if acc >= target:
                        met = True
                        break
                if not met:
                    raise GuessInfeasible(
                        f"class {q} cannot reach weight {target} for subset {ell + 1}")
            else:
                cnt = v
                if pos + cnt > len(mem):
                    raise GuessInfeasible(
                        f"class {q} supplies {len(mem)} products but the guess takes more")
            chunk = mem[pos:pos + cnt]
            subsets[ell].update(chunk)
            tail.difference_update(chunk)
            pos += cnt
    return CandidatePartition(tuple(frozenset(s) for s in subsets),
                              frozenset(tail), partial.heads, g)


def partition_to_assignment(p: CandidatePartition, cs: ClassStructure) -> Assignment:
    """Lay the subsets out consecutively, then the tail by descending weight.

    Within subset ell the designated head product (minimum index in the
    top guessed heavy class) goes first and the rest follow by ascending
    index; the tail breaks weight ties by ascending index.
    """
    order = []
    for ell, s in enumerate(p.subsets, start=1):
        q_top = p.guess.top_heavy_class(ell)
        head = None
        if q_top is not None:
            in_top = s & set(cs.class_members(q_top))
            if not in_top:
                raise MissingHeadProduct(
                    f"subset {ell} guesses top class {q_top} but holds none of it")
            head = min(in_top)
            order.append(head)
        order.extend(sorted(i for i in s if i != head))
    order.extend(sorted(p.tail, key=lambda i: (-cs.weights[i], i)))
    return Assignment(tuple(order))


@dataclass(frozen=True)
class GoodPartitionReport:
    """Outcome of the four structural checks against a reference ranking."""

    bounded_size: bool
    bounded_weight: bool
    top_class_present: bool
    prefix_subsets: bool
    size_by_block: tuple[int, ...]
    size_cap_by_block: tuple[int, ...]
    weight_by_block: tuple[float, ...]
    weight_low_by_block: tuple[float, ...]
    weight_high_by_block: tuple[float, ...]

    @property
    def all_good(self) -> bool:
        return (self.bounded_size and self.bounded_weight
                and self.top_class_present and self.prefix_subsets)


def is_good_partition(p: CandidatePartition, ref: BlockStats,
                      cs: ClassStructure, eps: float,
                      tol: float = 0.0) -> GoodPartitionReport:
    """Check the four good-partition properties against reference stats.

    1. each subset is no larger than its reference block;
    2. each subset weight lies in [(1-eps) * W_ell - eps^4 * w_max, W_ell];
    3. whenever the reference block's top class is heavy, the subset
       holds at least one product of that class;
    4. the union of subsets only uses products the reference placed in
       blocks 0..L (never tail products).
    """
    L = ref.num_blocks
    w_max = ref.max_weight
    sizes = tuple(len(s) for s in p.subsets)
    caps = tuple(ref.sizes[ell] for ell in range(1, L + 1))
    wts = tuple(sum(cs.weights[i] for i in sorted(s)) for s in p.subsets)
    lows = tuple((1.0 - eps) * ref.weights[ell] - eps ** 4 * w_max
                 for ell in range(1, L + 1))
    highs = tuple(ref.weights[ell] for ell in range(1, L + 1))
    ok_size = all(sizes[k] <= caps[k] for k in range(L))
    ok_weight = all(lows[k] - tol <= wts[k] <= highs[k] + tol for k in range(L))
    ok_top = True
    for ell in range(1, L + 1):
        q_top = ref.top_class[ell]
        if q_top and cs.is_heavy_class(q_top):
            if not (p.subsets[ell - 1] & set(cs.class_members(q_top))):
                ok_top = False
    prefix = ref.prefix_products()
    ok_prefix = all(s <= prefix for s in p.subsets)
    return GoodPartitionReport(ok_size, ok_weight, ok_top, ok_prefix,
                               sizes, caps, wts, lows, highs)


# ---------------------------------------------------------------------------
# solve

def classify_stoppers(inst: Instance, ref: Assignment, eps: float) -> tuple[str, ...]:
    """Label each segment early/mid/late by the block holding its stop.

    Blocks come from decomposing `ref` on the (bounded-ratio) instance:
    stops inside block 0 are early, inside blocks 1..L mid, past them late.
    """
    cs = build_classes(inst, eps)
    blocks = block_decompose(inst, ref, cs)
    ev = evaluate(inst, ref)
    labels = []
    for s in ev.stop_positions:
        b = blocks.block_of_position(s)
        labels.append("early" if b == 0 else ("mid" if b <= blocks.num_blocks else "late"))
    return tuple(labels)


@dataclass(frozen=True)
class OraclePipeline:
    """Every intermediate of one oracle-mode run, for white-box checks."""

    eps: float
    transform: BoundedRatioTransform
    classes: ClassStructure
    opt: OracleResult                    # exact optimum of the modified instance
    reference: Assignment                # sorted-within-class optimum
    blocks: BlockStats
    guess: StatGuess
    partition: CandidatePartition
    final: Assignment
    eval_reference: Evaluation           # reference on the modified instance
    eval_final_modified: Evaluation
    eval_final_original: Evaluation
    stopper_labels: tuple[str, ...]


def oracle_pipeline(inst: Instance, eps: float,
                    limit: int = DEFAULT_LIMIT) -> OraclePipeline:
    """Run the whole chain from the exact optimum of the rounded instance.

    Brute-forces the modified instance, sorts the optimum within classes,
    reads off its exact block statistics as the single guess, and converts
    back to a ranking.  Useful only at desk scale; every intermediate is
    exposed for the structural lemma checks.
    """
    tr = bounded_ratio_transform(inst, eps)
    cs = build_classes(tr.modified, eps)
    opt = brute_force_opt(tr.modified, limit)
    a_up = sorted_within_class(tr.modified, opt.best, cs)
    blocks = block_decompose(tr.modified, a_up, cs)
    guess = stats_of(blocks, cs, mode=COUNT)
    guess = StatGuess(mode=ORACLE, heavy_classes=guess.heavy_classes,
                      light_classes=guess.light_classes, heavy=guess.heavy,
                      light=guess.light)
    partial = assign_heavy(cs, guess)
    partition = assign_light(cs, guess, partial)
    final = partition_to_assignment(partition, cs)
    labels = classify_stoppers(tr.modified, a_up, eps)
    return OraclePipeline(
        eps=eps, transform=tr, classes=cs, opt=opt, reference=a_up,
        blocks=blocks, guess=guess, partition=partition, final=final,
        eval_reference=evaluate(tr.modified, a_up),
        eval_final_modified=evaluate(tr.modified, final),
        eval_final_original=evaluate(inst, final),
        stopper_labels=labels)


def _signature_capacity_ok(n: int, L: int) -> bool:
    return (L + 1) ** n < 2 ** 62


def ptas_solve(inst: Instance, eps: float, mode: str = COUNT,
               budget: int = DEFAULT_LIMIT, *,
               collect_signatures: bool = False) -> SolveReport:
    """Best ranking over the enumerated partition family.

    Modes: `count` enumerates light product counts directly, `grid`
    enumerates gridded light weights (the larger, literal family), and
    `oracle` takes the single guess read off an exactly solved rounded
    instance.  Every candidate is scored on the original instance; ties
    keep the earliest guess in stream order.  When the guess budget runs
    out the report flags truncation instead of raising.
    """
    t0 = time.perf_counter()
    if mode not in (GRID, COUNT, ORACLE):
        raise ValueError(f"unknown mode {mode!r}")
    direct = trivial_case(inst, eps)
    if direct is not None:
        ev = evaluate(inst, direct)
        return SolveReport(
            algorithm="ptas", params={"eps": eps, "mode": mode, "trivial_case": True},
            order=direct.order, share=ev.share, elapsed=time.perf_counter() - t0,
            extra={"n_guesses": 0, "n_feasible": 0})

    tr = bounded_ratio_transform(inst, eps)
    cs = build_classes(tr.modified, eps)

    if mode == ORACLE:
        pipe = oracle_pipeline(inst, eps, limit=budget)
        return SolveReport(
            algorithm="ptas", params={"eps": eps, "mode": mode, "trivial_case": False},
            order=pipe.final.order, share=pipe.eval_final_original.share,
            elapsed=time.perf_counter() - t0,
            extra={"n_guesses": 1, "n_feasible": 1,
                   "share_modified": float(pipe.eval_final_modified.share),
                   "opt_modified": float(pipe.opt.opt)})

    lay = guess_layout(cs, mode)
    w_mod, theta, prices = as_float_arrays(tr.modified)
    w_orig = np.array([float(x) for x in inst.weights], dtype=np.float64)
    if collect_signatures and not _signature_capacity_ok(inst.n, lay.num_blocks):
        raise ValueError("instance too large for partition signatures")
    res = _kernels.guess_scan(lay, w_mod, w_orig, theta, prices, budget,
                              collect_sigs=collect_signatures)
    order = Assignment(tuple(int(i) for i in res["best_order"]))
    ev = evaluate(inst, order)
    extra = {
        "n_guesses": int(res["n_guesses"]),
        "n_feasible": int(res["n_feasible"]),
        "best_guess_rank": int(res["best_rank"]),
        "share_modified": float(evaluate(tr.modified, order).share),
    }
    if collect_signatures:
        extra["signatures"] = res["signatures"]
    return SolveReport(
        algorithm="ptas", params={"eps": eps, "mode": mode, "trivial_case": False},
        order=order.order, share=ev.share, elapsed=time.perf_counter() - t0,
        truncated=bool(res["truncated"]), extra=extra)
