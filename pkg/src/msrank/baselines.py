"""Exact brute-force oracles and the descending-weight heuristic.

brute_force_opt realizes the true optimum by exhaustive enumeration and
anchors every approximation guarantee in the test-suite.  Float mode runs
on the compiled kernels; rational mode enumerates in plain Python with
exact Fraction arithmetic.  All oracles are deterministic: ties go to the
lexicographically smallest permutation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _kernels
from .errors import BudgetExceeded
from .model import (
    FLOAT,
    RATIONAL,
    Assignment,
    Instance,
    as_float_arrays,
)
from .weight_classes import ClassStructure, build_classes

DEFAULT_LIMIT = 10 ** 7


@dataclass(frozen=True)
class OracleResult:
    """Outcome of an exhaustive search."""

    best: Assignment
    opt: float | Fraction
    examined: int                      # assignments actually evaluated
    values: Optional[tuple] = None     # full share histogram when requested


def _share_exact(inst: Instance, order) -> Fraction:
    # lean rational evaluation (no Evaluation object); matches model.evaluate
    n = len(order)
    total = Fraction(0)
    weights = inst.weights
    for seg in inst.segments:
        prices = seg.prices
        acc = Fraction(0)
        wc = None
        for p in range(n):
            acc = acc + weights[order[p]]
            if acc >= prices[p]:
                wc = acc
                break
        if wc is None:
            wc = acc
        total += seg.theta * (wc / (1 + wc))
    return total


def _brute_rational(inst: Instance, collect_values: bool, swc_filter=None) -> OracleResult:
    n = inst.n
    best_share = None
    best_order = None
    examined = 0
    values = [] if collect_values else None
    for order in itertools.permutations(range(n)):
        if swc_filter is not None and not swc_filter(order):
            continue
        share = _share_exact(inst, order)
        examined += 1
        if collect_values:
            values.append(share)
        if best_share is None or share > best_share:
            best_share = share
            best_order = order
    return OracleResult(Assignment(best_order), best_share, examined,
                        tuple(values) if collect_values else None)


def brute_force_opt(inst: Instance, limit: int = DEFAULT_LIMIT, *,
                    collect_values: bool = False, prune: bool = False,
                    threads: int = 1) -> OracleResult:
    """Exhaustive optimum over all n! assignments.

    Parameters
    ----------
    inst : instance in either numeric mode.
    limit : permutation budget; n! above it raises BudgetExceeded.
    collect_values : also return the full share histogram (lex order).
    prune : stop early once the share upper bound w([n])/(1+w([n])) is hit;
        never changes the result (single-threaded scans only).
    threads : worker count for the float-mode scan; result is identical
        for any value.
    """
    n = inst.n
    total = math.factorial(n)
    if total > limit:
        raise BudgetExceeded(f"{n}! = {total} exceeds the budget {limit}")
    if inst.numeric_mode == RATIONAL:
        return _brute_rational(inst, collect_values)
    w, theta, prices = as_float_arrays(inst)
    share, order, examined, values = _kernels.brute_scan(
        w, theta, prices, total, collect_values=collect_values,
        prune=prune, threads=threads)
    return OracleResult(Assignment(tuple(int(i) for i in order)), float(share),
                        examined, tuple(float(v) for v in values) if collect_values else None)


def w_ordering(inst: Instance) -> Assignment:
    """Products by weakly-decreasing weight, ties by ascending index."""
    order = sorted(range(inst.n), key=lambda i: (-(inst.weights[i] if inst.numeric_mode == RATIONAL
                                                   else float(inst.weights[i])), i))
    return Assignment(tuple(order))


def _swc_orders(cs: ClassStructure):
    """All sorted-within-class assignments via position-set choices per class.

    Classes pick their position sets in ascending class id; each class then
    lays its members ascending (weight, index) onto its positions ascending.
    """
    n = cs.n
    classes = [cs.members[q - 1] for q in range(1, cs.num_classes + 1) if cs.members[q - 1]]

    def rec(ci: int, free: tuple[int, ...], order: list[int]):
        if ci == len(classes):
            yield tuple(order)
            return
        mem = classes[ci]
        for pos in itertools.combinations(free, len(mem)):
            for p, i in zip(pos, mem):
                order[p] = i
            rest = tuple(p for p in free if p not in pos)
            yield from rec(ci + 1, rest, order)

    yield from rec(0, tuple(range(n)), [0] * n)


def swc_assignment_count(cs: ClassStructure) -> int:
    """Number of distinct sorted-within-class assignments (multinomial)."""
    total = math.factorial(cs.n)
    for mem in cs.members:
        total //= math.factorial(len(mem))
    return total


def brute_force_sorted_within_class(inst: Instance, eps: float,
                                    limit: int = DEFAULT_LIMIT, *,
                                    path: str = "auto",
                                    collect_values: bool = False,
                                    threads: int = 1) -> OracleResult:
    """Best assignment with every weight class in weakly-increasing order.

    Representatives fix equal-weight ties by ascending product index, which
    changes no share values.  Two enumeration paths exist: "filter" walks
    all n! permutations and skips non-representatives (fast kernels);
    "positions" enumerates position-set choices per class, whose count is
    the multinomial n!/prod |G_q|!.  "auto" uses filter when n! fits the
    budget, else positions when the multinomial does.

    Raises NotBoundedRatio (via class construction) and BudgetExceeded.
    """
    cs = build_classes(inst, eps)
    n = inst.n
    n_perms = math.factorial(n)
    n_reps = swc_assignment_count(cs)
    if path == "auto":
        path = "filter" if n_perms <= limit else "positions"
    if path == "filter" and n_perms > limit:
        raise BudgetExceeded(f"{n}! = {n_perms} exceeds the budget {limit}")
    if path == "positions" and n_reps > limit:
        raise BudgetExceeded(f"{n_reps} class arrangements exceed the budget {limit}")

    if inst.numeric_mode == RATIONAL:
        if path == "filter":
            wkey = inst.weights

            def is_rep(order):
                last = {}
                for i in order:
                    q = cs.class_of[i]
                    if q in last:
                        lw, li = last[q]
                        if (wkey[i], i) < (lw, li):
                            return False
                    last[q] = (wkey[i], i)
                return True

            return _brute_rational(inst, collect_values, swc_filter=is_rep)
        best = None
        examined = 0
        values = [] if collect_values else None
        for order in _swc_orders(cs):
            share = _share_exact(inst, order)
            examined += 1
            if collect_values:
                values.append(share)
            if best is None or share > best[0] or (share == best[0] and order < best[1]):
                best = (share, order)
        return OracleResult(Assignment(best[1]), best[0], examined,
                            tuple(values) if collect_values else None)

    w, theta, prices = as_float_arrays(inst)
    if path == "filter":
        share, order, examined, values = _kernels.brute_scan(
            w, theta, prices, n_perms, class_of=np.array(cs.class_of, dtype=np.int64),
            collect_values=collect_values, threads=threads)
        return OracleResult(Assignment(tuple(int(i) for i in order)), float(share),
                            examined, tuple(values) if collect_values else None)

    best_share = -1.0
    best_order = None
    examined = 0
    values = [] if collect_values else None
    chunk = []
    for order in _swc_orders(cs):
        chunk.append(order)
        if len(chunk) < 16384:
            continue
        best_share, best_order, examined = _swc_eval_chunk(
            w, theta, prices, chunk, best_share, best_order, examined, values)
        chunk = []
    if chunk:
        best_share, best_order, examined = _swc_eval_chunk(
            w, theta, prices, chunk, best_share, best_order, examined, values)
    return OracleResult(Assignment(best_order), best_share, examined,
                        tuple(values) if collect_values else None)


def _swc_eval_chunk(w, theta, prices, chunk, best_share, best_order, examined, values):
    orders = np.array(chunk, dtype=np.int64)
    shares = _kernels.eval_share_many(w, theta, prices, orders)
    examined += len(chunk)
    if values is not None:
        values.extend(float(s) for s in shares)
    mx = float(shares.max())
    if mx > best_share or best_order is None:
        best_share = mx
        cand = min(tuple(int(x) for x in orders[j]) for j in np.flatnonzero(shares == mx))
        best_order = cand
    elif mx == best_share:
        cand = min(tuple(int(x) for x in orders[j]) for j in np.flatnonzero(shares == mx))
        best_order = min(best_order, cand)
    return best_share, best_order, examined
