"""Reduction to bounded weight ratios.

Two regimes split on the heaviest weight.  When w_max > 1/eps a single
product already captures almost the whole market and the descending-weight
order is a (1 - eps)-approximation outright.  Otherwise every weight is
rounded up to the floor delta * w_max with delta = eps^2 / (2n), which
bounds the max/min ratio by 2n / eps^2 at a market-share loss of at most
eps * OPT.  Approximation on the modified instance transfers back: a
(1 - eps)-approximate order there is (1 - 3 eps)-approximate on the
original.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

from .baselines import DEFAULT_LIMIT, brute_force_opt
from .errors import TrivialCaseNotHandled
from .model import FLOAT, Assignment, Instance, SolveReport, evaluate, validate_instance
from .weight_classes import weight_floor


@dataclass(frozen=True)
class BoundedRatioTransform:
    """Original instance next to its bounded-ratio rounding."""

    original: Instance
    modified: Instance
    delta: float
    rounded: tuple[int, ...]       # products whose weight was lifted to the floor
    trivial_case: bool = False


def trivial_case(inst: Instance, eps: float) -> Optional[Assignment]:
    """Descending-weight order when one product dominates, else None.

    Applies when w_max > 1/eps: the heaviest product alone yields share at
    least theta-weighted w_max/(1+w_max) > 1 - eps >= (1 - eps) * OPT.
    Ties in weight break by ascending index.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if float(inst.max_weight) <= 1.0 / eps:
        return None
    order = sorted(range(inst.n), key=lambda i: (-float(inst.weights[i]), i))
    return Assignment(tuple(order))


def bounded_ratio_transform(inst: Instance, eps: float) -> BoundedRatioTransform:
    """Round weights up to eps^2/(2n) * w_max; prices and theta unchanged.

    Precondition w_max <= 1/eps (else TrivialCaseNotHandled: the caller
    must take the trivial path first).  Float instances only.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if inst.numeric_mode != FLOAT:
        raise ValueError("bounded_ratio_transform works on float instances")
    validate_instance(inst.weights, inst.segments, inst.numeric_mode)
    w_max = float(inst.max_weight)
    if w_max > 1.0 / eps:
        raise TrivialCaseNotHandled(
            f"w_max = {w_max} > 1/eps = {1.0 / eps}; take the trivial path")
    floor = weight_floor(eps, inst.n, w_max)
    delta = (eps * eps) / (2.0 * inst.n)
    rounded = tuple(i for i in range(inst.n) if float(inst.weights[i]) < floor)
    new_w = tuple(max(float(wi), floor) for wi in inst.weights)
    modified = Instance(new_w, inst.segments, numeric_mode=FLOAT)
    return BoundedRatioTransform(inst, modified, delta, rounded)


def _default_solver(limit: int) -> Callable[[Instance, float], Assignment]:
    def solve(sub: Instance, eps: float) -> Assignment:
        return brute_force_opt(sub, limit).best
    return solve


def quasi_ptas(inst: Instance, eps: float,
               solver: Optional[Callable[[Instance, float], Assignment]] = None,
               limit: int = DEFAULT_LIMIT) -> SolveReport:
    """(1 - 3 eps)-approximation via the bounded-ratio reduction.

    Runs `solver(modified, eps)` (default: exact brute force) and evaluates
    the returned order on the ORIGINAL instance; the extras record the
    share under both instances.
    """
    t0 = time.perf_counter()
    direct = trivial_case(inst, eps)
    if direct is not None:
        ev = evaluate(inst, direct)
        return SolveReport(
            algorithm="quasi_ptas", params={"eps": eps, "trivial_case": True},
            order=direct.order, share=ev.share, elapsed=time.perf_counter() - t0,
            extra={"share_original": float(ev.share)})
    tr = bounded_ratio_transform(inst, eps)
    if solver is None:
        solver = _default_solver(limit)
    a = solver(tr.modified, eps)
    ev_mod = evaluate(tr.modified, a)
    ev_orig = evaluate(inst, a)
    return SolveReport(
        algorithm="quasi_ptas",
        params={"eps": eps, "trivial_case": False, "delta": tr.delta,
                "n_rounded": len(tr.rounded)},
        order=a.order, share=ev_orig.share, elapsed=time.perf_counter() - t0,
        extra={"share_modified": float(ev_mod.share),
               "share_original": float(ev_orig.share)})
