"""Core market model: instances, assignments, and share evaluation.

A market instance has n products with positive attraction weights and K
customer segments.  Each segment k carries a proportion theta_k and a
weakly decreasing vector of reservation prices, one per display position.
Customers of segment k scan a product ranking from the top and stop at
the first position p where the accumulated weight of the top-p products
reaches the position's reservation price; the scanned prefix becomes
their consideration set and they buy according to a multinomial-logit
choice over it (plus a unit no-purchase option).

Two numeric modes are supported.  Float mode stores everything as
Python/numpy floats; rational mode stores `fractions.Fraction` values and
all comparisons are exact.  Product indices are 0-based in memory and
1-based in the JSON formats; stop positions are 1-based everywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptyInstance,
    IoError,
    NonPositiveWeight,
    PricesNotDecreasing,
    ProportionsNotNormalized,
)

FLOAT = "float"
RATIONAL = "rational"

# absolute tolerance for sum(theta) == 1 in float mode
THETA_TOL = 1e-12


def _coerce(x, numeric_mode: str):
    if numeric_mode == RATIONAL:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)
        if isinstance(x, float):
            # exact binary value of the float; callers wanting a decimal
            # reading should pass a string or Fraction themselves
            return Fraction(x)
        return Fraction(x)
    return float(x)


@dataclass(frozen=True)
class Segment:
    """One customer segment: a market proportion and per-position prices."""

    theta: float | Fraction
    prices: tuple

    @property
    def n(self) -> int:
        return len(self.prices)


@dataclass(frozen=True)
class Instance:
    """A validated market instance.

    Build through :func:`validate_instance` (or the JSON loaders), which
    enforce the model invariants; the constructor itself does not check.
    """

    weights: tuple
    segments: tuple[Segment, ...]
    numeric_mode: str = FLOAT

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def num_segments(self) -> int:
        return len(self.segments)

    @property
    def max_weight(self):
        return max(self.weights)

    @property
    def min_weight(self):
        return min(self.weights)

    @property
    def total_weight(self):
        return _ordered_sum(self.weights, self.numeric_mode)


@dataclass(frozen=True)
class Assignment:
    """A product ranking: order[p] is the (0-based) product shown at position p+1."""

    order: tuple[int, ...]

    def __post_init__(self):
        n = len(self.order)
        if sorted(self.order) != list(range(n)):
            raise ValueError(f"order is not a permutation of 0..{n - 1}: {self.order}")

    def __len__(self) -> int:
        return len(self.order)

    def one_based(self) -> list[int]:
        return [i + 1 for i in self.order]

    @classmethod
    def from_one_based(cls, order: Iterable[int]) -> "Assignment":
        return cls(tuple(i - 1 for i in order))

    @classmethod
    def identity(cls, n: int) -> "Assignment":
        return cls(tuple(range(n)))


@dataclass(frozen=True)
class Evaluation:
    """Per-segment stopping diagnostics and the resulting market share."""

    stop_positions: tuple[int, ...]      # 1-based stop position per segment
    considered_weights: tuple            # accumulated weight of each consideration set
    segment_shares: tuple                # purchase probability per segment
    share: float | Fraction              # proportion-weighted total share


def _ordered_sum(values, numeric_mode: str):
    """Left-to-right sum; fixed order keeps float results reproducible."""
    acc = Fraction(0) if numeric_mode == RATIONAL else 0.0
    for v in values:
        acc = acc + v
    return acc


def _seg_pair(seg):
    if isinstance(seg, Segment):
        return seg.theta, seg.prices
    t, prices = seg
    return t, tuple(prices)


def instance_violations(weights: Sequence, segments: Sequence, numeric_mode: str = FLOAT) -> list:
    """Collect every violated model invariant without raising.

    Returns a list of exception instances; empty means the data is valid.
    """
    segments = [_seg_pair(s) for s in segments]
    bad = []
    if len(weights) == 0 or len(segments) == 0:
        bad.append(EmptyInstance("need at least one product and one segment"))
        return bad
    n = len(weights)
    zero = Fraction(0) if numeric_mode == RATIONAL else 0.0
    for i, w in enumerate(weights):
        if not w > zero:
            bad.append(NonPositiveWeight(f"weight of product {i + 1} is {w}"))
            break
    for k, seg in enumerate(segments):
        theta, prices = seg
        if len(prices) != n:
            bad.append(PricesNotDecreasing(
                f"segment {k + 1} has {len(prices)} prices for {n} products"))
            continue
        if any(p < zero for p in prices):
            bad.append(PricesNotDecreasing(f"segment {k + 1} has a negative price"))
        elif any(prices[p] < prices[p + 1] for p in range(n - 1)):
            bad.append(PricesNotDecreasing(f"segment {k + 1} prices are not weakly decreasing"))
    thetas = [seg[0] for seg in segments]
    if any(t < zero for t in thetas):
        bad.append(ProportionsNotNormalized("negative segment proportion"))
    else:
        total = _ordered_sum(thetas, numeric_mode)
        if numeric_mode == RATIONAL:
            ok = total == 1
        else:
            ok = abs(total - 1.0) <= THETA_TOL
        if not ok:
            bad.append(ProportionsNotNormalized(f"proportions sum to {total}"))
    return bad


def validate_instance(weights: Sequence, segments: Sequence, numeric_mode: str = FLOAT) -> Instance:
    """Coerce raw data into an :class:`Instance`, raising on the first violation.

    Parameters
    ----------
    weights : sequence of scalars, one per product.
    segments : sequence of (theta, prices) pairs.
    numeric_mode : "float" or "rational".

    Raises
    ------
    EmptyInstance, NonPositiveWeight, PricesNotDecreasing, ProportionsNotNormalized
    """
    if numeric_mode not in (FLOAT, RATIONAL):
        raise ValueError(f"unknown numeric mode {numeric_mode!r}")
    w = tuple(_coerce(x, numeric_mode) for x in weights)
    segs = tuple(
        (
            _coerce(t, numeric_mode),
            tuple(_coerce(p, numeric_mode) for p in prices),
        )
        for t, prices in (_seg_pair(s) for s in segments)
    )
    bad = instance_violations(w, segs, numeric_mode)
    if bad:
        raise bad[0]
    return Instance(w, tuple(Segment(t, p) for t, p in segs), numeric_mode)


def _order_of(a) -> tuple[int, ...]:
    if isinstance(a, Assignment):
        return a.order
    return Assignment(tuple(int(i) for i in a)).order


def prefix_weights(inst: Instance, assignment) -> tuple:
    """Running weight totals of the displayed prefix, one entry per position."""
    order = _order_of(assignment)
    out = []
    acc = Fraction(0) if inst.numeric_mode == RATIONAL else 0.0
    for i in order:
        acc = acc + inst.weights[i]
        out.append(acc)
    return tuple(out)


def stopping_point(inst: Instance, assignment, k: int) -> int:
    """First (1-based) position where the prefix weight reaches segment k's price.

    An exact tie counts as a stop.  If no position qualifies the customer
    scans everything and the stop position is n by convention.
    """
    order = _order_of(assignment)
    prices = inst.segments[k].prices
    acc = Fraction(0) if inst.numeric_mode == RATIONAL else 0.0
    for p, i in enumerate(order):
        acc = acc + inst.weights[i]
        if acc >= prices[p]:
            return p + 1
    return len(order)


def evaluate(inst: Instance, assignment) -> Evaluation:
    """Market share of an assignment, with per-segment diagnostics.

    Each segment contributes theta_k * W_k / (1 + W_k) where W_k is the
    weight of its consideration set (the scanned prefix).
    """
    order = _order_of(assignment)
    n = len(order)
    rational = inst.numeric_mode == RATIONAL
    one = Fraction(1) if rational else 1.0
    pw = prefix_weights(inst, order)
    stops = []
    cons = []
    seg_shares = []
    total = Fraction(0) if rational else 0.0
    for k, seg in enumerate(inst.segments):
        prices = seg.prices
        s = n
        for p in range(n):
            if pw[p] >= prices[p]:
                s = p + 1
                break
        wc = pw[s - 1]
        mk = wc / (one + wc)
        stops.append(s)
        cons.append(wc)
        seg_shares.append(mk)
        total = total + seg.theta * mk
    return Evaluation(tuple(stops), tuple(cons), tuple(seg_shares), total)


# ---------------------------------------------------------------------------
# mode conversion and array views

def to_float(inst: Instance) -> Instance:
    if inst.numeric_mode == FLOAT:
        return inst
    return Instance(
        tuple(float(w) for w in inst.weights),
        tuple(Segment(float(s.theta), tuple(float(p) for p in s.prices)) for s in inst.segments),
        FLOAT,
    )


def to_rational(inst: Instance) -> Instance:
    """Exact rational twin; float values convert to their exact binary fractions."""
    if inst.numeric_mode == RATIONAL:
        return inst
    return Instance(
        tuple(Fraction(w) for w in inst.weights),
        tuple(
            Segment(Fraction(s.theta), tuple(Fraction(p) for p in s.prices))
            for s in inst.segments
        ),
        RATIONAL,
    )


def as_float_arrays(inst: Instance):
    """(weights[n], theta[K], prices[K, n]) as float64 arrays for the kernels."""
    f = to_float(inst)
    w = np.array(f.weights, dtype=np.float64)
    theta = np.array([s.theta for s in f.segments], dtype=np.float64)
    prices = np.array([s.prices for s in f.segments], dtype=np.float64)
    return w, theta, prices


# ---------------------------------------------------------------------------
# JSON formats
#
# Instance files:
#   {"n": int, "numeric_mode": "float"|"rational",
#    "weights": [...], "segments": [{"theta": ..., "prices": [...]}]}
# Rational scalars are written as "p/q" strings (decimal integers, single
# slash; integers drop the "/1"); floats as JSON numbers.  Product indices
# in assignment lists are 1-based.

def _scalar_to_json(x, numeric_mode: str):
    if numeric_mode == RATIONAL:
        fr = Fraction(x)
        if fr.denominator == 1:
            return str(fr.numerator)
        return f"{fr.numerator}/{fr.denominator}"
    return float(x)


def _scalar_from_json(x, numeric_mode: str):
    if numeric_mode == RATIONAL:
        if isinstance(x, str):
            return Fraction(x)
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, float):
            raise IoError(f"rational instance contains a float scalar: {x}")
        raise IoError(f"cannot parse rational scalar: {x!r}")
    return float(x)


def instance_to_dict(inst: Instance) -> dict:
    mode = inst.numeric_mode
    return {
        "n": inst.n,
        "numeric_mode": mode,
        "weights": [_scalar_to_json(w, mode) for w in inst.weights],
        "segments": [
            {
                "theta": _scalar_to_json(s.theta, mode),
                "prices": [_scalar_to_json(p, mode) for p in s.prices],
            }
            for s in inst.segments
        ],
    }


def instance_from_dict(d: dict) -> Instance:
    try:
        mode = d.get("numeric_mode", FLOAT)
        weights = [_scalar_from_json(w, mode) for w in d["weights"]]
        segments = [
            (_scalar_from_json(s["theta"], mode),
             [_scalar_from_json(p, mode) for p in s["prices"]])
            for s in d["segments"]
        ]
    except (KeyError, TypeError, ValueError) as e:
        raise IoError(f"malformed instance data: {e}") from e
    if "n" in d and d["n"] != len(weights):
        raise IoError(f"declared n={d['n']} but {len(weights)} weights given")
    return validate_instance(weights, segments, mode)


def dump_instance(inst: Instance, path: str) -> None:
    try:
        with open(path, "w") as fh:
            json.dump(instance_to_dict(inst), fh, indent=2)
            fh.write("\n")
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e


def load_instance(path: str) -> Instance:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise IoError(f"cannot read instance from {path}: {e}") from e
    return instance_from_dict(d)


# ---------------------------------------------------------------------------

@dataclass
class SolveReport:
    """Outcome of one solver run.

    `share` always equals evaluate(instance, order).share for the instance
    the solver was asked about; `opt`/`ratio` are filled when a reference
    optimum is available.  `extra` holds algorithm-specific diagnostics
    (guess counts, truncation details, ...).
    """

    algorithm: str
    params: dict
    order: tuple[int, ...]
    share: float | Fraction
    elapsed: float = 0.0
    truncated: bool = False
    opt: float | Fraction | None = None
    ratio: float | None = None
    extra: dict = field(default_factory=dict)

    def assignment(self) -> Assignment:
        return Assignment(self.order)

    def to_json_dict(self, include_timing: bool = True) -> dict:
        share = self.share
        d = {
            "algorithm": self.algorithm,
            "params": dict(self.params),
            "order": [i + 1 for i in self.order],
            "share": float(share),
            "truncated": self.truncated,
        }
        if isinstance(share, Fraction):
            d["share_exact"] = f"{share.numerator}/{share.denominator}"
        if self.opt is not None:
            d["opt"] = float(self.opt)
            if isinstance(self.opt, Fraction):
                d["opt_exact"] = f"{self.opt.numerator}/{self.opt.denominator}"
        if self.ratio is not None:
            d["ratio"] = float(self.ratio)
        if self.extra:
            d["extra"] = self.extra
        if include_timing:
            d["elapsed_sec"] = self.elapsed
        return d
