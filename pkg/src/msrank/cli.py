"""Command-line harness: gen, solve, compare, verify, calibrate.

Exit codes: 0 success, 1 error, 2 budget truncation, 64 usage.  Output
files are byte-identical across runs with the same seed and flags; wall
clock timings are therefore left out of reports unless --timings is given.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

from .baselines import brute_force_opt, w_ordering
from .calibration import WeightDistribution, reservation_sequence
from .errors import BadSpec, BudgetExceeded, IoError
from .hardness import ThreePartitionInstance, build_hardness_instance, decide_three_partition
from .model import (
    SolveReport,
    evaluate,
    instance_to_dict,
    load_instance,
    to_float,
)
from .ptas import is_good_partition, oracle_pipeline, ptas_solve
from .randgen import RNG_ALGORITHM, RandomSpec, random_bounded_ratio_instance, random_instance
from .reduction import bounded_ratio_transform, quasi_ptas, trivial_case

USAGE_EXIT = 64
TRUNCATED_EXIT = 2
VERIFY_TOL = 1e-9

HARDNESS_FIXTURES = (
    ((3, 3, 3), 9, True),
    ((5, 5, 5, 5, 5, 5), 15, True),
    ((4, 4, 4, 6, 6, 6), 15, False),
)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags by default; 2 means truncation here
    def error(self, message):
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    p = _Parser(prog="msrank", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def shared(sp, *names):
        if "input" in names:
            sp.add_argument("--input", required=True, help="instance JSON path")
        if "output" in names:
            sp.add_argument("--output", help="output path (default: stdout)")
        if "seed" in names:
            sp.add_argument("--seed", type=int, default=0)
        if "eps" in names:
            sp.add_argument("--eps", type=float, default=None)
        if "mode" in names:
            sp.add_argument("--mode", choices=["grid", "count", "oracle"], default="count")
        if "budget" in names:
            sp.add_argument("--budget", type=int, default=10 ** 7)
        if "threads" in names:
            sp.add_argument("--threads", type=int, default=1)
        if "numeric" in names:
            sp.add_argument("--numeric", choices=["float", "rational"], default=None)
        if "timings" in names:
            sp.add_argument("--timings", action="store_true",
                            help="include wall-clock fields (breaks byte-identical output)")

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--kind", choices=["random", "hardness"], default="random")
    g.add_argument("--n", type=int, default=6)
    g.add_argument("--segments", type=int, default=2)
    g.add_argument("--w-lo", type=float, default=0.01)
    g.add_argument("--w-hi", type=float, default=1.0)
    g.add_argument("--price-scale", type=float, default=1.0)
    g.add_argument("--bounded-ratio-eps", type=float, default=None,
                   help="draw weights already in the bounded-ratio regime for this eps")
    g.add_argument("--a", help="hardness: comma-separated 3K integers")
    g.add_argument("--t", type=int, help="hardness: triplet target sum")
    shared(g, "output", "seed", "numeric")

    s = sub.add_parser("solve", help="run one algorithm on an instance")
    s.add_argument("--algo", choices=["brute", "worder", "qptas", "ptas"], required=True)
    shared(s, "input", "output", "eps", "mode", "budget", "threads", "numeric", "timings")

    c = sub.add_parser("compare", help="run several algorithms side by side")
    c.add_argument("--algos", default="brute,worder,ptas",
                   help="comma-separated subset of brute,worder,qptas,ptas")
    shared(c, "input", "output", "eps", "mode", "budget", "threads", "timings")

    v = sub.add_parser("verify", help="empirical guarantee suites, one CSV row per trial")
    v.add_argument("--suite", required=True,
                   choices=["worder", "lemma41", "lemma31", "lemma32",
                            "lemma51", "lemma43", "hardness"])
    v.add_argument("--trials", type=int, required=True)
    shared(v, "output", "seed", "eps", "budget")

    k = sub.add_parser("calibrate", help="reservation prices from a search-cost profile")
    shared(k, "input", "output")
    k.add_argument("--tol", type=float, default=1e-12)
    return p


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        try:
            with open(args.output, "w") as fh:
                fh.write(text)
        except OSError as e:
            raise IoError(f"cannot write {args.output}: {e}") from e
    else:
        sys.stdout.write(text)


def _emit_json(args, obj) -> None:
    _emit(args, json.dumps(obj, indent=2) + "\n")


# ---------------------------------------------------------------------------

def _cmd_gen(args) -> int:
    if args.kind == "hardness":
        if not args.a or args.t is None:
            raise BadSpec("hardness generation needs --a and --t")
        try:
            a = tuple(int(x) for x in args.a.split(","))
        except ValueError as e:
            raise BadSpec(f"cannot parse --a: {e}") from e
        h = build_hardness_instance(ThreePartitionInstance(a, args.t))
        d = instance_to_dict(h.instance)
        d["generator"] = {"kind": "hardness", "a": list(a), "t": args.t}
        _emit_json(args, d)
        return 0
    spec = RandomSpec(n=args.n, num_segments=args.segments, seed=args.seed,
                      weight_low=args.w_lo, weight_high=args.w_hi,
                      price_scale=args.price_scale)
    if args.bounded_ratio_eps is not None:
        inst = random_bounded_ratio_instance(spec, args.bounded_ratio_eps)
    else:
        inst = random_instance(spec)
    if args.numeric == "rational":
        from .model import to_rational
        inst = to_rational(inst)
    d = instance_to_dict(inst)
    d["generator"] = {"kind": "random", "rng": RNG_ALGORITHM, "seed": args.seed,
                      "n": spec.n, "segments": spec.num_segments,
                      "weight_low": spec.weight_low, "weight_high": spec.weight_high,
                      "price_scale": spec.price_scale,
                      "bounded_ratio_eps": args.bounded_ratio_eps}
    _emit_json(args, d)
    return 0


def _default_eps(args) -> float:
    return args.eps if args.eps is not None else 0.25


def _solve_one(inst, algo: str, args) -> SolveReport:
    if algo in ("qptas", "ptas") and inst.numeric_mode != "float":
        inst = to_float(inst)
    if algo == "brute":
        t0 = time.perf_counter()
        res = brute_force_opt(inst, args.budget, threads=args.threads)
        return SolveReport(algorithm="brute", params={"budget": args.budget},
                           order=res.best.order, share=res.opt, opt=res.opt, ratio=1.0,
                           elapsed=time.perf_counter() - t0,
                           extra={"examined": res.examined})
    if algo == "worder":
        t0 = time.perf_counter()
        a = w_ordering(inst)
        ev = evaluate(inst, a)
        return SolveReport(algorithm="worder", params={}, order=a.order,
                           share=ev.share, elapsed=time.perf_counter() - t0)
    if algo == "qptas":
        rep = quasi_ptas(inst, _default_eps(args), limit=args.budget)
        return rep
    rep = ptas_solve(inst, _default_eps(args), mode=args.mode, budget=args.budget)
    if args.mode == "oracle" and "opt_modified" in rep.extra:
        rep.opt = rep.extra["opt_modified"]
        rep.ratio = float(rep.share) / rep.opt if rep.opt > 0 else None
    return rep


def _cmd_solve(args) -> int:
    inst = load_instance(args.input)
    try:
        rep = _solve_one(inst, args.algo, args)
    except BudgetExceeded as e:
        _emit_json(args, {"algorithm": args.algo, "params": {"budget": args.budget},
                          "truncated": True, "error": str(e)})
        return TRUNCATED_EXIT
    _emit_json(args, rep.to_json_dict(include_timing=args.timings))
    return TRUNCATED_EXIT if rep.truncated else 0


def _cmd_compare(args) -> int:
    inst = load_instance(args.input)
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    known = {"brute", "worder", "qptas", "ptas"}
    bad = set(algos) - known
    if bad:
        raise BadSpec(f"unknown algorithms: {sorted(bad)}")
    reports = {}
    truncated = False
    opt = None
    for algo in algos:
        try:
            rep = _solve_one(inst, algo, args)
        except BudgetExceeded as e:
            reports[algo] = {"algorithm": algo, "truncated": True, "error": str(e)}
            truncated = True
            continue
        if algo == "brute":
            opt = rep.share
        truncated = truncated or rep.truncated
        reports[algo] = rep.to_json_dict(include_timing=args.timings)
    if opt is not None and float(opt) > 0:
        for algo, d in reports.items():
            if "share" in d:
                d["ratio_vs_brute"] = d["share"] / float(opt)
    _emit_json(args, {"input": args.input, "algorithms": reports})
    return TRUNCATED_EXIT if truncated else 0


# ---------------------------------------------------------------------------
# verification suites

def _suite_rng_sizes(args, n_hi: int, k_hi: int):
    import numpy as np
    meta = np.random.Generator(np.random.PCG64(args.seed))
    for trial in range(args.trials):
        n = int(meta.integers(2, n_hi + 1))
        K = int(meta.integers(1, k_hi + 1))
        seed = int(meta.integers(0, 2 ** 31))
        yield trial, n, K, seed


def _verify_rows(args):
    suite = args.suite
    tol = VERIFY_TOL
    if suite == "worder":
        for trial, n, K, seed in _suite_rng_sizes(args, 7, 4):
            inst = random_instance(RandomSpec(n=n, num_segments=K, seed=seed))
            opt = brute_force_opt(inst).opt
            share = evaluate(inst, w_ordering(inst)).share
            margin = share - max(opt / 2.0, opt - 0.1716)
            yield {"trial": trial, "seed": seed, "n": n, "segments": K,
                   "eps": "", "margin": margin, "ok": margin >= -tol}
        return
    if suite == "hardness":
        for idx, (a, t, expected) in enumerate(HARDNESS_FIXTURES):
            d = decide_three_partition(ThreePartitionInstance(a, t))
            ok = d.yes == expected
            yield {"trial": idx, "seed": "", "n": 4 * len(a) // 3, "segments": len(a) // 3,
                   "eps": "", "margin": 0.0 if ok else -1.0, "ok": ok,
                   "expected": "yes" if expected else "no",
                   "got": "yes" if d.yes else "no",
                   "opt": f"{d.opt.numerator}/{d.opt.denominator}",
                   "threshold": f"{d.threshold.numerator}/{d.threshold.denominator}"}
        return

    if suite == "lemma41":
        eps = args.eps if args.eps is not None else 0.3
        from .baselines import brute_force_sorted_within_class
        for trial, n, K, seed in _suite_rng_sizes(args, 6, 3):
            inst = random_bounded_ratio_instance(
                RandomSpec(n=n, num_segments=K, seed=seed), eps)
            opt = brute_force_opt(inst).opt
            swc = brute_force_sorted_within_class(inst, eps).opt
            margin = swc - (1.0 - eps) * opt
            yield {"trial": trial, "seed": seed, "n": n, "segments": K,
                   "eps": eps, "margin": margin, "ok": margin >= -tol}
        return
    if suite in ("lemma31", "lemma32"):
        eps = args.eps if args.eps is not None else 0.25
        for trial, n, K, seed in _suite_rng_sizes(args, 6, 3):
            inst = random_instance(RandomSpec(n=n, num_segments=K, seed=seed))
            if trivial_case(inst, eps) is not None:
                continue
            opt = brute_force_opt(inst).opt
            if suite == "lemma31":
                tr = bounded_ratio_transform(inst, eps)
                opt_mod = brute_force_opt(tr.modified).opt
                margin = opt_mod - (1.0 - eps) * opt
            else:
                rep = quasi_ptas(inst, eps, limit=args.budget)
                margin = float(rep.share) - (1.0 - 3.0 * eps) * opt
            yield {"trial": trial, "seed": seed, "n": n, "segments": K,
                   "eps": eps, "margin": margin, "ok": margin >= -tol}
        return
    if suite == "lemma51":
        eps = args.eps if args.eps is not None else 0.1
        for trial, n, K, seed in _suite_rng_sizes(args, 6, 3):
            inst = random_bounded_ratio_instance(
                RandomSpec(n=n, num_segments=K, seed=seed), eps)
            pipe = oracle_pipeline(inst, eps, limit=args.budget)
            rep = is_good_partition(pipe.partition, pipe.blocks, pipe.classes, eps, tol=tol)
            band = 0.0
            for k in range(len(rep.weight_by_block)):
                band = min(band,
                           rep.weight_by_block[k] - rep.weight_low_by_block[k],
                           rep.weight_high_by_block[k] - rep.weight_by_block[k])
            ok = rep.all_good and band >= -tol
            yield {"trial": trial, "seed": seed, "n": n, "segments": K,
                   "eps": eps, "margin": band, "ok": ok,
                   "bounded_size": rep.bounded_size, "bounded_weight": rep.bounded_weight,
                   "top_class": rep.top_class_present, "prefix_subsets": rep.prefix_subsets}
        return
    if suite == "lemma43":
        eps = args.eps if args.eps is not None else 0.1
        for trial, n, K, seed in _suite_rng_sizes(args, 6, 3):
            inst = random_bounded_ratio_instance(
                RandomSpec(n=n, num_segments=K, seed=seed), eps)
            pipe = oracle_pipeline(inst, eps, limit=args.budget)
            w_max = pipe.classes.max_weight
            opt = float(pipe.opt.opt)
            margin = float(pipe.eval_final_modified.share) - (1.0 - 13.0 * eps) * opt
            for k, label in enumerate(pipe.stopper_labels):
                m_up = float(pipe.eval_reference.segment_shares[k])
                m_fin = float(pipe.eval_final_modified.segment_shares[k])
                if label == "early":
                    margin = min(margin, eps ** 3 * w_max - m_up)
                else:
                    margin = min(margin,
                                 m_fin - ((1.0 - 2.0 * eps) * m_up - 4.0 * eps ** 2 * w_max))
            yield {"trial": trial, "seed": seed, "n": n, "segments": K,
                   "eps": eps, "margin": margin, "ok": margin >= -tol}
        return
    raise BadSpec(f"unknown suite {suite!r}")


def _cmd_verify(args) -> int:
    if args.trials < 1:
        raise BadSpec("verify needs --trials >= 1")
    rows = list(_verify_rows(args))
    keys = []
    for r in rows:
        for k in r:
            if k not in keys:
                keys.append(k)
    sio = io.StringIO()
    w = csv.DictWriter(sio, fieldnames=["suite", "rng", "base_seed"] + keys,
                       restval="", lineterminator="\n")
    w.writeheader()
    for r in rows:
        full = {"suite": args.suite, "rng": RNG_ALGORITHM, "base_seed": args.seed}
        full.update(r)
        w.writerow(full)
    _emit(args, sio.getvalue())
    bad = [r for r in rows if not r["ok"]]
    if bad:
        sys.stderr.write(f"verify {args.suite}: {len(bad)} of {len(rows)} trials violated\n")
        return 1
    return 0


def _cmd_calibrate(args) -> int:
    try:
        with open(args.input) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise IoError(f"cannot read {args.input}: {e}") from e
    try:
        costs = [float(c) for c in data["costs"]]
    except (KeyError, TypeError, ValueError) as e:
        raise IoError(f"malformed calibration input: {e}") from e
    if "support" in data or "probabilities" in data:
        try:
            dist = WeightDistribution(tuple(float(x) for x in data["support"]),
                                      tuple(float(x) for x in data["probabilities"]))
        except (KeyError, TypeError, ValueError) as e:
            raise IoError(f"malformed weight distribution: {e}") from e
    else:
        dist = WeightDistribution.constant(1.0)
    seq = reservation_sequence(costs, dist, tol=args.tol)
    _emit_json(args, {"costs": costs, "prices": list(seq.prices),
                      "floored": seq.floored, "tol": args.tol})
    return 0


# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    cmd = {"gen": _cmd_gen, "solve": _cmd_solve, "compare": _cmd_compare,
           "verify": _cmd_verify, "calibrate": _cmd_calibrate}[args.command]
    try:
        return cmd(args)
    except BadSpec as e:
        sys.stderr.write(f"msrank {args.command}: {e}\n")
        return USAGE_EXIT
    except (IoError, ValueError, RuntimeError) as e:
        sys.stderr.write(f"msrank {args.command}: {type(e).__name__}: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
