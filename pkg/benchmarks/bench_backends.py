"""Timing comparison of the numba and pure-numpy kernel backends.

The backend is fixed at import time by MSRANK_BACKEND, so each
measurement runs in a child process with the right environment; the
parent just formats the table.

    python3 benchmarks/bench_backends.py [--repeats 3]
"""

import argparse
import json
import math
import os
import subprocess
import sys
import time


def workloads():
    return [
        ("eval_share_many", "score all 8! orders of one n=8 instance"),
        ("brute_scan", "exhaustive n=8 optimum"),
        ("swc_scan", "sorted-within-class filter over all n=8 orders"),
        ("guess_scan_count", "count-mode guesses, n=6, eps=0.25, 50k cap"),
        ("guess_scan_grid", "grid-mode guesses, n=6, eps=0.4, 50k cap"),
    ]


def run_workload(name):
    import itertools

    import numpy as np

    from msrank import _kernels
    from msrank import (RandomSpec, bounded_ratio_transform, build_classes,
                        guess_layout, random_bounded_ratio_instance,
                        random_instance)
    from msrank.model import as_float_arrays

    if name in ("eval_share_many", "brute_scan", "swc_scan"):
        inst = random_instance(RandomSpec(n=8, num_segments=3, seed=5))
        w, theta, prices = as_float_arrays(inst)
        total = math.factorial(8)
        if name == "eval_share_many":
            orders = np.array(list(itertools.permutations(range(8))),
                              dtype=np.int64)
            fn = lambda: _kernels.eval_share_many(w, theta, prices, orders)
        elif name == "brute_scan":
            fn = lambda: _kernels.brute_scan(w, theta, prices, total)
        else:
            cs = build_classes(
                random_bounded_ratio_instance(
                    RandomSpec(n=8, num_segments=3, seed=5), 0.4), 0.4)
            cls = np.array(cs.class_of, dtype=np.int64)
            fn = lambda: _kernels.brute_scan(w, theta, prices, total,
                                             class_of=cls)
    else:
        eps = 0.25 if name == "guess_scan_count" else 0.4
        inst = random_bounded_ratio_instance(
            RandomSpec(n=6, num_segments=3, seed=11), eps)
        tr = bounded_ratio_transform(inst, eps)
        cs = build_classes(tr.modified, eps)
        mode = "count" if name == "guess_scan_count" else "grid"
        lay = guess_layout(cs, mode)
        w_mod, theta, prices = as_float_arrays(tr.modified)
        w_orig = np.array(inst.weights, dtype=np.float64)
        budget = 50_000
        fn = lambda: _kernels.guess_scan(lay, w_mod, w_orig, theta, prices,
                                         budget)

    fn()  # warm-up / jit compile
    best = float("inf")
    for _ in range(int(os.environ.get("BENCH_REPEATS", "3"))):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    print(json.dumps({"workload": name, "backend": _kernels.BACKEND,
                      "seconds": best}))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--worker", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        run_workload(args.worker)
        return

    results = {}
    for backend in ("numba", "numpy"):
        for name, _ in workloads():
            env = dict(os.environ, MSRANK_BACKEND=backend,
                       BENCH_REPEATS=str(args.repeats))
            proc = subprocess.run(
                [sys.executable, __file__, "--worker", name],
                capture_output=True, text=True, env=env)
            if proc.returncode != 0:
                sys.stderr.write(proc.stderr)
                raise SystemExit(1)
            row = json.loads(proc.stdout.strip().splitlines()[-1])
            if row["backend"] != backend:
                sys.stderr.write(f"requested {backend} backend but got "
                                 f"{row['backend']}; is numba installed?\n")
            results[(name, backend)] = row["seconds"]

    print(f"{'workload':<20} {'description':<45} {'numba':>9} {'numpy':>9} {'speedup':>8}")
    for name, desc in workloads():
        nb = results[(name, "numba")]
        np_ = results[(name, "numpy")]
        print(f"{name:<20} {desc:<45} {nb:>8.4f}s {np_:>8.4f}s {np_ / nb:>7.1f}x")


if __name__ == "__main__":
    main()
