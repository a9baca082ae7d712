"""Hot numeric kernels: numba-compiled fast path with a pure-numpy fallback.

The backend is picked once at import from the environment variable
``MSRANK_BACKEND``:

* ``auto`` (default) - use numba when importable, else numpy
* ``numba``          - require numba, warn and fall back if unavailable
* ``numpy``          - force the pure-numpy/python path

Both backends perform floating-point operations in the same order and
neither enables fastmath, so results are bitwise identical; the numpy
path is simply slower on the big enumeration scans.  Everything here is
float-mode only; exact rational search lives in plain Python in the
calling modules.
"""

from __future__ import annotations

import itertools
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

_env = os.environ.get("MSRANK_BACKEND", "auto").strip().lower()
if _env not in ("auto", "numba", "numpy"):
    warnings.warn(f"unknown MSRANK_BACKEND={_env!r}, using 'auto'")
    _env = "auto"

HAVE_NUMBA = False
if _env != "numpy":
    try:
        from numba import njit as _njit
        HAVE_NUMBA = True
    except ImportError:
        if _env == "numba":
            warnings.warn("MSRANK_BACKEND=numba but numba is not importable; using numpy")

USE_NUMBA = HAVE_NUMBA and _env != "numpy"
BACKEND = "numba" if USE_NUMBA else "numpy"


def _jit(fn):
    if USE_NUMBA:
        return _njit(cache=True, nogil=True)(fn)
    return fn


# ---------------------------------------------------------------------------
# single-assignment share evaluation

def eval_share_one(w, theta, prices, order):
    # share of one ranking; prefix accumulates left to right, a tie stops
    n = order.shape[0]
    total = 0.0
    for k in range(theta.shape[0]):
        acc = 0.0
        wc = 0.0
        found = False
        for p in range(n):
            acc += w[order[p]]
            if acc >= prices[k, p]:
                wc = acc
                found = True
                break
        if not found:
            wc = acc
        total += theta[k] * (wc / (1.0 + wc))
    return total


eval_share_one = _jit(eval_share_one)


def _eval_many_loop(w, theta, prices, orders):
    m = orders.shape[0]
    out = np.empty(m, dtype=np.float64)
    for j in range(m):
        out[j] = eval_share_one(w, theta, prices, orders[j])
    return out


_eval_many_loop = _jit(_eval_many_loop)


def eval_share_many(w, theta, prices, orders) -> np.ndarray:
    """Shares of a batch of rankings (orders: int array [m, n])."""
    orders = np.ascontiguousarray(orders, dtype=np.int64)
    if USE_NUMBA:
        return _eval_many_loop(w, theta, prices, orders)
    return _eval_many_numpy(w, theta, prices, orders)


def _eval_many_numpy(w, theta, prices, orders):
    # same accumulation order as the loop kernel: cumsum is sequential and
    # segments are added one at a time
    m, n = orders.shape
    pw = np.cumsum(w[orders], axis=1)
    rows = np.arange(m)
    total = np.zeros(m, dtype=np.float64)
    for k in range(theta.shape[0]):
        met = pw >= prices[k][None, :]
        stop = np.where(met.any(axis=1), met.argmax(axis=1), n - 1)
        wc = pw[rows, stop]
        total += theta[k] * (wc / (1.0 + wc))
    return total


# ---------------------------------------------------------------------------
# exhaustive permutation scan (optionally filtered to sorted-within-class)

def _next_perm(a):
    # in-place lexicographic successor; False at the last permutation
    n = a.shape[0]
    i = n - 2
    while i >= 0 and a[i] >= a[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = n - 1
    while a[j] <= a[i]:
        j -= 1
    t = a[i]
    a[i] = a[j]
    a[j] = t
    lo = i + 1
    hi = n - 1
    while lo < hi:
        t = a[lo]
        a[lo] = a[hi]
        a[hi] = t
        lo += 1
        hi -= 1
    return True


_next_perm = _jit(_next_perm)


def _perm_scan(w, theta, prices, order, steps, best_share, best_order,
               do_filter, class_of, nclasses, last_w, last_i,
               prune, bound, collect, values, vcount):
    # scans `steps` consecutive lexicographic permutations starting at `order`
    # (mutated in place); keeps the first strict maximum, so within a scan the
    # lexicographically smallest maximizer wins
    n = order.shape[0]
    examined = 0
    processed = 0
    exhausted = False
    pruned = False
    while processed < steps:
        ok = True
        if do_filter:
            for c in range(nclasses):
                last_i[c] = -1
            for p in range(n):
                i = order[p]
                c = class_of[i]
                if last_i[c] >= 0:
                    wi = w[i]
                    if wi < last_w[c] or (wi == last_w[c] and i < last_i[c]):
                        ok = False
                        break
                last_w[c] = w[i]
                last_i[c] = i
        if ok:
            share = eval_share_one(w, theta, prices, order)
            examined += 1
            if collect:
                values[vcount] = share
                vcount += 1
            if share > best_share:
                best_share = share
                for p in range(n):
                    best_order[p] = order[p]
            if prune and best_share >= bound:
                pruned = True
                processed += 1
                break
        processed += 1
        if not _next_perm(order):
            exhausted = True
            break
    return best_share, examined, processed, exhausted, pruned, vcount


_perm_scan = _jit(_perm_scan)


def perm_unrank(n: int, rank: int) -> np.ndarray:
    """Permutation at a given lexicographic rank (factorial number system)."""
    avail = list(range(n))
    out = np.empty(n, dtype=np.int64)
    for pos in range(n):
        f = math.factorial(n - 1 - pos)
        q, rank = divmod(rank, f)
        out[pos] = avail.pop(q)
    return out


def _swc_rank_keys(w, class_of):
    """Per-product rank within its class under ascending (weight, index)."""
    n = len(w)
    rank = np.empty(n, dtype=np.int64)
    for c in np.unique(class_of):
        members = np.where(class_of == c)[0]
        members = sorted(members, key=lambda i: (w[i], i))
        for r, i in enumerate(members):
            rank[i] = r
    return rank


def _perm_scan_numpy(w, theta, prices, start_rank, steps, class_of, collect):
    """Vectorized scan over a lexicographic range of permutations."""
    n = w.shape[0]
    it = itertools.permutations(range(n))
    if start_rank:
        it = itertools.islice(it, start_rank, None)
    best_share = -1.0
    best_order = None
    examined = 0
    values = [] if collect else None
    remaining = steps
    do_filter = class_of is not None
    if do_filter:
        rank = _swc_rank_keys(w, class_of)
    chunk_rows = 16384
    while remaining > 0:
        rows = list(itertools.islice(it, min(chunk_rows, remaining)))
        if not rows:
            break
        remaining -= len(rows)
        orders = np.array(rows, dtype=np.int64)
        if do_filter:
            cls = class_of[orders]
            rnk = rank[orders]
            valid = np.ones(len(rows), dtype=bool)
            for p in range(n - 1):
                for q in range(p + 1, n):
                    valid &= (cls[:, p] != cls[:, q]) | (rnk[:, p] < rnk[:, q])
        else:
            valid = np.ones(len(rows), dtype=bool)
        shares = _eval_many_numpy(w, theta, prices, orders)
        examined += int(valid.sum())
        if collect:
            values.append(shares[valid])
        masked = np.where(valid, shares, -1.0)
        j = int(masked.argmax())
        if valid[j] and masked[j] > best_share:
            best_share = float(masked[j])
            best_order = orders[j].copy()
    vals = np.concatenate(values) if collect and values else (np.empty(0) if collect else None)
    return best_share, best_order, examined, vals


def brute_scan(w, theta, prices, total_perms: int, *, class_of=None,
               collect_values: bool = False, prune: bool = False,
               threads: int = 1):
    """Exhaustive scan of all permutations (optionally sorted-within-class only).

    Returns (best_share, best_order, examined, values).  Deterministic for
    any thread count: chunks are merged in lexicographic chunk order with
    strictly-greater updates, so the lexicographically smallest maximizer
    always wins.
    """
    n = w.shape[0]
    do_filter = class_of is not None
    if not USE_NUMBA:
        cls = np.asarray(class_of, dtype=np.int64) if do_filter else None
        best_share, best_order, examined, values = _perm_scan_numpy(
            w, theta, prices, 0, total_perms, cls, collect_values)
        return best_share, best_order, examined, values

    cls = np.asarray(class_of, dtype=np.int64) if do_filter else np.zeros(n, dtype=np.int64)
    nclasses = int(cls.max()) + 1 if do_filter else 1
    bound = 0.0
    if prune:
        tot = 0.0
        for x in w:
            tot += float(x)
        bound = tot / (1.0 + tot)
    threads = max(1, int(threads))
    if prune:
        threads = 1  # early exit is only well-defined on a single sequential scan

    chunk_starts = []
    per = max(1, total_perms // threads)
    r = 0
    while r < total_perms:
        steps = min(per, total_perms - r)
        chunk_starts.append((r, steps))
        r += steps

    def run_chunk(args):
        start, steps = args
        order = perm_unrank(n, start)
        best_order = order.copy()
        values = np.empty(steps, dtype=np.float64) if collect_values else np.empty(1)
        last_w = np.empty(nclasses, dtype=np.float64)
        last_i = np.empty(nclasses, dtype=np.int64)
        res = _perm_scan(w, theta, prices, order, steps, -1.0, best_order,
                         do_filter, cls, nclasses, last_w, last_i,
                         prune, bound, collect_values, values, 0)
        best_share, examined, processed, exhausted, pruned, vcount = res
        return best_share, best_order, examined, values[:vcount] if collect_values else None

    if len(chunk_starts) == 1:
        results = [run_chunk(chunk_starts[0])]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_chunk, chunk_starts))

    best_share = -1.0
    best_order = None
    examined = 0
    pieces = []
    for share, order, ex, vals in results:
        examined += ex
        if collect_values and vals is not None:
            pieces.append(vals)
        if share > best_share:
            best_share = share
            best_order = order
    values = np.concatenate(pieces) if collect_values else None
    return best_share, best_order, examined, values


# ---------------------------------------------------------------------------
# guess-stream scan for the structured search
#
# A guess is a flat int vector over (class, block) cells: first the occupied
# heavy classes (ascending class id, L cells each), then the occupied light
# classes.  Heavy cells hold product counts; light cells hold counts (count
# mode) or grid multiples (grid mode).  The stream walks these vectors in
# ascending numeric order (rightmost cell fastest) subject to per-class sum
# caps and, in grid mode, a global cap on the sum of light cells.

def _guess_advance(state, L, nh, slot_sums, caps, grid, gcap, gsum):
    j = state.shape[0] - 1
    while j >= 0:
        slot = j // L
        light = slot >= nh
        if slot_sums[slot] + 1 <= caps[slot] and (not (grid and light) or gsum + 1 <= gcap):
            state[j] += 1
            slot_sums[slot] += 1
            if grid and light:
                gsum += 1
            return True, gsum
        slot_sums[slot] -= state[j]
        if grid and light:
            gsum -= state[j]
        state[j] = 0
        j -= 1
    return False, gsum


_guess_advance = _jit(_guess_advance)


def _guess_scan(state, slot_sums, gsum, max_steps, rank0,
                L, grid, gcap, caps,
                h_ids, h_sizes, h_members, h_off,
                l_ids, l_sizes, l_members, l_off,
                unit, one_minus_eps,
                w_mod, w_orig, theta, prices,
                best_share, best_rank, best_order,
                collect_sigs, sigs,
                sub, order, heads):
    n = w_orig.shape[0]
    nh = h_ids.shape[0]
    nl = l_ids.shape[0]
    processed = 0
    feasible = 0
    nsigs = 0
    exhausted = False
    while processed < max_steps:
        # ---- realize the current guess
        for i in range(n):
            sub[i] = 0  # 0 = tail, 1..L = block subsets
        ok = True
        # heavy classes: consecutive ascending-weight ranges; remember, per
        # block, the highest contributing class and the min product id of its
        # range (the head product)
        for ell in range(L):
            heads[ell] = -1         # head product per block, -1 = none
        for ci in range(nh):
            start = 0
            base = ci * L
            off = h_off[ci]
            for ell in range(L):
                c = state[base + ell]
                if c > 0:
                    mn = n
                    for t in range(start, start + c):
                        i = h_members[off + t]
                        sub[i] = ell + 1
                        if i < mn:
                            mn = i
                    heads[ell] = mn  # later (higher) classes overwrite
                    start += c
        # light classes
        for ci in range(nl):
            start = 0
            base = (nh + ci) * L
            off = l_off[ci]
            size = l_sizes[ci]
            for ell in range(L):
                v = state[base + ell]
                if v == 0:
                    continue
                if grid:
                    target = one_minus_eps * (v * unit)
                    acc = 0.0
                    cnt = 0
                    met = False
                    while start + cnt < size:
                        i = l_members[off + start + cnt]
                        acc += w_mod[i]
                        cnt += 1
                        if acc >= target:
                            met = True
                            break
                    if not met:
                        ok = False
                        break
                    for t in range(start, start + cnt):
                        sub[l_members[off + t]] = ell + 1
                    start += cnt
                else:
                    for t in range(start, start + v):
                        sub[l_members[off + t]] = ell + 1
                    start += v
            if not ok:
                break
        if ok:
            feasible += 1
            # ---- lay out the ranking: blocks 1..L then the tail
            p = 0
            for ell in range(L):
                h = heads[ell]
                if h >= 0:
                    order[p] = h
                    p += 1
                for i in range(n):
                    if sub[i] == ell + 1 and i != h:
                        order[p] = i
                        p += 1
            # tail: descending modified weight, ties by ascending index
            m = 0
            for i in range(n):
                if sub[i] == 0:
                    order[p + m] = i
                    m += 1
            for a in range(1, m):
                key = order[p + a]
                kw = w_mod[key]
                b = a - 1
                while b >= 0 and w_mod[order[p + b]] < kw:
                    order[p + b + 1] = order[p + b]
                    b -= 1
                order[p + b + 1] = key
            share = eval_share_one(w_orig, theta, prices, order)
            if share > best_share:
                best_share = share
                best_rank = rank0 + processed
                for i in range(n):
                    best_order[i] = order[i]
            if collect_sigs:
                sig = 0
                pw = 1
                for i in range(n):
                    sig += sub[i] * pw
                    pw *= (L + 1)
                sigs[nsigs] = sig
                nsigs += 1
        processed += 1
        moved, gsum = _guess_advance(state, L, nh, slot_sums, caps, grid, gcap, gsum)
        if not moved:
            exhausted = True
            break
    return processed, feasible, exhausted, best_share, best_rank, nsigs, gsum


_guess_scan = _jit(_guess_scan)


def guess_scan(layout, w_mod, w_orig, theta, prices, budget: int,
               collect_sigs: bool = False, chunk: int = 1 << 16):
    """Drive the guess-stream kernel in chunks up to `budget` guesses.

    `layout` is a GuessLayout (see ptas module).  Returns a dict with the
    best share/order/stream-rank, guess counts, the truncation flag, and
    (optionally) the int64 signatures of every feasible partition, where a
    signature encodes each product's subset id in base L+1.
    """
    n = w_orig.shape[0]
    L = layout.num_blocks
    ncells = (len(layout.heavy_ids) + len(layout.light_ids)) * L
    state = np.zeros(ncells, dtype=np.int64)
    slot_sums = np.zeros(max(1, len(layout.heavy_ids) + len(layout.light_ids)), dtype=np.int64)
    caps = np.concatenate([layout.heavy_caps, layout.light_caps]).astype(np.int64) \
        if ncells else np.zeros(1, dtype=np.int64)
    best_share = -1.0
    best_rank = -1
    best_order = np.arange(n, dtype=np.int64)
    sub = np.zeros(n, dtype=np.int64)
    order = np.zeros(n, dtype=np.int64)
    heads = np.zeros(max(L, 1), dtype=np.int64)
    sig_pieces = []
    gsum = 0
    rank = 0
    truncated = False
    n_feasible = 0
    while True:
        steps = min(chunk, budget - rank)
        if steps <= 0:
            truncated = True
            break
        sigs = np.empty(steps if collect_sigs else 1, dtype=np.int64)
        (processed, feas, exhausted, best_share, best_rank, nsigs, gsum) = _guess_scan(
            state, slot_sums, gsum, steps, rank,
            L, layout.grid_mode, layout.global_cap, caps,
            layout.heavy_ids, layout.heavy_sizes, layout.heavy_members, layout.heavy_offsets,
            layout.light_ids, layout.light_sizes, layout.light_members, layout.light_offsets,
            layout.unit, layout.one_minus_eps,
            w_mod, w_orig, theta, prices,
            best_share, best_rank, best_order,
            collect_sigs, sigs,
            sub, order, heads)
        rank += processed
        n_feasible += feas
        if collect_sigs and nsigs:
            sig_pieces.append(sigs[:nsigs].copy())
        if exhausted:
            break
    return {
        "best_share": best_share,
        "best_order": best_order,
        "best_rank": best_rank,
        "n_guesses": rank,
        "n_feasible": n_feasible,
        "truncated": truncated,
        "signatures": np.concatenate(sig_pieces) if sig_pieces else np.empty(0, dtype=np.int64),
    }
