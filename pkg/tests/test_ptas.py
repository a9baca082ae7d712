import numpy as np
import pytest

from msrank import _kernels
from msrank import (
    Assignment,
    CandidatePartition,
    ClassStructure,
    GuessInfeasible,
    MissingHeadProduct,
    RandomSpec,
    Segment,
    StatGuess,
    assign_heavy,
    assign_light,
    block_count,
    block_decompose,
    bounded_ratio_transform,
    brute_force_opt,
    build_classes,
    classify_stoppers,
    enumerate_guesses,
    evaluate,
    grid_global_cap,
    grid_weight_unit,
    guess_layout,
    is_good_partition,
    oracle_pipeline,
    partition_to_assignment,
    ptas_solve,
    random_bounded_ratio_instance,
    sorted_within_class,
    stats_of,
    validate_instance,
)
from msrank.model import as_float_arrays


def seg(prices):
    return (Segment(1.0, tuple(prices)),)


def partition_signature(p, L, n):
    sub = [0] * n
    for ell, s in enumerate(p.subsets, start=1):
        for i in s:
            sub[i] = ell
    return sum(sub[i] * (L + 1) ** i for i in range(n))


# ---------------------------------------------------------------- blocks


def test_block_count_examples():
    assert block_count(0.5) == 7
    for eps in (0.05, 0.1, 0.25, 0.4, 0.8):
        L = block_count(eps)
        assert (1 + eps) ** L * eps ** 3 > 1.0 / eps
        assert L == 0 or (1 + eps) ** (L - 1) * eps ** 3 <= 1.0 / eps


def test_block_decompose_two_products():
    inst = validate_instance((1.0, 0.2), seg((2.0, 0.0)))
    cs = build_classes(inst, 0.5)
    blocks = block_decompose(inst, Assignment.from_one_based((2, 1)), cs)
    assert blocks.num_blocks == 7
    assert blocks.sizes == (0, 0, 1, 0, 0, 0, 1, 0)
    assert blocks.tail_size == 0
    assert blocks.weights[2] == pytest.approx(0.2)
    assert blocks.weights[6] == pytest.approx(1.0)
    # position 1 (product 2) sits in block 2, position 2 in block 6
    assert blocks.block_of_position(1) == 2
    assert blocks.block_of_position(2) == 6


def test_block_decompose_single_product():
    inst = validate_instance((1.0,), seg((3.0,)))
    cs = build_classes(inst, 0.5)
    blocks = block_decompose(inst, Assignment.identity(1), cs)
    assert blocks.sizes[0] == 0
    ell = blocks.block_of_position(1)
    # first block whose upper threshold exceeds the prefix weight
    assert 1.5 ** ell * 0.125 > 1.0 >= 1.5 ** (ell - 1) * 0.125


def test_block_decompose_tail_when_prefix_clears_all_thresholds():
    inst = validate_instance((1.0, 0.9, 0.9, 0.9), seg((9.0,) * 4))
    cs = build_classes(inst, 0.5)
    blocks = block_decompose(inst, Assignment.identity(4), cs)
    top = 1.5 ** 7 * 0.125  # highest block threshold, > w_max/eps
    assert top > 1.0 / 0.5
    assert blocks.tail_size == 2  # prefixes 2.8 and 3.7 clear it
    assert blocks.block_of_position(4) == blocks.num_blocks + 1
    assert blocks.tail_weight == pytest.approx(1.8)


def test_block_decompose_bookkeeping_consistent():
    for seed in range(10):
        inst = random_bounded_ratio_instance(
            RandomSpec(n=7, num_segments=2, seed=40 + seed), eps=0.4)
        cs = build_classes(inst, 0.4)
        a = sorted_within_class(inst, brute_force_opt(inst).best, cs)
        blocks = block_decompose(inst, a, cs)
        assert sum(blocks.sizes) + blocks.tail_size == 7
        for ell in range(blocks.num_blocks + 1):
            assert sum(blocks.class_counts[ell]) == blocks.sizes[ell]
            assert sum(blocks.class_weights[ell]) == pytest.approx(
                blocks.weights[ell], abs=1e-12)
            occ = [q for q in range(1, cs.num_classes + 1)
                   if blocks.class_counts[ell][q - 1]]
            assert blocks.top_class[ell] == (max(occ) if occ else 0)
        assert blocks.boundaries == tuple(sorted(blocks.boundaries))


# ---------------------------------------------------------------- guessing


def synthetic_cs(eps, weights, class_of, num_classes, heavy_min_class):
    members = [[] for _ in range(num_classes)]
    for i, q in enumerate(class_of):
        members[q - 1].append(i)
    for q in range(num_classes):
        members[q].sort(key=lambda i: (weights[i], i))
    return ClassStructure(
        eps=eps, n=len(weights), max_weight=max(weights, default=1.0),
        base=0.01, num_classes=num_classes, heavy_min_class=heavy_min_class,
        class_of=tuple(class_of), members=tuple(tuple(m) for m in members),
        weights=tuple(weights))


def test_count_guesses_single_light_product():
    cs = synthetic_cs(0.84, (0.05,), (1,), num_classes=2, heavy_min_class=2)
    assert block_count(0.84) == 2
    stream = enumerate_guesses(cs, "count")
    got = [g for g in stream]
    assert not stream.truncated
    assert len(got) == 3
    vectors = [(g.light[0][0], g.light[1][0]) for g in got]
    assert vectors[0] == (0, 0)  # empty guess first
    assert set(vectors) == {(0, 0), (1, 0), (0, 1)}


def test_no_products_gives_one_empty_guess():
    cs = synthetic_cs(0.84, (), (), num_classes=1, heavy_min_class=2)
    stream = enumerate_guesses(cs, "count")
    got = list(stream)
    assert len(got) == 1
    assert all(v == 0 for row in got[0].light for v in row)
    assert not stream.truncated


def test_grid_unit_and_global_cap():
    inst = validate_instance((1.0, 0.5, 0.1, 0.05), seg((2.0, 1.0, 0.5, 0.0)))
    cs = build_classes(inst, 0.5)
    assert cs.num_classes == 11
    assert grid_weight_unit(cs) == pytest.approx(0.5 ** 4 / 11.0)
    assert grid_global_cap(cs) == 704


def test_stream_truncates_at_budget():
    cs = synthetic_cs(0.84, (0.05,), (1,), num_classes=2, heavy_min_class=2)
    stream = enumerate_guesses(cs, "count", budget=2)
    assert len(list(stream)) == 2
    assert stream.truncated


def test_python_stream_matches_kernel_count_mode():
    inst = validate_instance((1.0, 0.5, 0.1, 0.05), seg((2.0, 1.0, 0.5, 0.0)))
    eps = 0.5
    tr = bounded_ratio_transform(inst, eps)
    cs = build_classes(tr.modified, eps)
    L = block_count(eps)

    sigs, best = [], (-1.0, None)
    for g in enumerate_guesses(cs, "count"):
        try:
            part = assign_light(cs, g, assign_heavy(cs, g))
        except GuessInfeasible:
            continue
        sigs.append(partition_signature(part, L, inst.n))
        a = partition_to_assignment(part, cs)
        share = evaluate(inst, a).share
        if share > best[0]:
            best = (share, a.order)

    lay = guess_layout(cs, "count")
    w_mod, theta, prices = as_float_arrays(tr.modified)
    w_orig = np.array(inst.weights, dtype=np.float64)
    res = _kernels.guess_scan(lay, w_mod, w_orig, theta, prices,
                              budget=10 ** 6, collect_sigs=True)
    assert not res["truncated"]
    assert res["n_feasible"] == len(sigs)
    assert list(res["signatures"]) == sigs
    assert tuple(int(i) for i in res["best_order"]) == best[1]
    assert res["best_share"] == best[0]


def test_python_stream_matches_kernel_grid_prefix():
    inst = validate_instance((1.0, 0.5, 0.1, 0.05), seg((2.0, 1.0, 0.5, 0.0)))
    eps = 0.5
    tr = bounded_ratio_transform(inst, eps)
    cs = build_classes(tr.modified, eps)
    L = block_count(eps)
    budget = 3000

    sigs = []
    stream = enumerate_guesses(cs, "grid", budget=budget)
    for g in stream:
        try:
            part = assign_light(cs, g, assign_heavy(cs, g))
        except GuessInfeasible:
            continue
        sigs.append(partition_signature(part, L, inst.n))
    assert stream.truncated

    lay = guess_layout(cs, "grid")
    w_mod, theta, prices = as_float_arrays(tr.modified)
    w_orig = np.array(inst.weights, dtype=np.float64)
    res = _kernels.guess_scan(lay, w_mod, w_orig, theta, prices,
                              budget=budget, collect_sigs=True)
    assert res["truncated"]
    assert res["n_guesses"] == budget
    assert list(res["signatures"]) == sigs


# ------------------------------------------------------- partition assembly


def test_assign_heavy_consecutive_ranges():
    # one heavy class holding products 5,7,9 (ascending weight), counts (1,2)
    cs = synthetic_cs(0.5, tuple([1.0] * 10), tuple([1] * 10),
                      num_classes=1, heavy_min_class=1)
    cs = ClassStructure(
        eps=0.5, n=10, max_weight=1.0, base=0.01, num_classes=1,
        heavy_min_class=1, class_of=cs.class_of,
        members=((5, 7, 9),), weights=cs.weights)
    L = block_count(0.5)
    beta = [(0,)] * L
    beta[0] = (1,)
    beta[1] = (2,)
    g = StatGuess(mode="count", heavy_classes=(1,), light_classes=(),
                  heavy=tuple(beta), light=tuple(() for _ in range(L)))
    part = assign_heavy(cs, g)
    assert part.subsets[0] == {5}
    assert part.subsets[1] == {7, 9}
    assert part.heads[0] == 5
    assert part.heads[1] == 7
    assert 9 not in part.tail


def test_assign_heavy_all_zero_sends_class_to_tail():
    inst = validate_instance((1.0, 0.9), seg((1.0, 0.0)))
    cs = build_classes(inst, 0.5)
    L = block_count(0.5)
    q = cs.class_of[0]
    g = StatGuess(mode="count", heavy_classes=(q,), light_classes=(),
                  heavy=tuple((0,) for _ in range(L)),
                  light=tuple(() for _ in range(L)))
    part = assign_heavy(cs, g)
    assert part.tail == {0, 1}


def test_assign_heavy_infeasible_when_counts_exceed_class():
    inst = validate_instance((1.0, 0.9), seg((1.0, 0.0)))
    cs = build_classes(inst, 0.5)
    L = block_count(0.5)
    q = cs.class_of[0]
    rows = [(0,)] * L
    rows[0], rows[1] = (2,), (1,)
    g = StatGuess(mode="count", heavy_classes=(q,), light_classes=(),
                  heavy=tuple(rows), light=tuple(() for _ in range(L)))
    with pytest.raises(GuessInfeasible):
        assign_heavy(cs, g)


def test_assign_light_zero_weight_sends_class_to_tail():
    cs = synthetic_cs(0.5, (0.1, 0.1), (1, 1), num_classes=2, heavy_min_class=2)
    L = block_count(0.5)
    g = StatGuess(mode="grid", heavy_classes=(), light_classes=(1,),
                  heavy=tuple(() for _ in range(L)),
                  light=tuple((0,) for _ in range(L)),
                  light_weight_unit=0.1)
    part = assign_light(cs, g, assign_heavy(cs, g))
    assert part.tail == {0, 1}


def test_assign_light_minimal_prefix():
    # class weights (0.1, 0.1), target (1-eps) * 0.1 = 0.05 -> one product
    cs = synthetic_cs(0.5, (0.1, 0.1), (1, 1), num_classes=2, heavy_min_class=2)
    L = block_count(0.5)
    rows = [(0,)] * L
    rows[0] = (1,)
    g = StatGuess(mode="grid", heavy_classes=(), light_classes=(1,),
                  heavy=tuple(() for _ in range(L)), light=tuple(rows),
                  light_weight_unit=0.1)
    part = assign_light(cs, g, assign_heavy(cs, g))
    assert part.subsets[0] == {0}
    assert part.tail == {1}


def test_partition_to_assignment_all_tail_descends_by_weight():
    inst = validate_instance((0.5, 1.0, 0.7), seg((2.0, 1.0, 0.0)))
    cs = build_classes(inst, 0.5)
    L = block_count(0.5)
    g = StatGuess(mode="count", heavy_classes=(), light_classes=(),
                  heavy=tuple(() for _ in range(L)),
                  light=tuple(() for _ in range(L)))
    part = CandidatePartition(
        subsets=tuple(frozenset() for _ in range(L)),
        tail=frozenset((0, 1, 2)), heads=(None,) * L, guess=g)
    a = partition_to_assignment(part, cs)
    assert a.order == (1, 2, 0)


def test_partition_to_assignment_puts_heavy_head_first():
    inst = validate_instance((1.0, 0.9, 0.85), seg((1.5, 1.0, 0.0)))
    cs = build_classes(inst, 0.5)
    L = block_count(0.5)
    q = cs.class_of[0]
    assert cs.is_heavy_class(q)
    rows = [(0,)] * L
    rows[0] = (len(cs.class_members(q)),)
    g = StatGuess(mode="count", heavy_classes=(q,), light_classes=(),
                  heavy=tuple(rows), light=tuple(() for _ in range(L)))
    part = assign_heavy(cs, g)
    a = partition_to_assignment(part, cs)
    assert a.order[0] == part.heads[0] == min(cs.class_members(q))
    assert set(a.order[:3]) == {0, 1, 2}


def test_partition_to_assignment_missing_head():
    cs = synthetic_cs(0.5, (1.0, 0.05), (1, 2), num_classes=2, heavy_min_class=1)
    L = block_count(0.5)
    rows = [(0,)] * L
    rows[0] = (1,)
    g = StatGuess(mode="count", heavy_classes=(1,), light_classes=(2,),
                  heavy=tuple(rows), light=tuple((0,) for _ in range(L)))
    bad = CandidatePartition(
        subsets=(frozenset((1,)),) + tuple(frozenset() for _ in range(L - 1)),
        tail=frozenset((0,)), heads=(1,) + (None,) * (L - 1), guess=g)
    with pytest.raises(MissingHeadProduct):
        partition_to_assignment(bad, cs)


# ------------------------------------------------------------ good partition


def test_oracle_partition_is_good():
    for seed in (1, 5, 9):
        inst = random_bounded_ratio_instance(
            RandomSpec(n=6, num_segments=2, seed=seed), eps=0.3)
        pipe = oracle_pipeline(inst, 0.3)
        rep = is_good_partition(pipe.partition, pipe.blocks, pipe.classes,
                                0.3, tol=1e-9)
        assert rep.all_good


def test_oracle_partition_weights_match_reference_blocks():
    inst = random_bounded_ratio_instance(
        RandomSpec(n=6, num_segments=2, seed=3), eps=0.3)
    pipe = oracle_pipeline(inst, 0.3)
    cs, blocks = pipe.classes, pipe.blocks
    ref_members = pipe.reference.order
    for ell in range(1, blocks.num_blocks + 1):
        lo = blocks.boundaries[ell - 1]
        hi = blocks.boundaries[ell]
        in_block = set(ref_members[lo:hi])
        for q in cs.heavy_class_ids:
            got = pipe.partition.subsets[ell - 1] & set(cs.class_members(q))
            assert got == (in_block & set(cs.class_members(q)))


def test_grid_stats_keep_light_weights_in_band():
    eps = 0.3
    inst = random_bounded_ratio_instance(
        RandomSpec(n=7, num_segments=2, seed=21), eps=eps)
    cs = build_classes(inst, eps)
    a = sorted_within_class(inst, brute_force_opt(inst).best, cs)
    blocks = block_decompose(inst, a, cs)
    g = stats_of(blocks, cs, mode="grid")
    part = assign_light(cs, g, assign_heavy(cs, g))
    unit = grid_weight_unit(cs)
    for ell in range(1, blocks.num_blocks + 1):
        for q in cs.light_class_ids:
            got = sum(inst.weights[i] for i in sorted(
                part.subsets[ell - 1] & set(cs.class_members(q))))
            ref = blocks.light_class_weight(ell, q)
            assert got <= ref + 1e-9
            assert got >= (1 - eps) * ref - unit - 1e-9


def test_good_partition_size_violation_detected():
    inst = random_bounded_ratio_instance(
        RandomSpec(n=6, num_segments=2, seed=3), eps=0.3)
    pipe = oracle_pipeline(inst, 0.3)
    subs = list(pipe.partition.subsets)
    donors = [k for k, s in enumerate(subs) if s]
    assert len(donors) >= 2
    src, dst = donors[-1], donors[0]
    moved = next(iter(subs[src]))
    subs[src] = subs[src] - {moved}
    subs[dst] = subs[dst] | {moved}
    tweaked = CandidatePartition(subsets=tuple(subs), tail=pipe.partition.tail,
                                 heads=pipe.partition.heads,
                                 guess=pipe.partition.guess)
    rep = is_good_partition(tweaked, pipe.blocks, pipe.classes, 0.3)
    assert not rep.bounded_size
    assert rep.prefix_subsets  # moved product still comes from the prefix


def test_good_partition_prefix_violation_detected():
    inst = validate_instance((1.0, 0.9, 0.9, 0.9), seg((9.0,) * 4))
    eps = 0.5
    pipe = oracle_pipeline(inst, eps)
    assert pipe.blocks.tail_size > 0
    outsider = pipe.reference.order[-1]
    subs = list(pipe.partition.subsets)
    k = next(i for i, s in enumerate(subs) if s)
    subs[k] = subs[k] | {outsider}
    tweaked = CandidatePartition(subsets=tuple(subs),
                                 tail=pipe.partition.tail - {outsider},
                                 heads=pipe.partition.heads,
                                 guess=pipe.partition.guess)
    rep = is_good_partition(tweaked, pipe.blocks, pipe.classes, eps)
    assert not rep.prefix_subsets


# ----------------------------------------------------------------- stoppers


def test_classify_stoppers_early():
    inst = validate_instance(
        (0.07, 1.0),
        (Segment(0.5, (0.0, 0.0)), Segment(0.5, (9.0, 9.0))))
    labels = classify_stoppers(inst, Assignment.identity(2), 0.5)
    # prefix 0.07 < eps^3 * w_max = 0.125 puts position 1 in block 0
    assert labels[0] == "early"


def test_classify_stoppers_late():
    inst = validate_instance((1.0, 0.9, 0.9, 0.9), seg((9.0,) * 4))
    labels = classify_stoppers(inst, Assignment.identity(4), 0.5)
    assert labels == ("late",)


def test_classify_stoppers_mid(e1):
    tr = bounded_ratio_transform(e1, 0.3)
    labels = classify_stoppers(tr.modified, Assignment.identity(3), 0.3)
    assert labels == ("mid",)


# -------------------------------------------------------------------- solve


def test_oracle_mode_on_e1(e1):
    rep = ptas_solve(e1, eps=0.05, mode="oracle")
    assert rep.share >= (1 - 13 * 0.05) * 0.75
    assert rep.share >= 0.7
    assert rep.extra["n_guesses"] == 1


def test_count_mode_single_product():
    inst = validate_instance((0.6,), seg((5.0,)))
    rep = ptas_solve(inst, eps=0.3, mode="count")
    assert tuple(rep.order) == (0,)
    assert rep.share == pytest.approx(0.6 / 1.6)


def test_count_mode_beats_oracle_guess(e1):
    eps = 0.4
    count = ptas_solve(e1, eps, mode="count")
    oracle = ptas_solve(e1, eps, mode="oracle")
    assert not count.truncated
    assert count.share >= oracle.share - 1e-12


def test_count_family_contains_oracle_partition(e1):
    eps = 0.4
    pipe = oracle_pipeline(e1, eps)
    L = pipe.blocks.num_blocks
    want = partition_signature(pipe.partition, L, e1.n)
    rep = ptas_solve(e1, eps, mode="count", collect_signatures=True)
    assert not rep.truncated
    assert want in set(int(s) for s in rep.extra["signatures"])


def test_truncation_reported_not_raised(e1):
    rep = ptas_solve(e1, eps=0.4, mode="count", budget=3)
    assert rep.truncated
    assert rep.extra["n_guesses"] == 3
    assert rep.share > 0


def test_trivial_case_short_circuit():
    inst = validate_instance((20.0, 1.0), seg((5.0, 0.0)))
    rep = ptas_solve(inst, eps=0.1, mode="count")
    assert rep.params["trivial_case"] is True
    assert tuple(rep.order) == (0, 1)


def test_solve_is_deterministic(e1):
    a = ptas_solve(e1, eps=0.3, mode="count")
    b = ptas_solve(e1, eps=0.3, mode="count")
    assert a.order == b.order
    assert a.share == b.share
    assert a.extra["best_guess_rank"] == b.extra["best_guess_rank"]


def test_signature_capacity_guard():
    inst = validate_instance((0.5,) * 30, seg((9.0,) * 30))
    with pytest.raises(ValueError):
        ptas_solve(inst, eps=0.5, mode="count", collect_signatures=True)


def test_unknown_mode_rejected(e1):
    with pytest.raises(ValueError):
        ptas_solve(e1, eps=0.3, mode="exact")
