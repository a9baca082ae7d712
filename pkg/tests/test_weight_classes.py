import itertools

import pytest

from msrank import (
    Assignment,
    NotBoundedRatio,
    RandomSpec,
    Segment,
    build_classes,
    prefix_weights,
    random_bounded_ratio_instance,
    sorted_within_class,
    validate_instance,
    weight_floor,
)


def seg(n):
    return (Segment(1.0, (0.0,) * n),)


def test_class_structure_worked_example():
    inst = validate_instance((1.0, 0.5, 0.1, 0.05), seg(4))
    cs = build_classes(inst, eps=0.5)
    assert cs.base == pytest.approx(0.03125)
    assert cs.num_classes == 11
    assert cs.class_of == (9, 7, 3, 2)
    assert cs.heavy_min_class == 7
    assert [cs.is_heavy_product(i) for i in range(4)] == [True, True, False, False]
    assert cs.class_members(9) == (0,)
    assert cs.class_members(3) == (2,)
    assert list(cs.occupied(heavy=True)) == [7, 9]
    assert list(cs.occupied(heavy=False)) == [2, 3]


def test_all_equal_weights_occupy_one_class():
    for eps in (0.3, 0.5, 0.8):
        inst = validate_instance((0.7,) * 5, seg(5))
        cs = build_classes(inst, eps)
        occupied = [q for q in range(1, cs.num_classes + 1) if cs.class_members(q)]
        assert len(occupied) == 1
        assert len(cs.class_members(occupied[0])) == 5


def test_all_equal_weights_near_top_class_at_coarse_eps():
    # the single occupied class is Q or Q-1 once the class ratio is coarse
    # enough that the top boundary sits within one step of w_max
    for eps in (0.7, 0.8, 0.9):
        inst = validate_instance((0.7,) * 5, seg(5))
        cs = build_classes(inst, eps)
        assert cs.class_of[0] in (cs.num_classes, cs.num_classes - 1)


def test_single_product_is_heavy():
    inst = validate_instance((1.0,), seg(1))
    cs = build_classes(inst, eps=0.4)
    assert cs.is_heavy_product(0)


def test_heavy_products_clear_the_weight_cutoff():
    for seed in range(20):
        inst = random_bounded_ratio_instance(
            RandomSpec(n=6, num_segments=1, seed=seed), eps=0.3)
        cs = build_classes(inst, 0.3)
        w_max = max(inst.weights)
        for i, w in enumerate(inst.weights):
            if cs.is_heavy_product(i):
                assert w >= 0.3 ** 2 * w_max * (1.0 - 1e-12)


def test_below_floor_weight_rejected():
    eps, n = 0.5, 4
    floor = weight_floor(eps, n, 1.0)
    inst = validate_instance((1.0, 0.5, 0.25, floor * 0.5), seg(4))
    with pytest.raises(NotBoundedRatio):
        build_classes(inst, eps)


def test_members_sorted_by_weight_then_index():
    inst = validate_instance((1.0, 0.98, 0.99, 0.98), seg(4))
    cs = build_classes(inst, eps=0.5)
    q = cs.class_of[0]
    assert set(cs.class_of) == {q}
    assert cs.class_members(q) == (1, 3, 2, 0)


def test_sorted_within_class_idempotent():
    inst = validate_instance((1.0, 0.9, 0.5, 0.4), seg(4))
    cs = build_classes(inst, eps=0.5)
    a = Assignment.from_one_based((3, 1, 4, 2))
    once = sorted_within_class(inst, a, cs)
    assert sorted_within_class(inst, once, cs) == once


def test_sorted_within_class_fixes_a_swap():
    # products 1 and 2 share a class; larger first must become smaller first
    inst = validate_instance((1.0, 0.95, 0.1), seg(3))
    cs = build_classes(inst, eps=0.5)
    assert cs.class_of[0] == cs.class_of[1]
    got = sorted_within_class(inst, Assignment((0, 1, 2)), cs)
    assert got.order == (1, 0, 2)


def test_sorted_within_class_never_raises_prefix_weight():
    inst = validate_instance((1.0, 0.9, 0.82, 0.3, 0.28, 0.05), seg(6))
    cs = build_classes(inst, eps=0.5)
    for perm in itertools.permutations(range(6)):
        a = Assignment(perm)
        up = sorted_within_class(inst, a, cs)
        before = prefix_weights(inst, a)
        after = prefix_weights(inst, up)
        assert all(x <= y + 1e-12 for x, y in zip(after, before))
