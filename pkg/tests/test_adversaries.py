"""Adversary policy behaviour: orderings, swaps, random graph families."""

from fractions import Fraction
from random import Random

import pytest
from hypothesis import given, settings, strategies as st

from dynbal.adversaries import (
    AdversaryContext,
    RandomConnectedPolicy,
    ResortDescendingPolicy,
    SortingLinePolicy,
    StaticPolicy,
    make_adversary,
    random_connected_graph,
    sorting_line_postprocess,
)
from dynbal.graphs import is_connected, star_graph
from dynbal.loads import LoadState


def ctx_for(loads, round_index=1, last_matching=()):
    return AdversaryContext(
        round_index=round_index,
        loads=LoadState("integral", list(loads)),
        last_matching=last_matching,
    )


# ----------------------------------------------------------------------
# static
# ----------------------------------------------------------------------


def test_static_named_shapes():
    policy = StaticPolicy(shape="star")
    policy.bind(5, Random(0))
    assert policy.next_graph(ctx_for([0] * 5)) == star_graph(5)


def test_static_explicit_edges():
    policy = StaticPolicy(edges=[[0, 1], [1, 2], [0, 2]])
    policy.bind(3, Random(0))
    assert policy.next_graph(ctx_for([0, 0, 0])).edges == {(0, 1), (1, 2), (0, 2)}


def test_static_rejects_disconnected():
    policy = StaticPolicy(edges=[[0, 1]])
    with pytest.raises(ValueError):
        policy.bind(3, Random(0))


def test_static_rejects_unknown_shape():
    with pytest.raises(ValueError):
        StaticPolicy(shape="torus").bind(4, Random(0))


# ----------------------------------------------------------------------
# resortDescending
# ----------------------------------------------------------------------


def test_resort_descending_orders_heaviest_first():
    policy = ResortDescendingPolicy()
    policy.bind(3, Random(0))
    g = policy.next_graph(ctx_for([1, 5, 3]))
    # Line 1 - 2 - 0 (loads 5, 3, 1).
    assert g.edges == {(1, 2), (0, 2)}


def test_resort_descending_breaks_ties_by_id():
    policy = ResortDescendingPolicy()
    policy.bind(4, Random(0))
    g = policy.next_graph(ctx_for([7, 7, 7, 7]))
    # All equal: identity order 0-1-2-3.
    assert g.edges == {(0, 1), (1, 2), (2, 3)}


def test_resort_descending_caches_unchanged_orders():
    policy = ResortDescendingPolicy()
    policy.bind(3, Random(0))
    g1 = policy.next_graph(ctx_for([1, 5, 3]))
    g2 = policy.next_graph(ctx_for([2, 6, 4]))
    assert g1 is g2


# ----------------------------------------------------------------------
# sorting line
# ----------------------------------------------------------------------


def test_postprocess_reorders_balanced_pair():
    # Nodes 10.., order positions: pair (a, b) at positions 2 and 3 was
    # balanced to loads (7, 4); afterwards the line must read (4, 7).
    order = [4, 3, 0, 1, 2]
    loads = [7, 4, 0, 0, 0]
    updated = sorting_line_postprocess(order, [(0, 1)], loads)
    assert updated == [4, 3, 1, 0, 2]


def test_postprocess_keeps_sorted_pairs():
    order = [0, 1, 2]
    updated = sorting_line_postprocess(order, [(0, 1)], [2, 9, 0])
    assert updated == [0, 1, 2]


def test_postprocess_keeps_ties():
    updated = sorting_line_postprocess([0, 1], [(0, 1)], [5, 5])
    assert updated == [0, 1]


def test_postprocess_rejects_non_adjacent_pairs():
    with pytest.raises(ValueError):
        sorting_line_postprocess([0, 1, 2], [(0, 2)], [1, 2, 3])


def test_sorting_line_starts_with_identity():
    policy = SortingLinePolicy()
    policy.bind(4, Random(0))
    g = policy.next_graph(ctx_for([1, 2, 3, 4]))
    assert g.edges == {(0, 1), (1, 2), (2, 3)}


def test_sorting_line_applies_swaps_from_matching():
    policy = SortingLinePolicy()
    policy.bind(3, Random(0))
    policy.next_graph(ctx_for([0, 8, 0]))
    # Pair (0, 1) balanced; node 0 now heavier, so next line is 1-0-2.
    g = policy.next_graph(ctx_for([5, 3, 0], round_index=2, last_matching=[(0, 1)]))
    assert policy.order == [1, 0, 2]
    assert g.edges == {(0, 1), (0, 2)}


def test_sorting_line_ignores_off_line_pairs():
    policy = SortingLinePolicy()
    policy.bind(4, Random(0))
    policy.next_graph(ctx_for([0, 0, 0, 0]))
    g = policy.next_graph(ctx_for([9, 0, 0, 1], round_index=2, last_matching=[(0, 3)]))
    assert policy.order == [0, 1, 2, 3]
    assert g.edges == {(0, 1), (1, 2), (2, 3)}


# ----------------------------------------------------------------------
# randomConnected
# ----------------------------------------------------------------------


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 12), st.integers(0, 10**6))
def test_random_connected_is_always_connected(n, seed):
    g = random_connected_graph(n, Fraction(1, 10), Random(seed))
    assert g.n == n
    assert is_connected(g)
    assert len(g.edges) >= n - 1


def test_random_tree_has_exactly_n_minus_one_edges():
    for seed in range(20):
        g = random_connected_graph(9, Fraction(0), Random(seed))
        assert len(g.edges) == 8
        assert is_connected(g)


def test_random_connected_is_seed_deterministic():
    a = [random_connected_graph(8, Fraction(1, 10), Random(5)) for _ in range(1)]
    b = [random_connected_graph(8, Fraction(1, 10), Random(5)) for _ in range(1)]
    assert a == b


def test_random_connected_varies_between_rounds():
    policy = RandomConnectedPolicy(Fraction(1, 10))
    policy.bind(8, Random(9))
    seen = {policy.next_graph(ctx_for([0] * 8)) for _ in range(10)}
    assert len(seen) > 1


def test_random_connected_validates_probability():
    with pytest.raises(ValueError):
        RandomConnectedPolicy(Fraction(3, 2))


# ----------------------------------------------------------------------
# registry
# ----------------------------------------------------------------------


def test_make_adversary():
    assert isinstance(make_adversary("sortingLine"), SortingLinePolicy)
    assert isinstance(make_adversary("static", shape="cycle"), StaticPolicy)
    with pytest.raises(ValueError):
        make_adversary("chaosMonkey")
