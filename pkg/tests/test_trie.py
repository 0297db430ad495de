from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dasoda.errors import InputError
from dasoda.trie import Trie, build_trie, chain_trie, enumerate_tries, random_trie

words = st.lists(st.lists(st.integers(1, 3), max_size=5).map(tuple), max_size=12)


def prefixes(strings):
    return {s[:k] for s in strings for k in range(len(s) + 1)} | {()}


def test_build_numbers_nodes_breadth_first():
    t = build_trie([(1, 2), (1, 3), (2,)], 3)
    assert t.node_count == 5
    assert t.children(1) == {1: 2, 2: 3}
    assert t.children(2) == {2: 4, 3: 5}
    assert sorted(t.terminal) == [3, 4, 5]
    assert t.internal_nodes() == [1, 2]
    assert t.spell(5) == (1, 3)
    assert t.parent(4) == (2, 2)
    assert t.depth(4) == 2


def test_bad_symbol_is_reported_with_position():
    with pytest.raises(InputError, match="position 1"):
        build_trie([(1, 4)], 3)
    with pytest.raises(InputError):
        build_trie([(1,)], 0)


def test_chain():
    t = chain_trie(4)
    assert t.node_count == 4 and t.internal_nodes() == [1, 2, 3]
    assert t.contains((1, 1, 1)) and not t.contains((1, 1))


@given(words)
def test_nodes_are_the_distinct_prefixes(strings):
    t = build_trie(strings, 3)
    assert t.node_count == len(prefixes(strings))
    for s in strings:
        assert t.contains(s)
    for p in prefixes(strings):
        assert t.find(p) is not None
        assert t.contains(p) == (p in set(strings))


@given(words)
def test_orders_visit_every_node_once(strings):
    t = build_trie(strings, 3)
    for order in (t.dfs_order(), t.bfs_order()):
        assert sorted(order) == list(range(1, t.node_count + 1))
    assert t.bfs_order() == list(range(1, t.node_count + 1))
    depth = [t.depth(v) for v in t.bfs_order()]
    assert depth == sorted(depth)


def test_edges_round_trip_through_from_edges():
    t = build_trie([(1, 1), (2, 1, 3)], 3)
    u = Trie.from_edges(3, t.edges, t.terminal)
    assert u == t


def k_ary_tree_count(n, k):
    # labelled-slot k-ary trees with n nodes: Fuss-Catalan numbers
    return comb(k * n, n) // ((k - 1) * n + 1)


@pytest.mark.parametrize("sigma", [1, 2, 3])
@pytest.mark.parametrize("m", range(1, 7))
def test_enumeration_count_matches_fuss_catalan(m, sigma):
    tries = list(enumerate_tries(m, sigma))
    expected = 1 if sigma == 1 else k_ary_tree_count(m, sigma)
    assert len(tries) == expected
    assert len(set(tries)) == expected
    assert all(t.node_count == m for t in tries)


def test_random_trie_has_requested_size():
    rng = np.random.default_rng(7)
    for _ in range(50):
        m, s = int(rng.integers(1, 30)), int(rng.integers(1, 5))
        t = random_trie(m, s, rng)
        assert t.node_count == m and t.sigma == s
