from __future__ import annotations

from itertools import combinations
from math import comb

import pytest
from hypothesis import given, strategies as st

from hyperpowers import oracles
from hyperpowers.cliquegraph import (
    clique_graph, common_clique_count, common_extenders, extender_lower_bound,
    iter_cliques, rdeg_bound_check,
)
from hyperpowers.errors import ParameterError, PreconditionError
from hyperpowers.hypercore import KGraph, complete_kgraph, remove_edges, shadow


@st.composite
def kgraphs(draw, k=None, lo=4, hi=7, dense=False):
    k = k or draw(st.integers(2, 3))
    n = draw(st.integers(max(lo, k), hi))
    all_edges = list(combinations(range(n), k))
    if dense:
        drop = draw(st.sets(st.sampled_from(all_edges), max_size=max(1, len(all_edges) // 6)))
        return KGraph(n, k, frozenset(all_edges) - drop)
    chosen = draw(st.sets(st.sampled_from(all_edges)))
    return KGraph(n, k, frozenset(chosen))


def _cycle_graph(n):
    return KGraph(n, 2, frozenset(tuple(sorted((i, (i + 1) % n))) for i in range(n)))


def test_clique_graph_at_uniformity_is_identity():
    H = KGraph(5, 3, frozenset({(0, 1, 2), (1, 2, 3)}))
    assert clique_graph(H, 3) == H


def test_clique_graph_of_c5_has_no_triangles():
    assert len(clique_graph(_cycle_graph(5), 3)) == 0


def test_clique_graph_of_complete():
    assert clique_graph(complete_kgraph(7, 3), 5) == complete_kgraph(7, 5)


def test_clique_graph_rejects_small_r():
    with pytest.raises(ParameterError):
        clique_graph(complete_kgraph(5, 3), 2)


@given(kgraphs(), st.integers(0, 2))
def test_clique_graph_matches_oracle(H, extra):
    r = H.k + extra
    if r > H.n:
        return
    want = {c for c in combinations(range(H.n), r) if oracles.clique(H, c)}
    assert clique_graph(H, r).edge_set == frozenset(want)


@given(kgraphs(), st.integers(1, 2))
def test_shadow_of_clique_graph_inside_H(H, extra):
    r = H.k + extra
    if r > H.n:
        return
    K = clique_graph(H, r)
    if len(K):
        assert shadow(K, H.k).edge_set <= H.edge_set


@given(kgraphs(dense=True), st.data())
def test_clique_graph_monotone(H, data):
    if not len(H):
        return
    gone = data.draw(st.sets(st.sampled_from(sorted(H.edges)), max_size=3))
    G = remove_edges(H, gone)
    r = min(H.k + 1, H.n)
    assert clique_graph(G, r).edge_set <= clique_graph(H, r).edge_set


@given(kgraphs(dense=True))
def test_rdeg_bound_holds_and_actual_matches_oracle(H):
    for m in range(H.k - 1, min(H.n, H.k + 2)):
        for F in iter_cliques(H, m):
            actual, bound = rdeg_bound_check(H, F)
            assert actual == oracles.extension_count(H, F)
            assert actual >= bound


def test_rdeg_complete():
    actual, bound = rdeg_bound_check(complete_kgraph(8, 3), (0, 1, 2))
    assert actual == bound == 5


def test_rdeg_requires_clique():
    H = KGraph(5, 2, frozenset({(0, 1)}))
    with pytest.raises(PreconditionError):
        rdeg_bound_check(H, (0, 1, 2))


@given(kgraphs(dense=True))
def test_common_extenders_match_oracle(H):
    j = H.k
    seen = 0
    cliques = list(iter_cliques(H, j))
    for C1, C2 in combinations(cliques, 2):
        if len(set(C1) & set(C2)) != j - 1:
            continue
        got, bound = common_extenders(H, C1, C2)
        assert set(got) == oracles.common_extender_set(H, C1, C2)
        assert len(got) >= bound
        seen += 1
        if seen > 15:
            break


def test_common_extenders_preconditions():
    K = complete_kgraph(6, 2)
    with pytest.raises(PreconditionError):
        common_extenders(K, (0, 1), (2, 3))
    with pytest.raises(PreconditionError):
        common_extenders(K, (0, 1), (0, 1, 2))


def test_common_extenders_on_complete():
    K = complete_kgraph(9, 3)
    got, bound = common_extenders(K, (0, 1, 2), (0, 1, 3))
    assert got == frozenset(range(4, 9))
    assert bound == extender_lower_bound(K, 3) <= len(got)


def test_extender_bound_formula():
    # n - j - 1 - (C(j,k-1) + C(j-1,k-2)) (n - delta), complete 3-graph has delta = n - 2
    K = complete_kgraph(9, 3)
    assert extender_lower_bound(K, 3) == 9 - 3 - 1 - (comb(3, 2) + comb(2, 1)) * 2


@pytest.mark.parametrize("n,r", [(6, 2), (7, 3), (8, 4)])
def test_common_clique_count_complete(n, r):
    assert common_clique_count(complete_kgraph(n, 2), 0, 1, r) == comb(n - 2, r - 1)


def test_common_clique_count_rejects_equal_vertices():
    with pytest.raises(ParameterError):
        common_clique_count(complete_kgraph(5, 2), 1, 1, 3)


def test_rdeg_missing_edge_drops_bound_by_deficit():
    H = complete_kgraph(8, 3)
    F = (0, 1, 2)
    before = rdeg_bound_check(H, F)
    after = rdeg_bound_check(remove_edges(H, [(0, 1, 5)]), F)
    assert before == (5, 5)
    assert after == (4, 4)
