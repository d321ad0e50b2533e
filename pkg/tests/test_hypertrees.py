from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from hyperpowers.errors import FormatError, NotFound, ParameterError, PreconditionError
from hyperpowers.hypercore import KGraph, complete_kgraph
from hyperpowers.hypertrees import (
    Layering, RTree, admits, compute_layering, cut_at_first_layer, find_small_subtree,
    induced_subtree, layered_rank, layered_tuples, layering_from_text, layering_to_text,
    layering_violation, max_vertex_degree, product_width, random_rtree, rtree_from_text,
    rtree_from_unordered, rtree_to_text, small_subtree_window, strong_product,
    strong_product_decomposition, tight_path_rtree, validate_rtree,
)


def _layering_ok(T, L):
    """Direct restatement of the layering conditions."""
    r = T.r
    where = {}
    for i, layer in enumerate(L.layers, 1):
        for v in layer:
            if v in where:
                return False
            where[v] = i
    if set(where) != set(T.vertex_set) or len(L.layers[0]) != 1:
        return False
    if any(where[x] != i + 1 for i, x in enumerate(L.root)):
        return False
    for e in T.edges:
        idx = sorted(where[v] for v in e)
        if any(idx[t + 1] != idx[t] + 1 for t in range(r - 1)):
            return False
    for v, i in where.items():
        if i > 1 and not any(v in e and any(where[w] == i - 1 for w in e) for e in T.edges):
            return False
    return True


@st.composite
def rtrees(draw, max_n=9):
    r = draw(st.integers(2, 4))
    n = draw(st.integers(r, max_n))
    seed = draw(st.integers(0, 2**31))
    return random_rtree(n, r, random.Random(seed))


# validation

def test_single_edge_is_valid():
    assert validate_rtree(RTree(3, ((0, 1, 2),))) is None


@pytest.mark.parametrize("r", [3, 4])
def test_loose_path_fails_t2(r):
    e1 = tuple(range(r))
    e2 = (r - 1,) + tuple(range(r, 2 * r - 1))
    bad = validate_rtree(RTree(r, (e1, e2)))
    assert bad is not None and bad.edge_index == 1


@given(st.integers(2, 5), st.integers(0, 6), st.randoms(use_true_random=False))
def test_tight_path_is_valid(r, extra, rnd):
    seq = list(range(r + extra))
    rnd.shuffle(seq)
    assert validate_rtree(tight_path_rtree(seq, r)) is None


def test_t1_violation_reported():
    bad = validate_rtree(RTree(3, ((0, 1, 2), (3, 4, 5))))
    assert bad.rule == "T1"


@given(rtrees())
def test_random_trees_valid_and_reorderable(T):
    assert validate_rtree(T) is None
    shuffled = list(T.edge_sets)
    random.Random(len(shuffled)).shuffle(shuffled)
    U = rtree_from_unordered(T.r, shuffled)
    assert U is not None and validate_rtree(U) is None
    assert set(U.edge_sets) == set(T.edge_sets)


def test_unordered_loose_path_has_no_ordering():
    assert rtree_from_unordered(3, [{0, 1, 2}, {2, 3, 4}]) is None


def test_max_vertex_degree_examples():
    assert max_vertex_degree(RTree(3, ((0, 1, 2),))) == 1
    P = tight_path_rtree(range(10), 3)
    assert max_vertex_degree(P) == 3
    star = RTree(3, ((0, 1, 2), (0, 1, 3), (0, 1, 4), (0, 1, 5)))
    assert max_vertex_degree(star) == 4


def test_admits():
    T = tight_path_rtree(range(5), 3)
    G = KGraph(5, 2, frozenset({(0, 1), (1, 3), (2, 4)}))
    assert admits(G, T, 2)
    assert not admits(KGraph(5, 2, frozenset({(0, 4)})), T, 2)


@given(rtrees())
def test_rtree_text_roundtrip(T):
    assert rtree_from_text(rtree_to_text(T)) == T


def test_rtree_text_rejects_invalid_order():
    with pytest.raises(FormatError):
        rtree_from_text("5 3\n0 1 2\n2 3 4\n")


# layerings

@given(st.integers(2, 4), st.integers(0, 6))
def test_tight_path_layering_is_trivial(r, extra):
    seq = list(range(r + extra))
    T = tight_path_rtree(seq, r)
    L = compute_layering(T, seq[: r - 1])
    assert L.layers == tuple(frozenset({v}) for v in seq)


@given(rtrees())
def test_compute_layering_valid(T):
    x = T.edges[0][: T.r - 1]
    L = compute_layering(T, x)
    assert _layering_ok(T, L)
    assert layering_violation(T, L) is None


@given(rtrees(), st.data())
def test_compute_layering_any_root(T, data):
    e = data.draw(st.sampled_from(T.edges))
    x = tuple(data.draw(st.permutations(e))[: T.r - 1])
    assert _layering_ok(T, compute_layering(T, x))


def test_layering_rejects_foreign_root():
    T = tight_path_rtree(range(5), 3)
    with pytest.raises(PreconditionError):
        compute_layering(T, (0, 4))


def test_layering_text_roundtrip():
    T = tight_path_rtree(range(6), 3)
    L = compute_layering(T, (0, 1))
    assert layering_from_text(layering_to_text(L), (0, 1)) == L


def test_layered_rank_examples():
    T = tight_path_rtree(range(6), 3)
    L = compute_layering(T, (0, 1))
    assert layered_rank(T, L, (0, 1)) == 1
    star = RTree(3, ((0, 1, 2), (0, 1, 3)))
    Ls = compute_layering(star, (0, 1))
    # 2 and 3 share a layer
    assert Ls.index[2] == Ls.index[3]
    assert layered_rank(star, Ls, (2, 3)) is None


@given(rtrees())
def test_layered_rank_matches_definition(T):
    L = compute_layering(T, T.edges[0][: T.r - 1])
    where = L.index
    for e in T.edges:
        for f in combinations(e, T.r - 1):
            for s in (f, f[::-1]):
                idx = [where[v] for v in s]
                want = idx[0] if all(idx[i] == idx[0] + i for i in range(len(s))) else None
                assert layered_rank(T, L, s) == want


# subtrees and cuts

def test_subtree_of_root_is_whole_path():
    T = tight_path_rtree(range(7), 3)
    L = compute_layering(T, (0, 1))
    sub = induced_subtree(T, L, (0, 1))
    assert sorted(sub.edge_ids) == list(range(len(T.edges)))
    assert sub.rest_ids == []


def test_leaf_adjacent_subtree_is_single_edge():
    T = tight_path_rtree(range(7), 3)
    L = compute_layering(T, (0, 1))
    sub = induced_subtree(T, L, (4, 5))
    assert [T.edges[i] for i in sub.edge_ids] == [(4, 5, 6)]


@given(rtrees())
def test_subtree_partitions_edges(T):
    L = compute_layering(T, T.edges[0][: T.r - 1])
    for s in layered_tuples(T, L)[:6]:
        sub = induced_subtree(T, L, s)
        assert sorted(sub.edge_ids + sub.rest_ids) == list(range(len(T.edges)))
        if sub.tree is not None:
            assert validate_rtree(sub.tree) is None
            assert set(sub.tree.edge_sets) == {T.edge_sets[i] for i in sub.edge_ids}


def test_cut_single_edge():
    T = RTree(3, ((0, 1, 2),))
    L = compute_layering(T, (0, 1))
    cut = cut_at_first_layer(T, L)
    assert cut.first_layer_edges == [0]
    assert cut.tuples == [(1, 2)]
    assert layered_rank(T, L, (1, 2)) == 2


def test_cut_tight_path_takes_edges_through_first_vertex():
    T = tight_path_rtree(range(8), 3)
    L = compute_layering(T, (0, 1))
    cut = cut_at_first_layer(T, L)
    assert [T.edges[i] for i in cut.first_layer_edges] == [e for e in T.edges if 0 in e]


@given(rtrees())
def test_cut_partitions_edges(T):
    L = compute_layering(T, T.edges[0][: T.r - 1])
    cut = cut_at_first_layer(T, L)
    parts = list(cut.first_layer_edges) + [i for s in cut.tuples for i in cut.subtrees[s]]
    assert sorted(parts) == list(range(len(T.edges)))
    assert len(cut.first_layer_edges) <= max_vertex_degree(T)


def test_small_subtree_on_path():
    T = tight_path_rtree(range(12), 3)
    L = compute_layering(T, (0, 1))
    sub = find_small_subtree(T, L, Fraction(1, 2), max_vertex_degree(T))
    lo, hi = small_subtree_window(12, Fraction(1, 2), 3)
    assert lo <= len(sub.edge_ids) <= hi
    assert 0 not in sub.tuple and 11 not in sub.tuple


def test_small_subtree_empty_window():
    T = tight_path_rtree(range(6), 3)
    L = compute_layering(T, (0, 1))
    with pytest.raises(NotFound):
        find_small_subtree(T, L, Fraction(1, 10), 3)


@given(rtrees(max_n=12), st.sampled_from([Fraction(1, 2), Fraction(2, 3), Fraction(1)]))
def test_small_subtree_size_in_window(T, gamma):
    L = compute_layering(T, T.edges[0][: T.r - 1])
    D = max_vertex_degree(T)
    try:
        sub = find_small_subtree(T, L, gamma, D)
    except NotFound:
        return
    lo, hi = small_subtree_window(T.n, gamma, D)
    assert lo <= len(sub.edge_ids) <= hi


# strong products

def test_strong_product_single_vertex():
    G, D = strong_product_decomposition(KGraph(1, 2, frozenset()), 3)
    assert G == complete_kgraph(3, 2)
    assert len(D.edges) == 1 and set(D.edges[0]) == {0, 1, 2}


def test_strong_product_edge_m2():
    G, D = strong_product_decomposition(KGraph(2, 2, frozenset({(0, 1)})), 2)
    assert G == complete_kgraph(4, 2)
    assert D.r == 4 and len(D.edges) == 1


def test_strong_product_rejects_non_tree():
    C3 = complete_kgraph(3, 2)
    with pytest.raises(PreconditionError):
        strong_product_decomposition(C3, 2)
    with pytest.raises(ParameterError):
        strong_product_decomposition(KGraph(2, 2, frozenset({(0, 1)})), 0)


def _random_tree(n, rng):
    return KGraph(n, 2, frozenset(tuple(sorted((v, rng.randrange(v)))) for v in range(1, n)))


@given(st.integers(1, 6), st.integers(1, 4), st.integers(0, 2**31))
def test_strong_product_decomposition_covers(nT, m, seed):
    T2 = _random_tree(nT, random.Random(seed))
    G, D = strong_product_decomposition(T2, m)
    assert validate_rtree(D) is None
    assert D.r == 2 * m or nT == 1
    covered = {tuple(sorted(p)) for e in D.edges for p in combinations(e, 2)}
    assert G.edge_set <= covered
    assert admits(G, D, 2)
    # independent edge count: blobs plus complete bipartite joins
    assert len(G) == nT * m * (m - 1) // 2 + (nT - 1) * m * m


def test_strong_product_is_blowup():
    G = strong_product(KGraph(3, 2, frozenset({(0, 1), (1, 2)})), 2)
    assert (0, 1) in G.edge_set and (1, 2) in G.edge_set and (0, 4) not in G.edge_set


def test_product_width_formula():
    assert product_width(3, 2, 2) == (144, 288)
