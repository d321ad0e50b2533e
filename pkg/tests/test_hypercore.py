from __future__ import annotations

import random
from itertools import combinations, permutations

import pytest
from hypothesis import given, strategies as st

from hyperpowers import oracles
from hyperpowers.errors import FormatError, ParameterError
from hyperpowers.hypercore import (
    KGraph, bits, codegree, complete_kgraph, degree_into, from_json, from_khg,
    in_ordered_shadow, is_isomorphic_bruteforce, k22_count, link_graph, members,
    min_codegree, random_kgraph, relabel, shadow, to_json, to_khg,
)


@st.composite
def kgraphs(draw, max_n=7):
    k = draw(st.integers(2, 3))
    n = draw(st.integers(k, max_n))
    all_edges = list(combinations(range(n), k))
    chosen = draw(st.lists(st.sampled_from(all_edges), unique=True)) if all_edges else []
    return KGraph(n, k, frozenset(chosen))


def test_bits_roundtrip():
    assert list(members(bits([0, 3, 5]))) == [0, 3, 5]
    assert bits([]) == 0


@given(kgraphs())
def test_khg_roundtrip(H):
    assert from_khg(to_khg(H)) == H


@given(kgraphs())
def test_json_roundtrip(H):
    assert from_json(to_json(H)) == H


@pytest.mark.parametrize("text,line", [
    ("4 2\n0 1 2\n", 2),        # wrong arity
    ("4 2\n0 0\n", 2),          # repeated vertex
    ("4 2\n0 9\n", 2),          # out of range
    ("4 2\n0 1\n# c\n1 0\n", 4),  # duplicate edge, comment line counted
    ("4 2 1\n", 1),              # header arity
    ("x\n", 1),
    ("# only a comment\n", None),
])
def test_parser_rejects_malformed(text, line):
    with pytest.raises(FormatError) as err:
        from_khg(text)
    if line is not None:
        assert err.value.line == line


def test_kgraph_rejects_bad_edges():
    with pytest.raises(ParameterError):
        KGraph(4, 2, frozenset({(0, 5)}))


def test_shadow_of_complete():
    K = complete_kgraph(6, 3)
    assert shadow(K, 2) == complete_kgraph(6, 2)


def test_codegree_complete():
    K = complete_kgraph(7, 3)
    assert codegree(K, (0, 1)) == 5
    assert min_codegree(K) == 5


@given(kgraphs())
def test_min_codegree_matches_oracle(H):
    assert min_codegree(H) == oracles.min_codegree(H)


@given(kgraphs())
def test_ordered_shadow_is_set_membership(H):
    for f in combinations(range(H.n), H.k - 1):
        inside = any(set(f) <= set(e) for e in H.edges)
        assert in_ordered_shadow(H, f[::-1]) == inside


@given(kgraphs(), st.data())
def test_degree_into_recount(H, data):
    W = data.draw(st.sets(st.integers(0, H.n - 1)))
    for f in combinations(range(H.n), H.k - 1):
        want = sum(1 for w in W if w not in f and tuple(sorted(f + (w,))) in H.edge_set)
        assert degree_into(H, f, W) == want


def _k22_brute(H, e, W):
    """Ordered partner tuples (y_1..y_k) in W, distinct, off e, such that
    replacing any nonempty proper subset of e's positions keeps an edge."""
    e = tuple(sorted(e))
    k = H.k
    pool = [w for w in (W if W is not None else range(H.n)) if w not in e]
    count = 0
    for ys in permutations(pool, k):
        ok = True
        for mask in range(1 << k):
            mixed = tuple(sorted(ys[i] if mask >> i & 1 else e[i] for i in range(k)))
            if mixed not in H.edge_set:
                ok = False
                break
        count += ok
    return count


@given(kgraphs(max_n=6))
def test_k22_count_matches_brute_force(H):
    for e in sorted(H.edges)[:3]:
        assert k22_count(H, e) == _k22_brute(H, e, None)


def test_k22_count_k4_edge():
    K4 = complete_kgraph(4, 2)
    # partners (2,3) and (3,2) are distinct copies
    assert k22_count(K4, (0, 1)) == 2


def test_link_graph_complete():
    L = link_graph(complete_kgraph(5, 3), 0)
    assert L.k == 2
    assert len(L) == 6
    assert all(0 not in e for e in L.edges)


@given(kgraphs(), st.randoms(use_true_random=False))
def test_relabel_preserves_isomorphism_class(H, r):
    perm = list(range(H.n))
    r.shuffle(perm)
    G = relabel(H, perm)
    assert len(G) == len(H)
    assert min_codegree(G) == min_codegree(H)
    if H.n <= 6:
        assert is_isomorphic_bruteforce(G, H)


def test_random_kgraph_deterministic():
    a = random_kgraph(8, 3, 0.5, random.Random(7))
    b = random_kgraph(8, 3, 0.5, random.Random(7))
    assert a == b
