from __future__ import annotations

import random
from collections import Counter
from fractions import Fraction
from itertools import combinations, permutations, product

import pytest
from hypothesis import given, strategies as st

from hyperpowers import oracles
from hyperpowers.cliquegraph import clique_graph
from hyperpowers.cyclewalks import (
    CyclePowerSpec, connect_pair, connecting_walk_histogram, cycle_power,
    enumerate_connecting_walks, find_power_cycle, find_power_path, first_bad_window,
    is_connecting, is_power_cycle, is_walk, lift_walk, path_power, walk_parts,
)
from hyperpowers.errors import LiftFailure, NotFound, ParameterError, PreconditionError
from hyperpowers.hypercore import KGraph, complete_kgraph, random_kgraph, relabel


def _windows_union(n, k, w, cyclic):
    """Independent window enumeration: union of k-subsets of each window."""
    if w >= n:
        return set(combinations(range(n), k))
    out = set()
    for s in range(n if cyclic else n - w + 1):
        win = [(s + t) % n for t in range(w)]
        for c in combinations(win, k):
            out.add(tuple(sorted(c)))
    return out


# powers of cycles and paths

def test_tight_cycle_on_five():
    C = cycle_power(CyclePowerSpec(5, 3, 1))
    assert C.edge_set == frozenset(tuple(sorted((i, (i + 1) % 5, (i + 2) % 5))) for i in range(5))


def test_cycle_power_six_three_two():
    C = cycle_power(CyclePowerSpec(6, 3, 2))
    assert C.edge_set == frozenset(_windows_union(6, 3, 4, True))


@pytest.mark.parametrize("r,k", [(4, 3), (5, 2), (5, 3)])
def test_cycle_power_full_window_is_complete(r, k):
    assert cycle_power(CyclePowerSpec(r, k, r - k + 1)) == complete_kgraph(r, k)


def test_path_power_small():
    assert len(path_power(5, 3, 1)) == 3
    assert path_power(7, 3, 2).edge_set == frozenset(_windows_union(7, 3, 4, False))


@given(st.integers(3, 9), st.integers(2, 4), st.integers(1, 3))
def test_path_power_inside_cycle_power(n, k, j):
    if n < k:
        return
    assert path_power(n, k, j).edge_set <= cycle_power(CyclePowerSpec(n, k, j)).edge_set


@given(st.integers(3, 10), st.integers(2, 3), st.integers(1, 3), st.integers(0, 9), st.booleans())
def test_cycle_power_dihedral_symmetry(n, k, j, shift, flip):
    if n < k:
        return
    C = cycle_power(CyclePowerSpec(n, k, j))
    perm = [((-v if flip else v) + shift) % n for v in range(n)]
    assert relabel(C, perm) == C


@given(st.integers(2, 3), st.integers(1, 3), st.integers(1, 3))
def test_cycle_power_clique_tiling(k, j, blocks):
    r = k + j - 1
    n = r * blocks
    if n < k:
        return
    C = cycle_power(CyclePowerSpec(n, k, j))
    for b in range(blocks):
        assert oracles.clique(C, range(b * r, (b + 1) * r))


def test_identity_order_is_power_cycle():
    C = cycle_power(CyclePowerSpec(9, 3, 2))
    assert is_power_cycle(C, list(range(9)), 4)
    assert oracles.window_windows_ok(C, list(range(9)), 4)


# walks

def test_walks_in_complete_graph():
    K = complete_kgraph(6, 3)
    assert is_walk(K, [0, 1, 2, 3, 4, 5, 0, 1])


def test_bad_window_reported():
    K = KGraph(5, 3, frozenset({(0, 1, 2), (1, 2, 3)}))
    assert first_bad_window(K, [0, 1, 2, 3, 4]) == 2
    assert not is_walk(K, [0, 1, 2, 3, 4])


def test_short_sequence_rejected():
    with pytest.raises(ParameterError):
        is_walk(complete_kgraph(4, 3), [0, 1])
    with pytest.raises(ParameterError):
        walk_parts([0, 1, 2], 3)


@given(st.lists(st.integers(0, 9), min_size=4, max_size=12), st.integers(2, 3))
def test_walk_parts_sizes(seq, k):
    if len(seq) < 2 * (k - 1):
        return
    s, e, inner = walk_parts(seq, k)
    assert s == tuple(seq[:k - 1]) and e == tuple(seq[-(k - 1):])
    if len(set(seq)) == len(seq):
        assert len(inner) == len(seq) - 2 * (k - 1)
    assert len(inner) <= len(seq) - 2 * (k - 1) or len(set(seq)) < len(seq)


# connecting walks

def _transition_count(K, v1, v2, length, forbidden=()):
    """Total walk count via a dynamic program on ordered (k-1)-tuples."""
    k = K.k
    avoid = set(v1) | set(v2) | set(forbidden)
    total = length + k - 1
    fixed = {i: x for i, x in enumerate(v1)}
    for i, x in enumerate(v2):
        p = length + i
        if p in fixed and fixed[p] != x:
            return 0
        fixed[p] = x
    states = Counter({tuple(v1): 1})
    for pos in range(k - 1, total):
        nxt = Counter()
        opts = [fixed[pos]] if pos in fixed else [v for v in range(K.n) if v not in avoid]
        for st_, c in states.items():
            for v in opts:
                w = st_ + (v,)
                if len(set(w)) == k and tuple(sorted(w)) in K.edge_set:
                    nxt[w[1:]] += c
        states = nxt
    return sum(states.values())


def _product_histogram(K, v1, v2, length, forbidden=()):
    """Brute force over all fillings of the free positions."""
    k = K.k
    total = length + k - 1
    frame = [None] * total
    for i, x in enumerate(v1):
        frame[i] = x
    for i, x in enumerate(v2):
        if frame[length + i] not in (None, x):
            return Counter()
        frame[length + i] = x
    free = [i for i, x in enumerate(frame) if x is None]
    pool = [v for v in range(K.n) if v not in set(v1) | set(v2) | set(forbidden)]
    hist = Counter()
    for fill in product(pool, repeat=len(free)):
        seq = list(frame)
        for i, v in zip(free, fill):
            seq[i] = v
        if is_walk(K, seq):
            hist[len(set(fill))] += 1
    return hist


@pytest.mark.parametrize("n,k,length", [(6, 2, 3), (6, 3, 4), (7, 3, 5)])
def test_connecting_walks_complete_two_counters(n, k, length):
    K = complete_kgraph(n, k)
    v1, v2 = tuple(range(k - 1)), tuple(range(k - 1, 2 * k - 2))
    hist = connecting_walk_histogram(K, v1, v2, length)
    assert sum(hist.values()) == _transition_count(K, v1, v2, length)
    assert hist == _product_histogram(K, v1, v2, length)


@given(st.integers(0, 2**31), st.integers(3, 5))
def test_connecting_walks_random_matches_brute(seed, length):
    K = random_kgraph(6, 3, 0.7, random.Random(seed))
    shadow_pairs = [f for f in combinations(range(6), 2) if K.nbr(f)]
    if len(shadow_pairs) < 2:
        return
    v1 = shadow_pairs[0]
    v2 = next((f for f in shadow_pairs if not set(f) & set(v1)), None)
    if v2 is None:
        return
    fb = {5} - set(v1) - set(v2)
    hist = connecting_walk_histogram(K, v1, v2, length, forbidden=fb)
    assert hist == _product_histogram(K, v1, v2, length, forbidden=fb)
    for q, c in hist.items():
        assert enumerate_connecting_walks(K, v1, v2, length, q, fb).count == c
        assert enumerate_connecting_walks(K, v1, v2, length, q, fb, witnesses=True).count == c


@given(st.integers(0, 2**31), st.randoms(use_true_random=False))
def test_connecting_walks_relabel_invariant(seed, r):
    K = random_kgraph(7, 2, 0.6, random.Random(seed))
    if not K.edges:
        return
    v1, v2 = (0,), (1,)
    if not (K.nbr(v1) and K.nbr(v2)):
        return
    perm = list(range(7))
    r.shuffle(perm)
    L = relabel(K, perm)
    a = connecting_walk_histogram(K, v1, v2, 4, forbidden={2})
    b = connecting_walk_histogram(L, (perm[0],), (perm[1],), 4, forbidden={perm[2]})
    assert a == b


def test_walks_between_components_zero():
    K = KGraph(6, 2, frozenset({(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)}))
    assert sum(connecting_walk_histogram(K, (0,), (3,), 4).values()) == 0


def test_walk_length_zero_rejected():
    with pytest.raises(ParameterError):
        enumerate_connecting_walks(complete_kgraph(5, 2), (0,), (1,), 0, 0)


def test_is_connecting_complete():
    ok, q = is_connecting(complete_kgraph(8, 2), Fraction(1, 4), 4)
    assert ok and q is not None and q <= 4


def test_is_connecting_two_components():
    K = KGraph(8, 2, frozenset(combinations(range(4), 2)) | frozenset(combinations(range(4, 8), 2)))
    assert is_connecting(K, Fraction(1, 100), 4) == (False, None)


def test_is_connecting_rechecked_at_longer_length():
    K = complete_kgraph(7, 2)
    for ell in (3, 4):
        ok, q = is_connecting(K, Fraction(1, 4), ell)
        ok2, _ = is_connecting(K, Fraction(1, 4), ell + 1)
        assert ok and ok2


# lifting

@pytest.mark.parametrize("n,k,i,ell", [(9, 2, 3, 3), (10, 2, 3, 5), (10, 3, 4, 5)])
def test_lift_on_complete_graph(n, k, i, ell):
    H = complete_kgraph(n, k)
    W = list(range(ell + i - 2))
    out = lift_walk(H, W, i)
    K = clique_graph(H, i)
    assert is_walk(K, out)
    assert len(out) - i + 1 == i * (ell - i + 1)


def test_lift_blocker_fails_at_first_position():
    # path 0-1-2-3; 4 completes {0,1} and 5 completes {1,2} but nothing completes both
    edges = {(0, 1), (1, 2), (2, 3), (0, 4), (1, 4), (1, 5), (2, 5), (2, 6), (3, 6)}
    H = KGraph(7, 2, frozenset(edges))
    with pytest.raises(LiftFailure) as err:
        lift_walk(H, [0, 1, 2, 3], 3)
    assert err.value.position == 1


def test_lift_rejects_non_walk():
    H = KGraph(5, 2, frozenset({(0, 1), (1, 2)}))
    with pytest.raises(PreconditionError):
        lift_walk(H, [0, 1, 2, 3], 3)


@given(st.integers(0, 2**31))
def test_lift_output_is_walk_or_failure_is_genuine(seed):
    rng = random.Random(seed)
    H = random_kgraph(9, 2, 0.75, rng)
    W = [rng.randrange(9)]
    for _ in range(4):
        nb = [v for v in range(9) if v != W[-1] and tuple(sorted((v, W[-1]))) in H.edge_set]
        if not nb:
            return
        W.append(rng.choice(nb))
    forbidden = {rng.randrange(9)}
    try:
        out = lift_walk(H, W, 3, forbidden)
    except LiftFailure as e:
        t = e.position - 1
        common = oracles.common_extender_set(H, W[t:t + 2], W[t + 1:t + 3])
        assert not (common - set(W) - forbidden)
        return
    assert is_walk(clique_graph(H, 3), out)
    new = set(out) - set(W)
    assert not new & forbidden


# power paths and cycles

def _is_power_path_brute(H, seq, r):
    return len(set(seq)) == len(seq) and all(
        oracles.clique(H, seq[s:s + r]) for s in range(max(1, len(seq) - r + 1)))


def test_connect_pair_complete():
    H = complete_kgraph(10, 3)
    P = connect_pair(H, 3, (0, 1), (2, 3), ell=6)
    assert len(P) == 6 + 3 - 1
    assert P[:2] == (0, 1) and P[-2:] == (2, 3)
    assert _is_power_path_brute(H, P, 3)


def test_connect_pair_overlap_rejected():
    with pytest.raises(PreconditionError):
        connect_pair(complete_kgraph(8, 3), 3, (0, 1), (1, 2), ell=5)


def test_connect_pair_everything_avoided():
    H = complete_kgraph(8, 3)
    with pytest.raises(NotFound):
        connect_pair(H, 3, (0, 1), (2, 3), U=range(4, 8), ell=5)


@given(st.integers(0, 2**31), st.integers(4, 7))
def test_connect_pair_output_contract(seed, ell):
    rng = random.Random(seed)
    H = random_kgraph(9, 2, 0.7, rng)
    U = {8}
    try:
        P = connect_pair(H, 3, (0, 1), (2, 3), U, ell=ell)
    except (NotFound, PreconditionError):
        return
    assert len(P) == ell + 2
    assert P[:2] == (0, 1) and P[-2:] == (2, 3)
    assert not set(P) & U
    assert _is_power_path_brute(H, P, 3)


def _cycle_brute(H, r):
    n = H.n
    for rest in permutations(range(1, n)):
        if oracles.window_windows_ok(H, (0,) + rest, r):
            return True
    return False


@given(st.integers(0, 2**31), st.integers(5, 7), st.sampled_from([(2, 2), (2, 3), (3, 3), (3, 4)]))
def test_find_power_cycle_matches_permutation_brute_force(seed, n, kr):
    k, r = kr
    H = random_kgraph(n, k, 0.75, random.Random(seed))
    got = find_power_cycle(H, r)
    assert (got is not None) == _cycle_brute(H, r)
    if got is not None:
        assert sorted(got) == list(range(n))
        assert oracles.window_windows_ok(H, got, r)


def test_find_power_path_complete():
    H = complete_kgraph(6, 3)
    P = find_power_path(H, 4, range(6))
    assert sorted(P) == list(range(6)) and _is_power_path_brute(H, P, 4)
