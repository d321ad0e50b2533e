"""Brute-force reference implementations.

Each function here recomputes something the main modules compute, by
the most direct method available and without sharing their search
code.  Only usable at very small sizes.
"""

from __future__ import annotations

from itertools import combinations, product
from math import gcd

from .hypercore import KGraph


def clique(H: KGraph, vs) -> bool:
    vs = list(vs)
    if len(set(vs)) != len(vs):
        return False
    es = H.edge_set
    return all(tuple(sorted(c)) in es for c in combinations(vs, H.k))


def extension_count(H: KGraph, F) -> int:
    F = list(F)
    return sum(1 for v in range(H.n) if v not in F and clique(H, F + [v]))


def common_extender_set(H: KGraph, C1, C2) -> set:
    both = set(C1) | set(C2)
    return {v for v in range(H.n)
            if v not in both and clique(H, list(C1) + [v]) and clique(H, list(C2) + [v])}


def min_codegree(H: KGraph) -> int:
    es = H.edge_set
    return min(sum(1 for v in range(H.n) if v not in f and tuple(sorted(f + (v,))) in es)
               for f in combinations(range(H.n), H.k - 1))


# integer lattices via determinantal divisors

def _bareiss(m: list) -> tuple[int, int]:
    """(rank, last nonzero pivot) by fraction-free elimination; for a
    square full-rank matrix the pivot is the determinant up to sign."""
    m = [list(r) for r in m]
    rows = len(m)
    cols = len(m[0]) if m else 0
    prev = 1
    rank = 0
    sign = 1
    for c in range(cols):
        piv = next((i for i in range(rank, rows) if m[i][c]), None)
        if piv is None:
            continue
        if piv != rank:
            m[rank], m[piv] = m[piv], m[rank]
            sign = -sign
        for i in range(rank + 1, rows):
            m[i] = [(m[rank][c] * m[i][j] - m[i][c] * m[rank][j]) // prev for j in range(cols)]
        prev = m[rank][c]
        rank += 1
    return rank, sign * prev


def _det(m: list) -> int:
    if not m:
        return 1
    rank, piv = _bareiss(m)
    return piv if rank == len(m) else 0


def _rank(rows: list) -> int:
    return _bareiss(rows)[0] if rows else 0


def _divisor(rows: list, rho: int) -> int:
    g = 0
    t = len(rows[0])
    for rs in combinations(range(len(rows)), rho):
        for cs in combinations(range(t), rho):
            g = gcd(g, _det([[rows[i][j] for j in cs] for i in rs]))
            if g == 1:
                return 1
    return g


class LatticeOracle:
    """Membership in the integer span of rows, decided by comparing rank
    and the gcd of maximal minors before and after adding v."""

    def __init__(self, t: int, rows):
        self.t = t
        self.rows = [list(r) for r in rows if any(r)]
        self.rho = _rank(self.rows) if self.rows else 0
        self.d = _divisor(self.rows, self.rho) if self.rho else 1

    def contains(self, v) -> bool:
        v = list(v)
        if not any(v):
            return True
        if not self.rows:
            return False
        ext = self.rows + [v]
        if _rank(ext) != self.rho:
            return False
        return _divisor(ext, self.rho) == self.d


def kvectors(t: int, k: int) -> list:
    return [c for c in product(range(k + 1), repeat=t) if sum(c) == k]


# matchings

def has_k3_factor(G: KGraph) -> bool:
    """Graph on 6 vertices: split into two triangles."""
    es = G.edge_set
    rest = list(range(1, G.n))
    for a, b in combinations(rest, 2):
        T1 = (0, a, b)
        T2 = [v for v in rest if v not in (a, b)]
        if all(tuple(sorted(c)) in es for c in combinations(T1, 2)) and \
                all(tuple(sorted(c)) in es for c in combinations(T2, 2)):
            return True
    return False


def window_windows_ok(H: KGraph, seq, r: int) -> bool:
    """Cyclic version of the power validator written with modular windows."""
    n = len(seq)
    if len(set(seq)) != n:
        return False
    for s in range(n):
        w = [seq[(s + i) % n] for i in range(min(r, n))]
        if not clique(H, w):
            return False
    return True
