"""Clique r-graphs K_r(H) and the extension-counting bounds built on them."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import ceil, comb
from typing import Iterator, Sequence

from .errors import ParameterError, PreconditionError
from .hypercore import KGraph, as_bits, bits, degree_into, members, min_codegree


def _full(n: int) -> int:
    return (1 << n) - 1


def extension_bits(H: KGraph, C, anchors: Sequence = ()) -> int:
    """Vertices v outside C (and the anchors) such that C + A + {v} is a
    clique for every anchor A; with no anchors, such that C + {v} is.

    Only k-subsets containing v are tested, so the caller is responsible
    for C + A itself being a clique.
    """
    k = H.k
    C = tuple(C)
    groups = [C + tuple(A) for A in anchors] if anchors else [C]
    cand = _full(H.n)
    for g in groups:
        cand &= ~bits(g)
        if len(g) < k - 1:
            continue
        for f in combinations(sorted(g), k - 1):
            cand &= H.nbr(f)
            if not cand:
                return 0
    return cand


def iter_cliques(H: KGraph, size: int, within=None, anchors: Sequence = ()) -> Iterator[tuple]:
    """Yield the sorted ``size``-sets C inside ``within`` such that
    C + A is a clique of H for every anchor A (C itself when no anchors).

    Grows C in increasing vertex order and keeps a candidate bitset of
    vertices that complete every new k-subset.
    """
    k = H.k
    groups = [tuple(A) for A in anchors] if anchors else [()]
    start = _full(H.n) if within is None else as_bits(within)
    for A in groups:
        start &= ~bits(A)
        if len(A) >= k - 1:
            for f in combinations(sorted(A), k - 1):
                start &= H.nbr(f)
    nb = H.neighbourhoods

    def grow(C: list, cand: int):
        if len(C) == size:
            yield tuple(C)
            return
        for v in members(cand):
            new = cand & ~((1 << (v + 1)) - 1)
            if k >= 2:
                for A in groups:
                    base = sorted(C + list(A))
                    for g in combinations(base, k - 2):
                        new &= nb.get(tuple(sorted(g + (v,))), 0)
                        if not new:
                            break
                    if not new:
                        break
            if not new and len(C) + 1 < size:
                continue
            C.append(v)
            yield from grow(C, new)
            C.pop()

    if size == 0:
        yield ()
        return
    yield from grow([], start)


def clique_graph(H: KGraph, r: int) -> KGraph:
    """K_r(H): the r-graph whose edges are the r-cliques of H."""
    if r < H.k:
        raise ParameterError(f"r = {r} is below the uniformity {H.k}")
    if r == H.k:
        return H
    return KGraph(H.n, r, iter_cliques(H, r))


def rdeg_bound_check(H: KGraph, F) -> tuple[int, int]:
    """Return (actual, bound) for the (r-1)-clique F, r = |F| + 1.

    actual is the number of v with F + {v} an r-clique.  The bound
    discards, for every (k-1)-subset f of F, the vertices outside F that
    do not extend f; the codegree term is measured on V(H) - F.
    """
    F = tuple(sorted(F))
    if not H.is_clique(F):
        raise PreconditionError(f"{F} is not a clique")
    if len(F) < H.k - 1:
        raise PreconditionError("F must have at least k-1 vertices")
    n, m = H.n, len(F)
    actual = extension_bits(H, F).bit_count()
    outside = _full(n) & ~bits(F)
    bound = n - m - sum(n - m - degree_into(H, f, outside) for f in combinations(F, H.k - 1))
    return actual, bound


def common_extenders(H: KGraph, C1, C2) -> tuple[frozenset, int]:
    """(set of common extenders, counting lower bound) for two j-cliques
    meeting in j-1 vertices.

    The lower bound is n - j - 1 - (C(j,k-1) + C(j-1,k-2)) * (n - delta(H)).
    """
    C1, C2 = tuple(sorted(C1)), tuple(sorted(C2))
    j = len(C1)
    if len(C2) != j:
        raise PreconditionError("cliques of different sizes")
    if len(set(C1) & set(C2)) != j - 1:
        raise PreconditionError(f"|C1 & C2| = {len(set(C1) & set(C2))}, expected {j - 1}")
    if not (H.is_clique(C1) and H.is_clique(C2)):
        raise PreconditionError("inputs must be cliques")
    ext = extension_bits(H, C1) & extension_bits(H, C2)
    return frozenset(members(ext)), extender_lower_bound(H, j)


def extender_lower_bound(H: KGraph, j: int, delta: int | None = None) -> int:
    k, n = H.k, H.n
    if delta is None:
        delta = min_codegree(H)
    c2 = comb(j - 1, k - 2) if k >= 2 else 0
    return n - j - 1 - (comb(j, k - 1) + c2) * (n - delta)


def codegree_requirement(k: int, j: int, alpha: Fraction, n: int) -> int:
    """Smallest integer codegree meeting (1 - f_k(j+1) + alpha) n."""
    from .tilings import f_threshold
    return ceil((1 - f_threshold(k, j + 1) + alpha) * n)


def common_clique_count(H: KGraph, u: int, v: int, r: int) -> int:
    """Number of (r-1)-cliques C avoiding u, v with C+u and C+v r-cliques."""
    if u == v:
        raise ParameterError("u and v must differ")
    if r < H.k:
        raise ParameterError("r must be at least k")
    within = _full(H.n) & ~bits((u, v))
    return sum(1 for _ in iter_cliques(H, r - 1, within, anchors=[(u,), (v,)]))
