"""Clique-tiling thresholds, H-matchings, index-vector lattices and
divisibility barriers, bounded colourings, and uniform density."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from math import ceil, comb
from typing import Sequence

from .errors import NotFound, ParameterError, PreconditionError
from .hypercore import KGraph, bits, members


def f_threshold(k: int, j: int) -> Fraction:
    """1 / (C(j-1, k-1) + C(j-2, k-2))."""
    if k < 2:
        raise ParameterError("f_k needs k >= 2")
    if j < k:
        raise ParameterError(f"f_k(j) needs j >= k, got j = {j}, k = {k}")
    return Fraction(1, comb(j - 1, k - 1) + comb(j - 2, k - 2))


def binomial_inequality_check(r: int, k: int) -> bool:
    """i (C(r-1,k-1) + C(r-2,k-2)) >= r C(i,k-1) for 0 <= i < r."""
    if not 3 <= k <= r:
        raise ParameterError("need r >= k >= 3")
    s = comb(r - 1, k - 1) + comb(r - 2, k - 2)
    return all(i * s >= r * comb(i, k - 1) for i in range(r))


def down_closure(J: KGraph) -> list:
    """levels[i] = set of i-subsets of edges of J (sorted tuples)."""
    levels = [set() for _ in range(J.k + 1)]
    for e in J.edges:
        for i in range(J.k + 1):
            levels[i].update(combinations(e, i))
    return levels


def complex_degrees(J: KGraph) -> list:
    """delta_0 .. delta_{r-1} of the down-closure of J; None if J is empty."""
    r = J.k
    if not J.edges:
        return [None] * r
    levels = down_closure(J)
    out = []
    for i in range(r):
        up = Counter()
        for e in levels[i + 1]:
            for j in range(i + 1):
                up[e[:j] + e[j + 1:]] += 1
        out.append(min(up[e] for e in levels[i]))
    return out


def degree_chain(H: KGraph, r: int, alpha: Fraction) -> list:
    """Lower bounds for the complex degrees of K_r(H), one row per i.

    Each row is (i, actual, first, last) where ``first`` counts the
    non-extensions of every (k-1)-subset outside the i-set,
    n - i - C(i,k-1)(n - k + 1 - delta(H)), and ``last`` is
    (1 - i/r + alpha) n.  The last bound follows from the first under
    the codegree hypothesis once n is large; callers compare.
    """
    from .cliquegraph import clique_graph
    from .hypercore import min_codegree

    k, n = H.k, H.n
    delta = min_codegree(H)
    degs = complex_degrees(clique_graph(H, r))
    rows = []
    for i in range(r):
        first = n - i - comb(i, k - 1) * (n - k + 1 - delta)
        last = (1 - Fraction(i, r) + alpha) * n
        rows.append((i, degs[i], first, last))
    return rows


@dataclass(frozen=True)
class VertexPartition:
    parts: tuple  # tuple of frozensets

    def __post_init__(self):
        seen: set = set()
        for p in self.parts:
            if not p:
                raise ParameterError("empty part")
            if seen & p:
                raise ParameterError("parts overlap")
            seen |= p

    @staticmethod
    def of(parts) -> "VertexPartition":
        return VertexPartition(tuple(frozenset(p) for p in parts))

    @property
    def ground(self) -> frozenset:
        return frozenset().union(*self.parts)

    def part_of(self) -> dict:
        return {v: i for i, p in enumerate(self.parts) for v in p}


def index_vector(P: VertexPartition, S) -> tuple:
    where = P.part_of()
    vec = [0] * len(P.parts)
    for v in S:
        if v not in where:
            raise ParameterError(f"vertex {v} is not in the ground set")
        vec[where[v]] += 1
    return tuple(vec)


def edge_vector_counts(G: KGraph, P: VertexPartition) -> Counter:
    return Counter(index_vector(P, e) for e in G.edges)


def robust_edge_vectors(G: KGraph, P: VertexPartition, mu) -> set:
    mu = Fraction(mu)
    threshold = mu * G.n ** G.k
    return {v for v, c in edge_vector_counts(G, P).items() if c >= threshold}


def kvectors(t: int, k: int):
    """All nonnegative integer vectors of length t with sum k."""
    for combo in product(range(k + 1), repeat=t):
        if sum(combo) == k:
            yield combo


def unit(t: int, i: int) -> tuple:
    return tuple(1 if j == i else 0 for j in range(t))


class IndexLattice:
    """Integer span of a set of vectors in Z^t, kept in row echelon
    (Hermite-style) form for membership tests."""

    def __init__(self, t: int, generators):
        if t < 1:
            raise ParameterError("dimension must be positive")
        self.t = t
        self.generators = [tuple(g) for g in generators]
        for g in self.generators:
            if len(g) != t:
                raise ParameterError(f"generator {g} is not of length {t}")
        self.basis = _echelon(self.generators, t)

    def contains(self, v) -> bool:
        v = list(v)
        for row in self.basis:
            p = next(i for i, x in enumerate(row) if x)
            if v[p] % row[p]:
                return False
            q = v[p] // row[p]
            v = [a - q * b for a, b in zip(v, row)]
        return not any(v)

    def is_complete(self, k: int) -> bool:
        return all(self.contains(v) for v in kvectors(self.t, k))

    def find_transferral(self) -> tuple | None:
        for i, j in permutations(range(self.t), 2):
            d = [0] * self.t
            d[i], d[j] = 1, -1
            if self.contains(d):
                return (i, j)
        return None


def _echelon(rows, t: int) -> list:
    """Integer row reduction with gcd steps; returns nonzero rows with
    strictly increasing pivot columns."""
    rows = [list(r) for r in rows if any(r)]
    basis = []
    col = 0
    while rows and col < t:
        with_col = [r for r in rows if r[col]]
        rest = [r for r in rows if not r[col]]
        while len(with_col) > 1:
            with_col.sort(key=lambda r: abs(r[col]))
            piv = with_col[0]
            nxt = [piv]
            for r in with_col[1:]:
                q = r[col] // piv[col]
                r2 = [a - q * b for a, b in zip(r, piv)]
                if r2[col]:
                    nxt.append(r2)
                elif any(r2):
                    rest.append(r2)
            with_col = nxt
        if with_col:
            piv = with_col[0]
            if piv[col] < 0:
                piv = [-a for a in piv]
            basis.append(piv)
        rows = rest
        col += 1
    return basis


def lattice_of(G: KGraph, P: VertexPartition, mu) -> IndexLattice:
    return IndexLattice(len(P.parts), sorted(robust_edge_vectors(G, P, mu)))


def is_divisibility_barrier(G: KGraph, P: VertexPartition, mu) -> bool:
    L = lattice_of(G, P, mu)
    return not L.is_complete(G.k) and L.find_transferral() is None


def set_partitions(items: Sequence, max_parts: int, min_size: int = 1):
    """Partitions of items into at most max_parts blocks of size >= min_size."""
    items = list(items)
    n = len(items)

    def rec(i: int, labels: list, count: int):
        if i == n:
            sizes = Counter(labels)
            if all(s >= min_size for s in sizes.values()):
                yield [frozenset(items[j] for j in range(n) if labels[j] == b) for b in range(count)]
            return
        for b in range(min(count + 1, max_parts)):
            labels.append(b)
            yield from rec(i + 1, labels, max(count, b + 1))
            labels.pop()

    yield from rec(0, [], 0)


def divisibility_barrier_scan(J: KGraph, mu, min_part: int = 1) -> list:
    """All partitions of V(J) into at most r parts of size >= min_part
    whose robust lattice is incomplete and transferral-free."""
    out = []
    for parts in set_partitions(range(J.n), J.k, min_part):
        P = VertexPartition.of(parts)
        if is_divisibility_barrier(J, P, mu):
            out.append(P)
    return out


# H-matchings

@dataclass
class Matching:
    pattern: KGraph
    copies: list  # vertex tuples: copies[i][p] is the image of pattern vertex p

    def covered(self) -> set:
        return {v for c in self.copies for v in c}


def _pattern_embeddings(G: KGraph, Hpat: KGraph, forbidden: frozenset):
    """One embedding per vertex set: dict frozenset -> image tuple."""
    h = Hpat.n
    k = G.k
    allowed = G.edge_set - forbidden
    pedges = [e for e in Hpat.edges]
    found = {}
    complete = len(pedges) == comb(h, k)
    for S in combinations(range(G.n), h):
        if complete:
            if all(c in allowed for c in combinations(S, k)):
                found[frozenset(S)] = S
            continue
        for img in permutations(S):
            if all(tuple(sorted(img[p] for p in e)) in allowed for e in pedges):
                found[frozenset(S)] = img
                break
    return found


def find_H_matching(G: KGraph, Hpat: KGraph, min_covered: int, forbidden=()) -> Matching:
    """Exact search for vertex-disjoint copies of Hpat in G avoiding the
    forbidden edges and covering at least min_covered vertices."""
    if Hpat.k != G.k:
        raise ParameterError("pattern and host have different uniformity")
    h = Hpat.n
    forb = frozenset(tuple(sorted(e)) for e in forbidden)
    emb = _pattern_embeddings(G, Hpat, forb)
    by_vertex: dict = {v: [] for v in range(G.n)}
    for S in emb:
        for v in S:
            by_vertex[v].append(S)
    for v in by_vertex:
        by_vertex[v].sort(key=sorted)
    n = G.n
    slack = n - min_covered  # vertices we may leave uncovered
    if slack < 0:
        raise NotFound("min_covered exceeds n", explored=0)
    if h == 0:
        return Matching(Hpat, [])
    chosen: list = []
    explored = 0

    def rec(v: int, used: int, skipped: int) -> bool:
        nonlocal explored
        explored += 1
        while v < n and used >> v & 1:
            v += 1
        if v == n:
            return True
        for S in by_vertex[v]:
            sb = bits(S)
            if sb & used:
                continue
            chosen.append(S)
            if rec(v + 1, used | sb, skipped):
                return True
            chosen.pop()
        if skipped < slack:
            return rec(v + 1, used | (1 << v), skipped + 1)
        return False

    if rec(0, 0, 0):
        return Matching(Hpat, [emb[S] for S in chosen])
    raise NotFound(f"no {Hpat.n}-vertex pattern matching covering {min_covered} vertices",
                   explored=explored)


def matching_violation(G: KGraph, M: Matching, forbidden=()) -> str | None:
    """Independent check that M is a vertex-disjoint set of pattern copies."""
    forb = {tuple(sorted(e)) for e in forbidden}
    seen: set = set()
    for img in M.copies:
        if len(img) != M.pattern.n or len(set(img)) != len(img):
            return f"copy {img} has the wrong size"
        if seen & set(img):
            return f"copy {img} overlaps an earlier copy"
        seen |= set(img)
        for e in M.pattern.edges:
            f = tuple(sorted(img[p] for p in e))
            if f not in G.edge_set or f in forb:
                return f"copy {img} misses edge {f}"
    return None


def window_factor(n: int, r: int) -> list:
    """Consecutive windows 0..r-1, r..2r-1, ... (requires r | n)."""
    if n % r:
        raise ParameterError("r must divide n")
    return [tuple(range(s, s + r)) for s in range(0, n, r)]


# bounded colourings

@dataclass
class Colouring:
    colour: dict  # edge -> colour id
    palette: int  # ids below this are the random colours on I
    seed: int
    stats: dict = field(default_factory=dict)


def colouring_violation(G: KGraph, col: Colouring, mu) -> str | None:
    """Check both bounded-colouring conditions by recounting."""
    mu = Fraction(mu)
    n, k = G.n, G.k
    per_colour = Counter(col.colour.values())
    cap = mu * n ** (k - 1)
    for c, cnt in per_colour.items():
        if cnt > cap:
            return f"colour {c} has {cnt} edges > {cap}"
    local = Counter()
    for e, c in col.colour.items():
        for f in combinations(e, k - 1):
            local[(f, c)] += 1
    cap2 = mu * n
    for (f, c), cnt in local.items():
        if cnt > cap2:
            return f"colour {c} has {cnt} edges through {f} > {cap2}"
    return None


def mu_bounded_colouring(G: KGraph, I, mu, seed: int = 0, r: int | None = None,
                         tries: int = 20) -> Colouring:
    """Colour the edges of I with ceil(14 a m / mu) random colours and
    every other edge with its own colour; retry seeds until the colouring
    is mu-bounded.

    a = |I| / n^k is the smallest admissible density parameter and m is
    n rounded down to a multiple of r (n itself when r is None).
    """
    mu = Fraction(mu)
    if mu <= 0:
        raise ParameterError("mu must be positive")
    I = sorted({tuple(sorted(e)) for e in I})
    if any(e not in G.edge_set for e in I):
        raise PreconditionError("I must be a subset of G")
    n, k = G.n, G.k
    a = Fraction(len(I), n ** k) if n else Fraction(0)
    m = n - n % r if r else n
    palette = ceil(14 * a * m / mu)
    others = [e for e in G.edges if e not in set(I)]
    failures = Counter()
    for attempt in range(tries):
        rng = random.Random(seed + attempt)
        colour = {e: rng.randrange(palette) for e in I} if palette else {}
        for i, e in enumerate(others):
            colour[e] = palette + i
        col = Colouring(colour, palette, seed + attempt)
        bad = colouring_violation(G, col, mu)
        if bad is None:
            col.stats = {"palette": palette, "classes": len(set(colour.values())),
                         "largest_class": max(Counter(colour.values()).values(), default=0)}
            return col
        failures["local" if "through" in bad else "global"] += 1
    raise NotFound(f"no mu-bounded colouring within {tries} seeds",
                   stats={"attempts": tries, "palette": palette, **failures})


def drop_coloured_copies(M: Matching, col: Colouring) -> Matching:
    """Remove copies using an edge whose colour is one of the random colours."""
    keep = []
    for img in M.copies:
        used = [tuple(sorted(img[p] for p in e)) for e in M.pattern.edges]
        if all(col.colour.get(f, col.palette) >= col.palette for f in used):
            keep.append(img)
    return Matching(M.pattern, keep)


# uniform density

@dataclass
class DensityReport:
    ok: bool
    witness: tuple | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def crossing_edges(G: KGraph, Ws: Sequence) -> int:
    sets = [set(W) for W in Ws]
    cnt = 0
    for combo in product(*[sorted(W) for W in sets]):
        if len(set(combo)) == len(combo) and tuple(sorted(combo)) in G.edge_set:
            cnt += 1
    return cnt


def uniformly_dense_check(G: KGraph, parts: Sequence, eps, d) -> DensityReport:
    """Every choice of h-subsets W_i of the parts with h >= eps m spans at
    least d h^k crossing edges (exhaustive)."""
    eps, d = Fraction(eps), Fraction(d)
    parts = [sorted(p) for p in parts]
    if len(parts) != G.k:
        raise ParameterError(f"need {G.k} parts")
    m = len(parts[0])
    if any(len(p) != m for p in parts):
        raise ParameterError("parts must have equal size")
    hmin = max(1, ceil(eps * m))
    for h in range(hmin, m + 1):
        for Ws in product(*[list(combinations(p, h)) for p in parts]):
            if crossing_edges(G, Ws) < d * h ** G.k:
                return DensityReport(False, tuple(Ws))
    return DensityReport(True)


def uniformly_dense_matching_check(G: KGraph, M: Sequence, eps, d) -> DensityReport:
    """M is a list of r-tuples of parts; G is r-uniform.  Checks that the
    parts partition V(G), have equal size, and that each tuple spans a
    uniformly dense r-partite subgraph."""
    parts = [frozenset(p) for tup in M for p in tup]
    allv = [v for p in parts for v in p]
    if len(allv) != len(set(allv)) or set(allv) != set(range(G.n)):
        return DensityReport(False, None, "parts do not partition V(G)")
    if len({len(p) for p in parts}) > 1:
        return DensityReport(False, None, "parts have different sizes")
    for tup in M:
        if len(tup) != G.k:
            return DensityReport(False, tuple(tup), "matching edge of the wrong size")
        rep = uniformly_dense_check(G, tup, eps, d)
        if not rep.ok:
            return DensityReport(False, rep.witness, f"tuple {tuple(map(sorted, tup))} is not dense")
    return DensityReport(True)
