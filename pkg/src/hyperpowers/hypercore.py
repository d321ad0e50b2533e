"""k-uniform hypergraphs on the vertex range 0..n-1.

Vertex sets are passed around either as iterables or as int bitsets
(bit v set iff vertex v is present).  Python ints have no width limit,
so the same code covers small and large n.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, permutations
from math import comb
from typing import Iterable, Iterator, Sequence

from .errors import FormatError, ParameterError

Edge = tuple  # sorted tuple of ints


def bits(vertices: Iterable[int]) -> int:
    b = 0
    for v in vertices:
        b |= 1 << v
    return b


def members(b: int) -> Iterator[int]:
    """Yield the set bits of ``b`` in increasing order."""
    while b:
        low = b & -b
        yield low.bit_length() - 1
        b ^= low


def as_bits(vs) -> int:
    return vs if isinstance(vs, int) else bits(vs)


@dataclass(frozen=True)
class KGraph:
    """An n-vertex k-uniform hypergraph with a canonical edge list.

    Edges are sorted tuples and the edge list is sorted and duplicate
    free, so two KGraphs with the same edge sets compare equal.
    """

    n: int
    k: int
    edges: tuple = field(default=())

    def __post_init__(self):
        if self.k < 1:
            raise ParameterError("uniformity must be at least 1")
        if self.n < 0:
            raise ParameterError("vertex count must be nonnegative")
        canon = set()
        for e in self.edges:
            t = tuple(sorted(e))
            if len(t) != self.k or len(set(t)) != self.k:
                raise ParameterError(f"edge {e} does not have {self.k} distinct vertices")
            if t[0] < 0 or t[-1] >= self.n:
                raise ParameterError(f"edge {e} has a vertex outside 0..{self.n - 1}")
            canon.add(t)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def __contains__(self, e) -> bool:
        return tuple(sorted(e)) in self.edge_set

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    @cached_property
    def neighbourhoods(self) -> dict:
        """Map each (k-1)-set in the shadow to the bitset of its extensions."""
        nb: dict = {}
        for e in self.edges:
            for i, v in enumerate(e):
                f = e[:i] + e[i + 1:]
                nb[f] = nb.get(f, 0) | (1 << v)
        return nb

    def nbr(self, f) -> int:
        """Bitset of vertices v with f + {v} an edge (f any (k-1)-set)."""
        return self.neighbourhoods.get(tuple(sorted(f)), 0)

    @cached_property
    def degrees(self) -> tuple:
        d = [0] * self.n
        for e in self.edges:
            for v in e:
                d[v] += 1
        return tuple(d)

    @property
    def vertices(self) -> range:
        return range(self.n)

    def is_clique(self, vs) -> bool:
        """True iff every k-subset of ``vs`` is an edge."""
        s = sorted(vs)
        if len(set(s)) != len(s):
            return False
        es = self.edge_set
        return all(c in es for c in combinations(s, self.k))


# construction helpers

def complete_kgraph(n: int, k: int) -> KGraph:
    return KGraph(n, k, combinations(range(n), k))


def random_kgraph(n: int, k: int, p: float, rng: random.Random) -> KGraph:
    return KGraph(n, k, [e for e in combinations(range(n), k) if rng.random() < p])


def relabel(H: KGraph, perm: Sequence[int]) -> KGraph:
    """Apply the vertex map v -> perm[v]."""
    return KGraph(H.n, H.k, [tuple(perm[v] for v in e) for e in H.edges])


def restrict(H: KGraph, allowed) -> KGraph:
    """Edges of H inside ``allowed``; vertex ids are kept (H[allowed] padded to n)."""
    a = as_bits(allowed)
    return KGraph(H.n, H.k, [e for e in H.edges if bits(e) & a == bits(e)])


def remove_edges(H: KGraph, gone: Iterable) -> KGraph:
    drop = {tuple(sorted(e)) for e in gone}
    return KGraph(H.n, H.k, [e for e in H.edges if e not in drop])


def add_edges(H: KGraph, extra: Iterable) -> KGraph:
    return KGraph(H.n, H.k, list(H.edges) + [tuple(e) for e in extra])


# shadows and degrees

def shadow(H: KGraph, j: int) -> KGraph:
    if not 1 <= j <= H.k:
        raise ParameterError(f"shadow level {j} outside 1..{H.k}")
    if j == H.k:
        return H
    return KGraph(H.n, j, {c for e in H.edges for c in combinations(e, j)})


def in_ordered_shadow(H: KGraph, t: Sequence[int]) -> bool:
    if len(t) != H.k - 1:
        raise ParameterError(f"tuple length {len(t)} != {H.k - 1}")
    if len(set(t)) != len(t):
        return False
    if H.k == 1:
        return len(H.edges) > 0
    return tuple(sorted(t)) in H.neighbourhoods


def codegree(H: KGraph, f) -> int:
    return H.nbr(f).bit_count()


def min_codegree(H: KGraph) -> int:
    if H.n < H.k:
        raise ParameterError("min_codegree needs n >= k")
    nb = H.neighbourhoods
    if len(nb) < comb(H.n, H.k - 1):
        return 0
    return min(b.bit_count() for b in nb.values())


def degree_into(H: KGraph, f, W) -> int:
    f = tuple(f)
    if len(f) != H.k - 1:
        raise ParameterError(f"|f| = {len(f)} != {H.k - 1}")
    return (H.nbr(f) & as_bits(W)).bit_count()


def k22_count(H: KGraph, e, W=None) -> int:
    """Number of copies of the complete k-partite k-graph with parts of
    size 2 that contain the edge e.

    A copy is fixed by choosing a partner b_i for every vertex a_i of e
    such that all 2^k transversals of the pairs {a_i, b_i} are edges.
    With W given, partners must lie in W.
    """
    e = tuple(sorted(e))
    if e not in H.edge_set:
        raise ParameterError(f"{e} is not an edge")
    k = H.k
    pool = ((1 << H.n) - 1) & ~bits(e)
    if W is not None:
        pool &= as_bits(W)
    nb = H.neighbourhoods

    # choose partners in coordinate order; a transversal whose largest
    # partner index is i gets checked when b_i is chosen
    def candidates(i: int, chosen: list) -> int:
        c = pool
        for mask in range(1 << i):
            others = [chosen[j] if mask >> j & 1 else e[j] for j in range(i)]
            others += list(e[i + 1:])
            c &= nb.get(tuple(sorted(others)), 0)
            if not c:
                break
        for b in chosen:
            c &= ~(1 << b)
        return c

    def count(i: int, chosen: list) -> int:
        c = candidates(i, chosen)
        if i == k - 1:
            return c.bit_count()
        total = 0
        for b in members(c):
            chosen.append(b)
            total += count(i + 1, chosen)
            chosen.pop()
        return total

    return count(0, [])


def link_graph(H: KGraph, v: int) -> KGraph:
    if not 0 <= v < H.n:
        raise ParameterError(f"vertex {v} outside 0..{H.n - 1}")
    if H.k == 1:
        raise ParameterError("link of a 1-graph is not a hypergraph")
    return KGraph(H.n, H.k - 1, [tuple(u for u in e if u != v) for e in H.edges if v in e])


# serialization

def to_khg(H: KGraph) -> str:
    lines = [f"{H.n} {H.k}"]
    lines += [" ".join(map(str, e)) for e in H.edges]
    return "\n".join(lines) + "\n"


def _check_edge(nums: list, n: int, k: int, line: int) -> tuple:
    if len(nums) != k:
        raise FormatError(f"edge has {len(nums)} vertices, expected {k}", line)
    if any(a >= b for a, b in zip(nums, nums[1:])):
        raise FormatError("edge vertices are not strictly ascending", line)
    if nums[0] < 0 or nums[-1] >= n:
        raise FormatError(f"vertex out of range 0..{n - 1}", line)
    return tuple(nums)


def from_khg(text: str) -> KGraph:
    header = None
    edges = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            nums = [int(tok) for tok in body.split()]
        except ValueError:
            raise FormatError(f"non-integer token in {body!r}", lineno) from None
        if header is None:
            if len(nums) != 2:
                raise FormatError("header must be 'n k'", lineno)
            header = nums
            if header[1] < 1 or header[0] < 0:
                raise FormatError("bad header values", lineno)
            continue
        e = _check_edge(nums, header[0], header[1], lineno)
        if e in seen:
            raise FormatError(f"duplicate edge {e}", lineno)
        seen.add(e)
        edges.append(e)
    if header is None:
        raise FormatError("missing header line")
    return KGraph(header[0], header[1], edges)


def to_json(H: KGraph) -> str:
    return json.dumps({"n": H.n, "k": H.k, "edges": [list(e) for e in H.edges]})


def from_json(text: str) -> KGraph:
    try:
        obj = json.loads(text)
        n, k, raw = obj["n"], obj["k"], obj["edges"]
    except (ValueError, KeyError, TypeError) as exc:
        raise FormatError(f"malformed graph json: {exc}") from None
    edges = []
    seen = set()
    for i, nums in enumerate(raw):
        # JSON has no line structure; report the 1-based index in the edge array
        e = _check_edge(list(nums), n, k, i + 1)
        if e in seen:
            raise FormatError(f"duplicate edge {e}", i + 1)
        seen.add(e)
        edges.append(e)
    return KGraph(n, k, edges)


def parse_graph(text: str) -> KGraph:
    if text.lstrip().startswith("{"):
        return from_json(text)
    return from_khg(text)


def read_graph(path: str) -> KGraph:
    with open(path) as fh:
        return parse_graph(fh.read())


def write_graph(H: KGraph, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(to_json(H) if path.endswith(".json") else to_khg(H))


def is_isomorphic_bruteforce(A: KGraph, B: KGraph) -> bool:
    """Relabel-and-compare over all permutations; tests only, n <= 8."""
    if (A.n, A.k, len(A)) != (B.n, B.k, len(B)):
        return False
    return any(relabel(A, p) == B for p in permutations(range(A.n)))

