"""r-trees with valid orderings, layerings, subtree surgery and the
strong-product tree construction.

An RTree stores its edges in a valid ordering.  Every edge after the
first is a tuple whose last entry is the vertex it introduces.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from math import ceil, floor

from .errors import FormatError, InvariantError, NotFound, ParameterError, PreconditionError
from .hypercore import KGraph, bits


@dataclass(frozen=True)
class RTree:
    r: int
    edges: tuple  # edge tuples in valid order; new vertex last

    @staticmethod
    def from_edges(r: int, edges) -> "RTree":
        return RTree(r, tuple(tuple(e) for e in edges))

    @cached_property
    def vertex_order(self) -> tuple:
        if not self.edges:
            return ()
        return tuple(self.edges[0]) + tuple(e[-1] for e in self.edges[1:])

    @cached_property
    def vertex_set(self) -> frozenset:
        return frozenset(v for e in self.edges for v in e)

    @cached_property
    def edge_sets(self) -> tuple:
        return tuple(frozenset(e) for e in self.edges)

    @cached_property
    def parent(self) -> dict:
        """Edge index -> smallest earlier edge index containing its base."""
        par = {}
        for i in range(1, len(self.edges)):
            base = frozenset(self.edges[i][:-1])
            for j in range(i):
                if base <= self.edge_sets[j]:
                    par[i] = j
                    break
        return par

    @property
    def n(self) -> int:
        return len(self.vertex_set)


@dataclass(frozen=True)
class Violation:
    edge_index: int
    rule: str
    detail: str = ""

    def __str__(self):
        return f"edge {self.edge_index}: {self.rule} {self.detail}".strip()


def validate_rtree(T: RTree) -> Violation | None:
    """None if the stored ordering is valid, else the first violation.

    Rules: "shape" (edge size / repeated vertex), "T1" (the edge adds
    exactly one new vertex, stored last), "T2" (the rest of the edge sits
    inside an earlier edge).
    """
    if not T.edges:
        return Violation(0, "shape", "no edges")
    seen: set = set()
    earlier: list = []
    for i, e in enumerate(T.edges):
        if len(e) != T.r or len(set(e)) != T.r:
            return Violation(i, "shape", f"{e} is not {T.r} distinct vertices")
        if i == 0:
            seen.update(e)
            earlier.append(frozenset(e))
            continue
        new = [v for v in e if v not in seen]
        if len(new) != 1 or new[0] != e[-1]:
            return Violation(i, "T1", f"new vertices {new}")
        base = frozenset(e[:-1])
        if not any(base <= f for f in earlier):
            return Violation(i, "T2", f"{sorted(base)} lies in no earlier edge")
        seen.add(e[-1])
        earlier.append(frozenset(e))
    return None


def rtree_from_unordered(r: int, edges) -> RTree | None:
    """Find a valid ordering of an unordered edge set, or None."""
    edges = [frozenset(e) for e in edges]
    if not edges:
        return None
    for first in range(len(edges)):
        order = [tuple(sorted(edges[first]))]
        seen = set(edges[first])
        placed = {first}
        progress = True
        while progress and len(placed) < len(edges):
            progress = False
            for i, e in enumerate(edges):
                if i in placed:
                    continue
                new = e - seen
                if len(new) == 1 and any(e - new <= edges[j] for j in placed):
                    v = next(iter(new))
                    order.append(tuple(sorted(e - new)) + (v,))
                    seen.add(v)
                    placed.add(i)
                    progress = True
        if len(placed) == len(edges):
            return RTree(r, tuple(order))
    return None


def max_vertex_degree(T: RTree) -> int:
    deg: dict = {}
    for e in T.edges:
        for v in e:
            deg[v] = deg.get(v, 0) + 1
    return max(deg.values(), default=0)


def admits(G: KGraph, T: RTree, k: int) -> bool:
    """True iff every edge of G lies inside some edge of T."""
    if G.k != k:
        raise ParameterError(f"G is {G.k}-uniform, expected {k}")
    if not set(range(G.n)) <= T.vertex_set:
        raise ParameterError("V(G) is not contained in V(T)")
    tb = [bits(e) for e in T.edges]
    for e in G.edges:
        b = bits(e)
        if not any(b & t == b for t in tb):
            return False
    return True


def tight_path_rtree(seq, r: int) -> RTree:
    seq = list(seq)
    return RTree(r, tuple(tuple(seq[i:i + r]) for i in range(len(seq) - r + 1)))


def random_rtree(n: int, r: int, rng: random.Random) -> RTree:
    """Random r-tree on 0..n-1; vertex labels shuffled."""
    labels = list(range(n))
    rng.shuffle(labels)
    edges = [tuple(labels[:r])]
    for v in labels[r:]:
        host = rng.choice(edges)
        drop = rng.randrange(r)
        base = tuple(u for i, u in enumerate(host) if i != drop)
        edges.append(base + (v,))
    return RTree(r, tuple(edges))


# text format

def rtree_to_text(T: RTree) -> str:
    lines = [f"{T.n} {T.r}"] + [" ".join(map(str, e)) for e in T.edges]
    return "\n".join(lines) + "\n"


def rtree_from_text(text: str) -> RTree:
    header = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            nums = [int(x) for x in body.split()]
        except ValueError:
            raise FormatError(f"non-integer token in {body!r}", lineno) from None
        if header is None:
            if len(nums) != 2:
                raise FormatError("header must be 'n r'", lineno)
            header = nums
            continue
        if len(nums) != header[1]:
            raise FormatError(f"edge has {len(nums)} vertices, expected {header[1]}", lineno)
        edges.append(tuple(nums))
    if header is None:
        raise FormatError("missing header line")
    T = RTree(header[1], tuple(edges))
    bad = validate_rtree(T)
    if bad is not None:
        raise FormatError(f"not a valid ordering: {bad}")
    if T.n != header[0]:
        raise FormatError(f"header says {header[0]} vertices, edges use {T.n}")
    return T


# layerings

@dataclass(frozen=True)
class Layering:
    layers: tuple  # tuple of frozensets; layers[0] is L_1
    root: tuple

    @cached_property
    def index(self) -> dict:
        """vertex -> 1-based layer index"""
        return {v: i + 1 for i, L in enumerate(self.layers) for v in L}


def layering_to_text(L: Layering) -> str:
    return "\n".join(f"{i + 1}: " + " ".join(map(str, sorted(layer)))
                     for i, layer in enumerate(L.layers)) + "\n"


def layering_from_text(text: str, root) -> Layering:
    layers = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        head, _, rest = raw.partition(":")
        try:
            layers[int(head)] = frozenset(int(x) for x in rest.split())
        except ValueError:
            raise FormatError("expected 'index: v v v'", lineno) from None
    if sorted(layers) != list(range(1, len(layers) + 1)):
        raise FormatError("layer indices must be 1..m")
    return Layering(tuple(layers[i] for i in range(1, len(layers) + 1)), tuple(root))


def layering_violation(T: RTree, L: Layering) -> str | None:
    """Check (L1)-(L3) and the partition property; None when valid."""
    r = T.r
    allv = [v for layer in L.layers for v in layer]
    if len(allv) != len(set(allv)) or set(allv) != T.vertex_set:
        return "layers do not partition V(T)"
    if any(not layer for layer in L.layers):
        return "empty layer"
    if _components(T) != 1:
        return "tree is disconnected"
    x = L.root
    if len(x) != r - 1:
        return "root has the wrong length"
    if not L.layers or len(L.layers[0]) != 1:
        return "(L1) |L_1| != 1"
    for i, xi in enumerate(x):
        if i >= len(L.layers) or xi not in L.layers[i]:
            return f"(L1) root vertex {xi} not in layer {i + 1}"
    idx = L.index
    for e in T.edges:
        ls = sorted(idx[v] for v in e)
        if ls != list(range(ls[0], ls[0] + r)):
            return f"(L3) edge {e} meets layers {ls}"
    for i in range(1, len(L.layers)):
        for v in L.layers[i]:
            if not any(v in e and any(idx[w] == i for w in e) for e in T.edges):
                return f"(L2) vertex {v} in layer {i + 1} has no neighbour in layer {i}"
    return None


def _components(T: RTree) -> int:
    parent = {v: v for v in T.vertex_set}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in T.edges:
        for u in e[1:]:
            parent[find(u)] = find(e[0])
    return len({find(v) for v in parent})


def _separator_tree(T: RTree, root: frozenset):
    """Rooted tree on edges and (r-1)-subsets of edges, with containment
    as adjacency, rooted at the (r-1)-set ``root``.

    Returns (children, edge_parent_sep): children maps a node to its
    child nodes; nodes are ('e', i) for edges and ('s', frozenset).
    """
    adj: dict = {}
    for i, e in enumerate(T.edge_sets):
        for f in combinations(sorted(e), T.r - 1):
            s = ("s", frozenset(f))
            adj.setdefault(s, []).append(("e", i))
            adj.setdefault(("e", i), []).append(s)
    start = ("s", root)
    if start not in adj:
        raise PreconditionError(f"{sorted(root)} is not in the shadow of T")
    children: dict = {start: []}
    up: dict = {start: None}
    queue = deque([start])
    while queue:
        a = queue.popleft()
        for b in adj[a]:
            if b not in up:
                up[b] = a
                children[a].append(b)
                children[b] = []
                queue.append(b)
    return children, up


def compute_layering(T: RTree, x) -> Layering:
    """A layering of T rooted at the (r-1)-tuple x.

    x_i goes to layer i and the remaining vertex of the first edge through
    x to layer r.  Walking outward from that edge, every new edge differs
    from a placed neighbour in one vertex u; the new vertex takes the
    slot that keeps the edge on r consecutive layers, and when both end
    slots are open it takes the one further from the root.  Every placed
    vertex then sits above a neighbour in the same edge, which gives (L2).
    """
    r = T.r
    x = tuple(x)
    if len(x) != r - 1 or len(set(x)) != r - 1:
        raise ParameterError(f"root must be {r - 1} distinct vertices")
    bad = validate_rtree(T)
    if bad is not None:
        raise PreconditionError(f"not an r-tree: {bad}")
    xs = frozenset(x)
    first = next((i for i, e in enumerate(T.edge_sets) if xs <= e), None)
    if first is None:
        raise PreconditionError(f"{x} is not in the ordered shadow of T")
    layer = {v: i + 1 for i, v in enumerate(x)}
    (y,) = T.edge_sets[first] - xs
    layer[y] = r
    # neighbours of an edge: edges sharing r-1 vertices
    share: dict = {}
    for i, e in enumerate(T.edge_sets):
        for f in combinations(sorted(e), r - 1):
            share.setdefault(frozenset(f), []).append(i)
    done = {first}
    queue = deque([first])
    while queue:
        i = queue.popleft()
        e = T.edge_sets[i]
        for f in combinations(sorted(e), r - 1):
            for j in share[frozenset(f)]:
                if j in done:
                    continue
                done.add(j)
                (u,) = e - frozenset(f)
                (v,) = T.edge_sets[j] - frozenset(f)
                if v in layer:
                    raise InvariantError("vertex reached twice while layering")
                lo = min(layer[w] for w in e)
                if layer[u] in (lo, lo + r - 1):
                    layer[v] = lo + r if layer[u] == lo else lo + r - 1
                else:
                    layer[v] = layer[u]
                queue.append(j)
    L = _to_layering(layer, x)
    if layering_violation(T, L) is not None:
        L = _exhaustive_layering(T, x)
    return L


def _to_layering(layer: dict, x) -> Layering:
    m = max(layer.values())
    groups = [set() for _ in range(m)]
    for v, i in layer.items():
        groups[i - 1].add(v)
    return Layering(tuple(frozenset(g) for g in groups), tuple(x))


def _exhaustive_layering(T: RTree, x) -> Layering:
    """Try every assignment of layer indices (tiny trees only)."""
    vs = sorted(T.vertex_set - set(x))
    top = len(T.vertex_set)
    for combo in product(range(2, top + 1), repeat=len(vs)):
        layer = {v: i + 1 for i, v in enumerate(x)}
        layer.update(zip(vs, combo))
        if len(set(layer.values())) != max(layer.values()):
            continue
        L = _to_layering(layer, x)
        if layering_violation(T, L) is None:
            return L
    raise InvariantError("no layering exists")


def layered_rank(T: RTree, L: Layering, s) -> int | None:
    idx = L.index
    if any(v not in idx for v in s):
        return None
    j = idx[s[0]]
    if all(idx[v] == j + i for i, v in enumerate(s)):
        return j
    return None


def layered_tuple(L: Layering, S) -> tuple | None:
    """Order the set S by layer if it meets |S| consecutive layers once each."""
    idx = L.index
    s = tuple(sorted(S, key=lambda v: idx[v]))
    ls = [idx[v] for v in s]
    if ls == list(range(ls[0], ls[0] + len(s))):
        return s
    return None


def _subtree_edges(T: RTree, L: Layering, s) -> list:
    """Edge indices of T_s: everything hanging below the set of s in the
    separator tree rooted at the layering's root."""
    children, _ = _separator_tree(T, frozenset(L.root))
    node = ("s", frozenset(s))
    if node not in children:
        raise PreconditionError(f"{s} is not an (r-1)-set of an edge")
    out = []
    stack = list(children[node])
    while stack:
        a = stack.pop()
        if a[0] == "e":
            out.append(a[1])
        stack.extend(children[a])
    return sorted(out)


def _ordered_subtree(T: RTree, edge_ids, base) -> RTree | None:
    """Arrange a connected edge subset into a valid ordering starting
    from an edge containing ``base`` (or any edge when base is empty)."""
    ids = set(edge_ids)
    if not ids:
        return None
    base = frozenset(base)
    first = min((i for i in ids if base <= T.edge_sets[i]), default=None)
    if first is None:
        first = min(ids)
    e0 = T.edge_sets[first]
    head = [v for v in T.edges[first] if v in base] if base else []
    order = [tuple(head + sorted(e0 - set(head)))]
    seen = set(e0)
    placed = {first}
    while len(placed) < len(ids):
        grew = False
        for i in sorted(ids - placed):
            e = T.edge_sets[i]
            new = e - seen
            if len(new) == 1 and any(e - new <= T.edge_sets[j] for j in placed):
                (v,) = new
                order.append(tuple(sorted(e - new)) + (v,))
                seen.add(v)
                placed.add(i)
                grew = True
        if not grew:
            raise InvariantError("edge subset is not a connected subtree")
    return RTree(T.r, tuple(order))


@dataclass
class Subtree:
    tuple: tuple
    edge_ids: list  # indices into T.edges
    tree: RTree | None  # T_s with a valid ordering, None when empty
    layering: Layering | None  # inherited layering
    rest_ids: list  # edges of T - T_s
    rest: RTree | None


def induced_subtree(T: RTree, L: Layering, s) -> Subtree:
    s = tuple(s)
    ids = _subtree_edges(T, L, s)
    rest_ids = sorted(set(range(len(T.edges))) - set(ids))
    if not ids:
        return Subtree(s, [], None, None, rest_ids, _ordered_subtree(T, rest_ids, L.root))
    sub = _ordered_subtree(T, ids, s)
    keep = sub.vertex_set
    inherited = tuple(frozenset(layer & keep) for layer in L.layers if layer & keep)
    rest = _ordered_subtree(T, rest_ids, L.root) if rest_ids else None
    return Subtree(s, ids, sub, Layering(inherited, s), rest_ids, rest)


@dataclass
class Cut:
    first_layer_edges: list  # edge indices meeting L_1
    tuples: list  # layered tuples e - L_1
    subtrees: dict  # tuple -> edge ids of T_s


def cut_at_first_layer(T: RTree, L: Layering) -> Cut:
    """Split E(T) into the edges through L_1 and the subtrees hanging
    below the tuples e - L_1; the three structural claims are asserted."""
    bad = layering_violation(T, L)
    if bad is not None:
        raise PreconditionError(f"invalid layering: {bad}")
    L1 = L.layers[0]
    F = [i for i, e in enumerate(T.edge_sets) if e & L1]
    S = []
    for i in F:
        s = layered_tuple(L, T.edge_sets[i] - L1)
        if s is None:
            raise InvariantError(f"edge {T.edges[i]} minus L_1 is not layered")
        S.append(s)
    subs = {s: _subtree_edges(T, L, s) for s in S}
    if any(layered_rank(T, L, s) != 2 for s in S):
        raise InvariantError("a tuple below L_1 does not have rank 2")
    if not len(F) == len(set(S)) <= max_vertex_degree(T):
        raise InvariantError("|F| = |S| <= max degree fails")
    parts = list(F) + [i for s in S for i in subs[s]]
    if sorted(parts) != list(range(len(T.edges))):
        raise InvariantError("edges are not partitioned by F and the subtrees")
    return Cut(F, S, subs)


def layered_tuples(T: RTree, L: Layering) -> list:
    out = set()
    for e in T.edge_sets:
        for f in combinations(e, T.r - 1):
            s = layered_tuple(L, f)
            if s is not None:
                out.add(s)
    return sorted(out)


def small_subtree_window(n: int, gamma, Delta: int) -> tuple[int, int]:
    g = Fraction(gamma)
    return ceil(g * n / (2 * Delta)), floor(g * n)


def find_small_subtree(T: RTree, L: Layering, gamma, Delta: int) -> Subtree:
    """The layered tuple of highest rank whose subtree has at least
    gamma n / (2 Delta) edges (ties broken by the smallest tuple).

    Raises NotFound when no tuple reaches the lower bound or the chosen
    subtree exceeds gamma n edges.
    """
    if max_vertex_degree(T) > Delta:
        raise PreconditionError("Delta is below the maximum vertex degree")
    n = T.n
    lo, hi = small_subtree_window(n, gamma, Delta)
    if lo > hi:
        raise NotFound(f"size window [{lo}, {hi}] is empty at n = {n}")
    best = None
    for s in layered_tuples(T, L):
        size = len(_subtree_edges(T, L, s))
        if size < lo:
            continue
        key = (-layered_rank(T, L, s), s)
        if best is None or key < best[0]:
            best = (key, s, size)
    if best is None:
        raise NotFound(f"no layered tuple has a subtree of at least {lo} edges")
    _, s, size = best
    if size > hi:
        raise NotFound(f"selected subtree has {size} edges, above {hi}")
    sub = induced_subtree(T, L, s)
    inside = sub.tree.vertex_set if sub.tree else set(s)
    outside = sub.rest.vertex_set if sub.rest else set(s)
    if set(inside) & set(outside) - set(s):
        raise InvariantError("subtree meets the rest outside the tuple")
    return sub


# strong products

def strong_product(T2: KGraph, m: int) -> KGraph:
    """T2 with every vertex blown up to an m-clique (vertex t -> t*m..t*m+m-1)."""
    blob = [list(range(t * m, t * m + m)) for t in range(T2.n)]
    edges = set()
    for b in blob:
        edges.update(combinations(b, 2))
    for a, c in T2.edges:
        edges.update((u, w) for u in blob[a] for w in blob[c])
    return KGraph(T2.n * m, 2, edges)


def strong_product_decomposition(T2: KGraph, m: int) -> tuple[KGraph, RTree]:
    """(T2 x K_m, D) where D is a (2m)-tree whose edges cover G.

    D is grown from the root blob outward: a child blob's vertices are
    added one at a time, each edge made of the parent blob, the child
    vertices placed so far and the leftover of the previous edge.
    """
    if T2.k != 2:
        raise ParameterError("T2 must be a graph")
    if m < 1:
        raise ParameterError("m must be positive")
    nT = T2.n
    if len(T2.edges) != nT - 1 or (nT and _graph_components(T2) != 1):
        raise PreconditionError("T2 is not a tree")
    G = strong_product(T2, m)
    blob = [tuple(range(t * m, t * m + m)) for t in range(nT)]
    if nT == 1:
        return G, RTree(m, (blob[0],))
    adj = {t: [] for t in range(nT)}
    for a, c in T2.edges:
        adj[a].append(c)
        adj[c].append(a)
    # BFS from blob 0; full[t] = the edge holding blob t and its parent blob
    order, par = [0], {0: None}
    for t in order:
        for c in sorted(adj[t]):
            if c not in par:
                par[c] = t
                order.append(c)
    first_child = order[1]
    edges = [blob[0] + blob[first_child]]
    full = {first_child: blob[0] + blob[first_child], 0: blob[0] + blob[first_child]}
    for c in order[2:]:
        p = par[c]
        prev = list(full[p])
        others = [v for v in prev if v not in blob[p]]
        for i, v in enumerate(blob[c]):
            rest = others[i + 1:]
            e = tuple(blob[p]) + tuple(blob[c][:i]) + tuple(rest) + (v,)
            edges.append(e)
        full[c] = tuple(blob[p]) + blob[c]
    D = RTree(2 * m, tuple(edges))
    return G, D


def _graph_components(G: KGraph) -> int:
    parent = list(range(G.n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in G.edges:
        parent[find(a)] = find(b)
    return len({find(v) for v in range(G.n)})


def product_width(r: int, k: int, Delta: int) -> tuple[int, int]:
    """Blob size m = 24 r (k-1) Delta and the edge size 2m of the tree
    certificate for a bounded-degree tree blown up by K_m."""
    m = 24 * r * (k - 1) * Delta
    return m, 2 * m
