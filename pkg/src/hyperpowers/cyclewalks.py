"""Tight walks, powers of tight cycles and paths, connecting walks,
walk lifting into clique graphs, and exhaustive power-path search."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Sequence

from .cliquegraph import extension_bits
from .errors import BudgetExceeded, LiftFailure, NotFound, ParameterError, PreconditionError
from .hypercore import KGraph, bits, in_ordered_shadow, members

DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class Walk:
    vertices: tuple
    k: int

    @property
    def length(self) -> int:
        return len(self.vertices) - self.k + 1

    @property
    def start(self) -> tuple:
        return self.vertices[: self.k - 1]

    @property
    def end(self) -> tuple:
        return self.vertices[len(self.vertices) - self.k + 1:]


@dataclass(frozen=True)
class CyclePowerSpec:
    n: int
    k: int
    j: int

    @property
    def window(self) -> int:
        return self.k + self.j - 1


def _window_edges(n: int, k: int, w: int, cyclic: bool) -> set:
    if w >= n:
        return set(combinations(range(n), k))
    starts = range(n) if cyclic else range(n - w + 1)
    out = set()
    for s in starts:
        win = sorted((s + t) % n for t in range(w))
        out.update(combinations(win, k))
    return out


def cycle_power(spec: CyclePowerSpec) -> KGraph:
    if spec.n < spec.k or spec.j < 1:
        raise ParameterError("cycle power needs n >= k and j >= 1")
    return KGraph(spec.n, spec.k, _window_edges(spec.n, spec.k, spec.window, True))


def path_power(n: int, k: int, j: int) -> KGraph:
    if n < k or j < 1:
        raise ParameterError("path power needs n >= k and j >= 1")
    return KGraph(n, k, _window_edges(n, k, k + j - 1, False))


def first_bad_window(K: KGraph, seq: Sequence[int]) -> int | None:
    """Index of the first k-window of seq that is not an edge, or None."""
    k = K.k
    if len(seq) < k:
        raise ParameterError(f"sequence shorter than {k}")
    es = K.edge_set
    for i in range(len(seq) - k + 1):
        w = seq[i:i + k]
        if len(set(w)) != k or tuple(sorted(w)) not in es:
            return i
    return None


def is_walk(K: KGraph, seq: Sequence[int]) -> bool:
    return first_bad_window(K, seq) is None


def walk_parts(seq: Sequence[int], k: int) -> tuple[tuple, tuple, frozenset]:
    if len(seq) < 2 * (k - 1):
        raise ParameterError(f"walk_parts needs at least {2 * (k - 1)} vertices")
    start = tuple(seq[: k - 1])
    end = tuple(seq[len(seq) - k + 1:])
    return start, end, frozenset(seq) - set(start) - set(end)


def power_windows_ok(H: KGraph, seq: Sequence[int], r: int, cyclic: bool) -> bool:
    """Every k-subset of every r consecutive entries of seq is an edge of H.

    This is the membership test for powers of tight paths/cycles and is
    deliberately written without the clique machinery.
    """
    n = len(seq)
    if len(set(seq)) != n:
        return False
    es, k = H.edge_set, H.k
    if n < k:
        return False
    if n <= r:
        wins = [list(seq)]
    elif cyclic:
        wins = [[seq[(s + t) % n] for t in range(r)] for s in range(n)]
    else:
        wins = [list(seq[s:s + r]) for s in range(n - r + 1)]
    return all(tuple(sorted(c)) in es for w in wins for c in combinations(w, k))


def is_power_cycle(H: KGraph, seq: Sequence[int], r: int) -> bool:
    return power_windows_ok(H, seq, r, cyclic=True)


def is_power_path(H: KGraph, seq: Sequence[int], r: int) -> bool:
    return power_windows_ok(H, seq, r, cyclic=False)


# connecting walks

@dataclass
class WalkCount:
    count: int
    saturated: bool = False
    witnesses: list | None = None


def _walk_frame(K: KGraph, v1, v2, length: int):
    k = K.k
    if length < 1:
        raise ParameterError("walk length must be at least 1")
    if len(v1) != k - 1 or len(v2) != k - 1:
        raise ParameterError(f"end tuples must have length {k - 1}")
    if not (in_ordered_shadow(K, v1) and in_ordered_shadow(K, v2)):
        raise PreconditionError("end tuples must lie in the ordered shadow")
    total = length + k - 1
    frame: list = [None] * total
    for i, x in enumerate(v1):
        frame[i] = x
    for i, x in enumerate(v2):
        p = length + i
        if frame[p] is not None and frame[p] != x:
            return None
        frame[p] = x
    return frame


def connecting_walk_histogram(K: KGraph, v1, v2, length: int, forbidden=0) -> Counter:
    """Counts of walks from v1 to v2 of the given length, keyed by the
    number of distinct internal vertices."""
    frame = _walk_frame(K, v1, v2, length)
    hist: Counter = Counter()
    if frame is None:
        return hist
    k = K.k
    avoid = bits(v1) | bits(v2) | (forbidden if isinstance(forbidden, int) else bits(forbidden))
    allowed = ((1 << K.n) - 1) & ~avoid
    nb = K.neighbourhoods
    memo: dict = {}

    def window_ok(seq, p):
        # window ending at position p
        if p < k - 1:
            return True
        w = seq[p - k + 1:p + 1]
        return len(set(w)) == k and (tuple(sorted(w)) in K.edge_set)

    def rec(pos: int, seq: list, used: int) -> Counter:
        if pos == len(frame):
            return Counter({used.bit_count(): 1})
        key = (pos, tuple(seq[max(0, pos - k + 1):pos]), used)
        hit = memo.get(key)
        if hit is not None:
            return hit
        out: Counter = Counter()
        if frame[pos] is not None:
            seq.append(frame[pos])
            if window_ok(seq, pos):
                out = rec(pos + 1, seq, used)
            seq.pop()
        else:
            cand = allowed
            if pos >= k - 1:
                cand &= nb.get(tuple(sorted(seq[pos - k + 1:pos])), 0)
            for v in members(cand):
                seq.append(v)
                if window_ok(seq, pos):
                    out.update(rec(pos + 1, seq, used | (1 << v)))
                seq.pop()
        memo[key] = out
        return out

    return rec(0, [], 0)


def enumerate_connecting_walks(K: KGraph, v1, v2, length: int, q: int, forbidden=(),
                               witnesses: bool = False, cap: int | None = None) -> WalkCount:
    """Walks of the given length from v1 to v2 with exactly q distinct
    internal vertices, internal vertices avoiding forbidden + v1 + v2."""
    if not witnesses:
        c = connecting_walk_histogram(K, v1, v2, length, forbidden).get(q, 0)
        if cap is not None and c >= cap:
            return WalkCount(cap, True)
        return WalkCount(c)
    found: list = []
    for seq in _iter_walks(K, v1, v2, length, forbidden):
        internal = set(seq[K.k - 1:length])
        if len(internal) == q:
            found.append(seq)
            if cap is not None and len(found) >= cap:
                return WalkCount(cap, True, found)
    return WalkCount(len(found), witnesses=found)


def _iter_walks(K: KGraph, v1, v2, length: int, forbidden=()):
    frame = _walk_frame(K, v1, v2, length)
    if frame is None:
        return
    avoid = bits(v1) | bits(v2) | (forbidden if isinstance(forbidden, int) else bits(forbidden))
    allowed = ((1 << K.n) - 1) & ~avoid
    seq: list = []

    def rec(pos):
        if pos == len(frame):
            yield tuple(seq)
            return
        opts = [frame[pos]] if frame[pos] is not None else list(members(allowed))
        for v in opts:
            seq.append(v)
            if len(seq) < K.k or first_bad_window(K, seq[-K.k:]) is None:
                yield from rec(pos + 1)
            seq.pop()

    yield from rec(0)


def _ordered_shadow(K: KGraph) -> list:
    out = []
    for f in K.neighbourhoods:
        out.extend(permutations(f))
    return sorted(out)


def is_connecting(K: KGraph, alpha: Fraction, ell: int) -> tuple[bool, int | None]:
    """Whether some q <= ell gives every ordered-shadow pair at least
    alpha^q n^q walks of length ell with exactly q internal vertices."""
    alpha = Fraction(alpha)
    tuples = _ordered_shadow(K)
    if not tuples:
        return False, None
    n = K.n
    worst = {q: None for q in range(ell + 1)}
    for v1 in tuples:
        for v2 in tuples:
            hist = connecting_walk_histogram(K, v1, v2, ell)
            for q in range(ell + 1):
                c = hist.get(q, 0)
                if worst[q] is None or c < worst[q]:
                    worst[q] = c
    for q in range(ell + 1):
        if worst[q] is not None and worst[q] >= alpha ** q * n ** q:
            return True, q
    return False, None


# lifting walks into the next clique graph

def first_bad_clique_window(H: KGraph, seq: Sequence[int], size: int) -> int | None:
    """Index of the first ``size``-window of seq that is not a clique of H."""
    for t in range(len(seq) - size + 1):
        if not H.is_clique(seq[t:t + size]):
            return t
    return None


def lift_walk(H: KGraph, W: Sequence[int], i: int, forbidden=()) -> tuple:
    """Lift a walk W in K_{i-1}(H) of length l to a walk in K_i(H) of
    length i(l - i + 1).

    Let C_t be the t-th window of W and m = l - i + 1.  For t < m pick the
    smallest x_t outside V(W) and ``forbidden`` extending both C_t and
    C_{t+1} to i-cliques.  The output cycles through i slots: slots
    1..i-1 hold the current window of W and slot i holds the current x.
    Each round rewrites one w-slot (C_t becomes C_{t+1}) and then the
    x-slot (x_t becomes x_{t+1}), so every i consecutive entries are one
    of the cliques C_t + x_t or C_{t+1} + x_t.
    """
    W = list(W)
    if i < H.k + 1:
        raise ParameterError(f"lifting target i = {i} must exceed k = {H.k}")
    ell = len(W) - i + 2
    m = ell - i + 1
    if m < 1:
        raise ParameterError(f"walk length {ell} too short to lift into K_{i}; need at least {i}")
    bad = first_bad_clique_window(H, W, i - 1)
    if bad is not None:
        raise PreconditionError(f"input is not a walk in K_{i - 1}(H): window {bad}")
    block = bits(W) | bits(forbidden)
    xs = []
    for t in range(m):
        ext = extension_bits(H, W[t:t + i - 1]) & extension_bits(H, W[t + 1:t + i]) & ~block
        if not ext:
            raise LiftFailure(t + 1)
        xs.append((ext & -ext).bit_length() - 1)
    slots = W[: i - 1] + [xs[0]]
    out = list(slots)
    for t in range(m):
        for s in range(i - 1):
            if s == t % (i - 1):
                slots[s] = W[t + i - 1]
            out.append(slots[s])
        if t < m - 1:
            slots[i - 1] = xs[t + 1]
            out.append(slots[i - 1])
    return tuple(out)


# exhaustive power-path search

class _Search:
    def __init__(self, budget: int):
        self.budget = budget
        self.explored = 0

    def tick(self):
        self.explored += 1
        if self.explored > self.budget:
            raise BudgetExceeded("search budget exhausted", self.explored)


def _extend_ok(H: KGraph, seq: list, v: int, r: int) -> bool:
    """Appending v keeps the last r entries a clique (all k-sets through v)."""
    k = H.k
    back = seq[-(r - 1):] if r > 1 else []
    if len(back) < k - 1:
        return True
    es = H.edge_set
    return all(tuple(sorted(c + (v,))) in es for c in combinations(back, k - 1))


def _power_path_dfs(H: KGraph, r: int, prefix: list, middle: int, suffix: list, allowed: int,
                    search: _Search):
    """Fill ``middle`` free positions between prefix and suffix."""
    seq = list(prefix)

    def rec(left: int, used: int):
        search.tick()
        if left == 0:
            tail = list(seq)
            for v in suffix:
                if not _extend_ok(H, tail, v, r):
                    return None
                tail.append(v)
            return tail
        for v in members(allowed & ~used):
            if _extend_ok(H, seq, v, r):
                seq.append(v)
                got = rec(left - 1, used | (1 << v))
                if got is not None:
                    return got
                seq.pop()
        return None

    return rec(middle, bits(prefix) | bits(suffix))


def connect_pair(H: KGraph, r: int, v1, v2, U=(), ell: int = 0,
                 budget: int = DEFAULT_BUDGET) -> tuple:
    """A tight path of length ell in K_r(H - U) from v1 to v2.

    Tries the greedy end extension first (extend v1 forward and v2
    backward by r-1 vertices, then search the middle), then falls back to
    a full exhaustive search.  Raises NotFound when the exhaustive search
    completes empty and BudgetExceeded when it runs out of nodes.
    """
    v1, v2 = list(v1), list(v2)
    if len(v1) != r - 1 or len(v2) != r - 1:
        raise ParameterError(f"end tuples must have length {r - 1}")
    if set(v1) & set(v2):
        raise PreconditionError("end tuples must be disjoint")
    if r < H.k:
        raise ParameterError("r must be at least k")
    Ub = U if isinstance(U, int) else bits(U)
    if (bits(v1) | bits(v2)) & Ub:
        raise PreconditionError("end tuples meet U")
    for v in (v1, v2):
        if not H.is_clique(v):
            raise PreconditionError(f"{tuple(v)} is not in the ordered shadow of K_{r}")
    middle = ell - r + 1
    if middle < 0:
        raise NotFound(f"length {ell} cannot separate two disjoint {r - 1}-tuples", explored=0)
    allowed = ((1 << H.n) - 1) & ~Ub & ~bits(v1) & ~bits(v2)
    search = _Search(budget)

    if middle >= 2 * (r - 1):
        got = _greedy_then_middle(H, r, v1, v2, middle, allowed, search)
        if got is not None:
            return tuple(got)
    got = _power_path_dfs(H, r, v1, middle, v2, allowed, search)
    if got is None:
        raise NotFound(f"no tight path of length {ell} in K_{r}", explored=search.explored)
    return tuple(got)


def _greedy_then_middle(H, r, v1, v2, middle, allowed, search):
    # forward greedy from v1
    seq = list(v1)
    used = 0
    for _ in range(r - 1):
        pick = next((v for v in members(allowed & ~used) if _extend_ok(H, seq, v, r)), None)
        if pick is None:
            return None
        seq.append(pick)
        used |= 1 << pick
    # backward greedy from v2 (build reversed, windows are symmetric)
    back = list(reversed(v2))
    for _ in range(r - 1):
        pick = next((v for v in members(allowed & ~used) if _extend_ok(H, back, v, r)), None)
        if pick is None:
            return None
        back.append(pick)
        used |= 1 << pick
    suffix = list(reversed(back))
    inner = middle - 2 * (r - 1)
    return _power_path_dfs(H, r, seq, inner, suffix, allowed & ~used, search)


def find_power_path(H: KGraph, r: int, vertices, budget: int = DEFAULT_BUDGET) -> tuple | None:
    """A spanning power path (every r consecutive entries a clique) on the
    given vertex set, or None after exhaustive search."""
    vs = sorted(vertices)
    if not vs:
        return ()
    allowed = bits(vs)
    search = _Search(budget)
    for first in vs:
        got = _power_path_dfs(H, r, [first], len(vs) - 1, [], allowed, search)
        if got is not None:
            return tuple(got)
    return None


def find_power_cycle(H: KGraph, r: int, budget: int = DEFAULT_BUDGET) -> tuple | None:
    """Exhaustive search for the (r-k+1)th power of a tight Hamilton cycle.

    Returns a cyclic vertex sequence or None when none exists.  Vertex 0
    is fixed first to quotient out rotations.
    """
    n = H.n
    if n == 0:
        return None
    if n <= r:
        return tuple(range(n)) if H.is_clique(range(n)) and n >= H.k else None
    search = _Search(budget)
    seq = [0]
    full = (1 << n) - 1

    def closes(s):
        return is_power_cycle(H, s, r)

    def rec(used: int):
        search.tick()
        if used == full:
            return list(seq) if closes(seq) else None
        for v in members(full & ~used):
            if _extend_ok(H, seq, v, r):
                seq.append(v)
                got = rec(used | (1 << v))
                if got is not None:
                    return got
                seq.pop()
        return None

    got = rec(1)
    return tuple(got) if got is not None else None
