"""Absorbers for powers of tight cycles, absorbing X-tuples for trees,
reservoirs, and the three-step Hamilton power-cycle pipeline.

Conventions: a power of a tight path or cycle with exponent r-k+1 is
stored as its vertex sequence; the structure is valid iff every r
consecutive vertices form a clique of H.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from math import comb

from .cliquegraph import extension_bits
from .cyclewalks import (DEFAULT_BUDGET, connect_pair, find_power_cycle, find_power_path,
                         is_power_cycle)
from .errors import (BudgetExceeded, Infeasible, InvariantError, NoAbsorber, NotFound,
                     ParameterError, PreconditionError)
from .hypercore import KGraph, as_bits, bits, k22_count, members
from .hypertrees import RTree, validate_rtree


@dataclass
class Enumerated:
    """A possibly truncated enumeration result."""

    items: list
    truncated: bool = False

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)


# path absorbers

@dataclass(frozen=True)
class PathAbsorber:
    tuple: tuple
    target: int | None = None

    def halves(self) -> tuple[tuple, tuple]:
        h = len(self.tuple) // 2
        return self.tuple[:h], self.tuple[h:]


def _clique_windows(H: KGraph, seq, r: int) -> bool:
    return all(H.is_clique(seq[s:s + r]) for s in range(len(seq) - r + 1))


def inserted(t, v) -> tuple:
    """t with v placed after its first half."""
    h = len(t) // 2
    return tuple(t[:h]) + (v,) + tuple(t[h:])


def is_path_absorbing(H: KGraph, t, v: int, r: int) -> bool:
    t = tuple(t)
    if len(t) != 2 * r - 2:
        raise ParameterError(f"absorber has length {len(t)}, expected {2 * r - 2}")
    if len(set(t)) != len(t) or v in t:
        raise PreconditionError("absorber entries must be distinct and avoid v")
    return _clique_windows(H, t, r) and _clique_windows(H, inserted(t, v), r)


def enumerate_path_absorbers(H: KGraph, v: int, r: int, limit: int | None = None,
                             allowed=None) -> Enumerated:
    """All v-path-absorbing (2r-2)-tuples in lexicographic order.

    Positions are filled left to right while two sequences are kept
    alive: the tuple itself and the tuple with v after position r-1.
    A candidate must extend the last r-1 entries of both to a clique.
    """
    if r < H.k:
        raise ParameterError("r must be at least k")
    pool = ((1 << H.n) - 1) & ~(1 << v)
    if allowed is not None:
        pool &= as_bits(allowed)
    out: list = []
    size = 2 * r - 2
    plain: list = []
    with_v: list = []

    def tail(seq):
        return seq[-(r - 1):] if r > 1 else []

    def rec(used: int) -> bool:
        p = len(plain)
        if p == size:
            out.append(PathAbsorber(tuple(plain), v))
            return limit is not None and len(out) >= limit
        cand = pool & ~used & extension_bits(H, tail(plain)) & extension_bits(H, tail(with_v))
        for u in members(cand):
            plain.append(u)
            with_v.append(u)
            pushed = False
            if len(plain) == r - 1:
                # v must extend the first half before the second half starts
                if not (extension_bits(H, plain) >> v & 1):
                    plain.pop()
                    with_v.pop()
                    continue
                with_v.append(v)
                pushed = True
            stop = rec(used | (1 << u))
            if pushed:
                with_v.pop()
            plain.pop()
            with_v.pop()
            if stop:
                return True
        return False

    if r == 1:
        return Enumerated([PathAbsorber((), v)])
    truncated = rec(0)
    return Enumerated(out, truncated)


@dataclass
class AbsorberFamily:
    r: int
    members: list = field(default_factory=list)  # PathAbsorber
    coverage: dict = field(default_factory=dict)  # vertex -> #members absorbing it

    def used_bits(self) -> int:
        return bits(v for m in self.members for v in m.tuple)

    def absorbing(self, H: KGraph, x: int) -> list:
        return [m for m in self.members if x not in m.tuple and is_path_absorbing(H, m.tuple, x, self.r)]


def family_coverage(H: KGraph, r: int, tuples, targets) -> dict:
    """Recount: vertex -> number of tuples that absorb it."""
    cov = {}
    for x in targets:
        cov[x] = sum(1 for t in tuples if x not in t and is_path_absorbing(H, t, x, r))
    return cov


def family_violation(H: KGraph, A: AbsorberFamily) -> str | None:
    seen = 0
    for m in A.members:
        b = bits(m.tuple)
        if b & seen or len(set(m.tuple)) != len(m.tuple):
            return f"member {m.tuple} is not disjoint from the others"
        seen |= b
    recount = family_coverage(H, A.r, [m.tuple for m in A.members], A.coverage)
    if recount != A.coverage:
        return "coverage does not match a recount"
    return None


def select_family(H: KGraph, r: int, per_vertex: int, cap: int | None = None,
                  targets=None, exclude=()) -> AbsorberFamily:
    """Greedy pairwise-disjoint absorber family.

    Repeatedly takes the least covered target (smallest id on ties) and
    adds the lexicographically first tuple absorbing it that avoids all
    chosen tuples and ``exclude``.  Every target must end up absorbed by
    at least per_vertex members.
    """
    if per_vertex < 0:
        raise ParameterError("per_vertex must be nonnegative")
    targets = sorted(range(H.n) if targets is None else set(targets))
    free = ((1 << H.n) - 1) & ~as_bits(exclude)
    size = 2 * r - 2
    for x in targets:
        room = (free & ~(1 << x)).bit_count()
        if per_vertex * size > room:
            raise Infeasible(f"{per_vertex} disjoint {size}-tuples avoiding {x} need "
                             f"{per_vertex * size} vertices, only {room} available", bottleneck=x)
    fam = AbsorberFamily(r, [], {x: 0 for x in targets})
    used = 0
    while True:
        short = [x for x in targets if fam.coverage[x] < per_vertex]
        if not short:
            return fam
        if cap is not None and len(fam.members) >= cap:
            x = min(short, key=lambda y: (fam.coverage[y], y))
            raise Infeasible(f"cap of {cap} members reached", bottleneck=x)
        x = min(short, key=lambda y: (fam.coverage[y], y))
        got = enumerate_path_absorbers(H, x, r, limit=1, allowed=free & ~used)
        if not got.items:
            raise Infeasible(f"no further absorber for vertex {x}", bottleneck=x)
        t = got.items[0].tuple
        fam.members.append(PathAbsorber(t))
        used |= bits(t)
        for y in targets:
            if y not in t and is_path_absorbing(H, t, y, r):
                fam.coverage[y] += 1


def _segment_start(cycle: list, t: tuple) -> int | None:
    n = len(cycle)
    if len(t) > n:
        return None
    pos = {v: i for i, v in enumerate(cycle)}
    if t[0] not in pos:
        return None
    s = pos[t[0]]
    if all(cycle[(s + i) % n] == t[i] for i in range(len(t))):
        return s
    return None


def absorb_step(H: KGraph, cycle, A: AbsorberFamily, x: int) -> list:
    """Insert x into the cycle at the midpoint of a member absorbing it.

    The member whose segment starts earliest in the cycle is used and
    removed from A.  The result is re-validated.
    """
    cycle = list(cycle)
    r = A.r
    if x in cycle:
        raise PreconditionError(f"vertex {x} is already on the cycle")
    best = None
    for m in A.members:
        if x in m.tuple:
            continue
        s = _segment_start(cycle, m.tuple)
        if s is None or not is_path_absorbing(H, m.tuple, x, r):
            continue
        if best is None or s < best[0]:
            best = (s, m)
    if best is None:
        raise NoAbsorber(x, dict(A.coverage))
    s, m = best
    p = (s + r - 1) % len(cycle)
    new = cycle[:p] + [x] + cycle[p:]
    if not is_power_cycle(H, new, r):
        raise InvariantError(f"absorbing {x} with {m.tuple} broke the cycle")
    A.members.remove(m)
    for y in A.coverage:
        if y not in m.tuple and is_path_absorbing(H, m.tuple, y, r):
            A.coverage[y] -= 1
    A.coverage.pop(x, None)
    return new


def absorb_all(H: KGraph, cycle, A: AbsorberFamily, leftover, strict: bool = True,
               used: list | None = None) -> list:
    """Absorb the leftover vertices one by one, in the given order.

    With strict=True the three hypotheses are checked first: members
    are segments of the cycle, pairwise disjoint, and every leftover
    vertex has at least |leftover| members absorbing it.  ``used``
    collects (tuple, vertex) pairs as they are consumed.
    """
    cycle = list(cycle)
    r = A.r
    leftover = list(leftover)
    if not is_power_cycle(H, cycle, r) and cycle:
        raise PreconditionError("input is not a power of a tight cycle")
    for m in A.members:
        if _segment_start(cycle, m.tuple) is None:
            raise PreconditionError(f"member {m.tuple} is not a segment of the cycle")
    seen = 0
    for m in A.members:
        if bits(m.tuple) & seen:
            raise PreconditionError("members are not pairwise disjoint")
        seen |= bits(m.tuple)
    avail = {x: len(A.absorbing(H, x)) for x in leftover}
    for x in leftover:
        A.coverage.setdefault(x, avail[x])
    if strict:
        low = [x for x in leftover if avail[x] < len(leftover)]
        if low:
            raise PreconditionError(f"vertex {low[0]} has {avail[low[0]]} absorbers, "
                                    f"{len(leftover)} needed")
    start = len(cycle)
    for i, x in enumerate(leftover):
        before = set(m.tuple for m in A.members)
        cycle = absorb_step(H, cycle, A, x)
        (gone,) = before - set(m.tuple for m in A.members)
        if used is not None:
            used.append((gone, x))
        # invariants (i)-(iii)
        if len(cycle) != start + i + 1 or not is_power_cycle(H, cycle, r):
            raise InvariantError("cycle length or structure drifted")
        if any(_segment_start(cycle, m.tuple) is None for m in A.members):
            raise InvariantError("a remaining member is no longer a segment")
        if strict:
            for y in leftover[i + 1:]:
                if len(A.absorbing(H, y)) < avail[y] - (i + 1):
                    raise InvariantError(f"availability for {y} dropped too fast")
    return cycle


# absorbing X-tuples

@dataclass(frozen=True)
class XTupleSpec:
    X: RTree

    def __post_init__(self):
        bad = validate_rtree(self.X)
        if bad is not None:
            raise ParameterError(f"X is not a valid tree: {bad}")

    @property
    def h(self) -> int:
        return self.X.n

    @property
    def order(self) -> tuple:
        return self.X.vertex_order


def _embed_in_links(K: KGraph, X: RTree, a: int, b: int, allowed: int, first_only: bool):
    """Yield maps x -> vertex embedding X into K(a) & K(b), placing X's
    vertices along its valid ordering, images taken from ``allowed``."""
    rr = X.r  # r - 1
    first = X.edges[0]
    img: dict = {}

    def link_cands(base) -> int:
        return K.nbr(tuple(base) + (a,)) & K.nbr(tuple(base) + (b,))

    def place_edges(i: int, used: int):
        if i == len(X.edges):
            yield dict(img)
            return
        e = X.edges[i]
        base = [img[u] for u in e[:-1]]
        for c in members(link_cands(base) & allowed & ~used):
            img[e[-1]] = c
            yield from place_edges(i + 1, used | (1 << c))
            del img[e[-1]]

    def place_first(p: int, used: int):
        if p == rr - 1:
            base = [img[u] for u in first[:-1]]
            for c in members(link_cands(base) & allowed & ~used):
                img[first[-1]] = c
                yield from place_edges(1, used | (1 << c))
                del img[first[-1]]
            return
        for c in members(allowed & ~used):
            img[first[p]] = c
            yield from place_first(p + 1, used | (1 << c))
            del img[first[p]]

    for got in place_first(0, 0):
        yield got
        if first_only:
            return


def is_absorbing_xtuple(K: KGraph, t, X: XTupleSpec, target) -> bool:
    t, target = tuple(t), tuple(target)
    r = K.k
    if X.X.r != r - 1:
        raise ParameterError(f"X must be {r - 1}-uniform")
    if len(target) != r or len(set(target)) != r:
        raise ParameterError(f"target must be {r} distinct vertices")
    if len(t) != X.h + 1:
        raise ParameterError(f"tuple must have {X.h + 1} entries")
    if len(set(t)) != len(t) or set(t) & set(target):
        return False
    us, ustar = t[:-1], t[-1]
    if tuple(sorted(target[:-1] + (ustar,))) not in K.edge_set:
        return False
    return any(True for _ in _embed_in_links(K, X.X, target[-1], ustar, bits(us), True))


def enumerate_lambda_X(K: KGraph, X: XTupleSpec, target, limit: int | None = None) -> Enumerated:
    """Absorbing X-tuples for target: pick u* in the neighbourhood of the
    first r-1 target vertices, then every vertex set carrying a copy of X
    in K(v_r) & K(u*), in every order."""
    target = tuple(target)
    r = K.k
    if X.X.r != r - 1:
        raise ParameterError(f"X must be {r - 1}-uniform")
    if len(target) != r or len(set(target)) != r:
        raise ParameterError(f"target must be {r} distinct vertices")
    prefix = tuple(sorted(target[:-1]))
    if prefix not in K.neighbourhoods:
        raise PreconditionError(f"{prefix} is not in the (r-1)-shadow")
    vr = target[-1]
    out: list = []
    tb = bits(target)
    full = (1 << K.n) - 1
    for ustar in members(K.nbr(prefix) & ~tb):
        allowed = full & ~tb & ~(1 << ustar)
        sets = set()
        for emb in _embed_in_links(K, X.X, vr, ustar, allowed, False):
            sets.add(frozenset(emb.values()))
        for S in sorted(sets, key=sorted):
            for p in permutations(sorted(S)):
                out.append(p + (ustar,))
                if limit is not None and len(out) >= limit:
                    return Enumerated(out, True)
    return Enumerated(out, False)


def is_x_covered(phi: dict, T: RTree, t, X: XTupleSpec) -> bool:
    """Some X-tuple (v_1..v_h, v*) of T maps onto t under phi."""
    t = tuple(t)
    if len(t) != X.h + 1 or not phi:
        return False
    inv = {}
    for v, u in phi.items():
        if u in inv:
            raise PreconditionError("phi is not injective")
        inv[u] = v
    if any(u not in inv for u in t):
        return False
    vs = [inv[u] for u in t[:-1]]
    vstar = inv[t[-1]]
    link = {frozenset(e) - {vstar} for e in T.edge_sets if vstar in e}
    if not link or set().union(*link) != set(vs):
        return False
    xmap = dict(zip(X.order, vs))
    image = {frozenset(xmap[x] for x in e) for e in X.X.edges}
    return image == link


# reservoirs

@dataclass(frozen=True)
class Reservoir:
    W: frozenset
    gamma: Fraction
    mu: Fraction
    seed: int | None = None


@dataclass
class ReservoirReport:
    size_ok: bool
    codegree_ok: bool
    k22_ok: bool
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.size_ok and self.codegree_ok and self.k22_ok


def verify_reservoir(H: KGraph, W, gamma, mu, k22_cache: dict | None = None) -> ReservoirReport:
    """Check the three reservoir conditions exactly."""
    gamma, mu = Fraction(gamma), Fraction(mu)
    n, k = H.n, H.k
    Wb = as_bits(W)
    w = Wb.bit_count()
    rep = ReservoirReport(True, True, True)
    if not (gamma - mu) * n <= w <= (gamma + mu) * n:
        rep.size_ok = False
        rep.failures.append(("size", w))
    for f, nb in H.neighbourhoods.items():
        if (nb & Wb).bit_count() < (Fraction(nb.bit_count(), n) - mu) * w:
            rep.codegree_ok = False
            rep.failures.append(("codegree", f))
            break
    norm_full = comb(n - k, k)
    norm_w = comb(w - k, k) if w >= k else 0
    cache = {} if k22_cache is None else k22_cache
    for e in H.edges:
        if e not in cache:
            cache[e] = k22_count(H, e)
        need = (Fraction(cache[e], norm_full) - mu) * norm_w if norm_full else -mu * norm_w
        if need <= 0:
            continue
        if k22_count(H, e, Wb) < need:
            rep.k22_ok = False
            rep.failures.append(("k22", e))
            break
    return rep


def _sample(n: int, gamma: Fraction, seed: int) -> frozenset:
    rng = random.Random(seed)
    return frozenset(v for v in range(n) if rng.random() < gamma)


def reservoir_sample(H: KGraph, gamma, mu, seed: int = 0, tries: int = 20,
                     k22_cache: dict | None = None) -> Reservoir:
    """Include each vertex with probability gamma and keep the first
    sample (over seeds seed, seed+1, ...) that verifies."""
    gamma, mu = Fraction(gamma), Fraction(mu)
    if not (0 <= mu < gamma <= 1):
        raise ParameterError("need 0 <= mu < gamma <= 1")
    cache = {} if k22_cache is None else k22_cache
    fails = Counter()
    for s in range(seed, seed + tries):
        W = _sample(H.n, gamma, s)
        rep = verify_reservoir(H, W, gamma, mu, cache)
        if rep.ok:
            return Reservoir(W, gamma, mu, s)
        for name, _ in rep.failures:
            fails[name] += 1
    raise NotFound(f"no verified reservoir among {tries} seeds", stats=dict(fails))


# the three-step pipeline

@dataclass
class PipelineParams:
    gamma: Fraction = Fraction(1, 4)
    mu: Fraction = Fraction(1, 5)
    per_vertex: int = 1
    cap: int | None = None
    seed: int = 0
    reservoir_tries: int = 20
    budget: int = DEFAULT_BUDGET
    step_budget: int = 20_000


@dataclass
class PipelineResult:
    cycle: tuple
    absorbers_used: list
    stages: dict
    fallback: bool

    def certificate(self) -> dict:
        return {"cycle": list(self.cycle),
                "absorbers_used": [[list(t), x] for t, x in self.absorbers_used],
                "stages": self.stages}


class _StageFailure(Exception):
    def __init__(self, stage: str, reason: str):
        self.stage = stage
        super().__init__(reason)


def _connect(H: KGraph, r: int, a, b, pool: int, budget: int, at_least: int = 0):
    """Shortest connector from a to b whose interior lies in pool and has
    at least ``at_least`` vertices; returns the interior or None."""
    full = (1 << H.n) - 1
    avoid = full & ~pool & ~bits(a) & ~bits(b)
    for middle in range(at_least, pool.bit_count() + 1):
        try:
            path = connect_pair(H, r, a, b, U=avoid, ell=middle + r - 1, budget=budget)
        except (NotFound, BudgetExceeded):
            continue
        return list(path[r - 1:len(path) - (r - 1)])
    return None


def _pipeline_steps(H: KGraph, r: int, P: PipelineParams, stages: dict, used: list) -> list:
    n = H.n
    full = (1 << n) - 1
    # step 1: reservoir, absorbers, absorbing path
    try:
        res = reservoir_sample(H, P.gamma, P.mu, P.seed, P.reservoir_tries)
        U = set(res.W)
        stages["reservoir"] = {"status": "ok", "size": len(U), "seed": res.seed}
    except NotFound as exc:
        # below the sampling regime: keep the first sample of the right
        # size, unverified
        g, m = Fraction(P.gamma), Fraction(P.mu)
        samples = [_sample(n, g, s) for s in range(P.seed, P.seed + P.reservoir_tries)]
        sized = [W for W in samples if (g - m) * n <= len(W) <= (g + m) * n]
        U = set((sized or samples)[0])
        stages["reservoir"] = {"status": "unverified", "size": len(U), "stats": exc.stats}
    try:
        fam = select_family(H, r, P.per_vertex, P.cap, targets=U, exclude=U)
    except Infeasible as exc:
        raise _StageFailure("absorbers", str(exc)) from None
    stages["absorbers"] = {"status": "ok", "members": [list(m.tuple) for m in fam.members]}
    AP: list = []
    taken = bits(U)
    for m in fam.members:
        t = list(m.tuple)
        if AP:
            mid = _connect(H, r, AP[-(r - 1):], t[:r - 1], full & ~taken & ~bits(AP) & ~bits(t),
                           P.step_budget)
            if mid is None:
                raise _StageFailure("absorbing_path", f"could not connect member {t}")
            AP += mid
        AP += t
        taken |= bits(AP)
    stages["absorbing_path"] = {"status": "ok", "length": len(AP)}

    # step 2: power path on the rest, closed through the reservoir
    R = [v for v in range(n) if v not in U and v not in set(AP)]
    pool = bits(U)
    segments = [AP] if AP else []
    if len(R) >= r - 1:
        try:
            Pp = find_power_path(H, r, R, budget=P.budget)
        except BudgetExceeded:
            Pp = None
        if Pp is None:
            raise _StageFailure("power_path", "no spanning power path on the remainder")
        segments.append(list(Pp))
    else:
        pool |= bits(R)
    if not segments:
        raise _StageFailure("power_path", "nothing to close into a cycle")
    cycle: list = []
    for i, seg in enumerate(segments):
        nxt = segments[(i + 1) % len(segments)]
        cycle += seg
        if len(segments) == 1 and len(seg) < 2 * (r - 1):
            raise _StageFailure("closing", "segment too short to close on itself")
        # each absorber takes one vertex, so the last connector leaves at
        # most len(fam.members) pool vertices behind
        last = i == len(segments) - 1
        need = max(0, pool.bit_count() - len(fam.members)) if last else 0
        mid = _connect(H, r, seg[-(r - 1):], nxt[:r - 1], pool, P.step_budget, need)
        if mid is None:
            raise _StageFailure("closing", f"could not close segment {i}")
        cycle += mid
        pool &= ~bits(mid)
    if not is_power_cycle(H, cycle, r):
        raise InvariantError("closed cycle failed validation")
    stages["power_path"] = {"status": "ok", "segments": len(segments), "cycle_length": len(cycle)}

    # step 3: absorb what is left
    leftover = [v for v in range(n) if v not in set(cycle)]
    members_on_cycle = [m for m in fam.members if _segment_start(cycle, m.tuple) is not None]
    fam.members = members_on_cycle
    fam.coverage = family_coverage(H, r, [m.tuple for m in fam.members], leftover)
    strict_ok = all(c >= len(leftover) for c in fam.coverage.values())
    try:
        cycle = absorb_all(H, cycle, fam, leftover, strict=strict_ok, used=used)
    except NoAbsorber as exc:
        raise _StageFailure("absorb", str(exc)) from None
    stages["absorb"] = {"status": "ok", "leftover": leftover, "hypotheses_met": strict_ok}
    return cycle


def hamilton_power_pipeline(H: KGraph, r: int, params: PipelineParams | None = None) -> PipelineResult:
    """Find the (r-k+1)th power of a tight Hamilton cycle.

    Runs reservoir / absorbing path, almost spanning cycle, absorption.
    If a stage fails the exhaustive search decides; NotFound is raised
    only when that search completes without a cycle.
    """
    P = params or PipelineParams()
    if r < H.k:
        raise ParameterError("r must be at least k")
    stages: dict = {}
    used: list = []
    fallback = False
    cycle = None
    if H.n > 2 * r:
        try:
            cycle = _pipeline_steps(H, r, P, stages, used)
        except _StageFailure as exc:
            stages[exc.stage] = {"status": "failed", "reason": str(exc)}
    else:
        stages["pipeline"] = {"status": "skipped", "reason": f"n <= {2 * r}"}
    if cycle is None:
        fallback = True
        used = []
        got = find_power_cycle(H, r, budget=P.budget)
        stages["oracle"] = {"status": "ok" if got else "none"}
        if got is None:
            raise NotFound("no power of a tight Hamilton cycle exists", stats=stages)
        cycle = list(got)
    if len(cycle) != H.n or not is_power_cycle(H, cycle, r):
        raise InvariantError("pipeline produced an invalid cycle")
    return PipelineResult(tuple(cycle), used, stages, fallback)
