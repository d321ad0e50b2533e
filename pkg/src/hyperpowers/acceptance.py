"""The thirteen acceptance checks, shared by the test suite and the
``corpus run --suite acceptance`` command.

Each check returns a CheckResult; ``detail`` records what was counted so
that vacuous passes are visible.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import ceil

from . import oracles
from .absorbing import (AbsorberFamily, PathAbsorber, absorb_all, absorb_step,
                        hamilton_power_pipeline, is_path_absorbing, reservoir_sample,
                        verify_reservoir)
from .cliquegraph import clique_graph, common_extenders, rdeg_bound_check
from .cliquegraph import extension_bits
from .cyclewalks import (CyclePowerSpec, cycle_power, find_power_cycle,
                         is_power_cycle, is_walk, lift_walk, power_windows_ok)
from .errors import LiftFailure, NotFound
from .hypercore import KGraph, complete_kgraph, members, min_codegree, random_kgraph
from .hypertrees import (compute_layering, cut_at_first_layer, find_small_subtree,
                         layered_tuple, layering_violation, max_vertex_degree,
                         product_width, random_rtree, small_subtree_window,
                         strong_product, strong_product_decomposition, validate_rtree, admits)
from .tilings import (IndexLattice, VertexPartition, divisibility_barrier_scan, f_threshold,
                      find_H_matching, kvectors, matching_violation, window_factor)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict} [{self.number:2d}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number: int, name: str):
    def wrap(fn):
        def run(seed: int = 0) -> CheckResult:
            t0 = time.perf_counter()
            passed, detail = fn(seed)
            return CheckResult(number, name, passed, detail, time.perf_counter() - t0)
        run.number = number
        run.check_name = name
        return run
    return wrap


@_timed(1, "threshold arithmetic")
def check_thresholds(seed: int):
    ok = 1 - f_threshold(3, 4) == Fraction(4, 5)
    ok &= all(f_threshold(k, k) == Fraction(1, 2) for k in range(2, 9))
    ok &= all(f_threshold(2, r) == Fraction(1, r) for r in range(2, 30))
    mono = all(f_threshold(k, j + 1) < f_threshold(k, j)
               for k in range(2, 9) for j in range(k, k + 20))
    return ok and mono, f"values exact, monotone over k<=8, j<=k+20: {mono}"


def _dense_random(n: int, k: int, rng: random.Random, lo=0.5, hi=1.0) -> KGraph:
    return random_kgraph(n, k, rng.uniform(lo, hi), rng)


@_timed(2, "r-degree bound")
def check_rdeg(seed: int):
    rng = random.Random(seed)
    checked = bad = 0
    for _ in range(200):
        H = _dense_random(rng.randint(5, 10), 3, rng, 0.6, 1.0)
        for r in (3, 4):
            for F in combinations(range(H.n), r - 1):
                if not oracles.clique(H, F):
                    continue
                actual, bound = rdeg_bound_check(H, F)
                if actual != oracles.extension_count(H, F) or actual < bound:
                    bad += 1
                checked += 1
    return bad == 0, f"{checked} cliques checked, {bad} violations"


def _graph_with_min_degree(n: int, missing: int, rng: random.Random) -> KGraph:
    """2-graph whose complement has maximum degree <= missing."""
    deg = [0] * n
    gone = set()
    pairs = list(combinations(range(n), 2))
    rng.shuffle(pairs)
    for a, b in pairs:
        if deg[a] < missing and deg[b] < missing and rng.random() < 0.7:
            gone.add((a, b))
            deg[a] += 1
            deg[b] += 1
    return KGraph(n, 2, [p for p in pairs if p not in gone])


def _extender_instances(H: KGraph, j: int, need: int):
    """(qualifying pairs, failures) over all j-clique pairs sharing j-1."""
    cliques = [c for c in combinations(range(H.n), j) if oracles.clique(H, c)]
    by_core: dict = {}
    for c in cliques:
        for drop in range(j):
            by_core.setdefault(c[:drop] + c[drop + 1:], []).append(c)
    pairs = fails = 0
    for group in by_core.values():
        for C1, C2 in combinations(group, 2):
            got, _ = common_extenders(H, C1, C2)
            if got != oracles.common_extender_set(H, C1, C2):
                fails += 1
            if len(got) < need:
                fails += 1
            pairs += 1
    return pairs, fails


@_timed(3, "common extender bound")
def check_extenders(seed: int):
    rng = random.Random(seed)
    alpha = Fraction(1, 2)
    qualifying = 0
    for j in range(1, 5):
        for n in range(max(2, ceil((j + 1) ** 2 / alpha)), 31):
            need_delta = ceil((1 - f_threshold(2, j + 1) + alpha) * n)
            # the largest possible minimum degree is n - 1
            if need_delta <= n - 1:
                H = complete_kgraph(n, 2)
                qualifying += _extender_instances(H, j, ceil(alpha * n))[0]
    # non-vacuous companion: alpha = 1/6, j = 2, n = 54
    a2, j2, n2 = Fraction(1, 6), 2, 54
    need = ceil((1 - f_threshold(2, j2 + 1) + a2) * n2)
    H = _graph_with_min_degree(n2, n2 - 1 - need, rng)
    ok_delta = min_codegree(H) >= need
    pairs, fails = _extender_instances(H, j2, ceil(a2 * n2))
    passed = ok_delta and fails == 0 and qualifying == 0
    return passed, (f"alpha=1/2 instances: {qualifying} (hypothesis unsatisfiable); "
                    f"alpha=1/6 n=54 j=2 delta={min_codegree(H)}>={need}: {pairs} pairs, {fails} failures")


def _random_clique_walk(H: KGraph, size: int, length: int, rng: random.Random):
    """Random walk in K_size(H) with ``length`` windows, or None."""
    start = [c for c in combinations(range(H.n), size) if oracles.clique(H, c)]
    if not start:
        return None
    seq = list(rng.choice(start))
    rng.shuffle(seq)
    while len(seq) < length + size - 1:
        ext = list(members(extension_bits(H, seq[len(seq) - size + 1:])))
        if not ext:
            return None
        seq.append(rng.choice(ext))
    return seq


@_timed(4, "walk lifting")
def check_lift(seed: int):
    rng = random.Random(seed)
    done = failures = bad = 0
    while done < 100:
        k = rng.choice((2, 3))
        n = rng.randint(14, 18)
        H = random_kgraph(n, k, 0.9, rng)
        i = k + 1
        ell = rng.randint(i, i + 3)
        W = _random_clique_walk(H, i - 1, ell, rng)
        if W is None or len(set(W)) + 2 * ell > n:
            continue
        try:
            out = lift_walk(H, W, i)
        except LiftFailure:
            failures += 1
            continue
        K = clique_graph(H, i)
        if not is_walk(K, out) or len(out) - i + 1 != i * (ell - i + 1):
            bad += 1
        done += 1
    return bad == 0, f"{done} lifts verified, {bad} bad, {failures} instances without extenders skipped"


@_timed(5, "clique tilings of cycle powers")
def check_tilings(seed: int):
    count = bad = 0
    for k in range(2, 6):
        for r in range(k, 6):
            for n in range(r, 21, r):
                G = cycle_power(CyclePowerSpec(n, k, r - k + 1))
                windows = window_factor(n, r)
                ok = all(oracles.clique(G, w) for w in windows)
                pattern = complete_kgraph(r, k)
                try:
                    M = find_H_matching(G, pattern, n)
                    ok &= matching_violation(G, M) is None and len(M.covered()) == n
                except NotFound:
                    ok = False
                bad += not ok
                count += 1
    return bad == 0, f"{count} (k, r, n) cases, {bad} failures"


@_timed(6, "triangle factors, n=6, degree >= 4")
def check_triangle_factors(seed: int):
    pairs = list(combinations(range(6), 2))
    K3 = complete_kgraph(3, 2)
    graphs = bad = 0
    for mask in range(1 << len(pairs)):
        es = [p for b, p in enumerate(pairs) if mask >> b & 1]
        deg = [0] * 6
        for a, b in es:
            deg[a] += 1
            deg[b] += 1
        if min(deg) < 4:
            continue
        G = KGraph(6, 2, es)
        graphs += 1
        try:
            M = find_H_matching(G, K3, 6)
            found = matching_violation(G, M) is None
        except NotFound:
            found = False
        if not found or not oracles.has_k3_factor(G):
            bad += 1
    return bad == 0, f"{graphs} labelled graphs with min degree >= 4, {bad} without a factor"


def _planted_instance(rng: random.Random):
    """Dense 3-graph with a planted tight cycle on all but 1-2 vertices and
    disjoint absorbing segments for the missing vertices."""
    r = 3
    n = rng.randint(8, 12)
    H = random_kgraph(n, 3, 0.9, rng)
    order = list(range(n))
    rng.shuffle(order)
    left = order[:rng.randint(1, 2)]
    cyc = order[len(left):]
    N = len(cyc)
    planted = [tuple(sorted(cyc[(s + t) % N] for t in range(3))) for s in range(N)]
    H = KGraph(n, 3, list(H.edges) + planted)
    fam = AbsorberFamily(r)
    used = set()
    for x in left:
        got = 0
        for s in range(N):
            t = tuple(cyc[(s + q) % N] for q in range(2 * r - 2))
            if used & set(t):
                continue
            if is_path_absorbing(H, t, x, r):
                fam.members.append(PathAbsorber(t))
                used |= set(t)
                got += 1
                if got >= len(left):
                    break
        if got < len(left):
            return None
    fam.coverage = {x: len(fam.absorbing(H, x)) for x in left}
    return H, cyc, fam, left


@_timed(7, "absorption rewrite")
def check_absorb(seed: int):
    rng = random.Random(seed)
    runs = bad = 0
    while runs < 500:
        inst = _planted_instance(rng)
        if inst is None:
            continue
        H, cyc, fam, left = inst
        if runs % 2:
            out = absorb_step(H, cyc, fam, left[0])
            want = len(cyc) + 1
        else:
            out = absorb_all(H, cyc, fam, left)
            want = len(cyc) + len(left)
        if len(out) != want or not oracles.window_windows_ok(H, out, 3):
            bad += 1
        runs += 1
    return bad == 0, f"{runs} runs, {bad} invalid outputs"


@_timed(8, "pipeline vs oracle")
def check_pipeline(seed: int):
    rng = random.Random(seed)
    qualifying = 0
    disagree = 0
    compared = fallbacks = 0
    for idx in range(100):
        n = 7 + idx % 2
        H = random_kgraph(n, 3, rng.uniform(0.85, 1.0), rng)
        if min_codegree(H) >= ceil(Fraction(9, 10) * n):
            qualifying += 1
    # companion corpus: dense 3-graphs on 7 and 8 vertices, any codegree
    for idx in range(60):
        n = 7 + idx % 2
        H = random_kgraph(n, 3, rng.uniform(0.75, 0.95), rng)
        truth = find_power_cycle(H, 3) is not None
        try:
            res = hamilton_power_pipeline(H, 3)
            got = is_power_cycle(H, res.cycle, 3) and len(res.cycle) == n
            fallbacks += res.fallback
        except NotFound:
            got = False
        disagree += got != truth
        compared += 1
    squares = True
    for n in (8, 12):
        res = hamilton_power_pipeline(complete_kgraph(n, 3), 4)
        squares &= len(res.cycle) == n and power_windows_ok(complete_kgraph(n, 3), res.cycle, 4, True)
    passed = disagree == 0 and squares
    return passed, (f"codegree>=0.9n instances: {qualifying} (max codegree is n-2); "
                    f"companion corpus: {compared} compared, {disagree} disagreements, "
                    f"{fallbacks} oracle fallbacks; squares n=8,12: {squares}")


@_timed(9, "lattice oracle equivalence")
def check_lattice(seed: int):
    sets = mism = 0
    for t in range(1, 5):
        for k in range(1, 4):
            vecs = list(kvectors(t, k))
            tests = list(vecs)
            for i in range(t):
                for j in range(t):
                    if i != j:
                        d = [0] * t
                        d[i], d[j] = 1, -1
                        tests.append(tuple(d))
            for size in range(0, 5):
                for gens in combinations(vecs, size):
                    L = IndexLattice(t, gens)
                    O = oracles.LatticeOracle(t, gens)
                    sets += 1
                    if any(L.contains(v) != O.contains(v) for v in tests):
                        mism += 1
                        continue
                    complete = all(O.contains(v) for v in vecs)
                    if L.is_complete(k) != complete:
                        mism += 1
                    trans = L.find_transferral()
                    any_trans = any(O.contains(v) for v in tests[len(vecs):])
                    if (trans is not None) != any_trans:
                        mism += 1
    return mism == 0, f"{sets} generator sets, {mism} disagreements"


@_timed(10, "divisibility barrier")
def check_barrier(seed: int):
    ok = True
    cases = []
    for a, b in ((3, 3), (3, 5)):
        n = a + b
        A, B = range(a), range(a, n)
        J = KGraph(n, 2, list(combinations(A, 2)) + list(combinations(B, 2)))
        try:
            find_H_matching(J, complete_kgraph(2, 2), n)
            ok = False
        except NotFound:
            pass
        natural = VertexPartition.of([A, B])
        mu = Fraction(1, n * n)
        found = divisibility_barrier_scan(J, mu)
        ok &= natural in found
        cases.append(f"{a}+{b}: {len(found)} barriers")
    return ok, "; ".join(cases)


@_timed(11, "tree machinery")
def check_trees(seed: int):
    rng = random.Random(seed)
    trees = small = 0
    bad = []
    gamma = Fraction(1, 2)
    for _ in range(1000):
        n = rng.randint(3, 14)
        T = random_rtree(n, 3, rng)
        if validate_rtree(T) is not None:
            bad.append("validate")
            continue
        e = rng.choice(T.edges)
        x = tuple(rng.sample(e, 2))
        L = compute_layering(T, x)
        if layering_violation(T, L) is not None:
            bad.append("layering")
            continue
        if len(L.layers) > 1:
            cut = cut_at_first_layer(T, L)
            L1 = L.layers[0]
            F = [i for i, ed in enumerate(T.edge_sets) if ed & L1]
            parts = sorted(F + [i for s in cut.tuples for i in cut.subtrees[s]])
            if parts != list(range(len(T.edges))) or sorted(cut.first_layer_edges) != F:
                bad.append("partition")
            if len(F) != len(set(cut.tuples)) or len(F) > max_vertex_degree(T):
                bad.append("count")
            for s in cut.tuples:
                if layered_tuple(L, s) != s or L.index[s[0]] != 2:
                    bad.append("rank")
        D = max_vertex_degree(T)
        lo, hi = small_subtree_window(T.n, gamma, D)
        try:
            sub = find_small_subtree(T, L, gamma, D)
        except NotFound:
            pass
        else:
            small += 1
            if not lo <= len(sub.edge_ids) <= hi:
                bad.append("size")
        trees += 1
    return not bad, f"{trees} trees, {small} small subtrees returned, problems: {sorted(set(bad)) or 'none'}"


@_timed(12, "strong product certificate")
def check_product(seed: int):
    rng = random.Random(seed)
    cases = bad = 0
    for _ in range(200):
        n = rng.randint(1, 8)
        T2 = KGraph(n, 2, [(rng.randrange(v), v) for v in range(1, n)])
        m = rng.randint(1, 3)
        G, D = strong_product_decomposition(T2, m)
        ok = (G == strong_product(T2, m) and validate_rtree(D) is None
              and admits(G, D, 2) and D.r <= 2 * m)
        bad += not ok
        cases += 1
    m, width = product_width(1, 2, 1)
    return bad == 0, f"{cases} trees, {bad} failures; width law at r=1,k=2,Delta=1: m={m}, 2m={width}"


@_timed(13, "reservoir verification")
def check_reservoir(seed: int):
    rng = random.Random(seed)
    trivial = all(reservoir_sample(random_kgraph(rng.randint(4, 9), 3, 0.6, rng), 1,
                                   Fraction(1, 10), 0, tries=1).W is not None for _ in range(20))
    H = complete_kgraph(20, 3)
    cache: dict = {}
    winner = None
    for s in range(51):
        try:
            res = reservoir_sample(H, Fraction(1, 2), Fraction(1, 4), s, tries=1, k22_cache=cache)
        except NotFound:
            continue
        if verify_reservoir(H, res.W, res.gamma, res.mu).ok:
            winner = s
            break
    return trivial and winner is not None, f"gamma=1 trivial: {trivial}; first verifying seed: {winner}"


ALL_CHECKS = [check_thresholds, check_rdeg, check_extenders, check_lift, check_tilings, check_triangle_factors,
              check_absorb, check_pipeline, check_lattice, check_barrier, check_trees,
              check_product, check_reservoir]


def run_all(seed: int = 0, only=None) -> list:
    out = []
    for chk in ALL_CHECKS:
        if only and chk.number not in only:
            continue
        out.append(chk(seed))
    return out
