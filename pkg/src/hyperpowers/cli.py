"""Command-line interface.

Exit codes: 0 success or verified, 1 definitive negative (an exhaustive
search finished empty), 2 inconclusive (budget exhausted or a heuristic
stage gave up), 3 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (BudgetExceeded, FormatError, Infeasible, LiftFailure, NoAbsorber, NotFound,
                     ParameterError, PreconditionError)
from .hypercore import KGraph, complete_kgraph, parse_graph, random_kgraph, to_khg, to_json

EXIT_OK, EXIT_NEGATIVE, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2, 3

CERT_KINDS = ("cycle-power", "path-power", "matching", "walk", "rtree-admit", "barrier", "reservoir")


class InputError(Exception):
    pass


def digest(H: KGraph) -> str:
    return hashlib.sha256(to_khg(H).encode()).hexdigest()


@dataclass
class Certificate:
    kind: str
    payload: dict
    input_digest: str
    verdict: bool | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind, "payload": self.payload,
                           "input_digest": self.input_digest, "verdict": self.verdict,
                           **self.extra}, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "Certificate":
        try:
            obj = json.loads(text)
            kind, payload, dg = obj["kind"], obj["payload"], obj["input_digest"]
        except (ValueError, KeyError, TypeError) as exc:
            raise FormatError(f"malformed certificate: {exc}") from None
        if kind not in CERT_KINDS:
            raise FormatError(f"unknown certificate kind {kind!r}")
        return Certificate(kind, payload, dg, obj.get("verdict"))


def verify_certificate(cert: Certificate, H: KGraph) -> bool:
    """Re-check a certificate with the plain validators."""
    from .cyclewalks import is_walk, power_windows_ok
    from .hypertrees import RTree, admits, validate_rtree
    from .tilings import Matching, is_divisibility_barrier, matching_violation, VertexPartition
    from .absorbing import verify_reservoir

    if cert.input_digest != digest(H):
        raise InputError("certificate digest does not match the graph")
    p = cert.payload
    try:
        if cert.kind in ("cycle-power", "path-power"):
            seq = [int(v) for v in p["cycle" if cert.kind == "cycle-power" else "path"]]
            cyclic = cert.kind == "cycle-power"
            full = cert.kind == "path-power" or len(seq) == H.n
            return full and power_windows_ok(H, seq, int(p["r"]), cyclic)
        if cert.kind == "walk":
            return is_walk(H, [int(v) for v in p["walk"]])
        if cert.kind == "matching":
            pat = KGraph(int(p["pattern"]["n"]), int(p["pattern"]["k"]),
                         [tuple(e) for e in p["pattern"]["edges"]])
            M = Matching(pat, [tuple(c) for c in p["copies"]])
            forb = [tuple(e) for e in p.get("forbidden", [])]
            return (matching_violation(H, M, forb) is None
                    and len(M.covered()) >= int(p.get("min_covered", 0)))
        if cert.kind == "rtree-admit":
            T = RTree.from_edges(int(p["r"]), p["edges"])
            return validate_rtree(T) is None and admits(H, T, H.k)
        if cert.kind == "barrier":
            P = VertexPartition.of(p["parts"])
            if P.ground != frozenset(range(H.n)):
                return False
            return is_divisibility_barrier(H, P, Fraction(p["mu"]))
        if cert.kind == "reservoir":
            return verify_reservoir(H, p["W"], Fraction(p["gamma"]), Fraction(p["mu"])).ok
    except (KeyError, TypeError, ValueError):
        return False
    return False


# argument helpers

def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _tuple(text: str) -> tuple:
    parts = text.replace(",", " ").split()
    try:
        return tuple(int(x) for x in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a vertex list: {text!r}") from None


def _load(path: str) -> KGraph:
    try:
        with open(path) as fh:
            return parse_graph(fh.read())
    except OSError as exc:
        raise InputError(str(exc)) from None


def _emit(args, obj, text: str | None = None) -> None:
    if getattr(args, "json", False):
        print(json.dumps(obj, sort_keys=True, default=str))
    else:
        print(text if text is not None else json.dumps(obj, indent=2, sort_keys=True, default=str))


def _write_graph(args, H: KGraph) -> None:
    text = to_json(H) + "\n" if (args.out or "").endswith(".json") else to_khg(H)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# subcommands

def cmd_gen(args) -> int:
    from .cyclewalks import CyclePowerSpec, cycle_power, path_power
    import random

    if args.what == "cycle-power":
        H = cycle_power(CyclePowerSpec(args.n, args.k, args.j))
    elif args.what == "path-power":
        H = path_power(args.n, args.k, args.j)
    elif args.what == "complete":
        H = complete_kgraph(args.n, args.k)
    else:
        H = random_kgraph(args.n, args.k, float(args.p), random.Random(args.seed))
    _write_graph(args, H)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .cyclewalks import first_bad_window

    H = _load(args.graph)
    if args.what == "walk":
        bad = first_bad_window(H, list(args.seq))
        _emit(args, {"walk": bool(bad is None), "first_bad_window": bad},
              "valid walk" if bad is None else f"window {bad} is not an edge")
        return EXIT_OK if bad is None else EXIT_NEGATIVE
    if not args.cert:
        raise InputError("verify cert needs --cert")
    try:
        with open(args.cert) as fh:
            cert = Certificate.from_json(fh.read())
    except OSError as exc:
        raise InputError(str(exc)) from None
    ok = verify_certificate(cert, H)
    _emit(args, {"kind": cert.kind, "verified": ok}, f"{cert.kind}: {'verified' if ok else 'REJECTED'}")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_clique_graph(args) -> int:
    from .cliquegraph import clique_graph

    H = _load(args.input)
    K = clique_graph(H, args.r)
    _write_graph(args, K)
    return EXIT_OK


def cmd_connect(args) -> int:
    from .cyclewalks import connect_pair

    H = _load(args.graph)
    path = connect_pair(H, args.r, args.from_, args.to, args.avoid or (), args.len, args.budget)
    cert = Certificate("path-power", {"path": list(path), "r": args.r}, digest(H))
    cert.verdict = verify_certificate(cert, H)
    _emit(args, json.loads(cert.to_json()), " ".join(map(str, path)))
    return EXIT_OK


def cmd_absorb(args) -> int:
    from .absorbing import enumerate_path_absorbers

    H = _load(args.graph)
    got = enumerate_path_absorbers(H, args.vertex, args.r, args.limit)
    obj = {"vertex": args.vertex, "absorbers": [list(a.tuple) for a in got],
           "truncated": got.truncated}
    lines = [" ".join(map(str, a.tuple)) for a in got]
    if got.truncated:
        lines.append(f"# truncated at {args.limit}")
    _emit(args, obj, "\n".join(lines) if lines else "# none")
    return EXIT_OK if got.items else EXIT_NEGATIVE


def cmd_pipeline(args) -> int:
    from .absorbing import PipelineParams, hamilton_power_pipeline

    H = _load(args.graph)
    P = PipelineParams(seed=args.seed, budget=args.budget)
    res = hamilton_power_pipeline(H, args.r, P)
    cert = Certificate("cycle-power", {"cycle": list(res.cycle), "r": args.r}, digest(H),
                       extra=res.certificate() | {"fallback": res.fallback})
    cert.verdict = verify_certificate(cert, H)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(cert.to_json() + "\n")
    _emit(args, json.loads(cert.to_json()), " ".join(map(str, res.cycle)))
    return EXIT_OK if cert.verdict else EXIT_INCONCLUSIVE


def cmd_threshold(args) -> int:
    from .tilings import f_threshold

    f = f_threshold(args.k, args.j)
    _emit(args, {"k": args.k, "j": args.j, "f": str(f), "one_minus_f": str(1 - f)},
          f"f_{args.k}({args.j}) = {f}; 1 - f = {1 - f}")
    return EXIT_OK


def cmd_factor(args) -> int:
    from .tilings import find_H_matching

    G = _load(args.graph)
    pat = _load(args.pattern)
    avoid = _load(args.avoid).edges if args.avoid else ()
    need = G.n if args.min_covered is None else args.min_covered
    M = find_H_matching(G, pat, need, avoid)
    payload = {"pattern": {"n": pat.n, "k": pat.k, "edges": [list(e) for e in pat.edges]},
               "copies": [list(c) for c in M.copies], "forbidden": [list(e) for e in avoid],
               "min_covered": need}
    cert = Certificate("matching", payload, digest(G))
    cert.verdict = verify_certificate(cert, G)
    _emit(args, json.loads(cert.to_json()), "\n".join(" ".join(map(str, c)) for c in M.copies))
    return EXIT_OK


def cmd_barrier(args) -> int:
    from .tilings import divisibility_barrier_scan

    J = _load(args.graph)
    found = divisibility_barrier_scan(J, args.mu, args.min_part)
    parts = [[sorted(p) for p in P.parts] for P in found]
    _emit(args, {"barriers": parts}, "\n".join(" | ".join(" ".join(map(str, p)) for p in P)
                                               for P in parts) or "# none")
    return EXIT_OK if found else EXIT_NEGATIVE


def _read_parts(path: str) -> list:
    parts = []
    try:
        with open(path) as fh:
            for line in fh:
                body = line.split("#", 1)[0].strip()
                if body:
                    parts.append(_tuple(body))
    except (OSError, argparse.ArgumentTypeError) as exc:
        raise InputError(str(exc)) from None
    return parts


def cmd_udense(args) -> int:
    from .tilings import uniformly_dense_check

    G = _load(args.graph)
    parts = _read_parts(args.parts)
    rep = uniformly_dense_check(G, parts, args.eps, args.d)
    wit = [list(w) for w in rep.witness] if rep.witness else None
    _emit(args, {"dense": rep.ok, "witness": wit},
          "uniformly dense" if rep.ok else f"violated by {wit}")
    return EXIT_OK if rep.ok else EXIT_NEGATIVE


def cmd_corpus(args) -> int:
    from .acceptance import run_all

    results = run_all(args.seed, set(args.only) if args.only else None)
    if args.json:
        print(json.dumps([r.__dict__ for r in results], default=str))
    else:
        for r in results:
            print(r.line())
        print(f"{sum(r.passed for r in results)}/{len(results)} passed")
    return EXIT_OK if all(r.passed for r in results) else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyperpowers", description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1, help="worker cap (work runs in one thread)")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate graphs")
    g.add_argument("what", choices=["cycle-power", "path-power", "complete", "random"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--j", type=int, default=1)
    g.add_argument("--p", default="0.5")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", parents=[common], help="check a walk or a certificate")
    v.add_argument("what", choices=["walk", "cert"])
    v.add_argument("--graph", required=True)
    v.add_argument("--seq", type=int, nargs="*", default=[])
    v.add_argument("--cert")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("clique-graph", parents=[common], help="build K_r(H)")
    c.add_argument("--input", required=True)
    c.add_argument("--r", type=int, required=True)
    c.add_argument("--output", dest="out")
    c.set_defaults(func=cmd_clique_graph)

    t = sub.add_parser("connect", parents=[common], help="tight path between two (r-1)-tuples")
    t.add_argument("--graph", required=True)
    t.add_argument("--r", type=int, required=True)
    t.add_argument("--from", dest="from_", type=_tuple, required=True)
    t.add_argument("--to", type=_tuple, required=True)
    t.add_argument("--len", type=int, required=True)
    t.add_argument("--avoid", type=_tuple)
    t.add_argument("--budget", type=int, default=10**7)
    t.set_defaults(func=cmd_connect)

    a = sub.add_parser("absorb", parents=[common], help="path absorbers")
    a.add_argument("what", choices=["find"])
    a.add_argument("--graph", required=True)
    a.add_argument("--r", type=int, required=True)
    a.add_argument("--vertex", type=int, required=True)
    a.add_argument("--limit", type=int, default=20)
    a.set_defaults(func=cmd_absorb)

    p = sub.add_parser("pipeline", parents=[common], help="Hamilton power-cycle pipeline")
    p.add_argument("what", choices=["run"])
    p.add_argument("--graph", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--budget", type=int, default=10**7)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pipeline)

    th = sub.add_parser("threshold", parents=[common], help="f_k(j)")
    th.add_argument("--k", type=int, required=True)
    th.add_argument("--j", type=int, required=True)
    th.set_defaults(func=cmd_threshold)

    f = sub.add_parser("factor", parents=[common], help="exact H-matching search")
    f.add_argument("--graph", required=True)
    f.add_argument("--pattern", required=True)
    f.add_argument("--avoid")
    f.add_argument("--min-covered", type=int)
    f.set_defaults(func=cmd_factor)

    b = sub.add_parser("barrier-scan", parents=[common], help="divisibility barriers")
    b.add_argument("--graph", required=True)
    b.add_argument("--mu", type=_frac, required=True)
    b.add_argument("--min-part", type=int, default=1)
    b.set_defaults(func=cmd_barrier)

    u = sub.add_parser("udense", parents=[common], help="uniform density check")
    u.add_argument("--graph", required=True)
    u.add_argument("--parts", required=True)
    u.add_argument("--eps", type=_frac, required=True)
    u.add_argument("--d", type=_frac, required=True)
    u.set_defaults(func=cmd_udense)

    cr = sub.add_parser("corpus", parents=[common], help="acceptance corpus")
    cr.add_argument("what", choices=["run"])
    cr.add_argument("--suite", choices=["acceptance"], default="acceptance")
    cr.add_argument("--only", type=int, nargs="*")
    cr.set_defaults(func=cmd_corpus)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except NotFound as exc:
        print(f"not found: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except (BudgetExceeded, Infeasible, NoAbsorber, LiftFailure) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (InputError, FormatError, ParameterError, PreconditionError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())
