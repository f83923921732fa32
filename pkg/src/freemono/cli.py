"""Command-line front end for the monomorphism decision pipeline.

Subcommands mirror the library layers: decide / decide-multi for the
main question, stallings / whitehead / topo / candidates for the
intermediate objects, oracle for the bounded brute-force cross-check,
and scaling for the candidate-generation timing report.

Exit status: 0 for YES (or a found witness), 1 for NO (or none found,
or corpus mismatches), 2 for usage and parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .decider import DecideError, candidates_for, decide, decide_multi, oracle
from .stallings import build
from .subgroup_search import enumerate_skeletons
from .whitehead import equivalent
from .words import WordError, format_word, parse_word


def _parse_words(text: str, rank: int) -> tuple:
    return tuple(parse_word(part, rank) for part in text.split(";"))


def _emit_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


# ---------------------------------------------------------------------------
# verdict serialization

def _trace_payload(trace: dict) -> dict:
    out = {}
    for k, v in trace.items():
        if k == "per_graph" and v:
            out[k] = {f"g={g} {desc}": count
                      for (g, desc), count in sorted(v.items())}
        elif k == "accepted" and v:
            acc = {}
            for ak, av in v.items():
                if ak == "basis":
                    acc[ak] = [format_word(b) for b in av]
                elif ak == "expression":
                    acc[ak] = format_word(av)
                elif ak == "expressions":
                    acc[ak] = [format_word(e) for e in av]
                else:
                    acc[ak] = av
            out[k] = acc
        else:
            out[k] = v
    return out


def _verdict_payload(verdict) -> dict:
    trace = dict(verdict.trace)
    timings = trace.pop("timings", {})
    witness = None
    if verdict.witness is not None:
        witness = [format_word(w) for w in verdict.witness.images]
    return {
        "answer": verdict.answer,
        "witness": witness,
        "trace": _trace_payload(trace),
        "timings": timings,
    }


def _print_verdict(verdict, args) -> int:
    if args.format == "json":
        _emit_json(_verdict_payload(verdict))
    else:
        print(verdict.answer)
        if args.witness and verdict.witness is not None:
            for i, w in enumerate(verdict.witness.images, 1):
                print(f"f(x{i}) = {format_word(w)}")
    return 0 if verdict.yes else 1


# ---------------------------------------------------------------------------
# subcommands

def _cmd_decide(args) -> int:
    if args.corpus is not None:
        return _run_corpus(args)
    if args.rank is None:
        raise DecideError("decide needs -n unless --corpus is given")
    if args.u is None or args.v is None:
        raise DecideError("decide needs -u and -v (or --corpus)")
    u = parse_word(args.u, args.rank)
    v = parse_word(args.v, args.rank)
    verdict = decide(u, v, args.rank, strategy=args.strategy)
    return _print_verdict(verdict, args)


def _cmd_decide_multi(args) -> int:
    us = _parse_words(args.u, args.rank)
    vs = _parse_words(args.v, args.rank)
    verdict = decide_multi(us, vs, args.rank, strategy=args.strategy)
    return _print_verdict(verdict, args)


def _run_corpus(args) -> int:
    """One record per line: `n <tab> u <tab> v [<tab> expected]`, `#` for
    comments, `;` between tuple coordinates.  Malformed lines are
    reported and skipped; the exit status only reflects mismatches."""
    path = Path(args.corpus)
    if not path.is_file():
        raise DecideError(f"corpus file not found: {path}")
    total = mismatches = malformed = 0
    records = []
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if len(parts) not in (3, 4):
                raise WordError(f"expected 3 or 4 fields, got {len(parts)}")
            n = int(parts[0])
            us = _parse_words(parts[1], n)
            vs = _parse_words(parts[2], n)
            expected = None
            if len(parts) == 4:
                expected = parts[3].upper()
                if expected not in ("YES", "NO"):
                    raise WordError(f"expected answer must be YES or NO, "
                                    f"got {parts[3]!r}")
            if len(us) > 1 or len(vs) > 1:
                verdict = decide_multi(us, vs, n, strategy=args.strategy)
            else:
                verdict = decide(us[0], vs[0], n, strategy=args.strategy)
        except (WordError, DecideError, ValueError) as exc:
            malformed += 1
            print(f"line {lineno}: malformed: {exc}")
            continue
        total += 1
        got = verdict.answer
        bad = expected is not None and expected != got
        mismatches += bad
        records.append({"line": lineno, "n": n, "u": parts[1], "v": parts[2],
                        "expected": expected, "got": got})
        tail = ""
        if expected is not None:
            tail = " MISMATCH" if bad else " ok"
        print(f"line {lineno}: n={n} u={parts[1]} v={parts[2]} -> {got}{tail}")
    if args.format == "json":
        _emit_json({"records": records, "total": total,
                    "mismatches": mismatches, "malformed": malformed})
    else:
        print(f"{total} records, {mismatches} mismatches, {malformed} malformed")
    return 1 if mismatches else 0


def _cmd_stallings(args) -> int:
    gens = tuple(parse_word(w, args.rank) for w in args.generators)
    graph = build(gens)
    expr = None
    if args.member is not None:
        w = parse_word(args.member, args.rank)
        expr = graph.member(w)
    if args.format == "json":
        payload = {
            "vertices": graph.num_vertices,
            "edges": [[u, v, a] for (u, v, a) in graph.edges],
            "rank": graph.rank(),
        }
        if args.member is not None:
            payload["member"] = None if expr is None else format_word(expr)
        _emit_json(payload)
    else:
        print(f"vertices: {graph.num_vertices}")
        print(f"edges: {len(graph.edges)}")
        print(f"rank: {graph.rank()}")
        print(graph.dump())
        if args.member is not None:
            if expr is None:
                print(f"member {args.member}: no")
            else:
                print(f"member {args.member}: yes, expression {format_word(expr)}")
    if args.member is not None and expr is None:
        return 1
    return 0


def _cmd_whitehead(args) -> int:
    us = _parse_words(args.u, args.rank)
    vs = _parse_words(args.v, args.rank)
    if len(us) != len(vs):
        raise DecideError("whitehead needs equal-arity u and v tuples")
    cert = equivalent(us, vs, args.rank)
    if args.format == "json":
        payload = {"answer": "YES" if cert else "NO", "certificate": None}
        if cert is not None:
            payload["certificate"] = cert.serialize()
            payload["images"] = [format_word(w) for w in cert.letter_images()]
        _emit_json(payload)
    else:
        print("YES" if cert else "NO")
        if cert is not None and args.witness:
            for i, w in enumerate(cert.letter_images(), 1):
                print(f"alpha(x{i}) = {format_word(w)}")
    return 0 if cert is not None else 1


def _cmd_topo(args) -> int:
    skels = enumerate_skeletons(args.genus)
    if args.format == "json":
        _emit_json({"count": len(skels),
                    "graphs": [{"vertices": s.num_vertices,
                                "arcs": s.describe()} for s in skels]})
    else:
        print(f"{len(skels)} graphs of rank {args.genus}")
        for s in skels:
            print(f"V={s.num_vertices} arcs: {s.describe()}")
    return 0


def _cmd_candidates(args) -> int:
    v = parse_word(args.v, args.rank)
    cands, _ = candidates_for(v, args.rank, args.strategy)
    if args.format == "json":
        _emit_json({"count": len(cands),
                    "candidates": [{"basis": [format_word(b) for b in c.basis],
                                    "expression": format_word(c.expression)}
                                   for c in cands]})
    else:
        print(f"{len(cands)} candidates for v = {format_word(v)} "
              f"({args.strategy})")
        for c in cands:
            basis = ", ".join(format_word(b) for b in c.basis)
            print(f"basis=[{basis}] w={format_word(c.expression)}")
    return 0


def _cmd_oracle(args) -> int:
    u = parse_word(args.u, args.rank)
    v = parse_word(args.v, args.rank)
    witness = oracle(u, v, args.rank, args.bound)
    if args.format == "json":
        images = None
        if witness is not None:
            images = [format_word(w) for w in witness.images]
        _emit_json({"witness": images})
    elif witness is None:
        print("none")
    else:
        for i, w in enumerate(witness.images, 1):
            print(f"f(x{i}) = {format_word(w)}")
    return 0 if witness is not None else 1


def _cmd_scaling(args) -> int:
    from . import report

    lengths = tuple(int(p) for p in args.lengths.split(","))
    result = report.run_scaling(args.rank, lengths, args.seed,
                                Path(args.out))
    if args.format == "json":
        _emit_json(result)
    else:
        for row in result["rows"]:
            print(f"length {row['length']:4d}: {row['candidates']:6d} "
                  f"candidates in {row['seconds']:.3f}s")
        print(f"log-log slope: {result['slope']:.2f}")
        print(f"table: {result['table']}")
        print(f"figure: {result['figure']}")
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_common(sub, rank=True, strategy=False, fmt=True):
    if rank:
        sub.add_argument("-n", "--rank", type=int, required=True,
                         help="rank of the ambient free group")
    if strategy:
        sub.add_argument("--strategy", choices=("testsub", "exhaustive"),
                         default="testsub", help="Part-I candidate strategy")
    if fmt:
        sub.add_argument("--format", choices=("text", "json"), default="text",
                         help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freemono",
        description="Decide whether some injective endomorphism of a free "
                    "group maps u to v, with witnesses.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("decide", help="decide f(u) = v for one pair")
    _add_common(p, rank=False, strategy=True)
    p.add_argument("-n", "--rank", type=int,
                   help="rank of the ambient free group (corpus lines carry "
                        "their own)")
    p.add_argument("-u", help="source word")
    p.add_argument("-v", help="target word")
    p.add_argument("--witness", action="store_true",
                   help="print witness images on YES")
    p.add_argument("--corpus", help="run a corpus file instead of one pair")
    p.set_defaults(func=_cmd_decide)

    p = subs.add_parser("decide-multi",
                        help="decide f(u_j) = v_j with one shared f")
    _add_common(p, strategy=True)
    p.add_argument("-u", required=True, help="source words, `;`-separated")
    p.add_argument("-v", required=True, help="target words, `;`-separated")
    p.add_argument("--witness", action="store_true",
                   help="print witness images on YES")
    p.set_defaults(func=_cmd_decide_multi)

    p = subs.add_parser("stallings", help="fold the core graph of a subgroup")
    _add_common(p)
    p.add_argument("generators", nargs="+", help="generating words")
    p.add_argument("--member", help="test membership of a word")
    p.set_defaults(func=_cmd_stallings)

    p = subs.add_parser("whitehead",
                        help="is there an automorphism with alpha(u) = v?")
    _add_common(p)
    p.add_argument("-u", required=True, help="source word or `;` tuple")
    p.add_argument("-v", required=True, help="target word or `;` tuple")
    p.add_argument("--witness", action="store_true",
                   help="print the automorphism's letter images on YES")
    p.set_defaults(func=_cmd_whitehead)

    p = subs.add_parser("topo", help="enumerate skeleton graphs of a rank")
    p.add_argument("-g", "--genus", type=int, required=True,
                   help="skeleton rank")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_topo)

    p = subs.add_parser("candidates",
                        help="list candidate subgroups through which v reads")
    _add_common(p, strategy=True)
    p.add_argument("-v", required=True, help="target word")
    p.set_defaults(func=_cmd_candidates)

    p = subs.add_parser("oracle", help="bounded brute-force witness search")
    _add_common(p)
    p.add_argument("-u", required=True, help="source word")
    p.add_argument("-v", required=True, help="target word")
    p.add_argument("--bound", type=int, default=4,
                   help="maximum image length (default 4)")
    p.set_defaults(func=_cmd_oracle)

    p = subs.add_parser("scaling",
                        help="time candidate generation across target lengths")
    p.add_argument("-n", "--rank", type=int, default=2)
    p.add_argument("--lengths", default="4,8,16,32",
                   help="comma-separated target lengths")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default="scaling-report",
                   help="output directory for the table and figure")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_scaling)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (WordError, DecideError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
