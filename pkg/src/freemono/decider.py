"""Monomorphism decision procedure for free groups.

decide(u, v, rank) answers whether some injective endomorphism f of F_n
maps u to v, and produces the images f(x_1), ..., f(x_n) on YES.  The
search runs in two parts: candidate subgroups H = <b_1..b_m> containing v
with short basis words and an expression w(b_1..b_m) = v, then a
Whitehead-orbit check that some automorphism of the abstract F_n carries
u to w (coordinates beyond m act as the free complement).  A certificate
from the orbit check is evaluated at the basis, extended to full rank,
to yield the witness images.

decide_multi handles a tuple of simultaneous constraints f(u_j) = v_j
with a shared f, and oracle() is a bounded brute-force cross-validator.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

from .stallings import build
from .subgroup_search import Candidate, generate_candidates, structural_candidate
from .whitehead import OrbitCertificate, equivalent
from .words import Word, abelianize, invert, reduce, substitute


class DecideError(ValueError):
    pass


@dataclass(frozen=True)
class Witness:
    """Images f(x_1), ..., f(x_n) of a monomorphism."""

    images: Tuple[Word, ...]

    def validate(self, u: Word, v: Word, rank: int) -> bool:
        if len(self.images) != rank:
            return False
        if substitute(u, self.images) != v:
            return False
        return image_rank(self.images) == rank


def image_rank(images: Sequence[Word]) -> int:
    return build(tuple(images)).rank()


@dataclass(frozen=True)
class Verdict:
    yes: bool
    witness: Optional[Witness]
    trace: dict

    @property
    def answer(self) -> str:
        return "YES" if self.yes else "NO"


# ---------------------------------------------------------------------------
# integer lattice helper for abelianized pruning

def _ext_gcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def _in_span(vectors: Sequence[tuple], target: tuple) -> bool:
    """Whether target lies in the integer span of the given vectors."""
    cols = [list(c) for c in vectors]
    t = list(target)
    n = len(t)
    for r in range(n):
        live = [c for c in cols if c[r] != 0]
        rest = [c for c in cols if c[r] == 0]
        if not live:
            if t[r] != 0:
                return False
            cols = rest
            continue
        piv = live[0]
        for c in live[1:]:
            a, b = piv[r], c[r]
            g, x, y = _ext_gcd(a, b)
            folded = [x * pa + y * ca for pa, ca in zip(piv, c)]
            cleared = [(-b // g) * pa + (a // g) * ca for pa, ca in zip(piv, c)]
            piv = folded
            rest.append(cleared)
        if t[r] % piv[r] != 0:
            return False
        k = t[r] // piv[r]
        t = [ti - k * pi for ti, pi in zip(t, piv)]
        cols = rest
    return not any(t)


# ---------------------------------------------------------------------------
# candidate enumeration per strategy

def _letter_order(w: Word) -> tuple:
    return tuple((abs(x), x < 0) for x in w)


@lru_cache(maxsize=None)
def _words_upto(rank: int, bound: int) -> tuple:
    """All nonempty reduced words of length <= bound, length-lex order
    with x1 < x1^-1 < x2 < ... inside each length."""
    letters = [s * i for i in range(1, rank + 1) for s in (1, -1)]
    out = []
    frontier = [(x,) for x in letters]
    for _ in range(bound):
        out.extend(sorted(frontier, key=_letter_order))
        frontier = [w + (x,) for w in frontier for x in letters if x != -w[-1]]
    return tuple(out)


def _order_candidates(cands: Sequence[Candidate]) -> list:
    return sorted(cands, key=lambda c: (len(c.basis),
                                        sum(len(b) for b in c.basis),
                                        c.basis))


@lru_cache(maxsize=None)
def _testsub_candidates(v: Word, rank: int):
    stats: dict = {}
    cands = generate_candidates(v, rank, stats)
    return tuple(_order_candidates(cands)), tuple(sorted(stats.items()))


def _all_used(expr: Word, m: int) -> bool:
    return {abs(x) for x in expr} == set(range(1, m + 1))


@lru_cache(maxsize=None)
def _exhaustive_candidates(v: Word, rank: int):
    """Baseline enumeration: every generating set of at most rank
    words, each of length <= |v|, up to reordering and inversion of
    individual generators; kept when it freely generates a subgroup of
    full rank containing v.

    One candidate per distinct subgroup.  The stored representative is
    the spanning-tree selection of structural_candidate whenever some
    tree accepts, so the expression is all-used exactly when the
    subgroup genuinely needs every generator to spell v from a short
    basis; subgroups no tree accepts keep their minimal-total-length
    generating tuple as found."""
    target = abelianize(v, rank)
    reps = sorted({min(w, invert(w)) for w in _words_upto(rank, len(v))},
                  key=lambda w: (len(w), _letter_order(w)))
    chosen: dict = {}
    fallback: dict = {}
    decided: set = set()
    for m in range(1, rank + 1):
        for gens in itertools.combinations(reps, m):
            if not _in_span([abelianize(w, rank) for w in gens], target):
                continue
            graph = build(gens)
            if graph.rank() != m:
                continue
            key = graph.key()
            if key in chosen:
                continue
            expr = graph.member(v)
            if expr is None:
                continue
            if key not in decided:
                decided.add(key)
                cand = structural_candidate(graph, v)
                if cand is not None:
                    chosen[key] = cand
                    continue
            score = sum(len(b) for b in gens)
            kept = fallback.get(key)
            if kept is None or score < kept[0]:
                fallback[key] = (score, Candidate(gens, expr, key))
    cands = list(chosen.values()) + [c for _, c in fallback.values()]
    return tuple(_order_candidates(cands))


def candidates_for(v: Word, rank: int, strategy: str):
    """(ordered candidates, per-skeleton counts or None)."""
    if strategy == "testsub":
        cands, stats = _testsub_candidates(v, rank)
        return cands, dict(stats)
    if strategy == "exhaustive":
        return _exhaustive_candidates(v, rank), None
    raise DecideError(f"unknown strategy: {strategy!r}")


# ---------------------------------------------------------------------------
# witness construction

_EXTENSION_LENGTH_CAP = 6


def extend_to_rank(basis: Sequence[Word], rank: int) -> tuple:
    """Greedy complement of a free basis inside F_n: scan words in
    length-lex order, keep any that strictly raises the subgroup rank,
    until the rank reaches n.  Such extensions always exist for a basis
    of rank m <= n, so exhausting the pool is an internal error."""
    current = list(basis)
    r = build(tuple(current)).rank()
    added = []
    while r < rank:
        for w in _words_upto(rank, _EXTENSION_LENGTH_CAP):
            r2 = build(tuple(current + [w])).rank()
            if r2 > r:
                current.append(w)
                added.append(w)
                r = r2
                break
        else:
            raise AssertionError("no rank-raising extension word found")
    return tuple(added)


def build_witness(basis: Sequence[Word], cert: OrbitCertificate, rank: int) -> Witness:
    """Evaluate the certificate's coordinate images at the basis extended
    to full rank; the images generate a rank-n subgroup because the
    certificate is an automorphism of the abstract F_n."""
    assignment = tuple(basis) + extend_to_rank(basis, rank)
    images = tuple(substitute(w, assignment) for w in cert.letter_images())
    return Witness(images)


# ---------------------------------------------------------------------------
# decision procedures

def _identity_witness(rank: int) -> Witness:
    return Witness(tuple((i,) for i in range(1, rank + 1)))


def _decide_rank_one(u: Word, v: Word) -> Verdict:
    eu, ev = sum(u), sum(v)
    # reduced words over one generator are powers; mono means x1 -> x1^k, k != 0
    if ev % eu == 0 and ev != 0:
        return Verdict(True, Witness(((1,) * abs(ev // eu) if ev * eu > 0
                                      else (-1,) * abs(ev // eu),)),
                       {"strategy": "degenerate"})
    return Verdict(False, None, {"strategy": "degenerate"})


def decide(u: Word, v: Word, rank: int, strategy: str = "testsub") -> Verdict:
    """YES iff a monomorphism f of F_rank has f(u) = v."""
    if rank < 1:
        raise DecideError("rank must be >= 1")
    u = reduce(u)
    v = reduce(v)
    for w in (u, v):
        if any(abs(x) > rank for x in w):
            raise DecideError("word uses a letter beyond the rank")
    return _decide_cached(u, v, rank, strategy)


@lru_cache(maxsize=None)
def _decide_cached(u: Word, v: Word, rank: int, strategy: str) -> Verdict:
    if not u:
        if not v:
            return Verdict(True, _identity_witness(rank), {"strategy": "degenerate"})
        return Verdict(False, None, {"strategy": "degenerate"})
    if not v:
        return Verdict(False, None, {"strategy": "degenerate"})
    if rank == 1:
        return _decide_rank_one(u, v)

    t0 = time.perf_counter()
    cands, per_graph = candidates_for(v, rank, strategy)
    t1 = time.perf_counter()
    trace = {
        "strategy": strategy,
        "candidates": len(cands),
        "per_graph": per_graph,
        "accepted": None,
        "timings": {"candidates": t1 - t0, "whitehead": 0.0},
    }
    for cand in cands:
        cert = equivalent((u,), (cand.expression,), rank)
        if cert is None:
            continue
        witness = build_witness(cand.basis, cert, rank)
        assert witness.validate(u, v, rank)
        trace["accepted"] = {
            "basis": cand.basis,
            "expression": cand.expression,
            "certificate": cert.serialize(),
        }
        trace["timings"]["whitehead"] = time.perf_counter() - t1
        return Verdict(True, witness, trace)
    trace["timings"]["whitehead"] = time.perf_counter() - t1
    return Verdict(False, None, trace)


def _multi_candidates(vs: Tuple[Word, ...], rank: int):
    """Subgroups containing every coordinate target, enumerated as in the
    exhaustive strategy with the basis length bound max_j |v_j|; yields
    (basis, per-coordinate expressions)."""
    bound = max(len(v) for v in vs)
    targets = [abelianize(v, rank) for v in vs]
    reps = sorted({min(w, invert(w)) for w in _words_upto(rank, bound)})
    out: dict = {}
    for m in range(1, rank + 1):
        for gens in itertools.combinations(reps, m):
            spans = [abelianize(w, rank) for w in gens]
            if not all(_in_span(spans, t) for t in targets):
                continue
            graph = build(gens)
            if graph.rank() != m:
                continue
            exprs = []
            for v in vs:
                e = graph.member(v)
                if e is None:
                    break
                exprs.append(e)
            else:
                if graph.key() not in out:
                    out[graph.key()] = (gens, tuple(exprs))
    return sorted(out.values(),
                  key=lambda be: (len(be[0]), sum(len(b) for b in be[0]), be[0]))


def decide_multi(us: Sequence[Word], vs: Sequence[Word], rank: int,
                 strategy: str = "testsub") -> Verdict:
    """YES iff one monomorphism sends every u_j to v_j simultaneously."""
    if rank < 1:
        raise DecideError("rank must be >= 1")
    if len(us) != len(vs) or not us:
        raise DecideError("source and target tuples must have equal arity >= 1")
    us = tuple(reduce(w) for w in us)
    vs = tuple(reduce(w) for w in vs)
    for w in us + vs:
        if any(abs(x) > rank for x in w):
            raise DecideError("word uses a letter beyond the rank")
    if len(us) == 1:
        return decide(us[0], vs[0], rank, strategy)
    return _decide_multi_cached(us, vs, rank)


@lru_cache(maxsize=None)
def _decide_multi_cached(us: Tuple[Word, ...], vs: Tuple[Word, ...],
                         rank: int) -> Verdict:
    seen: dict = {}
    for u, v in zip(us, vs):
        if u in seen and seen[u] != v:
            return Verdict(False, None, {"strategy": "multi", "candidates": 0,
                                         "reason": "inconsistent coordinates"})
        seen[u] = v
    # coordinates with empty source pin nothing but force an empty target
    live = [(u, v) for u, v in zip(us, vs) if u]
    if any(v for u, v in zip(us, vs) if not u):
        return Verdict(False, None, {"strategy": "multi", "candidates": 0})
    if not live:
        return Verdict(True, _identity_witness(rank),
                       {"strategy": "multi", "candidates": 0})
    if any(not v for _, v in live):
        return Verdict(False, None, {"strategy": "multi", "candidates": 0})
    us = tuple(u for u, _ in live)
    vs = tuple(v for _, v in live)
    if rank == 1:
        eus = [sum(u) for u in us]
        evs = [sum(v) for v in vs]
        ks = {ev // eu for eu, ev in zip(eus, evs) if ev % eu == 0}
        ok = len(ks) == 1 and 0 not in ks and all(
            eu * next(iter(ks)) == ev for eu, ev in zip(eus, evs))
        if ok:
            k = next(iter(ks))
            return Verdict(True, Witness(((1,) * k if k > 0 else (-1,) * -k,)),
                           {"strategy": "multi"})
        return Verdict(False, None, {"strategy": "multi"})

    t0 = time.perf_counter()
    cands = _multi_candidates(vs, rank)
    t1 = time.perf_counter()
    trace = {
        "strategy": "multi",
        "candidates": len(cands),
        "accepted": None,
        "timings": {"candidates": t1 - t0, "whitehead": 0.0},
    }
    for basis, exprs in cands:
        cert = equivalent(us, exprs, rank)
        if cert is None:
            continue
        witness = build_witness(basis, cert, rank)
        if not all(substitute(u, witness.images) == v for u, v in zip(us, vs)):
            continue
        assert image_rank(witness.images) == rank
        trace["accepted"] = {
            "basis": basis,
            "expressions": exprs,
            "certificate": cert.serialize(),
        }
        trace["timings"]["whitehead"] = time.perf_counter() - t1
        return Verdict(True, witness, trace)
    trace["timings"]["whitehead"] = time.perf_counter() - t1
    return Verdict(False, None, trace)


# ---------------------------------------------------------------------------
# brute-force cross-validation

def oracle(u: Word, v: Word, rank: int, bound: int) -> Optional[Witness]:
    """First image tuple (length-lex product order, each image of length
    <= bound, empty allowed) with substitute(u, images) = v and full
    image rank; None when the bounded search space has no witness."""
    if bound < 1:
        raise DecideError("bound must be >= 1")
    u = reduce(u)
    v = reduce(v)
    words = ((),) + _words_upto(rank, bound)
    abel = {w: abelianize(w, rank) for w in words}
    coeffs = [sum(1 if x == i else -1 if x == -i else 0 for x in u)
              for i in range(1, rank + 1)]
    target = abelianize(v, rank)

    def feasible(pos: int, remainder) -> bool:
        g = 0
        for e in coeffs[pos:]:
            g = math.gcd(g, e)
        if g == 0:
            return not any(remainder)
        return all(x % g == 0 for x in remainder)

    def rec(pos: int, images: list, remainder):
        if not feasible(pos, remainder):
            return None
        if pos == rank:
            tup = tuple(images)
            if substitute(u, tup) == v and image_rank(tup) == rank:
                return Witness(tup)
            return None
        for w in words:
            nxt = tuple(r - coeffs[pos] * a
                        for r, a in zip(remainder, abel[w]))
            got = rec(pos + 1, images + [w], nxt)
            if got is not None:
                return got
        return None

    return rec(0, [], target)
