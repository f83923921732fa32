"""Whitehead automorphisms and the orbit problem for words and tuples.

Decides, for tuples (u_1..u_r), (v_1..v_r) over F_n, whether some
automorphism alpha satisfies alpha(u_j) = v_j exactly for all j, returning
a replayable certificate on success.

The Type II convention is pinned here once (several sign conventions exist
in the literature): for multiplier a and cut set S with a in S, a^-1 not
in S, a letter x not in {a, a^-1} maps by membership of x and x^-1 in S:

    x in S only        ->  x a
    x^-1 in S only     ->  a^-1 x
    both in S          ->  a^-1 x a
    neither            ->  x

and a, a^-1 map to themselves.  Unit tests assert this table verbatim.

Single words: greedy length descent to the minimal cyclic level, then
breadth-first search over length-preserving moves (complete by peak
reduction), then an inner automorphism restores exact equality.  Tuples:
the exact problem embeds into the cyclic-tuple problem one rank up by
appending a fresh marker letter z to every coordinate plus a bare-z
coordinate; accepted searches are decoded back to an automorphism of F_n
and every certificate is replay-validated before being returned, so a
wrong decode can only cost completeness, never soundness.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterator, Optional, Sequence

from .words import (
    Word,
    WordError,
    abelianize,
    concat,
    cyclic_core,
    cyclic_min,
    cyclic_reduce,
    format_word,
    invert,
    power,
    primitive_root,
    reduce,
    substitute,
)


@dataclass(frozen=True)
class WhiteheadAut:
    """A Whitehead automorphism of F_rank.

    Type I: perm is a tuple where perm[i-1] is the signed image letter of
    x_i (a signed permutation).  Type II: multiplier is the signed letter a
    and cut is the set S; perm is None.
    """

    rank: int
    perm: Optional[tuple] = None
    multiplier: int = 0
    cut: frozenset = frozenset()

    def __post_init__(self):
        if not isinstance(self.cut, frozenset):
            object.__setattr__(self, "cut", frozenset(self.cut))
        if (self.perm is None) == (self.multiplier == 0):
            raise ValueError("exactly one of perm / multiplier must be set")
        if self.perm is not None:
            if sorted(abs(p) for p in self.perm) != list(range(1, self.rank + 1)):
                raise ValueError(f"not a signed permutation: {self.perm}")
        else:
            a = self.multiplier
            if not 1 <= abs(a) <= self.rank:
                raise ValueError(f"multiplier {a} outside rank {self.rank}")
            if a not in self.cut or -a in self.cut:
                raise ValueError("cut must contain the multiplier but not its inverse")
            if any(s == 0 or abs(s) > self.rank for s in self.cut):
                raise ValueError("cut letter outside rank")

    @property
    def kind(self) -> str:
        return "I" if self.perm is not None else "II"

    def letter_image(self, x: int) -> Word:
        if self.perm is not None:
            p = self.perm[x - 1] if x > 0 else -self.perm[-x - 1]
            return (p,)
        a = self.multiplier
        if x == a or x == -a:
            return (x,)
        left = (-a,) if -x in self.cut else ()
        right = (a,) if x in self.cut else ()
        return left + (x,) + right

    @cached_property
    def _table(self) -> dict:
        t = {}
        for i in range(1, self.rank + 1):
            t[i] = self.letter_image(i)
            t[-i] = self.letter_image(-i)
        return t

    def __call__(self, w: Word) -> Word:
        table = self._table
        out: list[int] = []
        for x in w:
            for b in table[x]:
                if out and out[-1] == -b:
                    out.pop()
                else:
                    out.append(b)
        return tuple(out)

    def inverse(self) -> "WhiteheadAut":
        if self.perm is not None:
            q = [0] * self.rank
            for i, p in enumerate(self.perm, start=1):
                q[abs(p) - 1] = i if p > 0 else -i
            return WhiteheadAut(self.rank, perm=tuple(q))
        a = self.multiplier
        return WhiteheadAut(self.rank, multiplier=-a,
                            cut=(self.cut - {a}) | {-a})

    def is_identity(self) -> bool:
        if self.perm is not None:
            return self.perm == tuple(range(1, self.rank + 1))
        return self.cut == frozenset({self.multiplier})

    def sort_key(self):
        if self.perm is not None:
            return (0, self.perm, 0, ())
        scut = tuple(sorted(self.cut, key=lambda s: (abs(s), s < 0)))
        return (1, (), (abs(self.multiplier), self.multiplier < 0), scut)

    def describe(self) -> str:
        if self.perm is not None:
            parts = " ".join(
                f"{format_word((i,))}>{format_word((p,))}"
                for i, p in enumerate(self.perm, start=1))
            return f"typeI {parts}"
        scut = sorted(self.cut, key=lambda s: (abs(s), s < 0))
        inner = ",".join(format_word((s,)) for s in scut)
        return f"typeII a={format_word((self.multiplier,))} S={{{inner}}}"


def apply(aut: WhiteheadAut, w: Word) -> Word:
    return aut(w)


def identity_aut(rank: int) -> WhiteheadAut:
    return WhiteheadAut(rank, perm=tuple(range(1, rank + 1)))


@lru_cache(maxsize=None)
def type1_generators(rank: int) -> tuple:
    """Identity, letter transpositions, and single-letter inversions."""
    ident = tuple(range(1, rank + 1))
    out = [WhiteheadAut(rank, perm=ident)]
    for i, j in combinations(range(rank), 2):
        p = list(ident)
        p[i], p[j] = p[j], p[i]
        out.append(WhiteheadAut(rank, perm=tuple(p)))
    for i in range(rank):
        p = list(ident)
        p[i] = -p[i]
        out.append(WhiteheadAut(rank, perm=tuple(p)))
    return tuple(out)


@lru_cache(maxsize=None)
def type2_all(rank: int) -> tuple:
    """All Type II automorphisms: 2n multipliers x 2^(2n-2) cut sets."""
    letters = [s * i for i in range(1, rank + 1) for s in (1, -1)]
    out = []
    for a in letters:
        rest = [x for x in letters if x != a and x != -a]
        for bits in range(1 << len(rest)):
            cut = {a} | {x for k, x in enumerate(rest) if bits >> k & 1}
            out.append(WhiteheadAut(rank, multiplier=a, cut=frozenset(cut)))
    return tuple(out)


@lru_cache(maxsize=None)
def enumerate_whitehead(rank: int) -> tuple:
    return type1_generators(rank) + type2_all(rank)


@lru_cache(maxsize=None)
def _sorted_auts(rank: int) -> tuple:
    return tuple(sorted(enumerate_whitehead(rank), key=WhiteheadAut.sort_key))


def orbit_gcd_invariant(w: Word, rank: int) -> int:
    """gcd of the exponent-sum vector; constant on automorphism orbits."""
    return math.gcd(*(abs(e) for e in abelianize(w, rank))) if rank else 0


# ---------------------------------------------------------------------------
# minimization and orbit search on cyclic words

def minimize(ws: Sequence[Word], rank: int):
    """Greedy descent to a minimal-length tuple of cyclic words.

    Applies, while one exists, the first automorphism in the deterministic
    (kind, multiplier, cut) order that strictly reduces total cyclic
    length.  Returns (minimal tuple, moves applied).
    """
    current = tuple(cyclic_core(reduce(w)) for w in ws)
    moves: list[WhiteheadAut] = []
    auts = _sorted_auts(rank)
    while True:
        total = sum(len(w) for w in current)
        chosen = None
        for aut in auts:
            img = tuple(cyclic_core(aut(w)) for w in current)
            if sum(len(w) for w in img) < total:
                chosen = (aut, img)
                break
        if chosen is None:
            return current, tuple(moves)
        moves.append(chosen[0])
        current = chosen[1]


def _canon_tuple(ws: Sequence[Word]) -> tuple:
    return tuple(cyclic_min(w) for w in ws)


_MAX_PARENTS = 8


@lru_cache(maxsize=None)
def _component(rank: int, start: tuple):
    """BFS closure of a canonical cyclic-word tuple under length-preserving
    moves; returns (parents, depth) maps keyed by canonical tuples.

    Peak reduction makes this level-restricted search complete: two
    minimal tuples lie in the same automorphism orbit iff they share a
    component.  parents[y] holds up to _MAX_PARENTS (predecessor, move)
    pairs on shortest paths, so alternative decodings can be tried.
    """
    auts = _sorted_auts(rank)
    total = sum(len(w) for w in start)
    parents: dict = {start: ()}
    depth = {start: 0}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for aut in auts:
            img = tuple(cyclic_core(aut(w)) for w in x)
            if sum(len(w) for w in img) != total:
                continue
            y = _canon_tuple(img)
            if y not in depth:
                depth[y] = depth[x] + 1
                parents[y] = ((x, aut),)
                queue.append(y)
            elif depth[y] == depth[x] + 1 and len(parents[y]) < _MAX_PARENTS:
                parents[y] = parents[y] + ((x, aut),)
    return parents, depth


def _iter_paths(parents: dict, start: tuple, tgt: tuple, limit: int) -> Iterator[tuple]:
    """Up to `limit` distinct shortest move sequences start -> tgt."""
    found = 0
    stack: list = [(tgt, ())]
    while stack and found < limit:
        node, acc = stack.pop()
        if node == start:
            yield tuple(reversed(acc))
            found += 1
            continue
        for prev, aut in reversed(parents[node]):
            stack.append((prev, acc + (aut,)))


def orbit_canonical(w: Word, rank: int) -> Word:
    """Complete invariant of the automorphism orbit of a single word.

    Two words have equal invariants iff equivalent((u,), (v,), rank)
    succeeds (for one word, exact and up-to-conjugacy orbits coincide
    because inner automorphisms are automorphisms).
    """
    (m,), _ = minimize((w,), rank)
    _, depth = _component(rank, (cyclic_min(m),))
    return min(depth)[0]


def find_conjugator(w: Word, v: Word) -> Optional[Word]:
    """A word c with w = c v c^-1, or None if w, v are not conjugate."""
    cw, p = cyclic_reduce(reduce(w))
    cv, q = cyclic_reduce(reduce(v))
    if len(cw) != len(cv):
        return None
    if not cw:
        return ()
    for i in range(len(cw)):
        if cw[i:] + cw[:i] == cv:
            return concat(p, cw[:i], invert(q))
    return None


# ---------------------------------------------------------------------------
# certificates

@dataclass(frozen=True)
class OrbitCertificate:
    """A replayable witness: apply(w) = conj^-1 . (moves applied in order)(w) . conj."""

    rank: int
    moves: tuple
    conjugator: Word = ()

    def apply(self, w: Word) -> Word:
        for aut in self.moves:
            w = aut(w)
        c = self.conjugator
        return concat(invert(c), w, c) if c else w

    def letter_images(self) -> tuple:
        return tuple(self.apply((i,)) for i in range(1, self.rank + 1))

    def serialize(self) -> str:
        lines = [aut.describe() for aut in self.moves]
        lines.append(f"conj {format_word(self.conjugator)}")
        return "\n".join(lines)


def compose_letter_images(moves: Sequence[WhiteheadAut], rank: int) -> tuple:
    """Images of x_1..x_rank under the moves applied first-to-last."""
    imgs = [(i,) for i in range(1, rank + 1)]
    for aut in moves:
        imgs = [aut(w) for w in imgs]
    return tuple(imgs)


# ---------------------------------------------------------------------------
# the orbit decision

def equivalent(us: Sequence[Word], vs: Sequence[Word], rank: int) -> Optional[OrbitCertificate]:
    """Certificate for an automorphism with alpha(us[j]) = vs[j] for all j,
    or None when no such automorphism exists."""
    if len(us) != len(vs):
        raise ValueError(f"arity mismatch: {len(us)} vs {len(vs)}")
    us = tuple(reduce(w) for w in us)
    vs = tuple(reduce(w) for w in vs)
    for w in us + vs:
        if any(abs(x) > rank for x in w):
            raise WordError(f"word {w} outside rank {rank}")
    return _equivalent_cached(us, vs, rank)


@lru_cache(maxsize=None)
def _equivalent_cached(us: tuple, vs: tuple, rank: int) -> Optional[OrbitCertificate]:
    if len(us) == 1:
        return _equivalent_single(us[0], vs[0], rank)
    return _equivalent_tuple(us, vs, rank)


def _equivalent_single(u: Word, v: Word, rank: int) -> Optional[OrbitCertificate]:
    if orbit_gcd_invariant(u, rank) != orbit_gcd_invariant(v, rank):
        return None
    (mu,), moves_u = minimize((u,), rank)
    (mv,), moves_v = minimize((v,), rank)
    if len(mu) != len(mv):
        return None
    start = (cyclic_min(mu),)
    tgt = (cyclic_min(mv),)
    parents, depth = _component(rank, start)
    if tgt not in depth:
        return None
    path = next(_iter_paths(parents, start, tgt, 1))
    moves = moves_u + path + tuple(m.inverse() for m in reversed(moves_v))
    image = u
    for aut in moves:
        image = aut(image)
    conj = find_conjugator(image, v)
    if conj is None:
        raise AssertionError("orbit path did not land in the target conjugacy class")
    cert = OrbitCertificate(rank, moves, conj)
    if cert.apply(u) != v:
        raise AssertionError("certificate replay mismatch")
    return cert


def find_simultaneous_conjugator(ts: Sequence[Word], vs: Sequence[Word]) -> Optional[Word]:
    """A single g with ts[j] = g vs[j] g^-1 for all j, or None.

    The solution set of one coordinate is a coset g1<m> of the centralizer
    of vs[j] (m its primitive root); later coordinates either keep the
    whole coset, cut it to at most one element (found by a bounded scan of
    the exponent, valid because non-commuting conjugation displacements
    grow linearly), or empty it.
    """
    state: tuple = ("all",)
    for t, v in zip(ts, vs):
        t, v = reduce(t), reduce(v)
        if not v:
            if t:
                return None
            continue
        if not t:
            return None
        if state[0] == "all":
            g = find_conjugator(t, v)
            if g is None:
                return None
            state = ("coset", g, primitive_root(v))
        elif state[0] == "coset":
            _, g1, m = state
            e = concat(invert(g1), t, g1)
            if primitive_root(v) in (m, invert(m)):
                if e != v:
                    return None
            else:
                core_m, pm = cyclic_reduce(m)
                bound = (len(e) + len(v) + 4 * len(pm)) // (2 * len(core_m)) + 2
                hit = None
                for k in range(-bound, bound + 1):
                    if concat(power(m, k), v, power(m, -k)) == e:
                        hit = k
                        break
                if hit is None:
                    return None
                state = ("one", concat(g1, power(m, hit)))
        else:
            g = state[1]
            if concat(g, v, invert(g)) != t:
                return None
    if state[0] == "all":
        return ()
    return state[1]


_TUPLE_PATH_LIMIT = 40


def _equivalent_tuple(us: tuple, vs: tuple, rank: int) -> Optional[OrbitCertificate]:
    for u, v in zip(us, vs):
        if orbit_gcd_invariant(u, rank) != orbit_gcd_invariant(v, rank):
            return None
    z = rank + 1
    enc_u = tuple(concat(u, (z,)) for u in us) + ((z,),)
    enc_v = tuple(concat(v, (z,)) for v in vs) + ((z,),)
    min_u, moves_u = minimize(enc_u, z)
    min_v, moves_v = minimize(enc_v, z)
    if sum(map(len, min_u)) != sum(map(len, min_v)):
        return None
    start = _canon_tuple(min_u)
    tgt = _canon_tuple(min_v)
    parents, depth = _component(z, start)
    if tgt not in depth:
        return None
    suffix = tuple(m.inverse() for m in reversed(moves_v))
    for path in _iter_paths(parents, start, tgt, _TUPLE_PATH_LIMIT):
        beta = moves_u + path + suffix
        imgs = compose_letter_images(beta, z)
        core, g0 = cyclic_reduce(imgs[z - 1])
        if core != (z,):
            raise AssertionError("marker letter left its conjugacy class")
        # conjugating by g0 fixes z exactly; dropping z-letters then
        # retracts to a surjective (hence bijective) endomorphism of F_n
        alpha0 = tuple(
            reduce(x for x in concat(invert(g0), imgs[i], g0) if abs(x) != z)
            for i in range(rank))
        ts = tuple(substitute(u, alpha0) for u in us)
        g = find_simultaneous_conjugator(ts, vs)
        if g is None:
            continue
        nmoves = nielsen_decompose(alpha0, rank)
        cert = OrbitCertificate(rank, nmoves, g)
        if all(cert.apply(u) == v for u, v in zip(us, vs)):
            return cert
    return None


# ---------------------------------------------------------------------------
# decomposing an explicit automorphism into Whitehead moves

def _elementary_right_moves(rank: int) -> tuple:
    """(i, j, side, eps, aut): tuple action T_i <- T_i T_j^eps (side 'R')
    or T_j^eps T_i (side 'L'), with aut the automorphism x_i -> x_i x_j^eps
    resp. x_j^eps x_i realizing it by right composition."""
    out = []
    for i in range(1, rank + 1):
        for j in range(1, rank + 1):
            if i == j:
                continue
            out.append((i, j, "R", 1,
                        WhiteheadAut(rank, multiplier=j, cut=frozenset({i, j}))))
            out.append((i, j, "R", -1,
                        WhiteheadAut(rank, multiplier=-j, cut=frozenset({i, -j}))))
            out.append((i, j, "L", 1,
                        WhiteheadAut(rank, multiplier=-j, cut=frozenset({-i, -j}))))
            out.append((i, j, "L", -1,
                        WhiteheadAut(rank, multiplier=j, cut=frozenset({-i, j}))))
    return tuple(out)


def _apply_right_move(T: tuple, move) -> tuple:
    i, j, side, eps, _ = move
    piece = T[j - 1] if eps > 0 else invert(T[j - 1])
    w = concat(T[i - 1], piece) if side == "R" else concat(piece, T[i - 1])
    return T[:i - 1] + (w,) + T[i:]


_PLATEAU_CAP = 200_000


def nielsen_decompose(images: Sequence[Word], rank: int) -> tuple:
    """Whitehead moves composing (first-to-last) to x_i -> images[i-1].

    Reduces the image tuple by right multiplications (each an inverse
    Whitehead move) until only single letters remain, crossing equal-length
    plateaus by breadth-first search; raises if the input is not an
    automorphism (the reduction then cannot reach a signed permutation).
    """
    T = tuple(reduce(w) for w in images)
    if len(T) != rank:
        raise ValueError(f"expected {rank} images, got {len(T)}")
    elems = _elementary_right_moves(rank)
    recorded: list[WhiteheadAut] = []

    def strict_move(t: tuple):
        total = sum(len(w) for w in t)
        for mv in elems:
            t2 = _apply_right_move(t, mv)
            if sum(len(w) for w in t2) < total:
                return mv, t2
        return None

    while not all(len(w) == 1 for w in T):
        hit = strict_move(T)
        if hit is not None:
            recorded.append(hit[0])
            T = hit[1]
            continue
        # plateau: search same-length neighbors for one that reduces
        total = sum(len(w) for w in T)
        seen = {T: None}
        queue = deque([T])
        goal = None
        while queue and goal is None:
            x = queue.popleft()
            for mv in elems:
                y = _apply_right_move(x, mv)
                if sum(len(w) for w in y) != total or y in seen:
                    continue
                seen[y] = (x, mv)
                if strict_move(y) is not None:
                    goal = y
                    break
                if len(seen) < _PLATEAU_CAP:
                    queue.append(y)
        if goal is None:
            raise AssertionError("image tuple is not reducible to a basis "
                                 "(input is not an automorphism?)")
        chain = []
        node = goal
        while seen[node] is not None:
            node, mv = seen[node]
            chain.append(mv)
        for mv in reversed(chain):
            recorded.append(mv)
            T = _apply_right_move(T, mv)
        mv, T2 = strict_move(T)
        recorded.append(mv)
        T = T2

    perm = [0] * rank
    for i, w in enumerate(T):
        perm[i] = w[0]
    final = WhiteheadAut(rank, perm=tuple(perm))
    moves = tuple(mv[4].inverse() for mv in recorded) + (final,)
    if compose_letter_images(moves, rank) != tuple(reduce(w) for w in images):
        raise AssertionError("decomposition replay mismatch")
    return moves
