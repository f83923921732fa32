"""Candidate subgroups through which a target word v can be read.

The decision pipeline needs, for each rank g <= n, every subgroup H that
could contain v with short basis words: H is produced as a basepointed
multigraph (all non-base vertices of degree >= 3) whose arcs carry reduced
words, folded at the letter level, such that v traces a loop at the
basepoint.  The traced arcs carry segments of v ("visible"); untraversed
arcs ("invisible") only need labels of length 1..3, and at most 2g-1 of
them, for the search to be exhaustive over minimal core graphs.

generate_candidates() drives a trace of v directly, assigning visible
labels on first traversal, which avoids enumerating the (l+1)^(2k) label
tuples; the literal tuple-by-tuple pipeline (subword_morphisms +
label_graph) is also provided and the tests check both emit identical
deduplicated candidate sets where the literal one is affordable.

Whether a traced subgroup becomes a candidate is decided on its folded
graph by structural_candidate(), which scans spanning trees for a basis
of words bounded by |v| whose expression for v uses every generator.
"""

from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional, Sequence

from .stallings import build
from .words import Word, concat, invert, reduce


@dataclass(frozen=True)
class Skeleton:
    """Connected basepointed multigraph; vertex 0 is the basepoint, every
    other vertex has degree >= 3 (loops count twice).  arcs is a sorted
    tuple of (a, b) pairs with a <= b."""

    num_vertices: int
    arcs: tuple

    def rank(self) -> int:
        return len(self.arcs) - self.num_vertices + 1

    def degrees(self) -> tuple:
        deg = [0] * self.num_vertices
        for a, b in self.arcs:
            deg[a] += 1
            deg[b] += 1
        return tuple(deg)

    def incident(self) -> dict:
        inc = {x: [] for x in range(self.num_vertices)}
        for e, (a, b) in enumerate(self.arcs):
            inc[a].append(e)
            if b != a:
                inc[b].append(e)
        return inc

    def describe(self) -> str:
        def name(x: int) -> str:
            return "*" if x == 0 else str(x)

        return " ".join(f"{name(a)}-{name(b)}" for a, b in self.arcs)


def _connected(num_vertices: int, arcs: Sequence[tuple]) -> bool:
    if num_vertices == 1:
        return True
    adj = defaultdict(set)
    for a, b in arcs:
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == num_vertices


def _canonical_arcs(num_vertices: int, arcs: Sequence[tuple]) -> tuple:
    """Least relabeling over permutations of the non-base vertices."""
    best = None
    for perm in itertools.permutations(range(1, num_vertices)):
        relab = {0: 0}
        for new, old in enumerate(perm, start=1):
            relab[old] = new
        cand = tuple(sorted(tuple(sorted((relab[a], relab[b]))) for a, b in arcs))
        if best is None or cand < best:
            best = cand
    return best


@lru_cache(maxsize=None)
def enumerate_skeletons(g: int) -> tuple:
    """All rank-g skeletons up to basepoint-preserving isomorphism.

    Rank g fixes |E| = g + |V| - 1; the degree condition forces |V| <= 2g
    and hence |E| <= 3g - 1, so the search over edge multisets is finite.
    """
    if g < 1:
        raise ValueError("rank must be >= 1")
    found: dict = {}
    for num_vertices in range(1, 2 * g + 1):
        num_arcs = g + num_vertices - 1
        pairs = [(i, j) for i in range(num_vertices) for j in range(i, num_vertices)]
        last_touch = {w: max(k for k, p in enumerate(pairs) if w in p)
                      for w in range(num_vertices)}
        deg = [0] * num_vertices
        chosen: list = []

        def rec(pos: int, remaining: int) -> None:
            need = sum(max(0, 3 - deg[w]) for w in range(1, num_vertices))
            if need > 2 * remaining:
                return
            if remaining == 0:
                if need == 0 and _connected(num_vertices, chosen):
                    canon = _canonical_arcs(num_vertices, chosen)
                    if (num_vertices, canon) not in found:
                        found[(num_vertices, canon)] = Skeleton(num_vertices, canon)
                return
            if pos == len(pairs):
                return
            i, j = pairs[pos]
            placed = 0
            while True:
                finals_ok = all(
                    deg[w] >= 3
                    for w in range(1, num_vertices) if last_touch[w] == pos)
                if finals_ok:
                    rec(pos + 1, remaining - placed)
                if placed == remaining:
                    break
                chosen.append((i, j))
                if i == j:
                    deg[i] += 2
                else:
                    deg[i] += 1
                    deg[j] += 1
                placed += 1
            for _ in range(placed):
                chosen.pop()
                if i == j:
                    deg[i] -= 2
                else:
                    deg[i] -= 1
                    deg[j] -= 1

        rec(0, num_arcs)
    return tuple(found.values())


# ---------------------------------------------------------------------------
# labels

@lru_cache(maxsize=None)
def _factors(v: Word) -> tuple:
    """Distinct contiguous factors of v, including the empty word."""
    out = {()}
    for i in range(len(v)):
        for j in range(i + 1, len(v) + 1):
            out.add(v[i:j])
    return tuple(sorted(out, key=lambda w: (len(w), w)))


def subword_morphisms(v: Word, k: int) -> Iterator[tuple]:
    """All k-tuples of (possibly empty) factors of v, deduplicated by
    content per position; at most (l+1)^(2k) tuples."""
    return itertools.product(_factors(v), repeat=k)


@lru_cache(maxsize=None)
def _fill_words(rank: int) -> tuple:
    """All reduced words of length 1..3: the label pool for invisible arcs."""
    letters = [s * i for i in range(1, rank + 1) for s in (1, -1)]
    out = []
    frontier = [(x,) for x in letters]
    for _ in range(3):
        out.extend(frontier)
        frontier = [w + (x,) for w in frontier for x in letters if x != -w[-1]]
    return tuple(sorted(out, key=lambda w: (len(w), w)))


@dataclass(frozen=True)
class Labeling:
    """Arc words for a skeleton; words[e] is read from arcs[e][0] to
    arcs[e][1].  visible[e] marks arcs whose label came from v."""

    skeleton: Skeleton
    words: tuple
    visible: tuple

    def check_folded(self) -> bool:
        return _fold_free(self.skeleton, self.words)


def _fold_free(skel: Skeleton, words: Sequence[Optional[Word]]) -> bool:
    """No two arc ends leave a shared vertex by the same letter; unlabeled
    arcs (None) are skipped, empty labels fail."""
    outgoing = defaultdict(list)
    for (a, b), w in zip(skel.arcs, words):
        if w is None:
            continue
        if not w:
            return False
        outgoing[a].append(w[0])
        outgoing[b].append(-w[-1])
    return all(len(set(ls)) == len(ls) for ls in outgoing.values())


def _complete_blanks(skel: Skeleton, words: tuple, rank: int) -> Iterator[tuple]:
    """Fill unlabeled arcs with reduced words of length 1..3, keeping the
    letter-expanded graph fold-free; incremental first/last-letter checks
    prune before full tuples are formed."""
    blanks = [e for e in range(len(words)) if words[e] is None]
    if not blanks:
        yield words
        return
    fills = _fill_words(rank)
    used = defaultdict(set)
    for e, w in enumerate(words):
        if w is None:
            continue
        a, b = skel.arcs[e]
        used[a].add(w[0])
        used[b].add(-w[-1])

    def rec(i: int, current: tuple) -> Iterator[tuple]:
        if i == len(blanks):
            yield current
            return
        e = blanks[i]
        a, b = skel.arcs[e]
        for w in fills:
            first, last = w[0], -w[-1]
            if a == b and first == last:
                continue
            if first in used[a] or last in used[b]:
                continue
            used[a].add(first)
            used[b].add(last)
            yield from rec(i + 1, current[:e] + (w,) + current[e + 1:])
            used[a].discard(first)
            used[b].discard(last)

    yield from rec(0, words)


def label_graph(skel: Skeleton, labels: Sequence[Word], rank: int) -> Iterator[Labeling]:
    """All fold-free labelings using the given label tuple.

    Arcs are mapped onto the set of distinct nonempty labels surjectively;
    a blank option joins the label set only when the tuple has repeated
    values.  Blank arcs take every reduced word of length 1..3, and
    labelings with more than 2*rank(skel)-1 blank arcs are dropped.
    """
    if len(labels) != len(skel.arcs):
        raise ValueError("one label per arc required")
    labels = tuple(reduce(w) for w in labels)
    effective = sorted({w for w in labels if w}, key=lambda w: (len(w), w))
    allow_blank = len(set(labels)) < len(labels)
    options: list = list(effective) + ([None] if allow_blank else [])
    if not options:
        return
    max_blank = 2 * skel.rank() - 1
    arcs = skel.arcs
    for assign in itertools.product(options, repeat=len(arcs)):
        if len(set(assign)) != len(options):
            continue
        blanks = [e for e, w in enumerate(assign) if w is None]
        if len(blanks) > max_blank:
            continue
        pools = [((None,) if w is None else (w, invert(w))) for w in assign]
        for oriented in itertools.product(*pools):
            if not _fold_free(skel, oriented):
                continue
            for words in _complete_blanks(skel, oriented, rank):
                yield Labeling(skel, words,
                               tuple(w is not None for w in assign))


# ---------------------------------------------------------------------------
# reading v as a loop

def _trace(skel: Skeleton, words: Sequence[Word], v: Word):
    """Deterministic trace of v from the basepoint; fold-free labelings
    admit at most one continuation per position.  Returns the traversal
    as (arc index, direction) pairs, or None."""
    start: dict = {}
    for e, ((a, b), w) in enumerate(zip(skel.arcs, words)):
        start[(a, w[0])] = (e, 1)
        start[(b, -w[-1])] = (e, -1)
    x = 0
    pos = 0
    steps = []
    while pos < len(v):
        hit = start.get((x, v[pos]))
        if hit is None:
            return None
        e, direction = hit
        a, b = skel.arcs[e]
        w = words[e] if direction > 0 else invert(words[e])
        if v[pos:pos + len(w)] != w:
            return None
        pos += len(w)
        steps.append((e, direction))
        x = b if direction > 0 else a
    return steps if x == 0 else None


def _tree_structure(skel: Skeleton, traversed: frozenset):
    """Spanning tree preferring untraversed arcs, so that a candidate
    survives the every-generator-used rule whenever any tree choice would;
    untraversed arcs that close a cycle can never all lie in one tree and
    reject the assignment.  Returns (generator arcs, arc paths from the
    basepoint) or None."""
    untraversed = [e for e in range(len(skel.arcs)) if e not in traversed]
    parent = list(range(skel.num_vertices))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree: list = []
    for stage, batch in enumerate((untraversed, sorted(traversed))):
        for e in batch:
            a, b = skel.arcs[e]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
                tree.append(e)
            elif stage == 0:
                return None
    adj = defaultdict(list)
    for e in tree:
        a, b = skel.arcs[e]
        adj[a].append((b, e, 1))
        adj[b].append((a, e, -1))
    paths: dict = {0: ()}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for y, e, direction in sorted(adj[x]):
            if y not in paths:
                paths[y] = paths[x] + ((e, direction),)
                queue.append(y)
    gens = tuple(e for e in range(len(skel.arcs)) if e not in set(tree))
    return gens, paths


def _expression(gens: tuple, steps) -> Optional[Word]:
    index = {e: i + 1 for i, e in enumerate(gens)}
    expr = reduce(index[e] * d for e, d in steps if e in index)
    if set(abs(x) for x in expr) != set(index.values()):
        return None
    return expr


def _basis_words(skel: Skeleton, words: Sequence[Word], gens: tuple, paths: dict) -> tuple:
    def walk(path) -> Word:
        if not path:
            return ()
        return concat(*(words[f] if d > 0 else invert(words[f]) for f, d in path))

    basis = []
    for e in gens:
        a, b = skel.arcs[e]
        basis.append(concat(walk(paths[a]), words[e], invert(walk(paths[b]))))
    return tuple(basis)


def read_loop(labeling: Labeling, v: Word) -> Optional[Word]:
    """Expression of v over the spanning-tree basis of the labeled graph,
    or None if v does not trace a basepointed loop using every basis
    element."""
    got = basis_of(labeling, v)
    return got[1] if got is not None else None


def basis_of(labeling: Labeling, v: Word):
    """(basis, expression) for a labeling through which v reads, else None."""
    skel = labeling.skeleton
    steps = _trace(skel, labeling.words, v)
    if steps is None:
        return None
    structure = _tree_structure(skel, frozenset(e for e, _ in steps))
    if structure is None:
        return None
    gens, paths = structure
    expr = _expression(gens, steps)
    if expr is None:
        return None
    return _basis_words(skel, labeling.words, gens, paths), expr


# ---------------------------------------------------------------------------
# candidates

@dataclass(frozen=True)
class Candidate:
    basis: tuple
    expression: Word
    key: tuple = field(compare=False)

    def rank(self) -> int:
        return len(self.basis)


def _candidate_from(basis: tuple, expr: Word, v: Word) -> Optional[Candidate]:
    if any(len(b) > len(v) for b in basis):
        return None
    graph = build(basis)
    if graph.rank() != len(basis):
        return None
    return Candidate(basis, expr, graph.key())


def structural_candidate(graph, v: Word) -> Optional[Candidate]:
    """Candidate for the subgroup of a folded graph, decided over its
    spanning trees: v must trace a basepointed loop, every edge off the
    trace must lie on the tree, every tree basis word is bounded by |v|,
    and the reduced expression of v over that basis must use every
    generator.

    Basis lengths depend on the tree, so a fixed tree choice would reject
    subgroups that another choice accepts; the scan takes the first
    passing tree in a deterministic order and returns None only when
    every tree fails.  Whether some tree passes is a property of the
    subgroup alone, which makes the accept/reject outcome independent of
    the generating words the graph was built from.
    """
    steps = graph.trace(v)
    if steps is None:
        return None
    m = graph.rank()
    if m == 0:
        return None
    traversed = sorted({e for e, _ in steps})
    for loops in itertools.combinations(traversed, m):
        outside = set(loops)
        parent = list(range(graph.num_vertices))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        merges = 0
        adj = defaultdict(list)
        for eid, (a, b, letter) in enumerate(graph.edges):
            if eid in outside:
                continue
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
                merges += 1
            adj[a].append((b, letter))
            adj[b].append((a, -letter))
        if merges != graph.num_vertices - 1:
            continue
        paths = {0: ()}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for y, letter in sorted(adj[x]):
                if y not in paths:
                    paths[y] = paths[x] + (letter,)
                    queue.append(y)
        basis = []
        for e in loops:
            a, b, letter = graph.edges[e]
            h = reduce(paths[a] + (letter,) + invert(paths[b]))
            if len(h) > len(v):
                break
            basis.append(h)
        else:
            index = {e: i + 1 for i, e in enumerate(loops)}
            expr = reduce(index[e] * d for e, d in steps if e in index)
            if {abs(x) for x in expr} == set(index.values()):
                return Candidate(tuple(basis), expr, graph.key())
    return None


def _trace_assignments(skel: Skeleton, v: Word):
    """All ways to read v as a basepointed loop while assigning visible
    labels on first traversal.  Yields (words per arc with None for
    untraversed, steps).  Arc labels are stored facing arcs[e][0]; a loop
    first traversed against that convention appears as the mirror-stored
    graph, which generates the same subgroup."""
    arcs = skel.arcs
    inc = skel.incident()
    results = []
    seen_states = set()
    stack = [(0, 0, (None,) * len(arcs), ())]
    while stack:
        pos, x, words, steps = stack.pop()
        state_key = (pos, x, words)
        if state_key in seen_states:
            continue
        seen_states.add(state_key)
        if pos == len(v):
            if x == 0:
                results.append((words, steps))
            continue
        outgoing = {}
        for e in inc[x]:
            w = words[e]
            if w is None:
                continue
            a, b = arcs[e]
            if a == x:
                outgoing[w[0]] = (e, 1)
            if b == x:
                outgoing.setdefault(-w[-1], (e, -1))
        # continue through an already labeled arc
        hit = outgoing.get(v[pos])
        if hit is not None:
            e, direction = hit
            w = words[e] if direction > 0 else invert(words[e])
            if v[pos:pos + len(w)] == w:
                a, b = arcs[e]
                nxt = b if direction > 0 else a
                stack.append((pos + len(w), nxt, words, steps + ((e, direction),)))
        # or bind a fresh arc to a segment starting here
        for e in inc[x]:
            if words[e] is not None:
                continue
            a, b = arcs[e]
            for t in range(1, len(v) - pos + 1):
                seg = v[pos:pos + t]
                w = seg if a == x else invert(seg)
                trial = words[:e] + (w,) + words[e + 1:]
                if not _fold_free(skel, trial):
                    continue
                nxt = b if a == x else a
                stack.append((pos + t, nxt, trial,
                              steps + ((e, 1 if a == x else -1),)))
    return results


def generate_candidates(v: Word, rank: int, stats: Optional[dict] = None) -> list:
    """All candidate (basis, expression) pairs with expression(basis) = v,
    one per distinct subgroup, over skeleton ranks 1..rank.

    Every basis word is bounded by |v|, the subgroup has full rank m, and
    every basis element occurs in the expression.
    """
    v = reduce(v)
    if not v:
        raise ValueError("the target word must be nonempty")
    out: dict = {}
    rejected: set = set()
    for g in range(1, rank + 1):
        for skel in enumerate_skeletons(g):
            emitted = 0
            max_blank = 2 * g - 1
            for words, steps in _trace_assignments(skel, v):
                if sum(1 for w in words if w is None) > max_blank:
                    continue
                structure = _tree_structure(skel, frozenset(e for e, _ in steps))
                if structure is None:
                    continue
                gens, paths = structure
                for full in _complete_blanks(skel, words, rank):
                    basis = _basis_words(skel, full, gens, paths)
                    graph = build(basis)
                    key = graph.key()
                    if key in out or key in rejected:
                        continue
                    cand = structural_candidate(graph, v)
                    if cand is None:
                        rejected.add(key)
                        continue
                    out[key] = cand
                    emitted += 1
            if stats is not None:
                stats[(g, skel.describe())] = emitted
    return list(out.values())


def literal_candidates(v: Word, rank: int) -> list:
    """Reference pipeline: enumerate label tuples, labelings, and loop
    readings arc tuple by arc tuple, then hand each labeled graph to the
    same spanning-tree selection as generate_candidates.  Much slower,
    but it follows the counting argument directly; the tests compare the
    two pipelines where this one is affordable."""
    v = reduce(v)
    if not v:
        raise ValueError("the target word must be nonempty")
    out: dict = {}
    rejected: set = set()
    for g in range(1, rank + 1):
        for skel in enumerate_skeletons(g):
            k = len(skel.arcs)
            for labels in subword_morphisms(v, k):
                for labeling in label_graph(skel, labels, rank):
                    steps = _trace(skel, labeling.words, v)
                    if steps is None:
                        continue
                    structure = _tree_structure(
                        skel, frozenset(e for e, _ in steps))
                    if structure is None:
                        continue
                    gens, paths = structure
                    graph = build(_basis_words(skel, labeling.words, gens, paths))
                    key = graph.key()
                    if key in out or key in rejected:
                        continue
                    cand = structural_candidate(graph, v)
                    if cand is None:
                        rejected.add(key)
                    else:
                        out[key] = cand
    return list(out.values())
