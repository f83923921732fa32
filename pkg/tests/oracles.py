"""Brute-force reference implementations used by the tests.

Everything here recomputes results from first principles with the
simplest search that fits in the test budgets, sharing as little code
and structure with the package as possible.  Word arithmetic (reduce,
concat, invert, substitute) is taken from freemono.words because those
primitives are themselves pinned by direct unit tests.
"""

from __future__ import annotations

import itertools
from collections import deque

from freemono.words import Word, abelianize, concat, invert, reduce, substitute


def reduced_words_upto(rank: int, length: int, include_identity: bool = False) -> tuple:
    """All freely reduced words of length 1..length (plus the identity on
    request), in a deterministic order."""
    out = [()] if include_identity else []
    letters = [s * i for i in range(1, rank + 1) for s in (1, -1)]
    frontier = [()]
    for _ in range(length):
        nxt = []
        for w in frontier:
            for a in letters:
                if w and w[-1] == -a:
                    continue
                nxt.append(w + (a,))
        out.extend(nxt)
        frontier = nxt
    return tuple(out)


# ---------------------------------------------------------------------------
# subgroup element products

class ProductOracle:
    """Membership in the set of products of at most 2 * half_factors
    generators (or inverses), via meet-in-the-middle over the half ball."""

    def __init__(self, generators, half_factors: int = 3):
        steps = []
        for g in generators:
            r = reduce(g)
            if r:
                steps.append(r)
                steps.append(invert(r))
        rank = max((abs(a) for g in generators for a in g), default=1)
        self.rank = rank
        half = {(): (0,) * rank}
        frontier = [()]
        for _ in range(half_factors):
            nxt = []
            for w in frontier:
                for s in steps:
                    x = concat(w, s)
                    if x not in half:
                        half[x] = abelianize(x, rank)
                        nxt.append(x)
            frontier = nxt
        self.half = half
        self.half_abs = set(half.values())

    def expressible(self, w: Word) -> bool:
        """True when w is a product of at most 2 * half_factors generators."""
        if any(abs(a) > self.rank for a in w):
            return False
        target = abelianize(w, self.rank)
        for p, pa in self.half.items():
            diff = tuple(t - a for t, a in zip(target, pa))
            if diff in self.half_abs and concat(invert(p), w) in self.half:
                return True
        return False


# ---------------------------------------------------------------------------
# subgroup rank by Nielsen reduction

def _canonical_state(ws) -> tuple:
    out = set()
    for w in ws:
        if w:
            out.add(min(w, invert(w)))
    return tuple(sorted(out))


def _descend(state: tuple) -> tuple:
    """Apply strictly length-reducing Nielsen moves while any exists."""
    changed = True
    while changed:
        changed = False
        k = len(state)
        for i in range(k):
            wi = state[i]
            for j in range(k):
                if i == j:
                    continue
                for left in (wi, invert(wi)):
                    for cand in (concat(left, state[j]), concat(left, invert(state[j]))):
                        if len(cand) < len(wi):
                            state = _canonical_state(
                                cand if t == i else state[t] for t in range(k))
                            changed = True
                            break
                    if changed:
                        break
                if changed:
                    break
            if changed:
                break
    return state


def nielsen_rank(generators) -> int:
    """Rank of the subgroup generated by `generators`.

    Breadth-first search over length-nonincreasing Nielsen moves,
    restarting whenever the word count or total length drops.  A tuple
    from which no such sequence shrinks anything contains a Nielsen
    reduced tuple of the same size, so its word count is the rank.
    """
    state = _canonical_state(reduce(g) for g in generators)
    while True:
        state = _descend(state)
        seen = {state}
        queue = deque([state])
        smaller = None
        while queue and smaller is None:
            ws = queue.popleft()
            k = len(ws)
            total = sum(map(len, ws))
            for i in range(k):
                wi = ws[i]
                for j in range(k):
                    if i == j:
                        continue
                    for left in (wi, invert(wi)):
                        for cand in (concat(left, ws[j]), concat(left, invert(ws[j]))):
                            if len(cand) > len(wi):
                                continue
                            nxt = _canonical_state(
                                cand if t == i else ws[t] for t in range(k))
                            if len(nxt) < k or sum(map(len, nxt)) < total:
                                smaller = nxt
                                break
                            if nxt not in seen:
                                seen.add(nxt)
                                queue.append(nxt)
                        if smaller:
                            break
                    if smaller:
                        break
                if smaller:
                    break
        if smaller is None:
            return len(state)
        state = smaller


# ---------------------------------------------------------------------------
# basepointed multigraph enumeration

def _brute_canonical(num_vertices: int, arcs) -> tuple:
    """Least relabeling of the arc multiset over all permutations of the
    non-basepoint vertices."""
    best = None
    for perm in itertools.permutations(range(1, num_vertices)):
        relabel = (0,) + perm
        arcs2 = tuple(sorted(
            (min(relabel[a], relabel[b]), max(relabel[a], relabel[b]))
            for a, b in arcs))
        if best is None or arcs2 < best:
            best = arcs2
    return best


def _brute_connected(num_vertices: int, arcs) -> bool:
    seen = {0}
    queue = [0]
    adj = {x: set() for x in range(num_vertices)}
    for a, b in arcs:
        adj[a].add(b)
        adj[b].add(a)
    while queue:
        x = queue.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == num_vertices


def brute_topological_graphs(genus: int) -> set:
    """Canonical forms (num_vertices, arcs) of every connected basepointed
    multigraph of rank `genus` whose non-basepoint vertices have degree
    >= 3, up to basepoint-preserving isomorphism.

    Degree counting bounds the search: 2|E| = 2(|V| - 1 + g) must cover
    degree >= 3 at each of the |V| - 1 other vertices, so |V| <= 2g.  The
    edge multisets are enumerated by a plain multiplicity recursion whose
    only pruning is that same degree count.
    """
    found = set()
    for nv in range(1, 2 * genus + 1):
        ne = nv - 1 + genus
        pairs = [(i, j) for i in range(nv) for j in range(i, nv)]
        chosen: list = []
        deg = [0] * nv

        def rec(pos: int, remaining: int) -> None:
            deficit = sum(max(0, 3 - deg[w]) for w in range(1, nv))
            if deficit > 2 * remaining:
                return
            if pos == len(pairs):
                if remaining == 0 and _brute_connected(nv, chosen):
                    found.add((nv, _brute_canonical(nv, chosen)))
                return
            i, j = pairs[pos]
            bump = 2 if i == j else 1
            added = 0
            for count in range(remaining + 1):
                rec(pos + 1, remaining - count)
                chosen.append((i, j))
                deg[i] += bump
                if i != j:
                    deg[j] += bump
                added += 1
            for _ in range(added):
                chosen.pop()
                deg[i] -= bump
                if i != j:
                    deg[j] -= bump

        rec(0, ne)
    return found


# ---------------------------------------------------------------------------
# Whitehead generators from the raw definition

def whitehead_image_tuples(rank: int) -> tuple:
    """Letter-image tuples of every Whitehead generator: all signed
    permutations, plus every (multiplier a, cut set S) map with a in S
    and a^-1 not in S."""
    images = set()
    letters = list(range(1, rank + 1))
    for perm in itertools.permutations(letters):
        for signs in itertools.product((1, -1), repeat=rank):
            images.add(tuple((s * p,) for p, s in zip(perm, signs)))
    signed = [s * i for i in letters for s in (1, -1)]
    for a in signed:
        rest = [x for x in signed if abs(x) != abs(a)]
        for k in range(len(rest) + 1):
            for extra in itertools.combinations(rest, k):
                cut = set(extra) | {a}
                if -a in cut:
                    continue
                tup = []
                for x in letters:
                    if x == abs(a):
                        tup.append((x,))
                        continue
                    left = (-a,) if -x in cut else ()
                    right = (a,) if x in cut else ()
                    tup.append(left + (x,) + right)
                images.add(tuple(tup))
    return tuple(sorted(images))


def orbit_components(rank: int, cap: int) -> dict:
    """Map from each reduced word of length <= cap to a component id of
    the graph joining w to every Whitehead-generator image of w that
    stays within the cap.  Components are exactly the automorphism
    orbits truncated at the cap."""
    moves = whitehead_image_tuples(rank)
    words = reduced_words_upto(rank, cap, include_identity=True)
    parent = {w: w for w in words}

    def find(w):
        root = w
        while parent[root] != root:
            root = parent[root]
        while parent[w] != root:
            parent[w], w = root, parent[w]
        return root

    for w in words:
        for tup in moves:
            t = substitute(w, tup)
            if len(t) <= cap:
                ra, rb = find(w), find(t)
                if ra != rb:
                    parent[ra] = rb
    return {w: find(w) for w in words}


# ---------------------------------------------------------------------------
# spanning-tree admission on a folded core graph

def tree_filter_accepts(graph, v: Word) -> bool:
    """Brute-force version of the candidate admission rule, iterating over
    every (|V| - 1)-subset of edges as a potential spanning tree.

    Reads only graph.num_vertices and graph.edges.  Accepts when some
    spanning tree contains every edge off the trace of v, keeps all of
    its complementary basis words within |v|, and yields an expression
    of v using every basis element.
    """
    trans = {}
    for eid, (a, b, letter) in enumerate(graph.edges):
        trans[(a, letter)] = (b, eid)
        trans[(b, -letter)] = (a, eid)
    x = 0
    steps = []
    for letter in v:
        nxt = trans.get((x, letter))
        if nxt is None:
            return False
        x, eid = nxt
        steps.append((eid, 1 if letter > 0 else -1))
    if x != 0:
        return False

    nv = graph.num_vertices
    ne = len(graph.edges)
    traversed = {e for e, _ in steps}
    untraversed = set(range(ne)) - traversed
    for tree in itertools.combinations(range(ne), nv - 1):
        tree_set = set(tree)
        if not untraversed <= tree_set:
            continue
        seen = {0}
        queue = [0]
        paths = {0: ()}
        adj = {x: [] for x in range(nv)}
        for eid in tree:
            a, b, letter = graph.edges[eid]
            adj[a].append((b, letter))
            adj[b].append((a, -letter))
        while queue:
            y = queue.pop()
            for z, letter in adj[y]:
                if z not in seen:
                    seen.add(z)
                    paths[z] = paths[y] + (letter,)
                    queue.append(z)
        if len(seen) != nv:
            continue
        loops = [e for e in range(ne) if e not in tree_set]
        ok = True
        for eid in loops:
            a, b, letter = graph.edges[eid]
            h = reduce(paths[a] + (letter,) + invert(paths[b]))
            if len(h) > len(v):
                ok = False
                break
        if not ok:
            continue
        index = {e: i + 1 for i, e in enumerate(loops)}
        expr = reduce(index[e] * d for e, d in steps if e in index)
        if {abs(t) for t in expr} == set(index.values()):
            return True
    return False


# ---------------------------------------------------------------------------
# bounded search for tuple monomorphisms

def search_tuple_witness(us, vs, rank: int, bound: int):
    """Images (f(x_1), ..., f(x_rank)) with f(us[j]) = vs[j] for all j and
    free image of rank `rank`, searched over all image tuples of length
    <= bound, or None."""
    from freemono.decider import image_rank

    pool = reduced_words_upto(rank, bound)
    for tup in itertools.product(pool, repeat=rank):
        if all(substitute(u, tup) == v for u, v in zip(us, vs)):
            if image_rank(tup) == rank:
                return tup
    return None
