"""Folded core graphs for finitely generated subgroups of free groups.

build() wedges one basepointed loop per generator and folds until no vertex
has two equal-letter arcs in the same direction.  The folded graph answers
membership by tracing, and its cycle rank equals the rank of the subgroup.

Each edge carries a rewriting tag: a word over the subgroup generators
(letter i stands for the i-th generator, negatives for inverses).  Tags are
maintained through every fold so that the signed product of tags along the
trace of a member word w is an expression of w in the generators.  That
turns membership from a yes/no answer into a witness.
"""

from __future__ import annotations

import random
from collections import deque
from typing import Optional, Sequence

from .words import Word, concat, invert, reduce, substitute


class CoreGraph:
    """Folded basepointed graph; vertices 0..num_vertices-1, basepoint 0.

    edges[i] = (src, dst, letter) with letter >= 1; tags[i] is the rewriting
    word for edges[i]; generators is the tuple of words the graph was built
    from (reduced, in input order, empty ones dropped are kept in place so
    tag indices line up with the caller's list).
    """

    def __init__(self, num_vertices: int, edges, tags, generators):
        self.num_vertices = num_vertices
        self.edges = tuple(tuple(e) for e in edges)
        self.tags = tuple(tuple(t) for t in tags)
        self.generators = tuple(tuple(g) for g in generators)
        trans = {}
        adj = {x: [] for x in range(num_vertices)}
        for eid, (u, v, a) in enumerate(self.edges):
            trans[(u, a)] = (v, eid)
            trans[(v, -a)] = (u, eid)
            adj[u].append(a)
            adj[v].append(-a)
        self._trans = trans
        self._adj = adj

    # -- queries ------------------------------------------------------------

    def member(self, w: Word) -> Optional[Word]:
        """Expression of w over the generators, or None if w is not in H.

        The result expr satisfies substitute(expr, self.generators) == w.
        """
        x = 0
        out: list[int] = []
        for letter in w:
            step = self._trans.get((x, letter))
            if step is None:
                return None
            x, eid = step
            tag = self.tags[eid] if letter > 0 else invert(self.tags[eid])
            for b in tag:
                if out and out[-1] == -b:
                    out.pop()
                else:
                    out.append(b)
        return tuple(out) if x == 0 else None

    def contains(self, w: Word) -> bool:
        return self.member(w) is not None

    def trace(self, w: Word):
        """Edge steps ((edge_id, direction), ...) of reading w from the
        basepoint back to itself, or None when the walk leaves the graph
        or ends elsewhere."""
        x = 0
        steps = []
        for letter in w:
            step = self._trans.get((x, letter))
            if step is None:
                return None
            x, eid = step
            steps.append((eid, 1 if letter > 0 else -1))
        return tuple(steps) if x == 0 else None

    def rank(self) -> int:
        return len(self.edges) - self.num_vertices + 1

    def evaluate(self, expr: Word) -> Word:
        """Map an expression over the generators back to the ambient group."""
        return substitute(expr, self.generators)

    # -- canonical form -----------------------------------------------------

    def _bfs_order(self) -> dict:
        order = {0: 0}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for s in sorted(self._adj[x], key=lambda s: (abs(s), s < 0)):
                y = self._trans[(x, s)][0]
                if y not in order:
                    order[y] = len(order)
                    queue.append(y)
        return order

    def key(self):
        """Canonical identity of the basepointed graph.

        Folding makes the breadth-first relabeling from the basepoint
        deterministic, so equal keys mean equal subgroups of the ambient
        free group (generators and tags are deliberately not part of it).
        """
        order = self._bfs_order()
        arcs = sorted((order[u], order[v], a) for (u, v, a) in self.edges)
        return (len(order), tuple(arcs))

    def dump(self) -> str:
        """One line per edge, 'src --letter--> dst', '*' is the basepoint."""

        def name(x: int) -> str:
            return "*" if x == 0 else str(x)

        order = self._bfs_order()
        arcs = sorted((order[u], order[v], a) for (u, v, a) in self.edges)
        return "\n".join(f"{name(u)} --{a}--> {name(v)}" for (u, a, v) in
                         ((u, a, v) for (u, v, a) in arcs))

    def check(self) -> None:
        """Internal consistency: folded, connected, tags well formed."""
        slots = set()
        for (u, v, a) in self.edges:
            for slot in ((u, a), (v, -a)):
                if slot in slots:
                    raise AssertionError(f"unfolded clash at {slot}")
                slots.add(slot)
        if len(self._bfs_order()) != self.num_vertices:
            raise AssertionError("graph is not connected")
        m = len(self.generators)
        for t in self.tags:
            if any(b == 0 or abs(b) > m for b in t):
                raise AssertionError("tag letter outside generator range")


def build(generators: Sequence[Word], rng: Optional[random.Random] = None) -> CoreGraph:
    """Fold the wedge of loops spelling `generators` into a core graph.

    With `rng` the fold order is randomized; the resulting graph is the same
    up to relabeling (key() is identical), which the tests rely on.
    """
    gens = tuple(reduce(w) for w in generators)
    edges: dict[int, list] = {}
    incident: dict[int, set] = {0: set()}
    next_vertex = 1

    def add_edge(u: int, v: int, a: int, tag: Word) -> None:
        eid = len(edges) + len(_dead)
        edges[eid] = [u, v, a, tag]
        incident[u].add(eid)
        incident[v].add(eid)

    _dead: list = []  # ids of deleted edges, kept so new ids stay fresh

    for i, w in enumerate(gens, start=1):
        if not w:
            continue
        path = [0]
        for _ in range(len(w) - 1):
            incident[next_vertex] = set()
            path.append(next_vertex)
            next_vertex += 1
        path.append(0)
        for j, letter in enumerate(w):
            tag: Word = ()
            if j == len(w) - 1:
                tag = (i,) if letter > 0 else (-i,)
            if letter > 0:
                add_edge(path[j], path[j + 1], letter, tag)
            else:
                add_edge(path[j + 1], path[j], -letter, tag)

    work = deque(incident.keys())
    if rng is not None:
        items = list(work)
        rng.shuffle(items)
        work = deque(items)

    while work:
        if rng is None:
            x = work.popleft()
        else:
            x = work[rng.randrange(len(work))]
            work.remove(x)
        if x not in incident:
            continue
        seen: dict[int, int] = {}
        clash = None
        for e in sorted(incident[x]):
            u, v, a, _ = edges[e]
            for s in ([a] if u == x else []) + ([-a] if v == x else []):
                if s in seen:
                    clash = (s, seen[s], e)
                    break
                seen[s] = e
            if clash:
                break
        if clash is None:
            continue

        s, e_keep, e_drop = clash
        if s > 0:
            v_keep, v_drop = edges[e_keep][1], edges[e_drop][1]
        else:
            v_keep, v_drop = edges[e_keep][0], edges[e_drop][0]
        if v_drop == 0 and v_keep != 0:
            e_keep, e_drop = e_drop, e_keep
            v_keep, v_drop = v_drop, v_keep
        t_keep, t_drop = edges[e_keep][3], edges[e_drop][3]
        if s > 0:
            c = concat(invert(t_keep), t_drop)
        else:
            c = concat(t_keep, invert(t_drop))

        u2, w2 = edges[e_drop][0], edges[e_drop][1]
        incident[u2].discard(e_drop)
        incident[w2].discard(e_drop)
        _dead.append(e_drop)
        del edges[e_drop]

        if v_keep != v_drop:
            for e in list(incident[v_drop]):
                u, v, a, t = edges[e]
                if u == v_drop:
                    t = concat(c, t)
                if v == v_drop:
                    t = concat(t, invert(c))
                edges[e] = [v_keep if u == v_drop else u,
                            v_keep if v == v_drop else v, a, t]
                incident[v_keep].add(e)
            del incident[v_drop]
            work.append(v_keep)
        work.append(x)

    # breadth-first relabeling from the basepoint fixes a deterministic,
    # isomorphism-invariant vertex numbering
    trans = {}
    adj: dict[int, list] = {x: [] for x in incident}
    for u, v, a, _ in edges.values():
        trans[(u, a)] = v
        trans[(v, -a)] = u
        adj[u].append(a)
        adj[v].append(-a)
    order = {0: 0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s in sorted(adj[x], key=lambda s: (abs(s), s < 0)):
            y = trans[(x, s)]
            if y not in order:
                order[y] = len(order)
                queue.append(y)
    if len(order) != len(incident):
        raise AssertionError("folded graph is disconnected")

    packed = sorted(((order[u], order[v], a), tuple(t))
                    for (u, v, a, t) in edges.values())
    return CoreGraph(len(order),
                     [e for e, _ in packed],
                     [t for _, t in packed],
                     gens)


def subgroup_rank(words: Sequence[Word]) -> int:
    """Rank of the subgroup generated by `words`."""
    return build(words).rank()
