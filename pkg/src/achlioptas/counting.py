"""Labeled copy counting in a growing host graph.

A copy of a pattern is an injective, edge-preserving map from pattern vertices
to host vertices (automorphisms are not quotiented). Counting is done by
backtracking over a fixed placement order; candidate sets are intersections of
host neighbourhoods of already-placed pattern neighbours, and the last pattern
vertex is counted by set size instead of enumerated.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from math import comb
from typing import Iterable, Optional, Sequence

from .pattern import Pattern, PatternClass, minus_edges, oriented_edge_orbits


class GraphError(ValueError):
    pass


class DynamicGraph:
    """Simple graph on ``n`` vertices with per-vertex neighbour sets."""

    __slots__ = ("n", "adj", "round", "_m")

    def __init__(self, n: int):
        if n < 1:
            raise GraphError("need at least one vertex")
        self.n = n
        self.adj = [set() for _ in range(n)]
        self.round = 0
        self._m = 0

    @classmethod
    def from_edges(cls, n: int, edges: Iterable) -> "DynamicGraph":
        g = cls(n)
        for a, b in edges:
            g.add_edge(a, b)
        return g

    def __len__(self):
        return self._m

    @property
    def edge_count(self) -> int:
        return self._m

    @property
    def capacity(self) -> int:
        return self.n * (self.n - 1) // 2

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.adj[a]

    def add_edge(self, a: int, b: int) -> None:
        if a == b:
            raise GraphError(f"self-loop at {a}")
        if not (0 <= a < self.n and 0 <= b < self.n):
            raise GraphError(f"vertex out of range in {(a, b)}")
        if b in self.adj[a]:
            raise GraphError(f"duplicate edge {(a, b)}")
        self.adj[a].add(b)
        self.adj[b].add(a)
        self._m += 1
        self.round += 1

    def remove_edge(self, a: int, b: int) -> None:
        if b not in self.adj[a]:
            raise GraphError(f"no edge {(a, b)}")
        self.adj[a].discard(b)
        self.adj[b].discard(a)
        self._m -= 1

    def edges(self) -> list:
        return [(a, b) for a in range(self.n) for b in sorted(self.adj[a]) if a < b]

    def degree(self, a: int) -> int:
        return len(self.adj[a])

    def copy(self) -> "DynamicGraph":
        g = DynamicGraph(self.n)
        g.adj = [set(s) for s in self.adj]
        g.round = self.round
        g._m = self._m
        return g

    def relabeled(self, perm: Sequence[int]) -> "DynamicGraph":
        return DynamicGraph.from_edges(self.n, ((perm[a], perm[b]) for a, b in self.edges()))

    def to_text(self) -> str:
        lines = [f"{self.n} {self._m}"] + [f"{a} {b}" for a, b in self.edges()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_pattern(cls, p: Pattern) -> "DynamicGraph":
        return cls.from_edges(p.v, p.sorted_edges)


# --- placement plans ----------------------------------------------------------

@dataclass(frozen=True)
class _Plan:
    order: tuple          # pattern vertices in placement order
    back: tuple           # back[i]: positions (< i) of placed neighbours of order[i]
    anchored: int         # number of leading positions fixed by the caller


def _plan(p: Pattern, anchors: Sequence[int] = (), skip_edge: Optional[tuple] = None) -> _Plan:
    """Anchors first, then repeatedly the vertex with most placed neighbours (ties: degree, index)."""
    nbrs = [set(x) for x in p.neighbors]
    if skip_edge is not None:
        u, v = skip_edge
        nbrs[u].discard(v)
        nbrs[v].discard(u)
    order = list(anchors)
    placed = set(order)
    while len(order) < p.v:
        best = max(
            (x for x in range(p.v) if x not in placed),
            key=lambda x: (len(nbrs[x] & placed), len(nbrs[x]), -x),
        )
        order.append(best)
        placed.add(best)
    pos = {x: i for i, x in enumerate(order)}
    back = tuple(tuple(sorted(pos[y] for y in nbrs[x] if pos[y] < i)) for i, x in enumerate(order))
    return _Plan(tuple(order), back, len(anchors))


def _count(plan: _Plan, adj: list, n: int, images: list, depth: int) -> int:
    back = plan.back[depth]
    if back:
        if len(back) == 1:
            cands = adj[images[back[0]]]
        else:
            sets = sorted((adj[images[j]] for j in back), key=len)
            cands = sets[0].intersection(*sets[1:])
        if depth == len(plan.order) - 1:
            return len(cands) - sum(1 for x in images if x in cands)
    else:
        if depth == len(plan.order) - 1:
            return n - len(images)
        cands = range(n)
    total = 0
    used = set(images)
    for c in cands:
        if c in used:
            continue
        images.append(c)
        total += _count(plan, adj, n, images, depth + 1)
        images.pop()
    return total


def _exists(plan: _Plan, adj: list, n: int, images: list, depth: int) -> bool:
    if depth == len(plan.order):
        return True
    back = plan.back[depth]
    if back:
        if len(back) == 1:
            cands = adj[images[back[0]]]
        else:
            sets = sorted((adj[images[j]] for j in back), key=len)
            cands = sets[0].intersection(*sets[1:])
    else:
        cands = range(n)
    used = images
    for c in cands:
        if c in used:
            continue
        images.append(c)
        found = _exists(plan, adj, n, images, depth + 1)
        images.pop()
        if found:
            return True
    return False


def _run(plan: _Plan, g: DynamicGraph, images: list) -> int:
    if len(plan.order) == len(images):
        return 1
    return _count(plan, g.adj, g.n, images, len(images))


# --- copies -------------------------------------------------------------------

def count_copies(g: DynamicGraph, p: Pattern) -> int:
    if p.v > g.n:
        return 0
    return _run(_plan(p), g, [])


def count_class_copies(g: DynamicGraph, cls) -> int:
    return sum(count_copies(g, f) for f in _forms(cls))


def _forms(cls) -> tuple:
    if isinstance(cls, PatternClass):
        return cls.forms
    if isinstance(cls, Pattern):
        return (cls,)
    return tuple(cls)


class CompletionCounter:
    """Precompiled anchored plans for counting completions of a pattern class at a pair.

    For each form and each automorphism orbit of oriented edges ``(u, v)`` we
    count maps of ``form - uv`` with ``u -> a`` and ``v -> b``, weighted by the
    orbit size. Every copy in ``G + ab`` that uses ``ab`` sends exactly one
    pattern edge onto ``{a, b}``, so this equals the ``G+``/``G-`` difference.
    """

    def __init__(self, cls):
        self.forms = _forms(cls)
        self.plans = []
        for f in self.forms:
            for (u, v), size in oriented_edge_orbits(f):
                self.plans.append((_plan(f, (u, v), skip_edge=(u, v)), size))

    def count(self, g: DynamicGraph, a: int, b: int) -> int:
        adj, n = g.adj, g.n
        total = 0
        for plan, size in self.plans:
            if len(plan.order) == 2:
                total += size
            else:
                total += size * _count(plan, adj, n, [a, b], 2)
        return total

    def exists(self, g: DynamicGraph, a: int, b: int) -> bool:
        adj, n = g.adj, g.n
        for plan, _ in self.plans:
            if len(plan.order) == 2 or _exists(plan, adj, n, [a, b], 2):
                return True
        return False


def count_completions(g: DynamicGraph, pair: tuple, cls) -> int:
    a, b = pair
    if a == b:
        raise GraphError("pair endpoints must differ")
    return CompletionCounter(cls).count(g, a, b)


def count_extensions(g: DynamicGraph, pair: tuple, h1: Pattern) -> int:
    """Injective maps of ``h1`` into ``g`` sending its marked pair onto ``pair`` (either way round).

    Whether ``pair`` itself is an edge of ``g`` does not matter.
    """
    if h1.marked_pair is None:
        raise GraphError("pattern needs a marked pair")
    a, b = pair
    if a == b:
        raise GraphError("pair endpoints must differ")
    u, v = h1.marked_pair
    total = 0
    for x, y in ((a, b), (b, a)):
        plan = _plan(h1, (u, v))
        total += _run(plan, g, [x, y])
    return total


# --- incremental ledger -------------------------------------------------------

class CopyLedger:
    """Running copy counts of ``H`` minus ``k`` edges for ``k = 0..depth``."""

    def __init__(self, pattern: Pattern, depth: int, graph: Optional[DynamicGraph] = None):
        if not 0 <= depth <= pattern.e:
            raise GraphError(f"depth {depth} out of range")
        self.pattern = pattern
        self.depth = depth
        self.classes = [minus_edges(pattern, k) for k in range(depth + 1)]
        self.counters = [CompletionCounter(c) for c in self.classes]
        if graph is None or graph.edge_count == 0:
            self.counts = [0] * (depth + 1)
        else:
            self.counts = [count_class_copies(graph, c) for c in self.classes]

    def insert(self, g: DynamicGraph, a: int, b: int) -> list:
        """Add edge ``ab`` to ``g`` and return the per-class count increments."""
        if a == b:
            raise GraphError("pair endpoints must differ")
        if g.has_edge(a, b):
            raise GraphError(f"duplicate edge {(a, b)}")
        inc = [c.count(g, a, b) for c in self.counters]
        g.add_edge(a, b)
        for k, d in enumerate(inc):
            self.counts[k] += d
        return inc


def ledger_insert(ledger: CopyLedger, g: DynamicGraph, edge: tuple) -> list:
    ledger.insert(g, edge[0], edge[1])
    return list(ledger.counts)


# --- path and biclique counts -------------------------------------------------

def count_paths(g: DynamicGraph, t: int) -> int:
    """Labeled copies of the ``t``-vertex path."""
    if t < 1:
        raise GraphError("t must be positive")
    if t == 1:
        return g.n
    if t == 2:
        return 2 * g.edge_count
    if t == 3:
        return sum(len(s) * (len(s) - 1) for s in g.adj)
    adj = g.adj

    def extend(path: list, left: int) -> int:
        last = adj[path[-1]]
        if left == 1:
            return len(last) - sum(1 for x in path if x in last)
        total = 0
        for x in last:
            if x not in path:
                path.append(x)
                total += extend(path, left - 1)
                path.pop()
        return total

    return sum(extend([v], t - 1) for v in range(g.n))


def _falling(x: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= x - i
    return out


def count_bicliques(g: DynamicGraph, a: int, b: int) -> int:
    """Labeled copies of ``K_{a,b}``: ordered ``a``-tuples times ordered ``b``-tuples in their common neighbourhood."""
    if a < 1 or b < 1:
        raise GraphError("sides must be positive")
    adj, n = g.adj, g.n

    def walk(chosen: list, common: Optional[set]) -> int:
        if len(chosen) == a:
            return _falling(len(common), b)
        total = 0
        for x in range(n):
            if x in chosen:
                continue
            nxt = adj[x] if common is None else common & adj[x]
            if len(nxt) < b:
                continue
            chosen.append(x)
            total += walk(chosen, nxt)
            chosen.pop()
        return total

    return walk([], None)


# --- brute-force oracles --------------------------------------------------------

def brute_force_copies(g: DynamicGraph, p: Pattern) -> int:
    """Count copies by trying every injective map. Exponential; tests only."""
    edges = p.sorted_edges
    total = 0
    for img in permutations(range(g.n), p.v):
        if all(img[v] in g.adj[img[u]] for u, v in edges):
            total += 1
    return total


def brute_force_extensions(g: DynamicGraph, pair: tuple, h1: Pattern) -> int:
    a, b = pair
    u, v = h1.marked_pair
    rest = [x for x in range(h1.v) if x not in (u, v)]
    others = [x for x in range(g.n) if x not in (a, b)]
    total = 0
    for x, y in ((a, b), (b, a)):
        for img in permutations(others, len(rest)):
            phi = dict(zip(rest, img))
            phi[u], phi[v] = x, y
            if all(phi[q] in g.adj[phi[p_]] for p_, q in h1.sorted_edges):
                total += 1
    return total


def difference_completions(g: DynamicGraph, pair: tuple, cls) -> int:
    """Completions by definition: copies in ``G + ab`` minus copies in ``G - ab``."""
    a, b = pair
    plus, minus = g.copy(), g.copy()
    if plus.has_edge(a, b):
        minus.remove_edge(a, b)
    else:
        plus.add_edge(a, b)
    return count_class_copies(plus, cls) - count_class_copies(minus, cls)


def all_pairs(n: int):
    return combinations(range(n), 2)


def pair_count(n: int) -> int:
    return comb(n, 2)

