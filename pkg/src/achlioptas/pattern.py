"""Small fixed graphs: construction, canonical labeling, and density predicates.

Vertices are ``0..vertex_count-1``; edges are stored as sorted pairs. All
density comparisons are exact (integer cross-multiplication or ``Fraction``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Optional, Sequence

Edge = tuple[int, int]

# Bitmask routines below are exponential in the vertex count.
MAX_VERTICES = 16


class PatternError(ValueError):
    pass


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Pattern:
    vertex_count: int
    edges: frozenset
    marked_pair: Optional[Edge] = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.vertex_count < 1:
            raise PatternError("pattern needs at least one vertex")
        norm = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise PatternError(f"self-loop at {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise PatternError(f"edge {e} out of range")
            norm.add(_norm(u, v))
        object.__setattr__(self, "edges", frozenset(norm))
        if self.marked_pair is not None:
            u, v = self.marked_pair
            if u == v or not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise PatternError(f"bad marked pair {self.marked_pair}")
            mp = _norm(u, v)
            if mp in norm:
                raise PatternError("marked pair must not be an edge")
            object.__setattr__(self, "marked_pair", mp)

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Edge], marked_pair=None, name=""):
        edges = list(edges)
        seen = set()
        for u, v in edges:
            e = _norm(u, v)
            if e in seen:
                raise PatternError(f"duplicate edge {e}")
            seen.add(e)
        return cls(vertex_count, frozenset(edges), marked_pair, name)

    @property
    def v(self) -> int:
        return self.vertex_count

    @property
    def e(self) -> int:
        return len(self.edges)

    @cached_property
    def sorted_edges(self) -> tuple:
        return tuple(sorted(self.edges))

    @cached_property
    def masks(self) -> tuple:
        m = [0] * self.vertex_count
        for u, v in self.edges:
            m[u] |= 1 << v
            m[v] |= 1 << u
        return tuple(m)

    @cached_property
    def neighbors(self) -> tuple:
        nb = [[] for _ in range(self.vertex_count)]
        for u, v in self.sorted_edges:
            nb[u].append(v)
            nb[v].append(u)
        return tuple(tuple(x) for x in nb)

    def degree(self, u: int) -> int:
        return len(self.neighbors[u])

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self.edges

    def with_edge(self, u: int, v: int, name: str = "") -> "Pattern":
        return Pattern(self.vertex_count, self.edges | {_norm(u, v)}, None, name)

    def without_edges(self, removed: Iterable[Edge], name: str = "") -> "Pattern":
        removed = {_norm(*e) for e in removed}
        if not removed <= self.edges:
            raise PatternError("can only remove existing edges")
        return Pattern(self.vertex_count, self.edges - removed, None, name)

    def marked(self, u: int, v: int) -> "Pattern":
        return Pattern(self.vertex_count, self.edges, (u, v), self.name)

    def unmarked(self) -> "Pattern":
        return Pattern(self.vertex_count, self.edges, None, self.name)

    def completed(self) -> "Pattern":
        """The pattern with its marked pair added as an edge."""
        if self.marked_pair is None:
            raise PatternError("pattern has no marked pair")
        return self.with_edge(*self.marked_pair)

    def relabel(self, perm: Sequence[int]) -> "Pattern":
        """Image of the pattern under ``u -> perm[u]``."""
        mp = None
        if self.marked_pair is not None:
            mp = (perm[self.marked_pair[0]], perm[self.marked_pair[1]])
        return Pattern(self.vertex_count, frozenset((perm[u], perm[v]) for u, v in self.edges), mp, self.name)

    def __repr__(self):
        label = self.name or f"v={self.v},e={self.e}"
        extra = f", marked={self.marked_pair}" if self.marked_pair else ""
        return f"Pattern({label}{extra})"


# --- constructors -----------------------------------------------------------

def make_cycle(t: int) -> Pattern:
    if t < 3:
        raise PatternError("cycle needs t >= 3")
    return Pattern(t, frozenset(_norm(i, (i + 1) % t) for i in range(t)), name=f"C{t}")


def make_clique(t: int) -> Pattern:
    if t < 1:
        raise PatternError("clique needs t >= 1")
    return Pattern(t, frozenset(combinations(range(t), 2)), name=f"K{t}")


def make_biclique(a: int, b: int) -> Pattern:
    if a < 1 or b < 1:
        raise PatternError("biclique sides must be positive")
    return Pattern(a + b, frozenset((i, a + j) for i in range(a) for j in range(b)), name=f"K{a},{b}")


def make_path(t: int) -> Pattern:
    if t < 1:
        raise PatternError("path needs t >= 1")
    return Pattern(t, frozenset((i, i + 1) for i in range(t - 1)), name=f"P{t}")


_ALIASES = {
    re.compile(r"c(\d+)"): lambda m: make_cycle(int(m.group(1))),
    re.compile(r"p(\d+)"): lambda m: make_path(int(m.group(1))),
    re.compile(r"k(\d+),(\d+)"): lambda m: make_biclique(int(m.group(1)), int(m.group(2))),
    re.compile(r"k(\d)\1"): lambda m: make_biclique(int(m.group(1)), int(m.group(1))),
    re.compile(r"k(\d+)"): lambda m: make_clique(int(m.group(1))),
}


def pattern_from_alias(alias: str) -> Pattern:
    """Built-in names: ``c3``.., ``k4``.., ``p3``.., ``k33``/``k44`` (bicliques), ``k2,3``."""
    key = alias.strip().lower()
    for rx, build in _ALIASES.items():
        m = rx.fullmatch(key)
        if m:
            return build(m)
    raise PatternError(f"unknown pattern alias {alias!r}")


def alias_family(alias: str) -> Optional[tuple]:
    """Map an alias to ``(family, t)`` for the families with a known threshold."""
    key = alias.strip().lower()
    m = re.fullmatch(r"c(\d+)", key)
    if m:
        return ("cycle", int(m.group(1)))
    m = re.fullmatch(r"k(\d)\1", key) or re.fullmatch(r"k(\d+),\1", key)
    if m:
        return ("biclique", int(m.group(1)))
    m = re.fullmatch(r"k(\d+)", key)
    if m:
        return ("clique", int(m.group(1)))
    return None


# --- text format ------------------------------------------------------------

def parse_pattern(text: str) -> Pattern:
    """Parse ``"<v> <e>"`` followed by ``e`` lines of ``"<u> <w>"``; ``#`` starts a comment line."""
    lines = []
    for raw in text.splitlines():
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        lines.append(s)
    if not lines:
        raise PatternError("empty pattern text")
    head = lines[0].split()
    if len(head) != 2:
        raise PatternError(f"malformed header line: {lines[0]!r}")
    try:
        nv, ne = int(head[0]), int(head[1])
    except ValueError:
        raise PatternError(f"malformed header line: {lines[0]!r}") from None
    if nv < 1 or ne < 0:
        raise PatternError("vertex count must be positive and edge count nonnegative")
    body = lines[1:]
    if len(body) != ne:
        raise PatternError(f"header declares {ne} edges, found {len(body)}")
    edges = []
    for s in body:
        parts = s.split()
        if len(parts) != 2:
            raise PatternError(f"malformed edge line: {s!r}")
        try:
            u, w = int(parts[0]), int(parts[1])
        except ValueError:
            raise PatternError(f"malformed edge line: {s!r}") from None
        if not (0 <= u < nv and 0 <= w < nv):
            raise PatternError(f"vertex out of range in {s!r}")
        if u == w:
            raise PatternError(f"self-loop in {s!r}")
        edges.append((u, w))
    return Pattern.from_edges(nv, edges)


def format_pattern(p: Pattern) -> str:
    lines = [f"{p.vertex_count} {p.e}"]
    lines += [f"{u} {v}" for u, v in p.sorted_edges]
    return "\n".join(lines) + "\n"


# --- canonical labeling -----------------------------------------------------
#
# Individualization-refinement: colour refinement on an ordered partition,
# branching on the first non-singleton cell. Branches on interchangeable
# twins are pruned (swapping twins is an automorphism fixing the partition).

def _refine(cells: list, colour_masks: Sequence[Sequence[int]]) -> list:
    while True:
        cell_bits = [sum(1 << x for x in c) for c in cells]
        out = []
        split = False
        for c in cells:
            if len(c) == 1:
                out.append(c)
                continue
            groups: dict = {}
            for x in c:
                sig = tuple((m[x] & cb).bit_count() for m in colour_masks for cb in cell_bits)
                groups.setdefault(sig, []).append(x)
            if len(groups) > 1:
                split = True
                for sig in sorted(groups):
                    out.append(groups[sig])
            else:
                out.append(c)
        cells = out
        if not split:
            return cells


def _twin_reps(cell: list, colour_masks: Sequence[Sequence[int]]) -> list:
    reps = []
    for x in cell:
        for y in reps:
            bx, by = 1 << x, 1 << y
            if all((m[x] & ~by) == (m[y] & ~bx) for m in colour_masks):
                break
        else:
            reps.append(x)
    return reps


def _canon(n: int, colour_edges: Sequence[Iterable[Edge]], initial_cells: Optional[list] = None) -> tuple:
    colour_edges = [sorted(_norm(*e) for e in es) for es in colour_edges]
    colour_masks = []
    for es in colour_edges:
        m = [0] * n
        for u, v in es:
            m[u] |= 1 << v
            m[v] |= 1 << u
        colour_masks.append(m)
    if initial_cells is None:
        initial_cells = [list(range(n))]
    header = (n, tuple(len(c) for c in initial_cells))
    best = None

    def leaf(cells):
        pos = [0] * n
        for i, c in enumerate(cells):
            pos[c[0]] = i
        return tuple(tuple(sorted(_norm(pos[u], pos[v]) for u, v in es)) for es in colour_edges)

    def search(cells):
        nonlocal best
        cells = _refine(cells, colour_masks)
        for i, c in enumerate(cells):
            if len(c) > 1:
                break
        else:
            enc = leaf(cells)
            if best is None or enc < best:
                best = enc
            return
        for x in _twin_reps(c, colour_masks):
            rest = [y for y in c if y != x]
            search(cells[:i] + [[x], rest] + cells[i + 1:])

    search([list(c) for c in initial_cells if c])
    return header + (best,)


def canonical_form(p: Pattern) -> tuple:
    """Isomorphism-invariant key; respects the marked pair when present."""
    if p.marked_pair is None:
        return _canon(p.v, [p.edges])
    u, v = p.marked_pair
    rest = [x for x in range(p.v) if x not in (u, v)]
    return ("marked",) + _canon(p.v, [p.edges], [[u, v], rest])


def are_isomorphic(p1: Pattern, p2: Pattern) -> bool:
    if p1.v != p2.v or p1.e != p2.e:
        return False
    if sorted(map(p1.degree, range(p1.v))) != sorted(map(p2.degree, range(p2.v))):
        return False
    return canonical_form(p1.unmarked()) == canonical_form(p2.unmarked())


def oriented_edge_orbits(p: Pattern) -> list:
    """Group ordered edges ``(u, v)`` into automorphism orbits.

    Returns ``[(representative, orbit_size), ...]`` in a deterministic order.
    """
    groups: dict = {}
    for a, b in p.sorted_edges:
        for u, v in ((a, b), (b, a)):
            rest = [x for x in range(p.v) if x not in (u, v)]
            key = _canon(p.v, [p.edges], [[u], [v], rest])
            groups.setdefault(key, []).append((u, v))
    return sorted((members[0], len(members)) for members in groups.values())


# --- deletion classes -------------------------------------------------------

@dataclass(frozen=True)
class PatternClass:
    """All graphs obtained from ``base`` by deleting ``deleted`` edges, one form per isomorphism class.

    ``deletions[i]`` is a deletion set realising ``forms[i]`` inside ``base``.
    """

    base: Pattern
    deleted: int
    forms: tuple
    deletions: tuple = field(default=(), compare=False)

    def __iter__(self):
        return iter(self.forms)

    def __len__(self):
        return len(self.forms)


def deletion_orbits(h: Pattern, k: int) -> list:
    """Representatives of the ``k``-edge subsets of ``E(h)`` up to automorphisms of ``h``."""
    if not 0 <= k <= h.e:
        raise PatternError(f"k={k} out of range for {h.e} edges")
    reps = [frozenset()]
    for _ in range(k):
        seen = {}
        for d in reps:
            for e in h.sorted_edges:
                if e in d:
                    continue
                nd = d | {e}
                key = _canon(h.v, [h.edges - nd, nd])
                if key not in seen:
                    seen[key] = nd
        reps = [seen[key] for key in sorted(seen)]
    return [tuple(sorted(d)) for d in reps]


def minus_edges(h: Pattern, k: int) -> PatternClass:
    if not 0 <= k <= h.e:
        raise PatternError(f"k={k} out of range for {h.e} edges")
    if k == 0:
        return PatternClass(h.unmarked(), 0, (h.unmarked(),), ((),))
    forms: dict = {}
    for d in deletion_orbits(h, k):
        g = h.without_edges(d, name=f"{h.name}-{k}" if h.name else "")
        key = canonical_form(g)
        if key not in forms:
            forms[key] = (g, d)
    ordered = [forms[key] for key in sorted(forms)]
    return PatternClass(h.unmarked(), k, tuple(g for g, _ in ordered), tuple(d for _, d in ordered))


def extension_pairs(h: Pattern, k: int) -> list:
    """Non-isomorphic marked pairs ``(H1, uv)`` with ``H1 = h - D``, ``|D| = k``, ``uv`` in ``D``.

    Each entry is ``(h1_marked, multiplicity)`` where multiplicity counts, over the
    forms of ``h`` minus ``k-1`` edges and their edges, how many removals give that
    marked graph. This is the bookkeeping behind decomposing completions of the
    ``k-1`` class into extensions.
    """
    if not 1 <= k <= h.e:
        raise PatternError(f"k={k} out of range for {h.e} edges")
    tally: dict = {}
    reps: dict = {}
    for form in minus_edges(h, k - 1).forms:
        for e in form.sorted_edges:
            h1 = form.without_edges([e]).marked(*e)
            key = canonical_form(h1)
            tally[key] = tally.get(key, 0) + 1
            reps.setdefault(key, h1)
    return [(reps[key], tally[key]) for key in sorted(tally)]


# --- densities --------------------------------------------------------------

def _check_size(p: Pattern):
    if p.v > MAX_VERTICES:
        raise PatternError(f"pattern has {p.v} vertices; limit is {MAX_VERTICES}")


def induced_edge_counts(p: Pattern) -> list:
    """``counts[mask]`` = number of edges of ``p`` inside vertex set ``mask``."""
    _check_size(p)
    masks = p.masks
    counts = [0] * (1 << p.v)
    for s in range(1, 1 << p.v):
        low = (s & -s).bit_length() - 1
        rest = s & (s - 1)
        counts[s] = counts[rest] + (masks[low] & rest).bit_count()
    return counts


def edge_density(p: Pattern) -> Fraction:
    return Fraction(p.e, p.v)


def max_density(p: Pattern) -> Fraction:
    counts = induced_edge_counts(p)
    return max(Fraction(counts[s], s.bit_count()) for s in range(1, 1 << p.v))


def is_balanced(p: Pattern) -> bool:
    # Only induced subgraphs are checked: adding edges inside a fixed vertex set raises density.
    counts = induced_edge_counts(p)
    e, v = p.e, p.v
    return all(counts[s] * v <= e * s.bit_count() for s in range(1, 1 << v))


def is_balanced_extension_pair(h1: Pattern, h2: Optional[Pattern] = None) -> bool:
    if h1.marked_pair is None:
        raise PatternError("H1 needs a marked pair")
    if h2 is not None:
        expected = h1.completed()
        if h2.v != h1.v or h2.edges != expected.edges:
            raise PatternError("H2 must equal H1 plus the marked edge")
    u, v = h1.marked_pair
    n = h1.v
    if n <= 2:
        return True
    counts = induced_edge_counts(h1.unmarked())
    full = (1 << n) - 1
    base = (1 << u) | (1 << v)
    others = [x for x in range(n) if x not in (u, v)]
    e_total, denom = h1.e, n - 2
    for r in range(1, len(others)):
        for sub in combinations(others, r):
            s = base
            for x in sub:
                s |= 1 << x
            if s == full:
                continue
            if counts[s] * denom > e_total * r:
                return False
    return True


def has_balanced_extension_property(h: Pattern, k: int) -> bool:
    return not balanced_extension_failures(h, k)


def balanced_extension_failures(h: Pattern, k: int) -> list:
    """Marked graphs ``(h - D) + mark(uv)``, ``uv`` in ``D``, that fail the extension-pair test."""
    if not 1 <= k <= h.e:
        raise PatternError(f"k={k} out of range for {h.e} edges")
    bad = []
    for d in deletion_orbits(h, k):
        h1 = h.without_edges(d)
        for e in d:
            m = h1.marked(*e)
            if not is_balanced_extension_pair(m):
                bad.append(m)
    return bad


# --- sequences used by the upper-bound constructions ------------------------

def _grow(start: Pattern, additions: Iterable[Edge], name: str) -> list:
    seq = [start]
    cur = start
    for u, v in additions:
        cur = cur.with_edge(u, v)
        seq.append(cur)
    return [Pattern(g.v, g.edges, None, f"{name}[{i + 1}]") for i, g in enumerate(seq)]


def build_clique_sequence(t: int) -> list:
    """Balanced complete bipartite graph on ``t`` vertices grown to ``K_t`` one edge at a time.

    The larger side gets the low labels, so lexicographic order fills it before
    the smaller side. For odd ``t`` the other way round breaks the extension-pair
    property at some step.
    """
    if t < 4:
        raise PatternError("clique sequence needs t >= 4")
    big = t - t // 2
    start = Pattern(t, frozenset((i, j) for i in range(big) for j in range(big, t)))
    missing = [e for e in combinations(range(t), 2) if e not in start.edges]
    return _grow(start, missing, f"K{t}-seq")


def build_biclique_sequence(t: int) -> list:
    if t < 3:
        raise PatternError("biclique sequence needs t >= 3")
    k = t // 2
    if t % 2 == 0:
        v1, v2 = range(0, k), range(k, 2 * k)
        v3, v4 = range(2 * k, 3 * k), range(3 * k, 4 * k)
        edges = {(a, b) for a in v1 for b in v2}
        edges |= {(a, b) for a in v1 for b in v4}
        edges |= {_norm(a, b) for a in v3 for b in v2}
        start = Pattern(2 * t, frozenset(edges))
        stage1 = [(v3[i], v4[i]) for i in range(k)]
        left, right = list(v1) + list(v3), list(v2) + list(v4)
    else:
        v1, v2 = range(0, k), range(k, 2 * k)
        x3, x4 = 2 * k, 2 * k + 1
        v5, v6 = range(2 * k + 2, 3 * k + 2), range(3 * k + 2, 4 * k + 2)
        edges = {(a, b) for a in v1 for b in v2}
        edges |= {(a, b) for a in v5 for b in v6}
        edges |= {_norm(x3, b) for b in list(v2) + [x4] + list(v6)}
        edges |= {_norm(x4, a) for a in list(v1) + list(v5)}
        start = Pattern(2 * t, frozenset(edges))
        stage1 = [(v1[i], v6[i]) for i in range(k)] + [_norm(v5[i], v2[i]) for i in range(k)]
        left, right = list(v1) + [x3] + list(v5), list(v2) + [x4] + list(v6)
    added = set(stage1)
    cross = sorted(_norm(a, b) for a in left for b in right)
    rest = [e for e in cross if e not in start.edges and e not in added]
    return _grow(start, stage1 + rest, f"K{t},{t}-seq")


def sequence_extension_pairs(seq: Sequence[Pattern]) -> list:
    """Consecutive ``(H_k, H_{k+1})`` as ``H_k`` marked at the added edge."""
    out = []
    for g, h in zip(seq, seq[1:]):
        diff = h.edges - g.edges
        if len(diff) != 1 or not g.edges < h.edges:
            raise PatternError("sequence must add exactly one edge per step")
        out.append(g.marked(*next(iter(diff))))
    return out


def backbone_pair(k: int) -> Pattern:
    """Parts ``V1, V2`` of size ``k`` and singletons ``x, y``; ``V1-V2``, ``V1-y``, ``x-V2`` complete; marked ``x-y``."""
    if k < 1:
        raise PatternError("k must be positive")
    v1, v2 = range(k), range(k, 2 * k)
    x, y = 2 * k, 2 * k + 1
    edges = {(a, b) for a in v1 for b in v2}
    edges |= {(a, y) for a in v1}
    edges |= {(b, x) for b in v2}
    return Pattern(2 * k + 2, frozenset(edges), (x, y), f"backbone({k})")


