import random
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings, strategies as st

from achlioptas.counting import (
    CopyLedger,
    DynamicGraph,
    GraphError,
    brute_force_copies,
    brute_force_extensions,
    count_bicliques,
    count_class_copies,
    count_completions,
    count_copies,
    count_extensions,
    count_paths,
    difference_completions,
    ledger_insert,
)
from achlioptas.pattern import (
    Pattern,
    extension_pairs,
    make_biclique,
    make_clique,
    make_cycle,
    make_path,
    minus_edges,
)

from conftest import random_graph


def host(p: Pattern) -> DynamicGraph:
    return DynamicGraph.from_pattern(p)


# --- DynamicGraph ------------------------------------------------------------------

def test_graph_invariants():
    g = DynamicGraph(4)
    g.add_edge(0, 1)
    g.add_edge(2, 1)
    assert g.edge_count == g.round == 2
    assert g.has_edge(1, 2) and not g.has_edge(0, 2)
    for bad in ((0, 0), (0, 4), (1, 0)):
        with pytest.raises(GraphError):
            g.add_edge(*bad)
    assert g.edges() == [(0, 1), (1, 2)]
    assert DynamicGraph.from_edges(4, g.edges()).to_text() == g.to_text()


# --- copies --------------------------------------------------------------------------

def test_copy_examples():
    assert count_copies(host(make_clique(3)), make_clique(3)) == 6
    assert count_copies(host(make_clique(4)), make_cycle(4)) == 24
    assert count_copies(host(make_cycle(4)), make_cycle(4)) == 8


def test_class_copy_examples():
    k4 = make_clique(4)
    # every permutation of K4 preserves the edges of K4 minus an edge
    assert count_class_copies(host(k4), minus_edges(k4, 1)) == 24
    assert count_class_copies(DynamicGraph(6), minus_edges(k4, 2)) == 0
    assert count_class_copies(host(make_clique(3)), minus_edges(make_clique(3), 1)) == 6


PATTERNS = [make_clique(3), make_cycle(4), make_path(4), make_clique(4), make_biclique(2, 3),
            Pattern(4, frozenset({(0, 1), (1, 2), (0, 2), (2, 3)})), make_cycle(5)]


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 7), st.floats(0.2, 0.9), st.integers(0, 10 ** 9))
def test_copies_match_brute_force(n, p, seed):
    g = random_graph(n, p, random.Random(seed))
    for pat in PATTERNS:
        if pat.v <= n:
            assert count_copies(g, pat) == brute_force_copies(g, pat)


def test_copies_invariant_under_relabeling(rnd):
    for _ in range(20):
        g = random_graph(8, 0.5, rnd)
        perm = list(range(8))
        rnd.shuffle(perm)
        for pat in (make_clique(4), make_cycle(5)):
            assert count_copies(g, pat) == count_copies(g.relabeled(perm), pat)


# --- completions -----------------------------------------------------------------------

def test_completion_examples():
    path = DynamicGraph.from_edges(3, [(0, 2), (2, 1)])
    assert count_completions(path, (0, 1), minus_edges(make_clique(3), 0)) == 6
    k4 = make_clique(4)
    g = host(k4.without_edges([(0, 1)]))
    assert count_completions(g, (0, 1), minus_edges(k4, 0)) == 24
    assert count_completions(DynamicGraph(5), (1, 3), minus_edges(k4, 2)) == 0
    with pytest.raises(GraphError):
        count_completions(g, (1, 1), minus_edges(k4, 0))


def test_completions_equal_difference_definition():
    rnd = random.Random(7)
    classes = [minus_edges(h, k) for h in (make_clique(4), make_cycle(5), make_biclique(3, 3)) for k in range(3)]
    for _ in range(300):
        n = rnd.randint(6, 10)
        g = random_graph(n, rnd.uniform(0.2, 0.7), rnd)
        a, b = rnd.sample(range(n), 2)
        for cls in classes:
            assert count_completions(g, (a, b), cls) == difference_completions(g, (a, b), cls)


# --- extensions --------------------------------------------------------------------------

def test_extension_examples():
    h1 = make_path(3).marked(0, 2)
    path = DynamicGraph.from_edges(3, [(0, 2), (2, 1)])
    assert count_extensions(path, (0, 1), h1) == 2
    with_edge = path.copy()
    with_edge.add_edge(0, 1)
    assert count_extensions(with_edge, (0, 1), h1) == 2
    # K4 on {a, b, x, y}: x, y fill the opposite pair in 2 orders, and each
    # orientation of the marked pair onto {a, b} counts separately.
    k4 = make_clique(4)
    marked = k4.without_edges([(0, 1)]).marked(0, 1)
    assert count_extensions(host(k4), (0, 1), marked) == 4 == brute_force_extensions(host(k4), (0, 1), marked)
    with pytest.raises(GraphError):
        count_extensions(path, (0, 1), make_path(3))


@settings(max_examples=40, deadline=None)
@given(st.integers(5, 8), st.floats(0.2, 0.9), st.integers(0, 10 ** 9))
def test_extensions_match_brute_force(n, p, seed):
    rnd = random.Random(seed)
    g = random_graph(n, p, rnd)
    a, b = rnd.sample(range(n), 2)
    for h1 in (make_path(4).marked(0, 3), make_clique(4).without_edges([(0, 1)]).marked(0, 1),
               make_biclique(2, 2).marked(0, 1)):
        assert count_extensions(g, (a, b), h1) == brute_force_extensions(g, (a, b), h1)


def decomposition_gap(g, pair, h, k):
    """Completions of ``h`` minus ``k-1`` edges less the weighted sum of extension counts."""
    lhs = count_completions(g, pair, minus_edges(h, k - 1))
    rhs = sum(mult * count_extensions(g, pair, h1) for h1, mult in extension_pairs(h, k))
    return lhs - rhs


def test_extension_decomposition_identity():
    rnd = random.Random(11)
    for _ in range(60):
        n = rnd.randint(5, 8)
        g = random_graph(n, rnd.uniform(0.3, 0.8), rnd)
        pair = tuple(rnd.sample(range(n), 2))
        for h in (make_clique(4), make_cycle(5)):
            for k in (1, 2, 3):
                assert decomposition_gap(g, pair, h, k) == 0


def test_extension_averaging_identity():
    rnd = random.Random(13)
    for _ in range(40):
        n = rnd.randint(4, 8)
        g = random_graph(n, rnd.uniform(0.3, 0.8), rnd)
        for h1 in (make_path(4).marked(0, 3), make_clique(4).without_edges([(0, 1)]).marked(0, 1)):
            total = sum(count_extensions(g, pair, h1) for pair in combinations(range(n), 2))
            assert total == count_copies(g, h1.unmarked())


# --- ledger -------------------------------------------------------------------------------

def test_ledger_examples():
    tri = make_clique(3)
    g = DynamicGraph(4)
    led = CopyLedger(tri, 0)
    ledger_insert(led, g, (0, 1))
    ledger_insert(led, g, (1, 2))
    assert ledger_insert(led, g, (0, 2)) == [6]
    assert ledger_insert(led, g, (0, 3)) == [6]
    with pytest.raises(GraphError):
        ledger_insert(led, g, (1, 0))


def test_ledger_matches_recount_after_every_prefix():
    rnd = random.Random(17)
    k4 = make_clique(4)
    for _ in range(100):
        n = 8
        order = list(combinations(range(n), 2))
        rnd.shuffle(order)
        g = DynamicGraph(n)
        led = CopyLedger(k4, 2)
        for e in order[:15]:
            counts = ledger_insert(led, g, e)
            if rnd.random() < 0.3:
                assert counts == [count_class_copies(g, c) for c in led.classes]
        assert led.counts == [count_class_copies(g, c) for c in led.classes]


def test_ledger_seeded_from_existing_graph():
    g = DynamicGraph.from_edges(5, [(0, 1), (1, 2), (0, 2)])
    led = CopyLedger(make_clique(3), 1, g)
    assert led.counts == [6, count_class_copies(g, minus_edges(make_clique(3), 1))]


# --- paths and bicliques --------------------------------------------------------------------

def test_path_and_biclique_examples():
    assert count_paths(host(make_clique(3)), 3) == 6
    assert count_bicliques(host(make_biclique(2, 2)), 2, 2) == 8
    star = DynamicGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    # ordered leaf pairs already cover both orientations
    assert count_paths(star, 3) == 6 == brute_force_copies(star, make_path(3))


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 8), st.floats(0.2, 0.9), st.integers(0, 10 ** 9))
def test_specialised_counts_match_general(n, p, seed):
    g = random_graph(n, p, random.Random(seed))
    for t in range(1, min(n, 6) + 1):
        assert count_paths(g, t) == count_copies(g, make_path(t))
    for a, b in ((1, 2), (2, 2), (2, 3)):
        if a + b <= n:
            assert count_bicliques(g, a, b) == count_copies(g, make_biclique(a, b))


def test_complete_host_path_count():
    n = 7
    g = host(make_clique(n))
    assert count_paths(g, 3) == n * (n - 1) * (n - 2)
    assert count_paths(g, 4) == len(list(permutations(range(n), 4)))
