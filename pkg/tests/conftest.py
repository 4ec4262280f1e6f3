import random
from itertools import combinations

import networkx as nx
import pytest

from achlioptas.counting import DynamicGraph
from achlioptas.pattern import Pattern


def random_graph(n: int, p: float, rnd: random.Random) -> DynamicGraph:
    return DynamicGraph.from_edges(n, [e for e in combinations(range(n), 2) if rnd.random() < p])


def random_pattern(n: int, p: float, rnd: random.Random) -> Pattern:
    return Pattern(n, frozenset(e for e in combinations(range(n), 2) if rnd.random() < p))


def to_nx(p) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(p.vertex_count if hasattr(p, "vertex_count") else p.n))
    g.add_edges_from(p.edges if isinstance(p, Pattern) else p.edges())
    return g


@pytest.fixture
def rnd():
    return random.Random(20240611)
