"""The Achlioptas edge-choice game: offer sampling, strategies and the run loop."""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass
from typing import Iterable, Optional

import numpy as np

from .counting import CompletionCounter, CopyLedger, DynamicGraph, GraphError, pair_count
from .pattern import Pattern, alias_family, minus_edges
from .thresholds import s_param

STRATEGIES = ("min-danger", "min-danger-random", "first-edge", "random")
GENERAL_DEPTH_CAP = 3
_BUFFER = 4096
_MASK64 = (1 << 64) - 1


class ProcessError(ValueError):
    pass


class RandomStream:
    """Seeded PCG64 stream of raw 64-bit words with exact bounded draws."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self._bits = np.random.PCG64(self.seed)
        self._buf: list = []
        self._pos = 0

    def next64(self) -> int:
        if self._pos >= len(self._buf):
            self._buf = self._bits.random_raw(_BUFFER).tolist()
            self._pos = 0
        x = self._buf[self._pos]
        self._pos += 1
        return x

    def below(self, k: int) -> int:
        """Uniform integer in ``[0, k)`` by rejection, no modulo bias."""
        if k <= 0:
            raise ValueError("k must be positive")
        limit = (1 << 64) - (1 << 64) % k
        while True:
            x = self.next64()
            if x < limit:
                return x % k

    def random(self) -> float:
        return (self.next64() >> 11) * (1.0 / (1 << 53))

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


def trial_seed(base_seed: int, trial_id: int) -> int:
    return (int(base_seed) ^ int(trial_id)) & _MASK64


@dataclass
class ProcessConfig:
    n: int
    r: int
    forbidden: Pattern
    max_rounds: int
    seed: int
    stop_on_loss: bool = True
    s: Optional[int] = None
    track_counts: bool = True

    def __post_init__(self):
        if self.n < 2:
            raise ProcessError("need n >= 2")
        if self.r < 1:
            raise ProcessError("need r >= 1")
        if not 0 <= self.max_rounds <= pair_count(self.n):
            raise ProcessError(f"max_rounds must lie in [0, {pair_count(self.n)}]")
        if self.forbidden.v > self.n:
            raise ProcessError("pattern has more vertices than the host")
        if self.s is not None and not 1 <= self.s <= max(1, self.forbidden.e - 1):
            raise ProcessError(f"s must lie in [1, e(H)-1] = [1, {self.forbidden.e - 1}]")


@dataclass
class Offer:
    round: int
    edges: list


@dataclass
class StrategyDecision:
    chosen: int
    levels: Optional[list] = None


@dataclass
class RunOutcome:
    loss_round: Optional[int]
    rounds_run: int
    seed: int
    n: int
    r: int
    pattern: str
    strategy: str
    s: int
    counts: Optional[list] = None
    copies_created: Optional[int] = None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def family_depth(h: Pattern, r: int, s: Optional[int] = None) -> int:
    """Danger depth: explicit ``s``, else the family rule, else ``min(e-1, 3)`` with a warning."""
    if s is not None:
        return s
    fam = alias_family(h.name) if h.name else None
    if fam is not None:
        family, t = fam
        if r < 2:
            return 1
        if family == "cycle" or (family == "clique" and t == 3):
            return 1
        if family in ("clique", "biclique"):
            return max(1, min(s_param(t, r), h.e - 1))
    depth = max(1, min(h.e - 1, GENERAL_DEPTH_CAP))
    warnings.warn(f"no s given for pattern {h.name or 'custom'}; using s={depth}", stacklevel=2)
    return depth


class DangerOracle:
    """Danger level of a pair: the largest ``d`` such that adding it completes ``H`` minus ``s - d`` edges."""

    def __init__(self, h: Pattern, s: int):
        if not 1 <= s <= max(1, h.e - 1):
            raise ProcessError(f"s must lie in [1, e(H)-1], got {s}")
        self.h = h
        self.s = s
        self.counters = [CompletionCounter(minus_edges(h, k)) for k in range(s)]
        self._triangle = h.v == 3 and h.e == 3

    def completes(self, g: DynamicGraph, a: int, b: int, k: int = 0) -> bool:
        if k == 0 and self._triangle:
            return not g.adj[a].isdisjoint(g.adj[b])
        return self.counters[k].exists(g, a, b)

    def level(self, g: DynamicGraph, a: int, b: int) -> int:
        for d in range(self.s, 0, -1):
            if self.completes(g, a, b, self.s - d):
                return d
        return 0


def danger_level(g: DynamicGraph, pair: tuple, h: Pattern, s: int) -> int:
    return DangerOracle(h, s).level(g, pair[0], pair[1])


def sample_offer(g: DynamicGraph, r: int, rng: RandomStream) -> Offer:
    """``r`` independent uniform draws from the pairs not yet in ``g``."""
    n = g.n
    if g.edge_count >= pair_count(n):
        raise GraphError("graph is full")
    adj = g.adj
    out = []
    for _ in range(r):
        while True:
            a = rng.below(n)
            b = rng.below(n - 1)
            if b >= a:
                b += 1
            if b not in adj[a]:
                break
        out.append((a, b) if a < b else (b, a))
    return Offer(g.round + 1, out)


def strategy_first_edge(offer: Offer, *_) -> StrategyDecision:
    return StrategyDecision(0)


def strategy_random(offer: Offer, rng: RandomStream) -> StrategyDecision:
    return StrategyDecision(rng.below(len(offer.edges)))


def strategy_min_danger(offer: Offer, g: DynamicGraph, oracle: DangerOracle,
                        rng: Optional[RandomStream] = None) -> StrategyDecision:
    """Lowest danger level wins; ties go to the lowest index, or a seeded random one if ``rng`` is given."""
    levels = []
    cache: dict = {}
    for e in offer.edges:
        if e not in cache:
            cache[e] = oracle.level(g, e[0], e[1])
        levels.append(cache[e])
        if cache[e] == 0 and rng is None:
            break
    low = min(levels)
    if rng is None:
        return StrategyDecision(levels.index(low), levels)
    ties = [i for i, x in enumerate(levels) if x == low]
    return StrategyDecision(ties[rng.below(len(ties))] if len(ties) > 1 else ties[0], levels)


class Game:
    """One sequential run of the process."""

    def __init__(self, config: ProcessConfig, strategy: str = "min-danger"):
        if strategy not in STRATEGIES:
            raise ProcessError(f"unknown strategy {strategy!r}")
        self.config = config
        self.strategy = strategy
        self.graph = DynamicGraph(config.n)
        self.rng = RandomStream(config.seed)
        self.s = family_depth(config.forbidden, config.r, config.s)
        self.oracle = DangerOracle(config.forbidden, self.s)
        self.ledger = CopyLedger(config.forbidden, self.s) if config.track_counts else None
        self.loss_round: Optional[int] = None
        self.transcript: list = []

    def decide(self, offer: Offer) -> StrategyDecision:
        if self.strategy == "first-edge":
            return strategy_first_edge(offer)
        if self.strategy == "random":
            return strategy_random(offer, self.rng)
        tie_rng = self.rng if self.strategy == "min-danger-random" else None
        return strategy_min_danger(offer, self.graph, self.oracle, tie_rng)

    def step(self, offer: Offer, record: bool = False) -> StrategyDecision:
        g = self.graph
        for a, b in offer.edges:
            if a == b or g.has_edge(a, b):
                raise ProcessError(f"offer contains a chosen or invalid pair {(a, b)}")
        dec = self.decide(offer)
        a, b = offer.edges[dec.chosen]
        if dec.levels is not None:
            loses = dec.levels[dec.chosen] == self.s
        else:
            loses = self.oracle.completes(g, a, b, 0)
        if self.ledger is not None:
            self.ledger.insert(g, a, b)
        else:
            g.add_edge(a, b)
        if loses and self.loss_round is None:
            self.loss_round = g.round
        if record:
            self.transcript.append((offer, dec))
        return dec

    def play(self, offers: Optional[Iterable] = None, record: bool = False) -> RunOutcome:
        cfg = self.config
        source = iter(offers) if offers is not None else None
        while self.graph.round < cfg.max_rounds:
            if cfg.stop_on_loss and self.loss_round is not None:
                break
            if source is not None:
                try:
                    edges = next(source)
                except StopIteration:
                    break
                offer = edges if isinstance(edges, Offer) else Offer(self.graph.round + 1, [tuple(sorted(e)) for e in edges])
            else:
                offer = sample_offer(self.graph, cfg.r, self.rng)
            self.step(offer, record)
        counts = list(self.ledger.counts) if self.ledger is not None else None
        return RunOutcome(
            loss_round=self.loss_round,
            rounds_run=self.graph.round,
            seed=cfg.seed,
            n=cfg.n,
            r=cfg.r,
            pattern=cfg.forbidden.name or "custom",
            strategy=self.strategy,
            s=self.s,
            counts=counts,
            copies_created=counts[0] if counts is not None else None,
        )


def run(config: ProcessConfig, strategy: str = "min-danger", offers: Optional[Iterable] = None) -> RunOutcome:
    """Play the game until ``max_rounds`` or, with ``stop_on_loss``, the first losing round.

    ``offers`` replays a fixed sequence of offers instead of sampling them.
    """
    return Game(config, strategy).play(offers)


def sample_distinct_edges(n: int, count: int, rng: RandomStream) -> list:
    total = pair_count(n)
    if count > total:
        raise ProcessError("too many edges requested")
    if 2 * count > total:
        pool = [(a, b) for a in range(n) for b in range(a + 1, n)]
        rng.shuffle(pool)
        return pool[:count]
    seen: set = set()
    out = []
    while len(out) < count:
        a = rng.below(n)
        b = rng.below(n - 1)
        if b >= a:
            b += 1
        e = (a, b) if a < b else (b, a)
        if e not in seen:
            seen.add(e)
            out.append(e)
    return out


def offline_k3_r2(n: int, m: int, rng: RandomStream) -> RunOutcome:
    """Offline triangle avoidance with all ``m`` offered pairs known in advance.

    ``2m`` distinct uniform edges are split into ``m`` random pairs; from each pair
    the first edge lying in no triangle of the full offered graph is taken.
    """
    if m < 0 or 2 * m > pair_count(n):
        raise ProcessError("need 0 <= 2m <= C(n, 2)")
    edges = sample_distinct_edges(n, 2 * m, rng)
    rng.shuffle(edges)
    full = DynamicGraph.from_edges(n, edges)
    in_triangle = {e: not full.adj[e[0]].isdisjoint(full.adj[e[1]]) for e in edges}
    chosen = DynamicGraph(n)
    loss_round = None
    triangles = 0
    for i in range(m):
        pair = edges[2 * i: 2 * i + 2]
        pick = next((e for e in pair if not in_triangle[e]), pair[0])
        a, b = pick
        common = len(chosen.adj[a] & chosen.adj[b])
        if common and loss_round is None:
            loss_round = i + 1
        triangles += common
        chosen.add_edge(a, b)
    return RunOutcome(
        loss_round=loss_round,
        rounds_run=m,
        seed=rng.seed,
        n=n,
        r=2,
        pattern="c3",
        strategy="offline",
        s=1,
        counts=[6 * triangles],
        copies_created=6 * triangles,
    )


def sample_gnp(n: int, p: float, rng: RandomStream) -> DynamicGraph:
    """Binomial random graph; each pair present independently with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ProcessError("p must lie in [0, 1]")
    g = DynamicGraph(n)
    if p == 0.0 or n < 2:
        return g
    gen = np.random.Generator(np.random.PCG64(rng.next64()))
    for a in range(n - 1):
        row = gen.random(n - a - 1) < p
        for j in np.flatnonzero(row).tolist():
            g.add_edge(a, a + 1 + j)
    return g

