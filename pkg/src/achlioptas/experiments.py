"""Monte Carlo harness: survival grids, crossing estimates and random-graph diagnostics."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from statistics import NormalDist, median
from typing import Optional

import numpy as np

from .counting import DynamicGraph, count_bicliques, count_paths, pair_count
from .pattern import alias_family, pattern_from_alias
from .process import STRATEGIES, ProcessConfig, RandomStream, run, trial_seed
from .thresholds import ThresholdDomainError, threshold_report

SCHEMA_VERSION = 1
CSV_COLUMNS = ("trial_id", "seed", "n", "r", "pattern", "strategy", "m_target", "loss_round", "rounds_run", "elapsed_ms")
CSV_HEADER = f"# achlioptas trial records, schema v{SCHEMA_VERSION}"


class ExperimentError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    pattern: str
    r: int
    n_values: list
    strategy: str = "min-danger"
    m_values: Optional[list] = None
    alphas: Optional[list] = None
    coef: float = 1.0
    trials: int = 100
    base_seed: int = 0
    jobs: int = 1
    output: Optional[str] = None
    s: Optional[int] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ExperimentError("trials must be at least 1")
        if self.strategy not in STRATEGIES:
            raise ExperimentError(f"unknown strategy {self.strategy!r}")
        if (self.m_values is None) == (self.alphas is None):
            raise ExperimentError("give exactly one of m_values or alphas")
        if not self.n_values:
            raise ExperimentError("n_values is empty")
        pattern_from_alias(self.pattern)
        for n in self.n_values:
            for m in self.rounds_for(n):
                if not 0 <= m <= pair_count(n):
                    raise ExperimentError(f"m={m} out of range for n={n}")

    def rounds_for(self, n: int) -> list:
        if self.m_values is not None:
            return sorted({int(m) for m in self.m_values})
        return sorted({math.floor(self.coef * n ** float(a)) for a in self.alphas})

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ExperimentError(f"unknown config keys: {sorted(extra)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ExperimentError(f"bad experiment config: {exc}") from None


@dataclass
class TrialRecord:
    trial_id: int
    seed: int
    n: int
    r: int
    pattern: str
    strategy: str
    m_target: int
    loss_round: Optional[int]
    rounds_run: int
    elapsed_ms: Optional[float] = None

    def row(self) -> list:
        return [("" if v is None else v) for v in (getattr(self, c) for c in CSV_COLUMNS)]


@dataclass
class CellSummary:
    n: int
    m: int
    trials: int
    survivors: int
    survival: float
    ci_low: float
    ci_high: float
    median_loss_round: Optional[float]


@dataclass
class GridResult:
    cells: list
    records: list
    paths: dict = field(default_factory=dict)

    def cell(self, n: int, m: int) -> CellSummary:
        for c in self.cells:
            if c.n == n and c.m == m:
                return c
        raise KeyError((n, m))


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple:
    if trials <= 0:
        raise ValueError("trials must be positive")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    ph = successes / trials
    denom = 1 + z * z / trials
    centre = (ph + z * z / (2 * trials)) / denom
    half = z * math.sqrt(ph * (1 - ph) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def _one_trial(task: tuple) -> tuple:
    pattern, r, strategy, s, n, max_rounds, trial_id, seed = task
    start = time.perf_counter()
    cfg = ProcessConfig(n, r, pattern_from_alias(pattern), max_rounds, seed, stop_on_loss=True, s=s, track_counts=False)
    out = run(cfg, strategy)
    return trial_id, out.loss_round, out.rounds_run, (time.perf_counter() - start) * 1000.0


def _run_tasks(tasks: list, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        results = [_one_trial(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_one_trial, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    return sorted(results)


def _truncate(loss: Optional[int], rounds: int, m: int) -> tuple:
    """Outcome of the same seeded run stopped after ``m`` rounds."""
    if loss is not None and loss <= m:
        return loss, loss
    return None, min(rounds, m)


def run_grid(config: ExperimentConfig, write: bool = True, timings: bool = False) -> GridResult:
    """Survival over the ``(n, m)`` grid.

    Each trial is played once up to the largest ``m`` for its ``n`` and read off
    at every smaller ``m`` (common random numbers), so estimated survival can
    only fall as ``m`` grows. Wall times are recorded only with ``timings``,
    since they would make repeated output differ.
    """
    cfg = config
    name = pattern_from_alias(cfg.pattern).name or cfg.pattern
    tasks = []
    for idx, n in enumerate(cfg.n_values):
        top = max(cfg.rounds_for(n))
        for i in range(cfg.trials):
            tid = idx * cfg.trials + i
            tasks.append((cfg.pattern, cfg.r, cfg.strategy, cfg.s, n, top, tid, trial_seed(cfg.base_seed, tid)))
    outcomes, elapsed = {}, {}
    for tid, loss, rounds, ms in _run_tasks(tasks, cfg.jobs):
        outcomes[tid] = (loss, rounds)
        elapsed[tid] = round(ms, 3) if timings else None

    records, cells = [], []
    for idx, n in enumerate(cfg.n_values):
        for m in cfg.rounds_for(n):
            losses, survivors = [], 0
            for i in range(cfg.trials):
                tid = idx * cfg.trials + i
                loss, rounds = _truncate(*outcomes[tid], m)
                records.append(TrialRecord(tid, trial_seed(cfg.base_seed, tid), n, cfg.r, name, cfg.strategy, m, loss, rounds,
                                           elapsed[tid]))
                if loss is None:
                    survivors += 1
                else:
                    losses.append(loss)
            lo, hi = wilson_interval(survivors, cfg.trials)
            cells.append(CellSummary(n, m, cfg.trials, survivors, survivors / cfg.trials, lo, hi,
                                     float(median(losses)) if losses else None))
    result = GridResult(cells, records)
    if write and cfg.output:
        result.paths = write_grid(result, cfg.output)
    return result


def records_csv(records: list) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        w.writerow(rec.row())
    return buf.getvalue()


def cells_json(cells: list) -> str:
    return json.dumps([asdict(c) for c in cells], indent=2, sort_keys=True) + "\n"


def write_grid(result: GridResult, out_dir: str) -> dict:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    trials, summary = path / "trials.csv", path / "summary.json"
    trials.write_text(records_csv(result.records))
    summary.write_text(cells_json(result.cells))
    return {"trials": str(trials), "summary": str(summary)}


# --- crossing estimates -------------------------------------------------------

@dataclass
class CrossingEstimate:
    n: int
    alpha_hat: Optional[float]
    ci_low: Optional[float]
    ci_high: Optional[float]
    flags: list = field(default_factory=list)


@dataclass
class CrossingReport:
    pattern: str
    r: int
    strategy: str
    target: float
    reference: Optional[str]
    reference_decimal: Optional[float]
    estimates: list
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _crossing(fn, lo: float, hi: float, target: float, levels: int, splits: int = 4) -> Optional[float]:
    """Locate where the nonincreasing ``fn`` drops through ``target`` by repeated grid refinement."""
    if fn(lo) < target or fn(hi) > target:
        return None
    for _ in range(levels):
        grid = [lo + (hi - lo) * j / splits for j in range(splits + 1)]
        vals = [fn(a) for a in grid]
        j = next(j for j in range(1, splits + 1) if vals[j] <= target)
        lo, hi = grid[j - 1], grid[j]
    return (lo + hi) / 2


def reference_exponent(pattern: str, r: int) -> Optional[Fraction]:
    fam = alias_family(pattern)
    if fam is None:
        return None
    try:
        return threshold_report(fam[0], fam[1], r).exponent
    except ThresholdDomainError:
        return None


def estimate_crossing(config: ExperimentConfig, target_prob: float = 0.5, levels: int = 3,
                      alpha_range: tuple = (1.0, 2.0)) -> CrossingReport:
    """Estimate the exponent ``alpha`` with survival ``target_prob`` at ``m = n**alpha`` for each ``n``.

    One run per trial up to ``n**alpha_max`` gives survival at every smaller
    ``alpha`` through common random numbers. The interval comes from where the
    Wilson bounds cross the target.
    """
    lo_a, hi_a = alpha_range
    cfg = ExperimentConfig(
        pattern=config.pattern, r=config.r, n_values=list(config.n_values), strategy=config.strategy,
        alphas=[lo_a], coef=1.0, trials=config.trials, base_seed=config.base_seed,
        jobs=config.jobs, s=config.s,
    )
    tasks = []
    for idx, n in enumerate(cfg.n_values):
        top = min(pair_count(n), math.floor(n ** hi_a))
        for i in range(cfg.trials):
            tid = idx * cfg.trials + i
            tasks.append((cfg.pattern, cfg.r, cfg.strategy, cfg.s, n, top, tid, trial_seed(cfg.base_seed, tid)))
    results = _run_tasks(tasks, cfg.jobs)
    estimates = []
    for idx, n in enumerate(cfg.n_values):
        losses = [loss for tid, loss, _, _ in results if idx * cfg.trials <= tid < (idx + 1) * cfg.trials]

        def surv_count(alpha, losses=losses, n=n):
            m = math.floor(n ** alpha)
            return sum(1 for x in losses if x is None or x > m)

        t = cfg.trials
        point = _crossing(lambda a: surv_count(a) / t, lo_a, hi_a, target_prob, levels)
        upper = _crossing(lambda a: wilson_interval(surv_count(a), t)[1], lo_a, hi_a, target_prob, levels)
        lower = _crossing(lambda a: wilson_interval(surv_count(a), t)[0], lo_a, hi_a, target_prob, levels)
        flags = []
        if point is None:
            flags.append("crossing not bracketed by alpha range")
        grid = [lo_a + (hi_a - lo_a) * j / 32 for j in range(33)]
        vals = [surv_count(a) for a in grid]
        if any(b > a for a, b in zip(vals, vals[1:])):
            flags.append("survival not monotone in alpha")
        estimates.append(CrossingEstimate(n, point, lower, upper, flags))
    ref = reference_exponent(cfg.pattern, cfg.r)
    report_flags = []
    found = [e.alpha_hat for e in estimates if e.alpha_hat is not None]
    if len(found) >= 3 and not (all(a <= b for a, b in zip(found, found[1:])) or all(a >= b for a, b in zip(found, found[1:]))):
        report_flags.append("estimates not monotone in n")
    return CrossingReport(cfg.pattern, cfg.r, cfg.strategy, target_prob,
                          str(ref) if ref is not None else None,
                          float(ref) if ref is not None else None, estimates, report_flags)


# --- random-graph diagnostics --------------------------------------------------

def gnp_adjacency(n: int, p: float, rng: RandomStream) -> np.ndarray:
    gen = np.random.Generator(np.random.PCG64(rng.next64()))
    upper = np.triu(gen.random((n, n)) < p, k=1)
    return upper | upper.T


def codegrees(adj: np.ndarray) -> np.ndarray:
    """Codegrees of all pairs ``a < b``, flattened in row order."""
    a = adj.astype(np.float32)
    prod = a @ a
    iu = np.triu_indices(adj.shape[0], k=1)
    return np.rint(prod[iu]).astype(np.int64)


def codegrees_brute(adj: np.ndarray) -> list:
    n = adj.shape[0]
    nbrs = [set(np.flatnonzero(adj[i]).tolist()) for i in range(n)]
    return [len(nbrs[a] & nbrs[b]) for a in range(n) for b in range(a + 1, n)]


@dataclass
class CodegreeSample:
    max_codegree: int
    bound: float
    over_bound: int
    tails: dict
    tail_limits: dict
    tails_ok: bool


@dataclass
class CodegreeReport:
    n: int
    p: float
    samples: list
    first_clause_failures: int
    second_clause_passes: int

    def to_dict(self) -> dict:
        return asdict(self)


def codegree_diagnostic(n: int, p: float, samples: int, rng: RandomStream) -> CodegreeReport:
    """Sample ``G(n, p)`` and test both codegree clauses (natural log).

    First clause: every codegree is at most ``n p^2 log n``. Second clause: for
    each integer ``4 <= k <= log n``, at most ``n^2/k^3`` pairs have codegree at
    least ``k n p^2``.
    """
    ln = math.log(n) if n > 1 else 0.0
    bound = n * p * p * ln
    ks = range(4, math.floor(ln) + 1)
    out = []
    for _ in range(samples):
        cd = codegrees(gnp_adjacency(n, p, rng)) if n > 1 else np.zeros(0, dtype=np.int64)
        mx = int(cd.max()) if cd.size else 0
        over = int(np.count_nonzero(cd > bound))
        tails, limits = {}, {}
        for k in ks:
            # a zero threshold would count pairs with no common neighbour at all
            tails[str(k)] = int(np.count_nonzero(cd >= max(k * n * p * p, 1)))
            limits[str(k)] = n * n / k ** 3
        ok = all(tails[k] <= limits[k] for k in tails)
        out.append(CodegreeSample(mx, bound, over, tails, limits, ok))
    return CodegreeReport(n, p, out, sum(1 for s in out if s.over_bound), sum(1 for s in out if s.tails_ok))


@dataclass
class ExtremalReport:
    kind: str
    observed: int
    reference: float
    ratio: Optional[float]
    epsilon: float
    passed: Optional[bool]
    note: str = ""


def extremal_diagnostics(g: DynamicGraph, t: Optional[int] = None, sides: Optional[tuple] = None,
                         p: Optional[float] = None, epsilon: float = 0.2) -> list:
    """Compare path and biclique counts with their extremal lower bounds.

    Paths use the average degree ``d``: reference ``n d^(t-1)``. Bicliques use
    ``n^(a+b) p^(ab)``, with ``p`` defaulting to the edge density.
    """
    n = g.n
    out = []
    if t is not None:
        d = 2 * g.edge_count / n if n else 0.0
        obs = count_paths(g, t)
        if d == 0:
            out.append(ExtremalReport(f"path{t}", obs, 0.0, None, epsilon, None, "skipped: no edges"))
        else:
            ref = n * d ** (t - 1)
            ratio = obs / ref
            out.append(ExtremalReport(f"path{t}", obs, ref, ratio, epsilon, ratio >= 1 - epsilon))
    if sides is not None:
        a, b = sides
        dens = p if p is not None else (g.edge_count / pair_count(n) if n > 1 else 0.0)
        obs = count_bicliques(g, a, b)
        if dens == 0:
            out.append(ExtremalReport(f"biclique{a},{b}", obs, 0.0, None, epsilon, None, "skipped: no edges"))
        else:
            ref = n ** (a + b) * dens ** (a * b)
            ratio = obs / ref
            out.append(ExtremalReport(f"biclique{a},{b}", obs, ref, ratio, epsilon, ratio >= 1 - epsilon))
    return out


def default_jobs() -> int:
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1))
