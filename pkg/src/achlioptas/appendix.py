"""Exact and brute-force checks of the inequalities and structural lemmas behind the clique and biclique thresholds."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Callable, Optional

from .pattern import (
    are_isomorphic,
    backbone_pair,
    balanced_extension_failures,
    build_biclique_sequence,
    build_clique_sequence,
    format_pattern,
    is_balanced,
    is_balanced_extension_pair,
    make_biclique,
    make_clique,
    minus_edges,
    sequence_extension_pairs,
)
from .thresholds import s_param, theta_biclique, theta_clique, theta_cycle

BICLIQUE_T_CAP = 7
BACKBONE_K = range(1, 6)


@dataclass
class CheckRecord:
    check_id: str
    family: str
    t: Optional[int]
    r: Optional[int]
    passed: bool
    lhs: str
    rhs: str
    witness: str = ""
    applicable: bool = True


@dataclass
class VerificationReport:
    records: list = field(default_factory=list)
    exceptions: list = field(default_factory=list)
    findings: list = field(default_factory=list)

    def add(self, *args, **kwargs) -> CheckRecord:
        rec = CheckRecord(*args, **kwargs)
        self.records.append(rec)
        return rec

    @property
    def failures(self) -> list:
        return [r for r in self.records if r.applicable and not r.passed]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "records": [asdict(r) for r in self.records],
            "non_balanced": list(self.exceptions),
            "findings": list(self.findings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@lru_cache(maxsize=None)
def any_order_counterexamples(t: int) -> list:
    """Steps ``(H, H + e)`` between the balanced bipartite graph and ``K_t`` that are not balanced extension pairs.

    Covers every intermediate graph, so an empty list means any edge order works.
    """
    from .pattern import Pattern

    a = t // 2
    base = frozenset((i, j) for i in range(a) for j in range(a, t))
    inner = [e for e in combinations(range(t), 2) if e not in base]
    bad = []
    for mask in range((1 << len(inner)) - 1):
        extra = frozenset(inner[i] for i in range(len(inner)) if mask >> i & 1)
        h = Pattern(t, base | extra)
        for e in inner:
            if e not in extra and not is_balanced_extension_pair(h.marked(*e)):
                bad.append((sorted(extra), e))
    return bad


def _k23_pendant():
    # K_{2,3} on {0,1} x {2,3,4} plus a pendant edge 4-5
    from .pattern import Pattern

    edges = {(a, b) for a in (0, 1) for b in (2, 3, 4)} | {(4, 5)}
    return Pattern(6, frozenset(edges), name="K2,3+pendant")


@lru_cache(maxsize=None)
def _deletion_forms(family: str, t: int, s: int) -> tuple:
    h = make_clique(t) if family == "clique" else make_biclique(t, t)
    return minus_edges(h, s).forms


@lru_cache(maxsize=None)
def _bep_failures(family: str, t: int, s: int) -> tuple:
    h = make_clique(t) if family == "clique" else make_biclique(t, t)
    return tuple(balanced_extension_failures(h, s))


def _strict_half(t: int, r: int) -> bool:
    return t >= 5 or (t == 4 and r >= 4)


def _fmt(x) -> str:
    return str(Fraction(x))


def verify_appendix(t_max: int = 7, r_max: int = 5, theta_hook: Optional[Callable] = None,
                    structural: bool = True) -> VerificationReport:
    """Run the full check grid.

    Cliques use ``4 <= t <= t_max``, bicliques ``3 <= t <= min(t_max, 7)``, cycles
    ``3 <= t <= t_max``; ``r`` runs over ``2..r_max``. ``theta_hook(family, t, r,
    theta)`` may replace theta (used to exercise the failure path).
    """
    rep = VerificationReport()
    rs = range(2, r_max + 1)
    clique_ts = range(4, t_max + 1)
    biclique_ts = range(3, min(t_max, BICLIQUE_T_CAP) + 1)
    cycle_ts = range(3, t_max + 1)

    def theta(family, t, r):
        base = {"clique": theta_clique, "biclique": theta_biclique, "cycle": theta_cycle}[family](t, r)
        return Fraction(theta_hook(family, t, r, base)) if theta_hook else base

    for t in sorted(set(clique_ts) | set(biclique_ts)):
        for r in range(2, r_max):
            a, b = s_param(t, r + 1), s_param(t, r)
            rep.add("s_nonincreasing_in_r", "any", t, r, a <= b, f"s({t},{r + 1})={a}", f"s({t},{r})={b}")

    for t in clique_ts:
        for r in rs:
            s = s_param(t, r)
            th = theta("clique", t, r)
            strict = _strict_half(t, r)
            rep.add("clique_s_at_most_half_t", "clique", t, r, 2 * s < t if strict else 2 * s <= t,
                    str(s), f"{_fmt(Fraction(t, 2))} ({'strict' if strict else 'non-strict'})")
            lhs = th * (t // 2)
            rep.add("clique_codegree_power", "clique", t, r, lhs <= 1, _fmt(lhs), "1",
                    "" if lhs <= 1 else f"theta={th}", applicable=strict)
            pos = (t - 2) - (comb(t, 2) - s - 1) * th
            rep.add("clique_positive_power", "clique", t, r, pos > 0, _fmt(pos), "0",
                    "" if pos > 0 else f"theta={th}, s={s}")
            neg = (t - 2) - (comb(t, 2) - s) * th
            rep.add("clique_negative_power", "clique", t, r, neg < 0, _fmt(neg), "0",
                    "" if neg < 0 else f"theta={th}, s={s}", applicable=strict)

    for t in biclique_ts:
        for r in rs:
            s = s_param(t, r)
            th = theta("biclique", t, r)
            lhs = th * Fraction(t, 2)
            rep.add("biclique_codegree_power", "biclique", t, r, lhs < 1, _fmt(lhs), "1",
                    "" if lhs < 1 else f"theta={th}")
            pos = (2 * t - 2) - (t * t - s - 1) * th
            rep.add("biclique_positive_power", "biclique", t, r, pos > 0, _fmt(pos), "0",
                    "" if pos > 0 else f"theta={th}, s={s}")
            neg = (2 * t - 2) - (t * t - s) * th
            rep.add("biclique_negative_power", "biclique", t, r, neg < 0, _fmt(neg), "0",
                    "" if neg < 0 else f"theta={th}, s={s}")

    for t in cycle_ts:
        for r in rs:
            th = theta("cycle", t, r)
            neg = (t - 2) - (t - 1) * th
            expected = Fraction(-t, r * (t - 1) + 1)
            rep.add("cycle_negative_power", "cycle", t, r, neg < 0 and neg == expected, _fmt(neg), _fmt(expected))
            pos = 1 - th
            rep.add("cycle_positive_power", "cycle", t, r, pos > 0, _fmt(pos), "0")

    if structural:
        _structural(rep, clique_ts, biclique_ts, rs)
    return rep


def _structural(rep: VerificationReport, clique_ts, biclique_ts, rs) -> None:
    pendant = _k23_pendant()
    for family, ts in (("clique", clique_ts), ("biclique", biclique_ts)):
        for t in ts:
            for r in rs:
                s = s_param(t, r)
                forms = _deletion_forms(family, t, s)
                bad = [f for f in forms if not is_balanced(f)]
                expected_bad = family == "biclique" and (t, r) == (3, 2)
                for f in bad:
                    known = expected_bad and are_isomorphic(f, pendant)
                    rep.exceptions.append({"family": family, "t": t, "r": r, "s": s, "expected": known,
                                           "form": format_pattern(f)})
                    rep.add(f"{family}_minus_s_unbalanced_form", family, t, r, known,
                            "not balanced", "expected exception" if known else "balanced",
                            format_pattern(f).replace("\n", ";"))
                unexpected = [f for f in bad if not (expected_bad and are_isomorphic(f, pendant))]
                rep.add(f"{family}_minus_s_balanced", family, t, r, not unexpected,
                        f"{len(forms) - len(bad)}/{len(forms)} forms balanced",
                        f"{len(forms) - (1 if expected_bad else 0)}/{len(forms)}",
                        ";".join(format_pattern(f).replace("\n", ",") for f in unexpected))
                fails = _bep_failures(family, t, s)
                rep.add(f"{family}_extension_property", family, t, r, not fails,
                        f"{len(fails)} failing pairs", "0",
                        format_pattern(fails[0]).replace("\n", ";") if fails else "")
            seq = build_clique_sequence(t) if family == "clique" else build_biclique_sequence(t)
            pairs = sequence_extension_pairs(seq)
            bad_pairs = [i for i, h1 in enumerate(pairs) if not is_balanced_extension_pair(h1)]
            if family == "clique" and t <= 8:
                bad_any = any_order_counterexamples(t)
                if bad_any:
                    extra, e = bad_any[0]
                    rep.findings.append({
                        "family": "clique", "t": t,
                        "note": "some edge orders from the balanced bipartite start break the extension-pair property",
                        "steps_failing": len(bad_any),
                        "example": {"added_inside_parts": [list(x) for x in extra], "marked": list(e)},
                    })
            rep.add(f"{family}_sequence_extension_pairs", family, t, None, not bad_pairs,
                    f"{len(pairs) - len(bad_pairs)}/{len(pairs)} steps", f"{len(pairs)}/{len(pairs)}",
                    ",".join(str(i + 1) for i in bad_pairs))
    for k in BACKBONE_K:
        h1 = backbone_pair(k)
        ok = is_balanced_extension_pair(h1)
        rep.add("biclique_backbone_extension_pair", "biclique", k, None, ok, "pair", "balanced extension pair",
                "" if ok else format_pattern(h1).replace("\n", ";"))
