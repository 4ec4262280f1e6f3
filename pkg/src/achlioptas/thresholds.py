"""Exact avoidance-threshold exponents.

The threshold for avoiding a pattern is ``n ** (2 - theta)``. Everything here is
exact: ``Fraction`` for rationals and integer power comparisons in place of
logarithms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Optional

from .pattern import Pattern, induced_edge_counts, make_biclique, make_clique, make_cycle

Rational = Fraction

FAMILIES = ("cycle", "clique", "biclique", "general")
STAR_MAX_VERTICES = 10


class ThresholdDomainError(ValueError):
    pass


def s_param(t: int, r: int) -> int:
    """Largest ``s`` with ``r**s <= (r-1)*t + 1``."""
    if t < 1 or r < 2:
        raise ThresholdDomainError("need t >= 1 and r >= 2")
    bound = (r - 1) * t + 1
    s = 0
    while r ** (s + 1) <= bound:
        s += 1
    return s


def geometric(r: int, s: int) -> int:
    """``(r**s - 1) / (r - 1)``, i.e. ``1 + r + ... + r**(s-1)``."""
    return sum(r ** i for i in range(s))


def theta_from_counts(v: int, e: int, r: int, s: int) -> Fraction:
    if r < 2 or s < 0:
        raise ThresholdDomainError("need r >= 2 and s >= 0")
    num = r ** s * (v - 2) + 2
    den = r ** s * (e - s) + geometric(r, s)
    if den <= 0:
        raise ThresholdDomainError(f"nonpositive denominator {den} for v={v}, e={e}, r={r}, s={s}")
    return Fraction(num, den)


def theta_cycle(t: int, r: int) -> Fraction:
    if t < 3 or r < 2:
        raise ThresholdDomainError("cycle threshold needs t >= 3 and r >= 2")
    return Fraction(r * (t - 2) + 2, r * (t - 1) + 1)


def theta_clique(t: int, r: int) -> Fraction:
    if t < 4 or r < 2:
        raise ThresholdDomainError("clique threshold needs t >= 4 and r >= 2")
    return theta_from_counts(t, comb(t, 2), r, s_param(t, r))


def theta_biclique(t: int, r: int) -> Fraction:
    if t < 3 or r < 2:
        raise ThresholdDomainError("biclique threshold needs t >= 3 and r >= 2")
    return theta_from_counts(2 * t, t * t, r, s_param(t, r))


def theta_general(h: Pattern, r: int, s: int) -> Fraction:
    if s > h.e - 1 and h.e > 0:
        raise ThresholdDomainError(f"s must be at most e(H)-1 = {h.e - 1}")
    return theta_from_counts(h.v, h.e, r, s)


def theta_star(h: Pattern, r: int) -> tuple:
    """Minimum of ``theta(H', r, s)`` over subgraphs ``H'`` with an edge and ``0 <= s < e(H')``.

    For a fixed vertex set the value falls as edges are added, so only induced
    subgraphs are scanned; theta depends on ``H'`` only through ``(v, e)``.
    Returns ``(theta, witness_pattern, s)``.
    """
    if h.v > STAR_MAX_VERTICES:
        raise ThresholdDomainError(f"pattern too large ({h.v} > {STAR_MAX_VERTICES} vertices)")
    if h.e == 0:
        raise ThresholdDomainError("pattern has no edges")
    counts = induced_edge_counts(h)
    best_mask: dict = {}
    for mask in range(1, 1 << h.v):
        e = counts[mask]
        if e == 0:
            continue
        key = (mask.bit_count(), e)
        best_mask.setdefault(key, mask)
    best = None
    for (v, e), mask in sorted(best_mask.items()):
        for s in range(e):
            try:
                th = theta_from_counts(v, e, r, s)
            except ThresholdDomainError:
                continue
            cand = (th, -v, -e, s, mask)
            if best is None or cand < best:
                best = cand
    th, _, _, s, mask = best
    verts = [x for x in range(h.v) if mask >> x & 1]
    pos = {x: i for i, x in enumerate(verts)}
    witness = Pattern(
        len(verts),
        frozenset((pos[a], pos[b]) for a, b in h.edges if a in pos and b in pos),
        name=h.name if len(verts) == h.v else "",
    )
    return th, witness, s


@dataclass(frozen=True)
class ExponentPair:
    """Exponents of ``n`` and ``p`` in a count bound ``n**x * p**y``."""

    x: Fraction
    y: Fraction

    @property
    def ratio(self) -> Fraction:
        return self.x / self.y

    def as_strings(self) -> list:
        return [str(self.x), str(self.y)]


def exponent_sequence(a, b, r: int, s: int) -> list:
    """``[(x_s, y_s), ..., (x_0, y_0)]`` from ``x_{k-1} = 2 + (x_k - 2) r`` and ``y_{k-1} = 1 + y_k r``."""
    a, b = Fraction(a), Fraction(b)
    if a <= 2 or b <= 0 or r < 2 or s < 1:
        raise ThresholdDomainError("need a > 2, b > 0, r >= 2, s >= 1")
    seq = [ExponentPair(a, b)]
    x, y = a, b
    for _ in range(s):
        x, y = 2 + (x - 2) * r, 1 + y * r
        seq.append(ExponentPair(x, y))
    return seq


def exponent_sequence_closed(a, b, r: int, s: int) -> list:
    a, b = Fraction(a), Fraction(b)
    out = []
    for k in range(s, -1, -1):
        q = r ** (s - k)
        out.append(ExponentPair(q * (a - 2) + 2, q * b + geometric(r, s - k)))
    return out


@dataclass
class ThresholdReport:
    family: str
    t: Optional[int]
    r: int
    s: int
    theta: Fraction
    sequence: list = field(default_factory=list)
    pattern: Optional[str] = None

    @property
    def exponent(self) -> Fraction:
        return 2 - self.theta

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "t": self.t,
            "pattern": self.pattern,
            "r": self.r,
            "s": self.s,
            "theta": str(self.theta),
            "exponent": str(self.exponent),
            "exponent_decimal": round(float(self.exponent), 6),
            "sequence": [p.as_strings() for p in self.sequence],
        }


def threshold_report(family: str, t: int, r: int) -> ThresholdReport:
    if family == "cycle":
        th = theta_cycle(t, r)
        return ThresholdReport("cycle", t, r, 1, th, exponent_sequence(t, t - 1, r, 1), f"C{t}")
    if family == "clique":
        th = theta_clique(t, r)
        s = s_param(t, r)
        return ThresholdReport("clique", t, r, s, th, exponent_sequence(t, comb(t, 2) - s, r, s), f"K{t}")
    if family == "biclique":
        th = theta_biclique(t, r)
        s = s_param(t, r)
        return ThresholdReport("biclique", t, r, s, th, exponent_sequence(2 * t, t * t - s, r, s), f"K{t},{t}")
    raise ThresholdDomainError(f"unknown family {family!r}")


def general_report(h: Pattern, r: int, s: int) -> ThresholdReport:
    th = theta_general(h, r, s)
    if s >= 1 and h.v > 2 and h.e - s > 0:
        seq = exponent_sequence(h.v, h.e - s, r, s)
    else:
        seq = [ExponentPair(Fraction(h.v), Fraction(h.e - s))]
    return ThresholdReport("general", None, r, s, th, seq, h.name or None)


def family_pattern(family: str, t: int) -> Pattern:
    if family == "cycle":
        return make_cycle(t)
    if family == "clique":
        return make_clique(t)
    if family == "biclique":
        return make_biclique(t, t)
    raise ThresholdDomainError(f"unknown family {family!r}")


def default_depth(family: str, t: int, r: int) -> int:
    """Danger depth used by the minimal-danger strategy for a built-in family."""
    if family == "cycle":
        return 1
    return s_param(t, r)


def verify_appendix(t_max: int = 7, r_max: int = 5, **kwargs):
    """Exact inequality grid plus the brute-force structural checks; see ``appendix.verify_appendix``."""
    from .appendix import verify_appendix as _verify

    return _verify(t_max, r_max, **kwargs)
