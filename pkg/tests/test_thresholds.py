from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from achlioptas.pattern import make_biclique, make_clique, make_cycle, make_path, parse_pattern
from achlioptas.thresholds import (
    ThresholdDomainError,
    exponent_sequence,
    exponent_sequence_closed,
    general_report,
    geometric,
    s_param,
    theta_biclique,
    theta_clique,
    theta_cycle,
    theta_from_counts,
    theta_general,
    theta_star,
    threshold_report,
    verify_appendix,
)

GRID = [(t, r) for t in range(4, 9) for r in range(2, 6)]


# --- s parameter -------------------------------------------------------------------------

def test_s_param_examples():
    assert s_param(4, 2) == 2
    assert s_param(4, 3) == 2  # exact power 3**2 == 9
    assert s_param(4, 4) == 1
    assert s_param(3, 2) == 2


@given(st.integers(1, 200), st.integers(2, 50))
def test_s_param_brackets_power(t, r):
    s = s_param(t, r)
    assert r ** s <= (r - 1) * t + 1 < r ** (s + 1)


def test_s_param_domain():
    for bad in ((0, 2), (4, 1)):
        with pytest.raises(ThresholdDomainError):
            s_param(*bad)


@given(st.integers(2, 30), st.integers(0, 12))
def test_geometric_sum(r, s):
    assert geometric(r, s) * (r - 1) == r ** s - 1


# --- family formulas ----------------------------------------------------------------------

def test_family_examples():
    assert theta_clique(4, 2) == Fraction(10, 19)
    assert 2 - theta_clique(4, 2) == Fraction(28, 19)
    assert theta_clique(4, 3) == Fraction(1, 2)
    assert 2 - theta_cycle(3, 2) == Fraction(6, 5)
    assert theta_biclique(3, 2) == Fraction(18, 31)
    assert theta_cycle(3, 100) == Fraction(102, 201)


def test_family_domains():
    for fn, bad in ((theta_cycle, (2, 2)), (theta_clique, (3, 2)), (theta_biclique, (2, 2)), (theta_clique, (4, 1))):
        with pytest.raises(ThresholdDomainError):
            fn(*bad)


@pytest.mark.parametrize("t,r", GRID)
def test_families_match_general_formula(t, r):
    s = s_param(t, r)
    assert theta_clique(t, r) == theta_general(make_clique(t), r, s)
    if t <= 7:
        assert theta_biclique(t, r) == theta_general(make_biclique(t, t), r, s)


@pytest.mark.parametrize("t", range(3, 9))
@pytest.mark.parametrize("r", range(2, 6))
def test_cycle_matches_general_formula(t, r):
    assert theta_general(make_cycle(t), r, 1) == theta_cycle(t, r)


def test_exponent_strictly_between_one_and_two():
    for t in range(3, 9):
        for r in range(2, 7):
            thetas = [theta_cycle(t, r), theta_biclique(t, r)]
            if t >= 4:
                thetas.append(theta_clique(t, r))
            for th in thetas:
                assert 1 < 2 - th < 2


def test_exponent_nondecreasing_in_r():
    for t in range(3, 9):
        for r in range(2, 6):
            assert theta_cycle(t, r + 1) <= theta_cycle(t, r)
            if t >= 4:
                assert theta_clique(t, r + 1) <= theta_clique(t, r)


def test_general_formula_edge_cases():
    k4 = make_clique(4)
    assert theta_general(k4, 2, 2) == Fraction(10, 19)
    assert theta_general(k4, 3, 0) == Fraction(4, 6)
    with pytest.raises(ThresholdDomainError):
        theta_general(k4, 2, 6)
    with pytest.raises(ThresholdDomainError):
        theta_from_counts(3, 1, 2, 2)


@given(st.integers(3, 12), st.integers(1, 40), st.integers(2, 6))
def test_s_zero_gives_density_inverse(v, e, r):
    assert theta_from_counts(v, e, r, 0) == Fraction(v, e)


# --- theta star ----------------------------------------------------------------------------

def test_theta_star_examples():
    th, witness, s = theta_star(make_clique(4), 2)
    assert (th, witness.v, witness.e, s) == (Fraction(10, 19), 4, 6, 2)
    th, witness, s = theta_star(make_cycle(5), 3)
    assert (th, witness.v, witness.e, s) == (theta_cycle(5, 3), 5, 5, 1)
    k2 = parse_pattern("2 1\n0 1\n")
    for r in (2, 3, 7):
        assert theta_star(k2, r)[0] == 2


def test_theta_star_not_above_any_candidate():
    for h in (make_path(5), make_clique(5), make_biclique(2, 3)):
        th, witness, s = theta_star(h, 2)
        assert th == theta_general(witness, 2, s)
        for ss in range(h.e):
            try:
                assert th <= theta_general(h, 2, ss)
            except ThresholdDomainError:
                pass


def test_theta_star_size_cap():
    with pytest.raises(ThresholdDomainError):
        theta_star(make_cycle(11), 2)


# --- exponent sequences -------------------------------------------------------------------

def test_exponent_sequence_example():
    seq = exponent_sequence(4, 4, 2, 2)
    assert [(p.x, p.y) for p in seq] == [(4, 4), (6, 9), (10, 19)]


@pytest.mark.parametrize("t,r", GRID)
def test_sequence_closed_form_and_ratio(t, r):
    s = s_param(t, r)
    seq = exponent_sequence(t, comb(t, 2) - s, r, s)
    assert seq == exponent_sequence_closed(t, comb(t, 2) - s, r, s)
    assert seq[-1].ratio == theta_clique(t, r)
    assert all(p.ratio > seq[-1].ratio for p in seq[:-1])
    bseq = exponent_sequence(2 * t, t * t - s, r, s)
    assert bseq == exponent_sequence_closed(2 * t, t * t - s, r, s)
    assert bseq[-1].ratio == theta_biclique(t, r)


@given(st.fractions(min_value=Fraction(201, 100), max_value=20), st.fractions(min_value=Fraction(1, 10), max_value=50),
       st.integers(2, 6), st.integers(1, 6))
def test_recursion_equals_closed_form(a, b, r, s):
    assert exponent_sequence(a, b, r, s) == exponent_sequence_closed(a, b, r, s)


def test_exponent_sequence_domain():
    for bad in ((2, 4, 2, 2), (4, 0, 2, 2), (4, 4, 1, 2), (4, 4, 2, 0)):
        with pytest.raises(ThresholdDomainError):
            exponent_sequence(*bad)


# --- reports -------------------------------------------------------------------------------

def test_threshold_report_fields():
    rep = threshold_report("clique", 4, 2).to_dict()
    assert rep["theta"] == "10/19" and rep["exponent"] == "28/19" and rep["s"] == 2
    assert rep["sequence"] == [["4", "4"], ["6", "9"], ["10", "19"]]
    assert threshold_report("cycle", 3, 2).exponent == Fraction(6, 5)
    assert general_report(make_clique(4), 2, 2).theta == Fraction(10, 19)
    with pytest.raises(ThresholdDomainError):
        threshold_report("tree", 4, 2)


# --- inequality grid ------------------------------------------------------------------------

def _record(rep, check_id, t, r):
    return next(c for c in rep.records if c.check_id == check_id and c.t == t and c.r == r)


def test_verify_inequality_examples():
    rep = verify_appendix(t_max=5, r_max=4, structural=False)
    neg = _record(rep, "clique_negative_power", 4, 2)
    assert neg.passed and neg.lhs == "-2/19"
    # the t = 4, r in {2, 3} pairs sit outside the codegree inequality's hypothesis
    for r in (2, 3):
        assert not _record(rep, "clique_codegree_power", 4, r).applicable
    assert _record(rep, "clique_codegree_power", 4, 4).applicable
    cyc = _record(rep, "cycle_negative_power", 5, 3)
    assert cyc.passed and Fraction(cyc.lhs) == Fraction(-5, 13)
    assert rep.ok


def test_verify_detects_tampered_theta():
    rep = verify_appendix(t_max=5, r_max=3, structural=False, theta_hook=lambda fam, t, r, th: 2 * th)
    assert not rep.ok
    assert any(c.check_id == "clique_positive_power" and c.witness for c in rep.failures)
