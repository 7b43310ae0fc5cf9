"""Exact resonance enumeration tests."""

import json

import pytest
from hypothesis import given, settings, strategies as st

from qnls import resonance as rs


# ---------------------------------------------------------------------------
# brute-force oracles

def brute_pair_sum_sumsq(S, Q, limit=200):
    out = set()
    for s in range(-limit, limit + 1):
        t = S - s
        if s <= t and s * s + t * t == Q:
            out.add((s, t))
    return out


def brute_two_mode_pair(p, q, limit=300):
    """External (s,t) with s+2q+... : direct search on the defining system
    2p + s' = 2q + t' style identities via sum/sumsq of the case-2 family."""
    hits = set()
    for s in range(-limit, limit + 1):
        for t in range(-limit, limit + 1):
            if s == t:
                continue
            if {s, t} & {p, q}:
                continue
            # one external pair coupling (p,p,s) ~ (q,q,t)
            if 2 * p + s == 2 * q + t and 2 * p * p + s * s == 2 * q * q + t * t:
                hits.add(tuple(sorted((s, t))))
    return hits


def test_enumerate_R_small():
    pairs = rs.enumerate_R(3)
    assert pairs == sorted(pairs) and len(pairs) == len(set(pairs))
    for js, ls in pairs:
        assert sum(js) == sum(ls)
        assert sum(x * x for x in js) == sum(x * x for x in ls)
        assert tuple(sorted(js)) == js and tuple(sorted(ls)) == ls
    # a known nontrivial resonance: (-2,1,1) ~ (-1,-1,2)
    assert ((-2, 1, 1), (-1, -1, 2)) in pairs


def test_flagship_catalog():
    cat = rs.enumerate_sets((-3, 10, -6))
    assert [(p.s, p.t) for p in cat.set_A] == [(-14, 18)]
    assert [(p.s, p.t) for p in cat.set_B] == [(1, 9)]
    assert cat.set_C == [] and cat.set_E == []
    assert cat.disjoint
    assert cat.one_mode_solutions == []


def test_flagship_witnesses():
    cat = rs.enumerate_sets((-3, 10, -6))
    (pair,) = cat.set_B
    wits = rs.b_witnesses((-3, 10, -6), pair)
    assert (-3, 10, -6) in wits
    for a, b, c in wits:
        assert 2 * a + b == c + pair.s + pair.t
        assert 2 * a * a + b * b == c * c + pair.s**2 + pair.t**2


def test_two_mode_pairs():
    assert rs.solve_two_mode_pair(0, 1) is None  # odd gap
    pair = rs.solve_two_mode_pair(0, 2)
    assert (pair.s, pair.t) == (-1, 3)
    assert pair.set_tag == "TwoMode"


@settings(max_examples=60, deadline=None)
@given(st.integers(-15, 15), st.integers(1, 8))
def test_two_mode_matches_brute_force(p, half_gap):
    q = p + 2 * half_gap
    pair = rs.solve_two_mode_pair(p, q)
    brute = brute_two_mode_pair(p, q)
    if pair is None:
        assert brute == set()
    else:
        assert {tuple(sorted((pair.s, pair.t)))} == brute


@settings(max_examples=40, deadline=None)
@given(st.integers(-15, 15), st.integers(0, 7))
def test_odd_gap_never_pairs(p, k):
    assert rs.solve_two_mode_pair(p, p + 2 * k + 1) is None


def test_catalog_json_key_order():
    cat = rs.enumerate_sets((-3, 10, -6))
    keys = list(json.loads(cat.to_json()).keys())
    assert keys == ["internal", "A", "B", "C", "E", "disjoint",
                    "one_mode_solutions"]


def test_bound_too_small():
    with pytest.raises(rs.BoundTooSmall):
        rs.enumerate_sets((-3, 10, -6), bound=10)


def test_default_bound():
    cat = rs.enumerate_sets((-3, 10, -6))
    assert cat.bound == 4 * 10 + 8


def test_family_identities():
    quint = rs.appendix_family(rs.FamilyParams(-3, 1, 4, 1))
    assert (quint.p, quint.q, quint.m, quint.s, quint.t) == (-3, 10, 1, -6, 9)


@settings(max_examples=100, deadline=None)
@given(st.integers(-20, 20), st.integers(-6, 6).filter(bool),
       st.integers(-6, 6).filter(bool), st.integers(-6, 6).filter(bool))
def test_family_identities_random(p, k, n, r):
    q = rs.appendix_family(rs.FamilyParams(p, k, n, r))
    # both defining identities of the (p, p, q; m, s, t) configuration
    assert 2 * q.p + q.q == q.m + q.s + q.t
    assert 2 * q.p**2 + q.q**2 == q.m**2 + q.s**2 + q.t**2


def test_family_covers_round_trip():
    params = rs.FamilyParams(-3, 1, 4, 1)
    quint = rs.appendix_family(params)
    found = rs.family_covers(quint)
    assert found is not None
    again = rs.appendix_family(found)
    # round trip up to permutation of the unordered (m, s, t) side
    assert (again.p, again.q) == (quint.p, quint.q)
    assert sorted((again.m, again.s, again.t)) == sorted(
        (quint.m, quint.s, quint.t))


def test_one_mode_solutions_two_mode():
    cat = rs.enumerate_sets((0, 2))
    assert [(p.s, p.t) for p in cat.set_A] == [(-1, 3)]
