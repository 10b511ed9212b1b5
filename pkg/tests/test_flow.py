import random

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from rotsus.field import circle_reduce, make_params
from rotsus.flow import (
    MappingTorusPoint,
    expansiveness_probe,
    flow,
    normalize,
    quotient_dist,
    roof,
    section_return_time,
)
from rotsus.birkhoff import birkhoff_fast
from rotsus.returntime import build_T
from rotsus.tower import rotate

P2 = make_params(2)
ROOF2 = roof(P2, 5)


def pt(u, k=0, P=P2):
    return circle_reduce(P.elem(mpq(u, 2**30), k))


def test_roof_is_positive():
    T, _ = build_T(P2, 5)
    assert T.min_value() + ROOF2.offset >= 1
    rng = random.Random(0)
    for _ in range(50):
        y = pt(rng.randrange(2**30), rng.randrange(-9, 9))
        assert ROOF2(y) == T(y) + ROOF2.offset


def test_normalize_examples():
    y = pt(12345, 3)
    p = normalize(ROOF2, y, mpq(1, 3))
    assert p == MappingTorusPoint(y, P2.zero + mpq(1, 3))
    q = normalize(ROOF2, y, ROOF2(y))
    assert q == MappingTorusPoint(rotate(P2, y, 1), P2.zero)
    assert normalize(ROOF2, q.y, q.s) == q
    back = normalize(ROOF2, y, mpq(-1, 10**6))
    assert back.y == rotate(P2, y, -1)
    assert back.s == ROOF2(back.y) - mpq(1, 10**6)


@given(st.integers(0, 2**30), st.integers(-10, 10), st.fractions(-10**4, 10**4))
def test_normalize_idempotent(u, k, s):
    p = normalize(ROOF2, pt(u, k), s)
    assert 0 <= p.s < ROOF2(p.y)
    assert normalize(ROOF2, p.y, p.s) == p


def test_flow_to_section():
    y = pt(777, 1)
    p = normalize(ROOF2, y, mpq(1, 5))
    for k in (1, 2, 17, 1000):
        t = birkhoff_fast(ROOF2, y, k) - p.s
        q = flow(ROOF2, p, t)
        assert q.s == 0 and q.y == rotate(P2, y, k)
    assert flow(ROOF2, p, 0) == p


@given(st.integers(0, 2**30), st.fractions(-10**5, 10**5), st.fractions(-10**5, 10**5))
def test_group_law(u, t, v):
    p = normalize(ROOF2, pt(u), 0)
    assert flow(ROOF2, flow(ROOF2, p, t), v) == flow(ROOF2, p, t + v)


@given(st.integers(0, 2**30))
def test_section_return_time(u):
    y = pt(u)
    p = MappingTorusPoint(y, P2.zero)
    t = section_return_time(ROOF2, p)
    assert t == ROOF2(y)
    # just before: still over y; at t: on the section over R y
    assert flow(ROOF2, p, t - mpq(1, 10**9)).y == y
    assert flow(ROOF2, p, t) == MappingTorusPoint(rotate(P2, y, 1), P2.zero)


def test_quotient_dist_basics():
    p = normalize(ROOF2, pt(99, 2), mpq(1, 2))
    q = normalize(ROOF2, pt(5000, -1), mpq(1, 7))
    assert quotient_dist(ROOF2, p, p) == 0
    assert quotient_dist(ROOF2, p, q) == quotient_dist(ROOF2, q, p)
    for t in (mpq(1, 100), mpq(-1, 1000), mpq(3, 10)):
        assert quotient_dist(ROOF2, p, flow(ROOF2, p, t)) <= abs(t)
    with pytest.raises(ValueError):
        quotient_dist(ROOF2, p, q, K=0)


def test_identified_lifts():
    y = pt(31337, 4)
    top = normalize(ROOF2, y, ROOF2(y) - mpq(1, 10**6))
    bottom = MappingTorusPoint(rotate(P2, y, 1), P2.zero)
    assert quotient_dist(ROOF2, top, bottom) == mpq(1, 10**6)
    closer = normalize(ROOF2, y, ROOF2(y) - mpq(1, 10**12))
    assert quotient_dist(ROOF2, closer, bottom) == mpq(1, 10**12)


def test_probe_small():
    P = make_params(1000)
    res = expansiveness_probe(P, eps=mpq(1, 10), samples=12, seed=2, controls=3)
    assert res.all_separated
    assert 0 < res.delta <= mpq(1, 10)
    for row in res.rows:
        assert row["distance"] > row["threshold"]
        assert row["distance"] >= min(row["gap"], mpq(1, 2))
    for c in res.controls:
        assert c["max_distance"] <= abs(c["tau"])
