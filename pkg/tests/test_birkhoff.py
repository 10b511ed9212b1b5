import random

import mpmath
import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

import oracles as O
from rotsus.birkhoff import (
    birkhoff,
    birkhoff_fast,
    birkhoff_naive,
    birkhoff_report,
    make_context,
)
from rotsus.field import circle_reduce, make_params
from rotsus.returntime import build_T, build_Tn, layer, truncated_T
from rotsus.tower import GuardExceeded, interval_In, interval_Jn, qn, rotate

T_PL = {}


def pl(a, N):
    if (a, N) not in T_PL:
        T_PL[a, N] = build_T(make_params(a), N)[0]
    return T_PL[a, N]


def point(P, u, k):
    return circle_reduce(P.elem(mpq(u, 2**30), k))


def test_empty_and_single():
    P = make_params(2)
    f = pl(2, 3)
    x = P.alpha / 5
    assert birkhoff_naive(f, x, 0) == 0
    assert birkhoff_fast(truncated_T(P, 3), x, 0) == 0
    assert birkhoff_naive(f, x, 1) == f(x)
    assert birkhoff_fast(truncated_T(P, 3), x, 1) == f(x)


@given(st.integers(0, 2**30), st.integers(-50, 50), st.integers(0, 300), st.integers(0, 300))
def test_cocycle(u, k, i, j):
    P = make_params(2)
    f, g = pl(2, 4), truncated_T(P, 4)
    x = point(P, u, k)
    y = rotate(P, x, i)
    assert birkhoff_naive(f, x, i + j) == birkhoff_naive(f, x, i) + birkhoff_naive(f, y, j)
    assert birkhoff_fast(g, x, i + j) == birkhoff_fast(g, x, i) + birkhoff_fast(g, y, j)


def test_zero_sum_example():
    P = make_params(2)
    f = build_Tn(P, 2)[1]
    I, _ = interval_In(P, 2)
    assert qn(P, 3) == 12
    for t in (mpq(1, 7), mpq(1, 2), mpq(5, 6)):
        x = circle_reduce(I.left + t * I.length)
        assert birkhoff_naive(f, x, 12) == 0
        assert birkhoff_fast(layer(P, 2), x, 12) == 0


@pytest.mark.parametrize("a", [2, 3, 10])
def test_fast_equals_naive(a):
    P = make_params(a)
    N = {2: 6, 3: 5, 10: 3}[a]
    f, g = pl(a, N), truncated_T(P, N)
    rng = random.Random(a)
    for _ in range(100):
        x = point(P, rng.randrange(2**30), rng.randrange(-100, 100))
        i = rng.randrange(2000)
        assert birkhoff_fast(g, x, i) == birkhoff_naive(f, x, i)


def test_fast_at_breakpoints():
    P = make_params(3)
    f, g = pl(3, 4), truncated_T(P, 4)
    rng = random.Random(1)
    for x in rng.sample(f.xs, 40):
        i = rng.randrange(1, 500)
        assert birkhoff_fast(g, x, i) == birkhoff_naive(f, x, i)


def test_naive_matches_float_oracle():
    a, n = 3, 2
    P = make_params(a)
    f = build_Tn(P, n)[1]
    x = P.alpha / 11
    ref = O.birkhoff(lambda y: O.layer(a, n, y), O.value(x), 25, a)
    assert abs(O.value(birkhoff_naive(f, x, 25)) - ref) < mpmath.mpf(10) ** -40


def test_guard_and_dispatch():
    P = make_params(2)
    with pytest.raises(GuardExceeded):
        birkhoff_naive(pl(2, 3), P.zero, 100, cap=10)
    with pytest.raises(TypeError):
        birkhoff_fast(pl(2, 3), P.zero, 5)
    with pytest.raises(ValueError):
        birkhoff(pl(2, 3), P.zero, 5, evaluator="magic")
    g = truncated_T(P, 3)
    assert birkhoff(g, P.zero, 50, "auto") == birkhoff(pl(2, 3), P.zero, 50, "auto")


def test_report_interval():
    P = make_params(10)
    rep = birkhoff_report(P, 3, P.alpha / 2, 200)
    lo, hi = rep.interval()
    assert lo < rep.value < hi
    assert hi - lo == 2 * rep.tail
    # a deeper truncation lands inside the certified interval
    deeper = birkhoff_fast(truncated_T(P, 7), P.alpha / 2, 200)
    assert lo <= deeper <= hi


def test_contexts():
    assert make_context(make_params(2), 1).i == 2
    assert make_context(make_params(10), 2).i == 510
    P = make_params(3)
    rng = random.Random(0)
    for n in (1, 2, 3):
        J = interval_Jn(P, n)
        for s in ("midpoint", "left", "right", "random"):
            ctx = make_context(P, n, s, rng)
            assert J.contains(ctx.x)
            assert ctx.i == qn(P, n + 1) // 2
    with pytest.raises(ValueError):
        make_context(P, 0)
    with pytest.raises(ValueError):
        make_context(P, 1, "corner")


def test_fast_huge_iterates():
    # the cost does not depend on i; spot-check the cocycle law at i ~ 10^15
    P = make_params(1000)
    g = truncated_T(P, 7)
    x = P.alpha / 3
    i, j = 10**15 + 7, 3 * 10**14 + 11
    y = rotate(P, x, i)
    assert birkhoff_fast(g, x, i + j) == birkhoff_fast(g, x, i) + birkhoff_fast(g, y, j)
