from fractions import Fraction

import mpmath
import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

import oracles as O
from rotsus.field import (
    InvalidParameter,
    ParameterMismatch,
    QuadElem,
    circle_dist,
    circle_norm,
    circle_reduce,
    make_params,
    quad_arith,
    quad_floor,
    quad_sign,
)

rats = st.fractions(max_denominator=10**6).filter(lambda f: abs(f) < 10**6)
a_values = st.sampled_from([1, 2, 3, 10, 1000])


@st.composite
def elems(draw, a=None):
    a = draw(a_values) if a is None else a
    return QuadElem(draw(rats), draw(rats), a)


def test_alpha_closed_forms():
    assert abs(O.value(make_params(2).alpha) - (mpmath.sqrt(2) - 1)) < mpmath.mpf(10) ** -50
    golden = (mpmath.sqrt(5) - 1) / 2
    assert abs(O.value(make_params(1).alpha) - golden) < mpmath.mpf(10) ** -50
    assert abs(float(make_params(2).alpha) - 0.41421356) < 1e-8
    assert abs(float(make_params(1).alpha) - 0.61803399) < 1e-8


@pytest.mark.parametrize("a", [1, 2, 3, 7, 10, 1000, 10**10])
def test_params_invariants(a):
    P = make_params(a)
    al = P.alpha
    assert al * al + a * al - 1 == 0
    assert al * al == 1 - a * al
    assert 0 < al < 1
    assert P.c > a
    assert al * P.c == 1
    assert P.A + P.B == 1
    assert P.A > 0 and P.B > 0
    assert P.D == a * a + 4


@pytest.mark.parametrize("a", [0, -3, 2.5, "2"])
def test_invalid_parameter(a):
    with pytest.raises(InvalidParameter):
        make_params(a)


def test_arith_examples():
    P = make_params(5)
    al = P.alpha
    assert (1 + al) + (2 - al) == 3
    assert quad_arith(al, al, "mul") == 1 - 5 * al
    assert quad_arith(al, P.one, "mul") == al
    assert quad_arith(al, 3, "scalar-mul") == 3 * al
    assert quad_arith(P.one, al, "sub") == 1 - al


def test_parameter_mismatch():
    with pytest.raises(ParameterMismatch):
        make_params(2).alpha + make_params(3).alpha
    with pytest.raises(ParameterMismatch):
        quad_arith(make_params(2).alpha, make_params(3).alpha, "mul")


def test_sign_examples():
    for a in (1, 2, 10):
        assert quad_sign(make_params(a).alpha) == 1
    P = make_params(2)
    assert quad_sign(2 * P.alpha - 1) == -1
    assert quad_sign(P.zero) == 0


def test_floor_examples():
    P = make_params(2)
    assert quad_floor(P.elem(3)) == 3
    assert quad_floor(5 * P.alpha) == 2
    assert quad_sign(5 * P.alpha - 2) == 1 and quad_sign(5 * P.alpha - 3) == -1
    for a in (1, 2, 3, 100):
        assert quad_floor(-make_params(a).alpha) == -1


@given(elems())
def test_sign_matches_high_precision(x):
    v = O.value(x)
    expected = (v > 0) - (v < 0)
    assert quad_sign(x) == expected


@given(elems())
def test_floor_matches_high_precision(x):
    assert quad_floor(x) == int(mpmath.floor(O.value(x)))


@given(a_values, st.integers(-10**12, 10**12), st.integers(1, 10**12), st.integers(-10**12, 10**12))
def test_floor_near_integers(a, p, den, q):
    # large coefficients nearly cancelling
    x = QuadElem(Fraction(p, den), q, a)
    m = quad_floor(x)
    assert quad_sign(x - m) >= 0 and quad_sign(x - (m + 1)) < 0


@given(st.data())
def test_field_axioms(data):
    a = data.draw(a_values)
    x, y, z = (data.draw(elems(a)) for _ in range(3))
    assert x + y == y + x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * 1 == x
    assert x - x == 0
    if x:
        assert x * x.inverse() == 1
        assert (y / x) * x == y


@given(st.data())
def test_canonical_form(data):
    a = data.draw(a_values)
    x = data.draw(elems(a))
    k = data.draw(st.integers(1, 50))
    y = (x * k) / k
    assert y == x and hash(y) == hash(x)
    assert y.p.denominator == x.p.denominator


@given(st.data())
def test_ordering_consistent(data):
    a = data.draw(a_values)
    x, y = data.draw(elems(a)), data.draw(elems(a))
    assert (x < y) == (O.value(x) < O.value(y))
    assert (x == y) == (x - y == 0)


@given(elems())
def test_circle_reduce(x):
    y = circle_reduce(x)
    assert 0 <= y < 1
    assert circle_reduce(y) == y
    assert (x - y).is_rational() and (x - y).p.denominator == 1


@given(st.data())
def test_circle_metric(data):
    a = data.draw(a_values)
    x = circle_reduce(data.draw(elems(a)))
    y = circle_reduce(data.draw(elems(a)))
    z = circle_reduce(data.draw(elems(a)))
    assert circle_dist(x, y) == circle_dist(y, x)
    assert 0 <= circle_dist(x, y) <= mpq(1, 2)
    assert circle_dist(x, z) <= circle_dist(x, y) + circle_dist(y, z)
    assert circle_dist(x, x) == 0
    assert circle_norm(x) == circle_dist(x, x.__class__(0, 0, a))
    assert abs(O.value(circle_dist(x, y)) - O.circle_norm(O.value(x) - O.value(y))) < 1e-40


def test_json_roundtrip_and_decimal():
    P = make_params(7)
    x = P.elem(mpq(-3, 11), mpq(22, 7))
    assert QuadElem.from_json(x.to_json()) == x
    assert x.decimal(30)[:12] == mpmath.nstr(O.value(x), 30)[:12]


def test_float_survives_cancellation():
    P = make_params(1000)
    big = 10**30
    x = big * P.alpha - quad_floor(big * P.alpha)
    assert abs(float(x) - float(mpmath.frac(O.value(big * P.alpha)))) < 1e-12
