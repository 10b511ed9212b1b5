"""Exact arithmetic in the quadratic field Q(alpha).

alpha = (-a + sqrt(a^2 + 4)) / 2 is the rotation number with continued
fraction [0; a, a, a, ...].  Every element is stored as ``p + q*alpha`` with
``p`` and ``q`` reduced rationals (``gmpy2.mpq``), and products are reduced
with ``alpha**2 = 1 - a*alpha``.  Sign, order and floor are decided exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpq, mpz

__all__ = [
    "InvalidParameter",
    "ParameterMismatch",
    "QuadElem",
    "RotationParams",
    "make_params",
    "quad_arith",
    "quad_sign",
    "quad_floor",
    "circle_reduce",
    "circle_dist",
    "circle_norm",
    "is_circle_point",
]


class InvalidParameter(ValueError):
    pass


class ParameterMismatch(ValueError):
    """Operands built over different partial quotients ``a``."""


_RATIONAL_TYPES = (int, Fraction, type(mpq(0)), type(mpz(0)))


@lru_cache(maxsize=None)
def _alpha_float(a: int) -> float:
    # stable form of (-a + sqrt(a^2+4))/2
    return 2.0 / (a + math.sqrt(a * a + 4.0))


def _as_mpq(v) -> mpq:
    if isinstance(v, Fraction):
        return mpq(v.numerator, v.denominator)
    return mpq(v)


class QuadElem:
    """The number ``p + q*alpha`` for the rotation with partial quotient ``a``.

    Instances are immutable.  Plain rationals (``int``, ``Fraction``,
    ``mpq``) mix freely with a ``QuadElem`` in arithmetic and comparisons.
    """

    __slots__ = ("p", "q", "a")

    def __init__(self, p=0, q=0, a: int = 1):
        self.p = _as_mpq(p)
        self.q = _as_mpq(q)
        self.a = a

    # -- construction helpers -------------------------------------------
    def _coerce(self, other) -> QuadElem | None:
        if isinstance(other, QuadElem):
            if other.a != self.a:
                raise ParameterMismatch(f"a={self.a} vs a={other.a}")
            return other
        if isinstance(other, _RATIONAL_TYPES):
            return QuadElem(other, 0, self.a)
        return None

    def _new(self, p, q) -> QuadElem:
        r = QuadElem.__new__(QuadElem)
        r.p = p
        r.q = q
        r.a = self.a
        return r

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        if isinstance(other, QuadElem):
            if other.a != self.a:
                raise ParameterMismatch(f"a={self.a} vs a={other.a}")
            return self._new(self.p + other.p, self.q + other.q)
        if isinstance(other, _RATIONAL_TYPES):
            return self._new(self.p + _as_mpq(other), self.q)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, QuadElem):
            if other.a != self.a:
                raise ParameterMismatch(f"a={self.a} vs a={other.a}")
            return self._new(self.p - other.p, self.q - other.q)
        if isinstance(other, _RATIONAL_TYPES):
            return self._new(self.p - _as_mpq(other), self.q)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            return self._new(_as_mpq(other) - self.p, -self.q)
        return NotImplemented

    def __neg__(self):
        return self._new(-self.p, -self.q)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, QuadElem):
            if other.a != self.a:
                raise ParameterMismatch(f"a={self.a} vs a={other.a}")
            # (p + q al)(r + s al) = pr + (ps + qr) al + qs (1 - a al)
            p, q, r, s = self.p, self.q, other.p, other.q
            qs = q * s
            return self._new(p * r + qs, p * s + q * r - self.a * qs)
        if isinstance(other, _RATIONAL_TYPES):
            k = _as_mpq(other)
            return self._new(self.p * k, self.q * k)
        return NotImplemented

    __rmul__ = __mul__

    def conjugate(self) -> QuadElem:
        """Image under alpha -> alpha' = -a - alpha."""
        return self._new(self.p - self.a * self.q, -self.q)

    def norm(self) -> mpq:
        p, q = self.p, self.q
        return p * p - self.a * p * q - q * q

    def inverse(self) -> QuadElem:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(alpha)")
        c = self.conjugate()
        return self._new(c.p / n, c.q / n)

    def __truediv__(self, other):
        if isinstance(other, QuadElem):
            return self * self._coerce(other).inverse()
        if isinstance(other, _RATIONAL_TYPES):
            k = _as_mpq(other)
            return self._new(self.p / k, self.q / k)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            return self.inverse() * other
        return NotImplemented

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- order ----------------------------------------------------------
    def sign(self) -> int:
        return quad_sign(self)

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return quad_sign(self._new(self.p - o.p, self.q - o.q))

    def __eq__(self, other):
        if isinstance(other, QuadElem):
            return self.a == other.a and self.p == other.p and self.q == other.q
        if isinstance(other, _RATIONAL_TYPES):
            return self.q == 0 and self.p == _as_mpq(other)
        return NotImplemented

    def __hash__(self):
        if self.q == 0:
            return hash(Fraction(int(self.p.numerator), int(self.p.denominator)))
        return hash((self.p, self.q, self.a))

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    def __bool__(self):
        return bool(self.p) or bool(self.q)

    # -- conversions ----------------------------------------------------
    def __float__(self) -> float:
        fp = float(self.p)
        fq = float(self.q) * _alpha_float(self.a)
        v = fp + fq
        if abs(v) > 1e-6 * (abs(fp) + abs(fq)):
            return v
        # heavy cancellation: redo in extended precision
        return float(self.decimal(20))

    def is_rational(self) -> bool:
        return self.q == 0

    def to_fraction(self) -> Fraction:
        if self.q != 0:
            raise ValueError("element is irrational")
        return Fraction(int(self.p.numerator), int(self.p.denominator))

    def decimal(self, digits: int = 20) -> str:
        """Decimal approximation with ``digits`` significant digits (display only)."""
        bits = int(digits * 3.33) + 64 + _magnitude_bits(self)
        with gmpy2.context(gmpy2.get_context(), precision=bits):
            D = self.a * self.a + 4
            al = (gmpy2.sqrt(gmpy2.mpfr(D)) - self.a) / 2
            val = gmpy2.mpfr(self.p) + gmpy2.mpfr(self.q) * al
            return f"{val:.{digits}g}"

    def floor(self) -> int:
        return quad_floor(self)

    def __repr__(self):
        return f"QuadElem({self.p}, {self.q}, a={self.a})"

    def __str__(self):
        if self.q == 0:
            return str(self.p)
        q = f"{abs(self.q)}*alpha" if abs(self.q) != 1 else "alpha"
        if self.p == 0:
            return q if self.q > 0 else f"-{q}"
        return f"{self.p} {'+' if self.q > 0 else '-'} {q}"

    def to_json(self) -> dict:
        return {"p": _ratstr(self.p), "q": _ratstr(self.q), "a": self.a}

    @classmethod
    def from_json(cls, obj: dict) -> QuadElem:
        return cls(mpq(obj["p"]), mpq(obj["q"]), int(obj["a"]))


def _ratstr(x: mpq) -> str:
    return f"{x.numerator}/{x.denominator}"


def _magnitude_bits(x: QuadElem) -> int:
    # enough headroom for cancellation between p and q*alpha
    bits = 0
    for r in (x.p, x.q):
        if r:
            bits = max(bits, int(gmpy2.mpz(abs(r.numerator)).bit_length()),
                       int(gmpy2.mpz(r.denominator).bit_length()))
    return 2 * bits


def quad_sign(x: QuadElem) -> int:
    """Exact sign of ``p + q*alpha``.

    With ``u = 2p - a q`` we have ``2(p + q alpha) = u + q sqrt(D)``; the sign
    is decided by the signs of ``u``, ``q`` and the comparison ``u^2`` vs
    ``q^2 D`` (D = a^2 + 4 is never a square).
    """
    p, q = x.p, x.q
    if q == 0:
        return (p > 0) - (p < 0)
    u = 2 * p - x.a * q
    if u == 0:
        return 1 if q > 0 else -1
    if (u > 0) == (q > 0):
        return 1 if u > 0 else -1
    d = u * u - q * q * (x.a * x.a + 4)
    # u and q have opposite signs: the larger magnitude wins
    if d > 0:
        return 1 if u > 0 else -1
    return 1 if q > 0 else -1


def _exact_floor(x: QuadElem) -> int:
    # 2x = (U + V sqrt(D)) / den with integers U, V and den > 0
    u = 2 * x.p - x.a * x.q
    den = gmpy2.lcm(u.denominator, x.q.denominator)
    U = mpz(u * den)
    V = mpz(x.q * den)
    D = x.a * x.a + 4
    if V == 0:
        f = mpz(0)
    elif V > 0:
        f = gmpy2.isqrt(V * V * D)
    else:
        f = -gmpy2.isqrt(V * V * D) - 1
    # V sqrt(D) = f + theta with theta in (0, 1); theta never crosses a multiple
    return int((U + f) // (2 * den))


def quad_floor(x: QuadElem) -> int:
    """The integer m with m <= x < m + 1.

    A floating estimate proposes m; two exact sign tests certify it.  When
    the estimate is unusable the floor is computed from an integer square
    root instead.
    """
    if x.q == 0:
        return int(x.p.numerator // x.p.denominator)
    f = float(x.p) + float(x.q) * _alpha_float(x.a)
    if math.isfinite(f) and abs(f) < 2.0 ** 50:
        m = math.floor(f)
        lo = quad_sign(x._new(x.p - m, x.q))
        if lo >= 0:
            if quad_sign(x._new(x.p - (m + 1), x.q)) < 0:
                return m
        elif quad_sign(x._new(x.p - (m - 1), x.q)) >= 0:
            return m - 1
    return _exact_floor(x)


@dataclass(frozen=True)
class RotationParams:
    """Parameters of the rotation by alpha = [0; a, a, a, ...].

    ``c = a + alpha`` is the positive root of x^2 = a x + 1 and
    ``q_n = A c^n + B (-1/c)^n``.
    """

    a: int
    D: int
    alpha: QuadElem
    c: QuadElem
    A: QuadElem
    B: QuadElem

    def elem(self, p=0, q=0) -> QuadElem:
        return QuadElem(p, q, self.a)

    @property
    def zero(self) -> QuadElem:
        return QuadElem(0, 0, self.a)

    @property
    def one(self) -> QuadElem:
        return QuadElem(1, 0, self.a)


@lru_cache(maxsize=64)
def make_params(a: int) -> RotationParams:
    if isinstance(a, bool) or not isinstance(a, int) or a < 1:
        raise InvalidParameter(f"partial quotient must be a positive integer, got {a!r}")
    alpha = QuadElem(0, 1, a)
    c = alpha + a
    sqrtD = 2 * alpha + a
    A = c / sqrtD
    B = alpha / sqrtD
    return RotationParams(a=a, D=a * a + 4, alpha=alpha, c=c, A=A, B=B)


def quad_arith(x: QuadElem, y, op: str) -> QuadElem:
    """Dispatch ``op`` in {'add', 'sub', 'mul', 'scalar-mul'}."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        if not isinstance(y, QuadElem):
            raise TypeError("mul expects two QuadElem operands")
        return x * y
    if op == "scalar-mul":
        if not isinstance(y, _RATIONAL_TYPES):
            raise TypeError("scalar-mul expects a rational scalar")
        return x * y
    raise ValueError(f"unknown op {op!r}")


def is_circle_point(x: QuadElem) -> bool:
    return x.sign() >= 0 and (x - 1).sign() < 0


def circle_reduce(x: QuadElem) -> QuadElem:
    """Representative of x in [0, 1)."""
    m = quad_floor(x)
    return x if m == 0 else x - m


def circle_dist(x: QuadElem, y: QuadElem) -> QuadElem:
    d = circle_reduce(x - y)
    e = 1 - d
    return d if d <= e else e


def circle_norm(x: QuadElem) -> QuadElem:
    d = circle_reduce(x)
    e = 1 - d
    return d if d <= e else e
