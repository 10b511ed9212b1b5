"""Convergents, closest returns and Rokhlin towers of the rotation by alpha.

Notation: ``d_n = q_n*alpha - p_n`` is the signed displacement of the
closest return q_n.  ``I_n`` is the arc between 0 and d_n (taken on the
side of the real number d_n), so ``|I_n| = |d_n|`` and
``|d_n| = a|d_{n+1}| + |d_{n+2}|``.  The level-n tower has ``q_{n+1}``
floors over ``I_n`` and ``q_n`` floors over ``I_{n+1}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import gmpy2

from .field import (
    QuadElem,
    RotationParams,
    circle_norm,
    circle_reduce,
    quad_floor,
)

ENUM_GUARD = 10**6


class GuardExceeded(RuntimeError):
    """An enumeration or naive sum larger than its configured cap."""


@dataclass(frozen=True)
class Convergent:
    n: int
    p: int
    q: int


@dataclass(frozen=True)
class CircleInterval:
    """Positively oriented arc from ``left`` to ``right`` of the given length."""

    left: QuadElem
    right: QuadElem
    length: QuadElem

    def contains(self, x: QuadElem) -> bool:
        return circle_reduce(x - self.left) <= self.length

    def midpoint(self) -> QuadElem:
        return circle_reduce(self.left + self.length / 2)

    def to_json(self) -> dict:
        return {"left": self.left.to_json(), "right": self.right.to_json(),
                "length": self.length.to_json()}


@dataclass(frozen=True)
class Floor:
    interval: CircleInterval
    base: str  # "long" (over I_n) or "short" (over I_{n+1})
    height: int


@dataclass(frozen=True)
class TowerPartition:
    level: int
    base_long: CircleInterval
    base_short: CircleInterval
    long_floors: list
    short_floors: list

    @property
    def floors(self) -> list:
        return self.long_floors + self.short_floors

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "a": self.base_long.length.a,
            "floors": [
                {"base": f.base, "height": f.height, **f.interval.to_json()}
                for f in self.floors
            ],
        }


@dataclass(frozen=True)
class OstrowskiRep:
    i: int
    digits: list

    def value(self, params: RotationParams) -> int:
        return sum(b * qk for b, qk in zip(self.digits, q_list(params, len(self.digits))))


class _Table:
    """Lazily extended tables of p_n, q_n, d_n and 1/d_n for one ``a``."""

    def __init__(self, a: int):
        self.a = a
        al = QuadElem(0, 1, a)
        self.p = [0, 1]
        self.q = [1, a]
        self.d = [al, a * al - 1]
        self.dinv = [None, None]
        self.mp = {}

    def extend(self, n: int) -> None:
        a = self.a
        while len(self.q) <= n:
            self.p.append(a * self.p[-1] + self.p[-2])
            self.q.append(a * self.q[-1] + self.q[-2])
            self.d.append(a * self.d[-1] + self.d[-2])
            self.dinv.append(None)

    def inv(self, n: int) -> QuadElem:
        self.extend(n)
        if self.dinv[n] is None:
            self.dinv[n] = self.d[n].inverse()
        return self.dinv[n]


@lru_cache(maxsize=None)
def _table(a: int) -> _Table:
    return _Table(a)


def table(params: RotationParams, n: int) -> _Table:
    t = _table(params.a)
    t.extend(n)
    return t


def q_list(params: RotationParams, count: int) -> list:
    return table(params, count).q[:count]


def qn(params: RotationParams, n: int) -> int:
    return table(params, n).q[n]


def pn(params: RotationParams, n: int) -> int:
    return table(params, n).p[n]


def dn(params: RotationParams, n: int) -> QuadElem:
    """Signed displacement q_n*alpha - p_n."""
    return table(params, n).d[n]


def side(params: RotationParams, n: int) -> int:
    """+1 when q_n*alpha lies just right of 0, -1 when just left."""
    return dn(params, n).sign()


def convergents(params: RotationParams, N: int) -> list[Convergent]:
    if N < 1:
        raise ValueError("N must be >= 1")
    t = table(params, N)
    return [Convergent(n, t.p[n], t.q[n]) for n in range(N + 1)]


def closest_return_verify(params: RotationParams, n: int, guard: int = ENUM_GUARD) -> bool:
    """Brute-force check that |q_n alpha| < |i alpha| for 1 <= i < q_n."""
    q = qn(params, n)
    if q > guard:
        raise GuardExceeded(f"q_{n} = {q} exceeds enumeration guard {guard}")
    target = circle_norm(q * params.alpha)
    y = params.zero
    for _ in range(1, q):
        y = y + params.alpha
        if y >= 1:
            y = y - 1
        if not circle_norm(y) > target:
            return False
    return True


def _arc(params: RotationParams, lo: QuadElem, hi: QuadElem) -> CircleInterval:
    # lo <= hi as real numbers, hi - lo < 1
    return CircleInterval(circle_reduce(lo), circle_reduce(hi), hi - lo)


def interval_In(params: RotationParams, n: int) -> tuple[CircleInterval, int]:
    """I_n and its side (+1: I_n = [0, d_n], -1: I_n = [d_n, 0])."""
    if n < 0:
        raise ValueError("n must be >= 0")
    d = dn(params, n)
    s = d.sign()
    if s > 0:
        return _arc(params, params.zero, d), s
    return _arc(params, d, params.zero), s


def interval_Jn(params: RotationParams, n: int) -> CircleInterval:
    """Sub-arc of I_n between d_n/2 and -d_{n+1}/2."""
    if n < 1:
        raise ValueError("J_n is defined for n >= 1")
    d, e = dn(params, n), dn(params, n + 1)
    lo, hi = d / 2, -e / 2
    if hi < lo:
        lo, hi = hi, lo
    return _arc(params, lo, hi)


def rotate(params: RotationParams, x: QuadElem, k: int) -> QuadElem:
    return circle_reduce(x + k * params.alpha)


def tower_partition(params: RotationParams, n: int, guard: int = ENUM_GUARD) -> TowerPartition:
    """Level-n Rokhlin tower, verified to tile the circle exactly."""
    t = table(params, n + 2)
    qa, qb = t.q[n + 1], t.q[n]
    if qa + qb > guard:
        raise GuardExceeded(f"{qa + qb} floors exceed guard {guard}")
    base_long, _ = interval_In(params, n)
    base_short, _ = interval_In(params, n + 1)
    if qb * base_short.length + qa * base_long.length != 1:
        raise AssertionError("partition identity failed")

    def column(base: CircleInterval, count: int, kind: str) -> list:
        out = []
        left = base.left
        for h in range(count):
            out.append(Floor(CircleInterval(left, circle_reduce(left + base.length),
                                            base.length), kind, h))
            left = left + params.alpha
            if left >= 1:
                left = left - 1
        return out

    longs = column(base_long, qa, "long")
    shorts = column(base_short, qb, "short")
    _check_tiling(longs + shorts)
    return TowerPartition(n, base_long, base_short, longs, shorts)


def _check_tiling(floors: list) -> None:
    """Sorted floors must chain end-to-start around the circle with no gaps."""
    order = sorted(floors, key=lambda f: float(f.interval.left))

    def chained(seq):
        if seq[0].interval.left != 0:
            return False
        for f, g in zip(seq, seq[1:]):
            if f.interval.left + f.interval.length != g.interval.left:
                return False
        last = seq[-1].interval
        return last.left + last.length == 1

    if not chained(order):
        order = sorted(floors, key=lambda f: _Key(f.interval.left))
        if not chained(order):
            raise AssertionError("tower floors do not tile the circle")


class _Key:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return self.v < other.v


def ostrowski(params: RotationParams, i: int) -> OstrowskiRep:
    """Greedy numeration i = sum_k b_k q_k."""
    if i < 0:
        raise ValueError("i must be >= 0")
    K = 0
    while qn(params, K + 1) <= i:
        K += 1
    digits = [0] * (K + 1)
    rem = i
    for k in range(K, -1, -1):
        b, rem = divmod(rem, qn(params, k))
        digits[k] = b
    return OstrowskiRep(i, digits)


class Coord(NamedTuple):
    """Position of a point in the level-n tower.

    ``long`` tells whether the column is over I_n (else over I_{n+1}),
    ``height`` is the floor index and ``z`` the base point as a real number
    between 0 and d_n (or d_{n+1}), so that the point equals z + height*alpha
    modulo 1.  ``approx`` is a high-precision float of z (None if unknown).
    """

    long: bool
    height: int
    z: QuadElem
    approx: object = None


_MARGIN = gmpy2.mpfr(2) ** -48


def _mp_consts(t: _Table, prec: int, count: int):
    # alpha, c and d_0..d_{count-1} rounded to ``prec`` bits, cached per precision
    key = (prec, count)
    hit = t.mp.get(key)
    if hit is None:
        D = t.a * t.a + 4
        al = (gmpy2.sqrt(gmpy2.mpfr(D)) - t.a) / 2
        d = [t.q[k] * al - t.p[k] for k in range(count)]
        hit = t.mp[key] = (al, al + t.a, d)
    return hit


def tower_coords(params: RotationParams, y: QuadElem, level: int) -> list[Coord]:
    """Coordinates of the circle point y in the towers of levels 0..level.

    Each level is obtained from the previous one by cutting I_n into the a
    translates R^{q_n + k q_{n+1}}(I_{n+1}) and the remainder I_{n+2}.  The
    descent runs in binary floating point with enough bits for the deepest
    level; a floor that lands within 2^-48 of an integer is recomputed
    exactly.  Base points are exact: z = y - height*alpha + P with an integer
    P tracked alongside the height.
    """
    t = table(params, level + 2)
    a = params.a
    ybits = max(int(r.numerator).bit_length() + int(r.denominator).bit_length()
                for r in (y.p, y.q))
    prec = 64 * (-(-(128 + (level + 3) * a.bit_length() + ybits) // 64))
    with gmpy2.context(gmpy2.get_context(), precision=prec):
        al, cc, dm = _mp_consts(t, prec, level + 2)
        ym = gmpy2.mpfr(y.p) + gmpy2.mpfr(y.q) * al
        r = ym * cc
        h = int(gmpy2.floor(r))
        if abs(r - gmpy2.rint(r)) < _MARGIN:
            h = quad_floor(y * params.c)
        if h < a:
            cur_long, P, zm = True, 0, ym - h * al
        else:
            h, cur_long, P, zm = 0, False, -1, ym - 1
        out = [Coord(cur_long, h, y._new(y.p + P, y.q - h), zm)]
        for n in range(level):
            if cur_long:
                wm = zm - dm[n]
                r = wm / dm[n + 1]
                k = int(gmpy2.floor(r))
                if abs(r - gmpy2.rint(r)) < _MARGIN:
                    w = y._new(y.p + P + t.p[n], y.q - h - t.q[n])
                    k = quad_floor(w * t.inv(n + 1))
                if k < a:
                    h += t.q[n] + k * t.q[n + 1]
                    P += t.p[n] + k * t.p[n + 1]
                    zm = wm - k * dm[n + 1]
                else:
                    cur_long = False
            else:
                cur_long = True
            out.append(Coord(cur_long, h, y._new(y.p + P, y.q - h), zm))
    return out
