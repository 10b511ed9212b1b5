"""Piecewise-linear return-time functions: chi_I, the layers T_n and their sums.

Two representations are provided.

``PLFunction`` stores a global sorted list of breakpoints on [0, 1) with
exact values and rational slopes.  It is built by enumerating tower floors,
so it is only available while the floor count stays under a guard.

``TowerFunction`` represents ``offset + sum_{n in layers} T_n`` implicitly:
a point is located in the level-n tower by ``tower_coords`` and the layer
value is read off from its floor index.  This works at any level.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from functools import lru_cache

from gmpy2 import mpq

from .field import QuadElem, RotationParams, circle_reduce, make_params
from .tower import (
    ENUM_GUARD,
    CircleInterval,
    GuardExceeded,
    dn,
    interval_In,
    qn,
    table,
    tower_coords,
)

HALF = mpq(1, 2)


def float_error(p, q) -> float:
    """Bound on |float(p + q*alpha) - (p + q*alpha)| for the float evaluation in QuadElem."""
    return 1e-14 * (1.0 + abs(float(p)) + abs(float(q)))


class InvalidInterval(ValueError):
    pass


@dataclass(frozen=True)
class TnSpec:
    """Shape of the layer T_n along its tower column of height q_{n+1}."""

    n: int
    j: int
    j_prime: int
    leading_sign: int
    height: int

    def coeff(self, h: int) -> mpq:
        """Multiplier of chi on floor h of the long column."""
        if h < self.j:
            return mpq(self.leading_sign)
        if h < self.j_prime:
            return mpq(0)
        return -self.leading_sign * HALF

    def cumulative(self, k: int) -> mpq:
        """sum_{h<k} coeff(h); vanishes at k = height."""
        neg = max(0, k - self.j_prime)
        return self.leading_sign * (min(k, self.j) - neg * HALF)


@lru_cache(maxsize=None)
def _tn_spec(a: int, n: int, q_next: int) -> TnSpec:
    j = (q_next - 1) // 3
    return TnSpec(n, j, q_next - 2 * j, 1 if n % 2 == 0 else -1, q_next)


def tn_spec(params: RotationParams, n: int) -> TnSpec:
    return _tn_spec(params.a, n, qn(params, n + 1))


# ---------------------------------------------------------------------------
# explicit piecewise-linear functions


class PLFunction:
    """Continuous piecewise-linear function on the circle.

    ``xs[0] == 0`` and ``xs`` is strictly increasing in [0, 1); ``slopes[k]``
    is the slope on the arc from ``xs[k]`` to ``xs[k+1]`` (the last arc ends
    at 1, identified with 0).
    """

    __slots__ = ("params", "xs", "values", "slopes", "_fx", "_err")

    def __init__(self, params: RotationParams, xs, values, slopes):
        self.params = params
        self.xs = list(xs)
        self.values = list(values)
        self.slopes = [mpq(s) for s in slopes]
        self._fx = [float(x) for x in self.xs]
        self._err = [float_error(x.p, x.q) for x in self.xs]

    def __len__(self):
        return len(self.xs)

    def _arc_parts(self, p, q, fx: float, err: float) -> int:
        """Index k of the arc [xs[k], xs[k+1]) containing p + q*alpha."""
        fxs = self._fx
        k = bisect.bisect_right(fxs, fx) - 1
        n = len(fxs)
        if k >= 0:
            # certified by the float error bounds, else decided exactly
            lo_ok = fx - fxs[k] > err + self._err[k]
            hi_ok = k + 1 == n or fxs[k + 1] - fx > err + self._err[k + 1]
            if lo_ok and hi_ok:
                return k
        x = self.params.elem(p, q)
        xs = self.xs
        if 0 <= k and xs[k] <= x and (k + 1 == n or x < xs[k + 1]):
            return k
        lo, hi = 0, n
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if xs[mid] <= x:
                lo = mid
            else:
                hi = mid
        return lo

    def _arc(self, x: QuadElem) -> int:
        return self._arc_parts(x.p, x.q, float(x), float_error(x.p, x.q))

    def eval_parts(self, p, q, fx: float, err: float):
        """(p, q) coefficients of f at p + q*alpha; fx/err: float value and its error bound."""
        k = self._arc_parts(p, q, fx, err)
        s = self.slopes[k]
        b = self.xs[k]
        v = self.values[k]
        return v.p + s * (p - b.p), v.q + s * (q - b.q)

    def __call__(self, x: QuadElem) -> QuadElem:
        k = self._arc(x)
        return self.values[k] + self.slopes[k] * (x - self.xs[k])

    def max_abs_slope(self) -> mpq:
        return max(abs(s) for s in self.slopes)

    def max_value(self) -> QuadElem:
        return max(self.values)

    def min_value(self) -> QuadElem:
        return min(self.values)

    def sup_norm(self) -> QuadElem:
        return max(abs(v) for v in self.values)

    def shift(self, c) -> PLFunction:
        return PLFunction(self.params, self.xs, [v + c for v in self.values], self.slopes)

    def arc_lengths(self) -> list:
        ends = self.xs[1:] + [self.params.one]
        return [e - s for s, e in zip(self.xs, ends)]

    def is_continuous(self) -> bool:
        n = len(self.xs)
        for k in range(n):
            end = self.xs[k + 1] if k + 1 < n else self.params.one
            nxt = self.values[(k + 1) % n]
            if self.values[k] + self.slopes[k] * (end - self.xs[k]) != nxt:
                return False
        return True

    def __add__(self, other: PLFunction) -> PLFunction:
        return pl_sum([self, other])

    def to_json(self) -> dict:
        return {
            "a": self.params.a,
            "breakpoints": [
                {"x": x.to_json(), "value": v.to_json(),
                 "slope": f"{s.numerator}/{s.denominator}"}
                for x, v, s in zip(self.xs, self.values, self.slopes)
            ],
        }

    @classmethod
    def from_json(cls, params: RotationParams, obj: dict) -> PLFunction:
        rows = obj["breakpoints"]
        return cls(params, [QuadElem.from_json(r["x"]) for r in rows],
                   [QuadElem.from_json(r["value"]) for r in rows],
                   [mpq(r["slope"]) for r in rows])

    def sample(self, resolution: int) -> list[tuple[float, float]]:
        """(x, f(x)) on the grid k/resolution, for plotting."""
        return [(k / resolution, float(self(self.params.elem(mpq(k, resolution)))))
                for k in range(resolution)]


def pl_sum(funcs: list[PLFunction]) -> PLFunction:
    """Exact sum with merged breakpoints."""
    params = funcs[0].params
    pts = sorted({x for f in funcs for x in f.xs}, key=_SortKey)
    values, slopes = [], []
    idx = [0] * len(funcs)
    for x in pts:
        v = params.zero
        s = mpq(0)
        for m, f in enumerate(funcs):
            k = idx[m]
            while k + 1 < len(f.xs) and f.xs[k + 1] <= x:
                k += 1
            idx[m] = k
            v = v + f.values[k] + f.slopes[k] * (x - f.xs[k])
            s += f.slopes[k]
        values.append(v)
        slopes.append(s)
    return PLFunction(params, pts, values, slopes)


class _SortKey:
    __slots__ = ("v", "f")

    def __init__(self, v):
        self.v = v
        self.f = float(v)

    def __eq__(self, other):
        return self.v == other.v

    def __lt__(self, other):
        if abs(self.f - other.f) > 1e-9:
            return self.f < other.f
        return self.v < other.v


def _from_bumps(params: RotationParams, bumps) -> PLFunction:
    """Assemble a PLFunction from disjoint trapezoids (lift start, length, coeff)."""
    knots = []  # (x, value, slope-after, is_end)
    for start, length, c in bumps:
        third = length / 3
        top = c * third
        knots.append((circle_reduce(start), params.zero, c, False))
        knots.append((circle_reduce(start + third), top, mpq(0), False))
        knots.append((circle_reduce(start + 2 * third), top, -c, False))
        knots.append((circle_reduce(start + length), params.zero, mpq(0), True))
    knots.sort(key=lambda k: (_SortKey(k[0]), k[3]))
    merged = []
    for kn in knots:
        if merged and merged[-1][0] == kn[0]:
            if merged[-1][1] != kn[1]:
                raise AssertionError("bumps overlap")
            if merged[-1][3]:
                merged[-1] = kn
            continue
        merged.append(kn)
    if not merged:
        return PLFunction(params, [params.zero], [params.zero], [0])
    if merged[0][0] != 0:
        x, v, s, _ = merged[-1]
        merged.insert(0, (params.zero, v + s * (1 - x), s, False))
    return PLFunction(params, [k[0] for k in merged], [k[1] for k in merged],
                      [k[2] for k in merged])


def chi(I: CircleInterval) -> PLFunction:
    """Trapezoid on I: slope 1, plateau |I|/3, slope -1."""
    length = I.length
    if length.sign() <= 0 or length >= 1:
        raise InvalidInterval("interval length must lie in (0, 1)")
    params = make_params(length.a)
    return _from_bumps(params, [(I.left, length, mpq(1))])


def _check_guard(params: RotationParams, n: int, guard: int) -> None:
    if qn(params, n + 1) > guard:
        raise GuardExceeded(f"q_{n + 1} = {qn(params, n + 1)} exceeds guard {guard}")


def build_Tn(params: RotationParams, n: int, guard: int = ENUM_GUARD) -> tuple[TnSpec, PLFunction]:
    _check_guard(params, n, guard)
    spec = tn_spec(params, n)
    base, _ = interval_In(params, n)
    bumps = []
    left = base.left
    for h in range(spec.height):
        c = spec.coeff(h)
        if c:
            bumps.append((left, base.length, c))
        left = left + params.alpha
        if left >= 1:
            left = left - 1
    return spec, _from_bumps(params, bumps)


def tail_bound(params: RotationParams, N: int) -> QuadElem:
    """Certified bound on sum_{n>N} sup|T_n|.

    sup|T_n| <= |I_n|/3 < 1/(3 q_{n+1}), and the q_n grow at least
    geometrically (ratio 2 per step for a >= 2, per two steps for a = 1).
    """
    factor = 2 if params.a >= 2 else 4
    return params.elem(mpq(factor, 3 * qn(params, N + 2)))


def build_T(params: RotationParams, N: int, guard: int = ENUM_GUARD) -> tuple[PLFunction, QuadElem]:
    """Explicit T_1 + ... + T_N together with the tail bound beyond N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    _check_guard(params, N, guard)
    layers = [build_Tn(params, n, guard)[1] for n in range(1, N + 1)]
    return pl_sum(layers), tail_bound(params, N)


# ---------------------------------------------------------------------------
# implicit layered functions


@dataclass(frozen=True)
class TowerFunction:
    """offset + sum of the layers T_n for n in ``layers``, evaluated via towers."""

    params: RotationParams
    layers: tuple
    offset: QuadElem = field(default=None)

    def __post_init__(self):
        if self.offset is None:
            object.__setattr__(self, "offset", self.params.zero)
        object.__setattr__(self, "layers", tuple(sorted(self.layers)))

    @property
    def depth(self) -> int:
        return max(self.layers) if self.layers else 0

    def layer_value(self, n: int, c) -> QuadElem:
        """T_n at a point with level-n coordinates ``c``."""
        if not c.long:
            return self.params.zero
        spec = tn_spec(self.params, n)
        k = spec.coeff(c.height)
        if not k:
            return self.params.zero
        return k * chi_value(self.params, n, c.z, c.approx)

    def _specs(self):
        specs = self.__dict__.get("_spec_cache")
        if specs is None:
            specs = tuple((n, tn_spec(self.params, n)) for n in self.layers)
            object.__setattr__(self, "_spec_cache", specs)
        return specs

    def __call__(self, y: QuadElem) -> QuadElem:
        if not self.layers:
            return self.offset
        P = self.params
        coords = tower_coords(P, y, self.depth)
        sp, sq = self.offset.p, self.offset.q
        for n, spec in self._specs():
            c = coords[n]
            if not c.long:
                continue
            k = spec.coeff(c.height)
            if k:
                v = chi_value(P, n, c.z, c.approx)
                sp += k * v.p
                sq += k * v.q
        return P.elem(sp, sq)

    def sup_bound(self) -> QuadElem:
        """sum of |I_n|/3 over the layers (>= sup |f - offset|)."""
        t = table(self.params, self.depth + 1)
        total = self.params.zero
        for n in self.layers:
            total = total + abs(t.d[n]) / 3
        return total

    def restrict(self, layers) -> TowerFunction:
        return TowerFunction(self.params, tuple(layers), self.params.zero)

    def with_offset(self, offset) -> TowerFunction:
        return TowerFunction(self.params, self.layers, self.params.zero + offset)

    def to_pl(self, guard: int = ENUM_GUARD) -> PLFunction:
        parts = [build_Tn(self.params, n, guard)[1] for n in self.layers]
        if not parts:
            return PLFunction(self.params, [self.params.zero], [self.offset], [0])
        return pl_sum(parts).shift(self.offset)


@lru_cache(maxsize=None)
def _bump_consts(a: int, n: int, d: QuadElem):
    length = abs(d)
    lf = abs(float(d))
    return d.sign(), length, length / 3, lf / 3, 2 * lf / 3, lf * 2.0 ** -40


def chi_value(params: RotationParams, n: int, z: QuadElem, approx=None) -> QuadElem:
    """chi_{I_n} at the point with lift z between 0 and d_n.

    ``approx`` (a float of z accurate to far better than |d_n| 2^-40) picks
    the branch of the trapezoid; near a corner the comparison is exact.
    """
    sgn, length, third, lo, hi, eps = _bump_consts(params.a, n, dn(params, n))
    t = z if sgn > 0 else -z
    if approx is not None:
        tf = approx if sgn > 0 else -approx
        if tf < lo - eps:
            return t
        if tf > hi + eps:
            return length - t
        if lo + eps < tf < hi - eps:
            return third
    if t <= third:
        return t
    rest = length - t
    return third if third <= rest else rest


def truncated_T(params: RotationParams, N: int) -> TowerFunction:
    return TowerFunction(params, tuple(range(1, N + 1)))


def layer(params: RotationParams, n: int) -> TowerFunction:
    return TowerFunction(params, (n,))


def eval_fn(f, x: QuadElem) -> QuadElem:
    return f(x)


def positivize(f):
    """Return (f + offset, offset) with min(f + offset) >= 1.

    For a PLFunction the offset is 1 - min(f), so the minimum is exactly 1.
    For a TowerFunction the exact minimum is not enumerated; the offset
    1 + sup_bound() is used instead.
    """
    if isinstance(f, PLFunction):
        off = 1 - f.min_value()
        return f.shift(off), off
    off = f.sup_bound() + 1 - f.offset
    return f.with_offset(f.offset + off), off
