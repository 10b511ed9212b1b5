"""Birkhoff sums f^{(i)}(x) = sum_{k<i} f(R^k x), naive and fast.

The fast evaluator works layer by layer.  In the level-n tower a full climb
of a long column contributes ``chi(z) * C(q_{n+1}) = 0`` and short columns
contribute nothing, so only the partial climb at the start of the orbit and
the partial climb at its end survive.  Both are read off from the tower
coordinates of ``x`` and ``R^{i-1} x``; the cost does not depend on ``i``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from gmpy2 import mpq

from .field import QuadElem, RotationParams, _alpha_float, circle_reduce, quad_sign
from .returntime import PLFunction, TowerFunction, chi_value, tail_bound, tn_spec, truncated_T
from .tower import GuardExceeded, interval_Jn, qn, tower_coords

NAIVE_CAP = 10**7


@dataclass(frozen=True)
class BirkhoffReport:
    value: QuadElem
    tail: QuadElem
    i: int
    evaluator: str

    def interval(self) -> tuple[QuadElem, QuadElem]:
        return self.value - self.tail, self.value + self.tail


def orbit(params: RotationParams, x: QuadElem, count: int):
    """Yield R^k x for k = 0, ..., count-1."""
    al = params.alpha
    y = x
    for _ in range(count):
        yield y
        y = y + al
        if float(y) > 0.999999 and y >= 1:
            y = y - 1


def birkhoff_naive(f, x: QuadElem, i: int, cap: int = NAIVE_CAP) -> QuadElem:
    """Direct sum of f along the first i points of the orbit of x."""
    if i < 0:
        raise ValueError("i must be >= 0")
    if i > cap:
        raise GuardExceeded(f"i = {i} exceeds the naive cap {cap}; use birkhoff_fast")
    if isinstance(f, PLFunction):
        return _naive_pl(f, x, i)
    params = f.params
    sp, sq = mpq(0), mpq(0)
    for y in orbit(params, x, i):
        v = f(y)
        sp += v.p
        sq += v.q
    return params.elem(sp, sq)


def _naive_pl(f: PLFunction, x: QuadElem, i: int) -> QuadElem:
    # same sum as the generic loop, on raw coefficients
    params = f.params
    a = params.a
    af = _alpha_float(a)
    yp, yq = x.p, x.q
    sp, sq = mpq(0), mpq(0)
    one = mpq(1)
    for _ in range(i):
        fp, fq = float(yp), float(yq)
        fy = fp + fq * af
        vp, vq = f.eval_parts(yp, yq, fy, 1e-14 * (1.0 + abs(fp) + abs(fq)))
        sp += vp
        sq += vq
        yq += one
        if fy + af > 0.999999 and quad_sign(params.elem(yp - 1, yq)) >= 0:
            yp -= one
    return params.elem(sp, sq)


def birkhoff_fast(f: TowerFunction, x: QuadElem, i: int) -> QuadElem:
    """Exact f^{(i)}(x) for a layered function, in O(depth) field operations."""
    if not isinstance(f, TowerFunction):
        raise TypeError("birkhoff_fast needs a TowerFunction")
    if i < 0:
        raise ValueError("i must be >= 0")
    params = f.params
    total = i * f.offset
    if i == 0 or not f.layers:
        return total
    y = circle_reduce(x + (i - 1) * params.alpha)
    cx = tower_coords(params, x, f.depth)
    cy = tower_coords(params, y, f.depth)
    for n in f.layers:
        spec = tn_spec(params, n)
        bx, by = cx[n], cy[n]
        if by.height >= i - 1:
            # the whole orbit climbs the column of y
            if by.long:
                k = spec.cumulative(by.height + 1) - spec.cumulative(by.height + 1 - i)
                if k:
                    total = total + k * chi_value(params, n, by.z, by.approx)
            continue
        if bx.long:
            k = spec.cumulative(bx.height)
            if k:
                total = total - k * chi_value(params, n, bx.z, bx.approx)
        if by.long:
            k = spec.cumulative(by.height + 1)
            if k:
                total = total + k * chi_value(params, n, by.z, by.approx)
    return total


def birkhoff(f, x: QuadElem, i: int, evaluator: str = "fast", cap: int = NAIVE_CAP) -> QuadElem:
    if evaluator == "naive":
        return birkhoff_naive(f, x, i, cap)
    if evaluator == "fast":
        return birkhoff_fast(f, x, i)
    if evaluator == "auto":
        if isinstance(f, TowerFunction):
            return birkhoff_fast(f, x, i)
        return birkhoff_naive(f, x, i, cap)
    raise ValueError(f"unknown evaluator {evaluator!r}")


def birkhoff_report(params: RotationParams, N: int, x: QuadElem, i: int,
                    evaluator: str = "fast", cap: int = NAIVE_CAP) -> BirkhoffReport:
    """Sum of T_1 + ... + T_N with the certified allowance for the layers beyond N."""
    value = birkhoff(truncated_T(params, N), x, i, evaluator, cap)
    return BirkhoffReport(value, i * tail_bound(params, N), i, evaluator)


@dataclass(frozen=True)
class AssumptionContext:
    """A point x of J_n and the iterate count i = floor(q_{n+1}/2)."""

    params: RotationParams
    n: int
    x: QuadElem
    i: int
    sample: str = "midpoint"

    @property
    def a(self) -> int:
        return self.params.a


def make_context(params: RotationParams, n: int, sample: str = "midpoint",
                 rng: random.Random | None = None) -> AssumptionContext:
    """sample: 'midpoint', 'left', 'right' (endpoints of J_n) or 'random'."""
    if n < 1:
        raise ValueError("contexts need n >= 1")
    J = interval_Jn(params, n)
    if J.length.sign() <= 0:
        raise AssertionError("J_n is empty")
    if sample == "midpoint":
        x = J.midpoint()
    elif sample == "left":
        x = J.left
    elif sample == "right":
        x = J.right
    elif sample == "random":
        rng = rng or random.Random(0)
        u = mpq(rng.randrange(1, 2**20), 2**20)
        x = circle_reduce(J.left + u * J.length)
    else:
        raise ValueError(f"unknown sample {sample!r}")
    if not J.contains(x):
        raise AssertionError("sample point escaped J_n")
    return AssumptionContext(params, n, x, qn(params, n + 1) // 2, sample)
