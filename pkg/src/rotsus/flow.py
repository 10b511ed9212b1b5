"""Suspension flow of the rotation under a positive return time.

Points of the mapping torus are pairs ``(y, s)`` with ``0 <= s < T'(y)``,
the quotient of circle x R by F(y, s) = (R y, s - T'(y)).  The flow adds
``t`` to ``s`` and renormalizes.  Long excursions are renormalized with the
fast Birkhoff sums of ``T'``, so flowing for a time of size 10^9 costs a few
dozen tower descents.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from gmpy2 import mpq

from .birkhoff import birkhoff_fast
from .field import QuadElem, RotationParams, circle_dist, circle_reduce
from .returntime import TowerFunction, positivize, truncated_T
from .tower import dn
from .verify import lemma1_scan


@dataclass(frozen=True)
class MappingTorusPoint:
    y: QuadElem
    s: QuadElem

    def to_json(self) -> dict:
        return {"y": self.y.to_json(), "s": self.s.to_json()}


def roof(params: RotationParams, N: int) -> TowerFunction:
    """T' = T_1 + ... + T_N shifted so that T' >= 1."""
    return positivize(truncated_T(params, N))[0]


def _sum_back(Tp: TowerFunction, y: QuadElem, k: int) -> QuadElem:
    # T'(R^{-k} y) + ... + T'(R^{-1} y)
    return birkhoff_fast(Tp, circle_reduce(y - k * Tp.params.alpha), k)


def _largest(pred, start: int = 1) -> int:
    """Largest k >= 0 with pred(k), for pred monotone decreasing and pred(0) true."""
    hi = start
    while pred(hi):
        hi *= 2
    lo = hi // 2 if hi > start else 0
    # pred(lo) holds (or lo == 0), pred(hi) fails
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def normalize(Tp: TowerFunction, y: QuadElem, s) -> MappingTorusPoint:
    """The representative of (y, s) with 0 <= s < T'(y)."""
    P = Tp.params
    y = circle_reduce(P.zero + y)
    s = P.zero + s
    if s.sign() >= 0:
        if s < Tp(y):
            return MappingTorusPoint(y, s)
        # largest k with T'^{(k)}(y) <= s
        k = _largest(lambda m: birkhoff_fast(Tp, y, m) <= s)
        return MappingTorusPoint(circle_reduce(y + k * P.alpha), s - birkhoff_fast(Tp, y, k))
    # smallest k with s + T'(R^{-k} y) + ... + T'(R^{-1} y) >= 0
    k = _largest(lambda m: s + _sum_back(Tp, y, m) < 0) + 1
    return MappingTorusPoint(circle_reduce(y - k * P.alpha), s + _sum_back(Tp, y, k))


def flow(Tp: TowerFunction, p: MappingTorusPoint, t) -> MappingTorusPoint:
    return normalize(Tp, p.y, p.s + t)


def section_return_time(Tp: TowerFunction, p: MappingTorusPoint) -> QuadElem:
    """Time until the orbit of p next meets the section s = 0."""
    return Tp(p.y) - p.s


def deck(Tp: TowerFunction, p: MappingTorusPoint, k: int) -> tuple[QuadElem, QuadElem]:
    """The lift F^k(y, s) = (R^k y, s - T'^{(k)}(y)), k of either sign."""
    P = Tp.params
    if k >= 0:
        return circle_reduce(p.y + k * P.alpha), p.s - birkhoff_fast(Tp, p.y, k)
    return circle_reduce(p.y + k * P.alpha), p.s + _sum_back(Tp, p.y, -k)


def quotient_dist(Tp: TowerFunction, p: MappingTorusPoint, q: MappingTorusPoint,
                  K: int = 3) -> QuadElem:
    """min over |k| <= K of max(circle distance, |s difference|) between p and F^k q."""
    if K < 1:
        raise ValueError("K must be >= 1")
    best = None
    for k in range(-K, K + 1):
        y, s = deck(Tp, q, k)
        d = circle_dist(p.y, y)
        ds = abs(p.s - s)
        m = d if d >= ds else ds
        if best is None or m < best:
            best = m
    return best


@dataclass
class ProbeResult:
    a: int
    N: int
    eps: mpq
    delta: QuadElem
    samples: int
    seed: int
    worst: dict
    rows: list = field(default_factory=list)
    controls: list = field(default_factory=list)
    separated: int = 0

    @property
    def all_separated(self) -> bool:
        return self.separated == self.samples


def _rand_unit(rng: random.Random) -> mpq:
    return mpq(rng.randrange(1, 2**30), 2**30)


def sample_pairs(params: RotationParams, count: int, seed: int, levels=(1, 2)) -> list:
    """(x, r, s): points (x, s) and (x + r, s) with r spread over the covered windows."""
    rng = random.Random(seed)
    out = []
    for j in range(count):
        n = levels[j % len(levels)]
        lo, hi = abs(dn(params, n + 1)) / 2, abs(dn(params, n)) / 2
        r = lo + _rand_unit(rng) * (hi - lo)
        x = circle_reduce(params.elem(_rand_unit(rng), rng.randrange(-1000, 1000)))
        s = _rand_unit(rng) if j % 2 else mpq(0)
        out.append((x, r, s))
    return out


def expansiveness_probe(params: RotationParams, N: int = 6, eps=mpq(1, 10), samples: int = 1000,
                        seed: int = 0, K: int = 3, controls: int = 10) -> ProbeResult:
    """Flow sampled pairs forward until they separate.

    Each pair (x, s), (x + r, s) with r > 0 lies on distinct orbits.  The
    separating iterate k of the section pair comes from the pair-separation
    driver; after time t = T'^{(k)}(x) - s the first point sits on the
    section at R^k x and the second is |T'^{(k)}(x+r) - T'^{(k)}(x)| away in
    the flow direction.  The quotient distance at that time is the witness.
    delta(eps) = min(eps, smallest witness).

    Control pairs (p, flow(p, tau)) with |tau| < eps lie on one orbit and
    must not be counted; their distance is recorded along the same times.
    """
    eps = mpq(eps)
    Tp = roof(params, N)
    rows = []
    worst = None
    separated = 0
    for idx, (x, r, s) in enumerate(sample_pairs(params, samples, seed)):
        res = lemma1_scan(params, x, r, N)
        k = res.q if res.branch == "q" else res.m + (res.q or 0)
        p = MappingTorusPoint(x, params.zero + s)
        q = MappingTorusPoint(circle_reduce(x + r), params.zero + s)
        t = birkhoff_fast(Tp, x, k) - s
        fp, fq = flow(Tp, p, t), flow(Tp, q, t)
        dist = quotient_dist(Tp, fp, fq, K)
        gap = abs(birkhoff_fast(Tp, q.y, k) - birkhoff_fast(Tp, x, k))
        ok = res.passed and dist > res.delta
        separated += ok
        row = {"pair": idx, "x": x, "r": r, "s": s, "iterate": k, "time": t,
               "distance": dist, "gap": gap, "threshold": res.delta, "separated": ok}
        rows.append(row)
        if worst is None or dist < worst["distance"]:
            worst = row
    delta = params.zero + eps
    if worst is not None and worst["distance"] < delta:
        delta = worst["distance"]
    if separated < samples:
        delta = params.zero
    rng = random.Random(seed + 1)
    ctrl = []
    for _ in range(controls):
        x = circle_reduce(params.elem(_rand_unit(rng), rng.randrange(-1000, 1000)))
        tau = (2 * _rand_unit(rng) - 1) * eps / 2
        p = normalize(Tp, x, _rand_unit(rng) / 2)
        q = flow(Tp, p, tau)
        far = params.zero
        for t in (0, 1, 1000, 10**6):
            d = quotient_dist(Tp, flow(Tp, p, t), flow(Tp, q, t), K)
            if d > far:
                far = d
        ctrl.append({"tau": tau, "max_distance": far, "same_orbit": True})
    return ProbeResult(params.a, N, eps, delta, samples, seed, worst, rows, ctrl, separated)
