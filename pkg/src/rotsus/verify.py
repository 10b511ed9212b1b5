"""Certified checks of the separation estimates for T = sum_n T_n.

For a context (n, x in J_n, i = floor(q_{n+1}/2)) the sum is split as

    T = sum_{nu <= n-2} T_nu + (T_{n-1} + T_n + T_{n+1}) + sum_{nu >= n+2} T_nu

and each piece's difference S^{(i)}(x) - S^{(i)}(0) is computed exactly.
Constants are expressed through 1/c = alpha.

Verdicts: exact identities that hold for every ``a`` report ``fail`` when
violated.  Estimates whose constants are only claimed for a >= 10^10 report
``out-of-regime`` when violated below that threshold.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from gmpy2 import mpq

from .birkhoff import NAIVE_CAP, AssumptionContext, birkhoff, make_context
from .field import QuadElem, RotationParams, _alpha_float, circle_norm, circle_reduce, quad_floor
from .returntime import TowerFunction, layer, tail_bound, tn_spec, chi_value
from .tower import (
    ENUM_GUARD,
    GuardExceeded,
    dn,
    interval_In,
    qn,
    tower_coords,
)

REGIME_A = 10**10
PASS, FAIL, OUT = "pass", "fail", "out-of-regime"


@dataclass
class PropCheckResult:
    prop: str
    a: int
    n: int
    x: QuadElem
    i: int
    N: int | None
    lhs: QuadElem
    rhs: QuadElem
    margin: QuadElem
    verdict: str
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS


def _verdict(a: int, structural_ok: bool, estimate_ok: bool) -> str:
    if not structural_ok:
        return FAIL
    if estimate_ok:
        return PASS
    return OUT if a < REGIME_A else FAIL


def layers_sum(params: RotationParams, lo: int, hi: int) -> TowerFunction:
    """T_lo + ... + T_hi (layers below 1 do not exist)."""
    return TowerFunction(params, tuple(range(max(lo, 1), hi + 1)))


def diff(f, ctx: AssumptionContext, evaluator: str = "fast", cap: int = NAIVE_CAP) -> QuadElem:
    """f^{(i)}(x) - f^{(i)}(0)."""
    zero = ctx.params.zero
    return birkhoff(f, ctx.x, ctx.i, evaluator, cap) - birkhoff(f, zero, ctx.i, evaluator, cap)


def check_p2(ctx: AssumptionContext, evaluator: str = "fast") -> PropCheckResult:
    P, n, i = ctx.params, ctx.n, ctx.i
    f = layer(P, n)
    v0 = birkhoff(f, P.zero, i, evaluator)
    vx = birkhoff(f, ctx.x, i, evaluator)
    spec = tn_spec(P, n)
    base, s = interval_In(P, n)
    chi_x = chi_value(P, n, ctx.x if s > 0 else ctx.x - 1)
    closed = spec.cumulative(i) * chi_x
    d = vx - v0
    bound = qn(P, n + 1) * abs(dn(P, n + 1)) / 50
    zero_ok = v0 == 0
    sign_ok = d.sign() == spec.leading_sign
    closed_ok = closed == vx
    bound_ok = abs(vx) >= bound
    headline = abs(d) - P.alpha / 100
    return PropCheckResult(
        "p2", P.a, n, ctx.x, i, None, abs(vx), bound, abs(vx) - bound,
        _verdict(P.a, zero_ok and closed_ok, sign_ok and bound_ok),
        {"T_n(0)_sum_is_zero": zero_ok, "sign_matches_parity": sign_ok,
         "leading_sign": spec.leading_sign, "closed_form_matches": closed_ok,
         "closed_form": closed, "difference": d, "bound_holds": bound_ok,
         "headline_margin": headline},
    )


def check_p3(ctx: AssumptionContext, evaluator: str = "fast") -> PropCheckResult:
    P, n = ctx.params, ctx.n
    if n < 2:
        raise ValueError("the cancellation check needs n >= 2")
    d = diff(layer(P, n - 1), ctx, evaluator)
    return PropCheckResult("p3", P.a, n, ctx.x, ctx.i, None, d, P.zero, d,
                           _verdict(P.a, True, d == 0), {"difference": d})


def check_p4(ctx: AssumptionContext, evaluator: str = "fast") -> PropCheckResult:
    P, n, i = ctx.params, ctx.n, ctx.i
    dn_ = diff(layer(P, n), ctx, evaluator)
    g = layer(P, n + 1)
    g0 = birkhoff(g, P.zero, i, evaluator)
    d1 = birkhoff(g, ctx.x, i, evaluator) - g0
    s = dn_.sign()
    zero_ok = g0 == 0
    sign_ok = d1.sign() in (0, s) and s != 0
    return PropCheckResult(
        "p4", P.a, n, ctx.x, i, None, d1, P.zero, s * d1,
        _verdict(P.a, True, zero_ok and sign_ok),
        {"T_n_difference": dn_, "T_n+1_difference": d1, "T_n+1(0)_sum_is_zero": zero_ok,
         "sign_agrees": sign_ok},
    )


def check_c5(ctx: AssumptionContext, evaluator: str = "fast") -> PropCheckResult:
    P, n = ctx.params, ctx.n
    parts = {m: (diff(layer(P, m), ctx, evaluator) if m >= 1 else P.zero)
             for m in (n - 1, n, n + 1)}
    total = parts[n - 1] + parts[n] + parts[n + 1]
    rhs = P.alpha / 100
    additive = abs(total) == abs(parts[n]) + abs(parts[n + 1]) and parts[n - 1] == 0
    return PropCheckResult(
        "c5", P.a, n, ctx.x, ctx.i, None, abs(total), rhs, abs(total) - rhs,
        _verdict(P.a, True, abs(total) > rhs),
        {"T_n-1": parts[n - 1], "T_n": parts[n], "T_n+1": parts[n + 1],
         "magnitudes_add": additive},
    )


def check_p6(ctx: AssumptionContext, N: int, evaluator: str = "fast") -> PropCheckResult:
    """Layers n+2..N exactly, plus the certified allowance for layers beyond N."""
    P, n, i = ctx.params, ctx.n, ctx.i
    if N < n + 2:
        raise ValueError("N must be >= n + 2")
    explicit = P.zero
    termwise_ok = True
    per_layer = {}
    t = tail_bound(P, N)
    for nu in range(n + 2, N + 1):
        f = layer(P, nu)
        sx = birkhoff(f, ctx.x, i, evaluator)
        s0 = birkhoff(f, P.zero, i, evaluator)
        cap = i * f.sup_bound()
        termwise_ok &= abs(sx) <= cap and abs(s0) <= cap
        per_layer[nu] = sx - s0
        explicit = explicit + abs(sx - s0)
    tail = 2 * i * t
    lhs = explicit + tail
    rhs = 4 * P.alpha * P.alpha
    return PropCheckResult(
        "p6", P.a, n, ctx.x, i, N, lhs, rhs, rhs - lhs,
        _verdict(P.a, termwise_ok, lhs < rhs),
        {"explicit": explicit, "tail": tail, "per_layer": per_layer,
         "termwise_bound_holds": termwise_ok},
    )


def first_return_max(params: RotationParams, nu: int, n: int, guard: int = 4 * ENUM_GUARD) -> dict:
    """Brute-force bound on the first return time of R_alpha to the shrunk interval.

    The interval is I_nu u I_{nu+1} with the |d_n|/2-neighbourhoods of its two
    ends removed.  Returns the largest first-return time K_max (every point of
    the interval comes back within K_max steps) and the claimed bound 2q_{nu+1}.
    """
    bound = 2 * qn(params, nu + 1)
    if bound > guard:
        raise GuardExceeded(f"2q_{nu + 1} = {bound} exceeds guard {guard}")
    d1, d2 = dn(params, nu), dn(params, nu + 1)
    e = abs(dn(params, n)) / 2
    lo = (d1 if d1.sign() < 0 else d2) + e
    hi = (d1 if d1.sign() > 0 else d2) - e
    length = hi - lo
    # R^{-k} J meets J iff the shift s = -k alpha (mod 1, centred) has |s| < |J|;
    # floats only pre-select k, every kept shift is exact
    pieces = []
    al = params.alpha
    af = _alpha_float(params.a)
    cut = float(length) + 1e-8
    for k in range(1, bound + 1):
        sf = -k * af
        sf -= round(sf)
        if abs(sf) < cut:
            s = -k * al
            s = s - quad_floor(s + mpq(1, 2))
            if abs(s) < length:
                pieces.append((k, s))
    # cover [0, length] (J translated to start at 0) by the translates in order of k
    segs = []
    k_max = None
    for k, s in pieces:
        a0 = s if s.sign() > 0 else params.zero
        b0 = length + s if s.sign() < 0 else length
        segs.append((a0, b0))
        if _covers(segs, length):
            k_max = k
            break
    return {"nu": nu, "n": n, "bound": bound, "max_return": k_max,
            "holds": k_max is not None and k_max <= bound, "length": length,
            "candidates": len(pieces)}


def _covers(segs, length) -> bool:
    reach = None
    for a0, b0 in sorted(segs, key=lambda ab: float(ab[0])):
        if reach is None:
            if a0.sign() > 0:
                return False
            reach = b0
        elif a0 <= reach:
            if b0 > reach:
                reach = b0
        else:
            return False
    return reach is not None and reach >= length


def check_p7(ctx: AssumptionContext, evaluator: str = "fast",
             return_guard: int = 4 * ENUM_GUARD) -> PropCheckResult:
    P, n, i = ctx.params, ctx.n, ctx.i
    xnorm = circle_norm(ctx.x)
    total = P.zero
    per_layer_ok = True
    per_layer = {}
    returns = []
    for nu in range(1, n - 1):
        d = diff(layer(P, nu), ctx, evaluator)
        per_layer[nu] = d
        per_layer_ok &= abs(d) <= 2 * qn(P, nu + 1) * xnorm
        total = total + d
        if 2 * qn(P, nu + 1) <= return_guard:
            returns.append(first_return_max(P, nu, n, return_guard))
    rhs = 5 * P.alpha * P.alpha
    returns_ok = all(r["holds"] for r in returns)
    return PropCheckResult(
        "p7", P.a, n, ctx.x, i, None, abs(total), rhs, rhs - abs(total),
        _verdict(P.a, True, abs(total) < rhs and per_layer_ok and returns_ok),
        {"vacuous": n < 3, "per_layer": per_layer, "per_layer_bound_holds": per_layer_ok,
         "first_returns": returns},
    )


def main_separation(ctx: AssumptionContext, N: int | None = None, evaluator: str = "fast",
                    cap: int = NAIVE_CAP) -> PropCheckResult:
    """|T^{(i)}(x) - T^{(i)}(0)| for the full series, against 1/(200c)."""
    P, n, i = ctx.params, ctx.n, ctx.i
    N = n + 4 if N is None else N
    if N < n + 1:
        raise ValueError("N must be >= n + 1")
    T = layers_sum(P, 1, N)
    value = abs(diff(T, ctx, evaluator, cap))
    tail = 2 * i * tail_bound(P, N)
    rhs = P.alpha / 200
    lower = value - tail
    # component ledger, always with the fast evaluator
    comp_c5 = abs(diff(layers_sum(P, n - 1, n + 1), ctx))
    comp_p6 = P.zero
    for nu in range(n + 2, N + 1):
        comp_p6 = comp_p6 + abs(diff(layer(P, nu), ctx))
    comp_p7 = abs(diff(layers_sum(P, 1, n - 2), ctx)) if n >= 3 else P.zero
    return PropCheckResult(
        "main", P.a, n, ctx.x, i, N, lower, rhs, lower - rhs,
        _verdict(P.a, True, lower > rhs),
        {"value": value, "tail": tail, "c5": comp_c5, "p6_explicit": comp_p6,
         "p7": comp_p7, "evaluator": evaluator},
    )


def check_zero_sum(params: RotationParams, n: int, x: QuadElem, evaluator: str = "fast") -> bool:
    """T_n^{(q_{n+1})}(x) == 0 for x in I_n."""
    return birkhoff(layer(params, n), x, qn(params, n + 1), evaluator) == 0


# ---------------------------------------------------------------------------
# separation of arbitrary pairs


@dataclass
class PairSeparation:
    passed: bool
    x: QuadElem
    r: QuadElem
    n: int
    q: int | None
    m: int
    branch: str | None
    value: QuadElem | None
    reference: QuadElem | None
    delta: QuadElem
    details: dict = field(default_factory=dict)


def window_level(params: RotationParams, r: QuadElem, max_level: int = 200) -> int:
    """The n >= 1 with |d_{n+1}|/2 <= r <= |d_n|/2."""
    if r.sign() <= 0:
        raise ValueError("r must be positive")
    if r > abs(dn(params, 1)) / 2:
        raise ValueError("r exceeds the covered window |d_1|/2")
    n = 1
    while r < abs(dn(params, n + 1)) / 2:
        n += 1
        if n > max_level:
            raise ValueError("r too small")
    return n


def reference_point(params: RotationParams, n: int, r: QuadElem) -> QuadElem:
    """Left point z of the pair (z, z + r) whose other point is in J_n opposite 0."""
    return params.zero if dn(params, n).sign() > 0 else circle_reduce(-r)


def separation_value(T: TowerFunction, x: QuadElem, r: QuadElem, k: int, N: int) -> QuadElem:
    """Certified lower bound for |T^{(k)}(x+r) - T^{(k)}(x)| of the full series."""
    P = T.params
    d = birkhoff(T, circle_reduce(x + r), k) - birkhoff(T, x, k)
    return abs(d) - 2 * k * tail_bound(P, N)


def lemma1_scan(params: RotationParams, x: QuadElem, r: QuadElem, N: int | None = None,
                search_depth: int | None = None, delta: QuadElem | None = None) -> PairSeparation:
    """Separate (x, x + r) by transporting the reference pair of its window.

    q is chosen so that R^q(x) lies within |I_{n+2}| of the reference point;
    then either T^{(q)} or T^{(m+q)} (m = floor(q_{n+1}/2)) separates the pair.
    """
    n = window_level(params, r)
    N = n + 4 if N is None else N
    search_depth = qn(params, n + 4) if search_depth is None else search_depth
    delta = params.alpha / 600 if delta is None else delta
    T = layers_sum(params, 1, N)
    z = reference_point(params, n, r)
    m = qn(params, n + 1) // 2
    reference = separation_value(T, z, r, m, N)
    L = n + 2
    c = tower_coords(params, circle_reduce(z - x), L)[L]
    q = c.height
    if q > search_depth:
        return PairSeparation(False, x, r, n, None, m, None, None, reference, delta,
                            {"reason": "search depth exhausted", "needed_q": q})
    vq = separation_value(T, x, r, q, N) if q > 0 else None
    vmq = separation_value(T, x, r, m + q, N)
    if vq is not None and vq > delta and vq >= vmq:
        branch, value = "q", vq
    else:
        branch, value = "m+q", vmq
    return PairSeparation(value > delta, x, r, n, q, m, branch, value, reference, delta,
                        {"transport_error": abs(c.z), "value_q": vq, "value_m+q": vmq})


@dataclass
class SeparationCertificate:
    a: int
    delta: QuadElem
    grid: dict
    worst: PairSeparation
    margin: QuadElem
    results: list
    passed: bool


def make_grid(params: RotationParams, levels=(1, 2), count: int = 100, seed: int = 0) -> list:
    """Pairs (x, r): r spread across each window, x random (first pair per window at x = z)."""
    rng = random.Random(seed)
    per = max(1, count // len(levels))
    pairs = []
    for lvl_index, n in enumerate(levels):
        lo = abs(dn(params, n + 1)) / 2
        hi = abs(dn(params, n)) / 2
        k = per if lvl_index < len(levels) - 1 else count - per * (len(levels) - 1)
        for j in range(k):
            r = lo + mpq(2 * j + 1, 2 * k) * (hi - lo)
            if j == 0:
                x = reference_point(params, n, r)
            else:
                x = circle_reduce(params.elem(mpq(rng.randrange(2**30), 2**30),
                                              rng.randrange(-1000, 1000)))
            pairs.append((x, r))
    return pairs


def separation_certificate(params: RotationParams, pairs: list | None = None, N: int | None = None,
                           levels=(1, 2), count: int = 100, seed: int = 0) -> SeparationCertificate:
    """delta = min(min separation over the grid, 1/(200c)) / 3."""
    if pairs is None:
        pairs = make_grid(params, levels, count, seed)
    N = max(levels) + 4 if N is None else N
    results = [lemma1_scan(params, x, r, N) for x, r in pairs]
    values = [res.value for res in results if res.value is not None]
    all_found = len(values) == len(results)
    worst = min((res for res in results if res.value is not None), key=lambda res: res.value)
    delta = min(worst.value, params.alpha / 200) / 3
    ok = all_found and all(res.value > delta for res in results) and delta.sign() > 0
    return SeparationCertificate(
        params.a, delta,
        {"levels": list(levels), "count": len(pairs), "seed": seed, "N": N},
        worst, worst.value - delta, results, ok,
    )


def regime_table(a_values=(10, 100, 300, 1000, 3000), levels=(1, 2),
                 samples=("midpoint", "left", "right")) -> list[dict]:
    """Pass/out-of-regime table of the quantitative checks over a sweep of a."""
    from .field import make_params

    rows = []
    for a in a_values:
        P = make_params(a)
        for n in levels:
            for sample in samples:
                ctx = make_context(P, n, sample)
                N = n + 4
                checks = [check_p2(ctx), check_c5(ctx), check_p6(ctx, N), check_p7(ctx),
                          main_separation(ctx, N)]
                if n >= 2:
                    checks.insert(1, check_p3(ctx))
                checks.insert(2, check_p4(ctx))
                for res in checks:
                    rows.append({"a": a, "n": n, "sample": sample, "prop": res.prop,
                                 "lhs": res.lhs, "rhs": res.rhs, "margin": res.margin,
                                 "verdict": res.verdict})
    return rows
