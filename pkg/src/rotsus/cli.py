"""Command-line driver.

    rotsus convergents --a 2 --N 5
    rotsus tower --a 3 --n 2 --out run/
    rotsus build --a 10 --N 3 --out run/
    rotsus verify --a 1000 --n-min 1 --n-max 2 --format csv
    rotsus scan --a 1000 --samples 100
    rotsus probe --a 1000 --samples 1000 --eps 1/10

Every numeric cell carries an exact rational form and a decimal.  With
``--out DIR`` the document is written atomically to DIR/<command>.<format>;
otherwise it goes to stdout.  Exit status: 0 all checks pass, 1 some check
failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time

from gmpy2 import mpq

from . import serialize as S
from .birkhoff import NAIVE_CAP, make_context
from .field import InvalidParameter, make_params
from .flow import expansiveness_probe
from .returntime import build_T, build_Tn
from .tower import ENUM_GUARD, GuardExceeded, closest_return_verify, convergents, dn, tower_partition
from .verify import (
    FAIL,
    check_c5,
    check_p2,
    check_p3,
    check_p4,
    check_p6,
    check_p7,
    main_separation,
    separation_certificate,
)

DEFAULTS = {
    "a": 2, "N": None, "n": 1, "n_min": 1, "n_max": 2, "samples": None, "seed": 0,
    "naive_cap": NAIVE_CAP, "enum_cap": ENUM_GUARD, "evaluator": "fast", "eps": "1/10",
    "out": None, "format": "json", "timing": False,
}


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with defaults (keys mirror the flags)")
    common.add_argument("--a", type=int)
    common.add_argument("--N", type=int, help="truncation level")
    common.add_argument("--n", type=int, help="tower level")
    common.add_argument("--n-min", type=int, dest="n_min")
    common.add_argument("--n-max", type=int, dest="n_max")
    common.add_argument("--samples", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--naive-cap", type=int, dest="naive_cap")
    common.add_argument("--enum-cap", type=int, dest="enum_cap")
    common.add_argument("--evaluator", choices=["fast", "naive", "auto"])
    common.add_argument("--eps")
    common.add_argument("--out")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--timing", action="store_true", default=None,
                        help="add a wall-time column (output is then not reproducible)")
    p = argparse.ArgumentParser(prog="rotsus", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in [("convergents", "continued fraction table"),
                       ("tower", "Rokhlin tower partition of level n"),
                       ("build", "piecewise-linear T_n and truncated T"),
                       ("verify", "proposition checks over a range of levels"),
                       ("scan", "separation certificate on a grid of pairs"),
                       ("probe", "expansiveness probe of the suspension flow")]:
        sub.add_parser(name, parents=[common], help=text)
    return p


def load_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                extra = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        unknown = set(extra) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(extra)
    for k in DEFAULTS:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    for k in ("naive_cap", "enum_cap"):
        if int(cfg[k]) <= 0:
            raise UsageError(f"{k} must be positive")
    if cfg["samples"] is not None and int(cfg["samples"]) < 0:
        raise UsageError("samples must be >= 0")
    if cfg["n_min"] > cfg["n_max"]:
        raise UsageError("n-min exceeds n-max")
    try:
        cfg["eps"] = mpq(str(cfg["eps"]))
    except ValueError as exc:
        raise UsageError(f"bad eps {cfg['eps']!r}") from exc
    return cfg


def _emit(cfg: dict, command: str, doc: dict, header=None, rows=None) -> None:
    if cfg["format"] == "csv" and header is not None:
        text = S.csv_text(header, rows)
        ext = "csv"
    else:
        text = S.dumps(doc)
        ext = "json"
    if cfg["out"]:
        S.write_atomic(os.path.join(cfg["out"], f"{command}.{ext}"), text)
    else:
        sys.stdout.write(text)


def cmd_convergents(cfg: dict) -> int:
    P = make_params(cfg["a"])
    N = cfg["N"] or 8
    conv = convergents(P, N)
    rows, items = [], []
    ok = True
    for c in conv:
        det = None
        if c.n >= 1:
            prev = conv[c.n - 1]
            det = prev.q * c.p - prev.p * c.q
            ok &= abs(det) == 1
        d = dn(P, c.n)
        closest = None
        if c.n >= 1 and c.q <= cfg["enum_cap"]:
            closest = closest_return_verify(P, c.n, cfg["enum_cap"])
            ok &= closest
        ex, dec = S.flat(abs(d))
        rows.append([str(c.n), str(c.p), str(c.q), ex, dec, str(det), str(closest)])
        items.append({"n": c.n, "p": c.p, "q": c.q, "distance": S.cell(abs(d)),
                      "determinant": det, "closest_return": closest})
    _emit(cfg, "convergents", {"a": P.a, "N": N, "rows": items, "passed": ok},
          ["n", "p", "q", "distance", "distance_decimal", "determinant", "closest_return"], rows)
    return 0 if ok else 1


def cmd_tower(cfg: dict) -> int:
    P = make_params(cfg["a"])
    n = cfg["n"]
    T = tower_partition(P, n, cfg["enum_cap"])
    total = T.base_long.length * len(T.long_floors) + T.base_short.length * len(T.short_floors)
    ok = total == 1 and len(T.floors) == len(T.long_floors) + len(T.short_floors)
    doc = T.to_json()
    doc.update({"long_floors": len(T.long_floors), "short_floors": len(T.short_floors),
                "identity": S.cell(total), "identity_holds": ok})
    rows = []
    for f in T.floors:
        left = S.flat(f.interval.left)
        rows.append([f.base, str(f.height), left[0], left[1], S.flat(f.interval.length)[0]])
    _emit(cfg, "tower", doc, ["base", "height", "left", "left_decimal", "length"], rows)
    return 0 if ok else 1


def cmd_build(cfg: dict) -> int:
    P = make_params(cfg["a"])
    N = cfg["N"] or 3
    res = cfg["samples"] or 2000
    out = cfg["out"]
    layers = []
    ok = True
    for n in range(1, N + 1):
        spec, f = build_Tn(P, n, cfg["enum_cap"])
        sup = f.sup_norm()
        bound_ok = sup <= abs(dn(P, n))
        ok &= bound_ok
        layers.append({"n": n, "j": spec.j, "j_prime": spec.j_prime,
                       "leading_sign": spec.leading_sign, "breakpoints": len(f),
                       "sup_norm": S.cell(sup), "sup_within_interval_length": bound_ok})
        if out:
            S.write_atomic(os.path.join(out, f"T_{n}.json"), S.dumps(f.to_json()))
    T, tail = build_T(P, N, cfg["enum_cap"])
    ok &= T.is_continuous()
    samples = T.sample(res)
    if out:
        S.write_atomic(os.path.join(out, f"T_le_{N}.json"), S.dumps(T.to_json()))
        S.write_atomic(os.path.join(out, f"T_le_{N}_samples.csv"),
                       S.csv_text(["x", "T"], [[f"{x:.17g}", f"{y:.17g}"] for x, y in samples]))
    doc = {"a": P.a, "N": N, "layers": layers, "breakpoints": len(T), "tail_bound": S.cell(tail),
           "continuous": T.is_continuous(), "passed": ok}
    rows = [[str(L["n"]), str(L["j"]), str(L["j_prime"]), str(L["leading_sign"]),
             str(L["breakpoints"]), L["sup_norm"]["decimal"]] for L in layers]
    _emit(cfg, "build", doc, ["n", "j", "j_prime", "leading_sign", "breakpoints", "sup_norm"], rows)
    return 0 if ok else 1


def _contexts(P, n: int, extra: int, seed: int):
    ctxs = [make_context(P, n, s) for s in ("midpoint", "left", "right")]
    rng = random.Random(seed * 1000003 + n)
    ctxs += [make_context(P, n, "random", rng) for _ in range(extra)]
    return ctxs


def cmd_verify(cfg: dict) -> int:
    P = make_params(cfg["a"])
    ev = cfg["evaluator"]
    results, samples, times = [], [], []
    for n in range(cfg["n_min"], cfg["n_max"] + 1):
        N = cfg["N"] if cfg["N"] is not None else n + 4
        for ctx in _contexts(P, n, cfg["samples"] or 0, cfg["seed"]):
            ev_main = ev
            if ev == "auto":
                ev_main = "naive" if ctx.i <= cfg["naive_cap"] else "fast"
            jobs = [lambda: check_p2(ctx)]
            if n >= 2:
                jobs.append(lambda: check_p3(ctx))
            jobs += [lambda: check_p4(ctx), lambda: check_c5(ctx), lambda: check_p6(ctx, N),
                     lambda: check_p7(ctx),
                     lambda: main_separation(ctx, N, ev_main, cfg["naive_cap"])]
            for job in jobs:
                t0 = time.perf_counter()
                results.append(job())
                times.append(time.perf_counter() - t0)
                samples.append(ctx.sample)
    failed = any(r.verdict == FAIL for r in results)
    header = list(S.PROP_COLUMNS)
    rows = S.prop_rows(results, samples)
    if cfg["timing"]:
        header.append("wall_time")
        rows = [r + [f"{t:.3f}"] for r, t in zip(rows, times)]
    doc = {"a": P.a, "seed": cfg["seed"], "results": [S.prop_to_json(r) for r in results],
           "passed": not failed}
    _emit(cfg, "verify", doc, header, rows)
    return 1 if failed else 0


def cmd_scan(cfg: dict) -> int:
    P = make_params(cfg["a"])
    levels = tuple(range(cfg["n_min"], cfg["n_max"] + 1))
    cert = separation_certificate(P, N=cfg["N"], levels=levels, count=cfg["samples"] or 100,
                                  seed=cfg["seed"])
    rows = []
    for k, r in enumerate(cert.results):
        v = S.flat(r.value) if r.value is not None else ("", "")
        rows.append([str(k), str(r.n), str(r.q), r.branch or "", v[0], v[1], str(r.passed)])
    _emit(cfg, "scan", S.certificate_to_json(cert, cfg["seed"]),
          ["pair", "n", "q", "branch", "value", "value_decimal", "separated"], rows)
    return 0 if cert.passed else 1


def cmd_probe(cfg: dict) -> int:
    P = make_params(cfg["a"])
    res = expansiveness_probe(P, N=cfg["N"] or 6, eps=cfg["eps"], samples=cfg["samples"] or 1000,
                              seed=cfg["seed"])
    _emit(cfg, "probe", S.probe_to_json(res), S.PROBE_COLUMNS, S.probe_rows(res))
    return 0 if res.all_separated and res.delta.sign() > 0 else 1


COMMANDS = {"convergents": cmd_convergents, "tower": cmd_tower, "build": cmd_build,
            "verify": cmd_verify, "scan": cmd_scan, "probe": cmd_probe}


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except (UsageError, InvalidParameter, GuardExceeded, ValueError) as exc:
        print(f"rotsus: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
