"""JSON and CSV output.  Exact values travel as rational strings next to a
display-only decimal."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile

from gmpy2 import mpq

from .field import QuadElem


def cell(v):
    """JSON-ready form of a number or nested structure."""
    if isinstance(v, QuadElem):
        return {"exact": v.to_json(), "decimal": v.decimal(20)}
    if isinstance(v, type(mpq(0))):
        return {"exact": f"{v.numerator}/{v.denominator}",
                "decimal": f"{float(v):.17g}"}
    if isinstance(v, dict):
        return {str(k): cell(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [cell(x) for x in v]
    return v


def flat(v) -> tuple[str, str]:
    """(exact, decimal) strings for one CSV cell."""
    if isinstance(v, QuadElem):
        return _exact_str(v), v.decimal(20)
    if isinstance(v, type(mpq(0))):
        return f"{v.numerator}/{v.denominator}", f"{float(v):.17g}"
    return str(v), str(v)


def _exact_str(x: QuadElem) -> str:
    return f"{x.p.numerator}/{x.p.denominator} + {x.q.numerator}/{x.q.denominator}*alpha"


def prop_to_json(res) -> dict:
    return {
        "proposition": res.prop, "a": res.a, "n": res.n, "x": cell(res.x), "i": res.i,
        "N": res.N, "lhs": cell(res.lhs), "rhs": cell(res.rhs), "margin": cell(res.margin),
        "verdict": res.verdict, "details": cell(res.details),
    }


PROP_COLUMNS = ["a", "n", "sample", "proposition", "lhs", "lhs_decimal", "rhs", "rhs_decimal",
                "margin", "margin_decimal", "verdict"]


def prop_rows(results, samples) -> list[list[str]]:
    rows = []
    for res, sample in zip(results, samples):
        row = [str(res.a), str(res.n), sample, res.prop]
        for v in (res.lhs, res.rhs, res.margin):
            row.extend(flat(v))
        row.append(res.verdict)
        rows.append(row)
    return rows


def lemma_to_json(res) -> dict:
    return {"passed": res.passed, "x": cell(res.x), "r": cell(res.r), "n": res.n, "q": res.q,
            "m": res.m, "branch": res.branch, "value": cell(res.value),
            "delta": cell(res.delta)}


def certificate_to_json(cert, seed: int) -> dict:
    return {"a": cert.a, "seed": seed, "delta": cell(cert.delta), "grid": cert.grid,
            "worst": lemma_to_json(cert.worst), "margin": cell(cert.margin),
            "passed": cert.passed, "pairs": [lemma_to_json(r) for r in cert.results]}


def probe_to_json(res) -> dict:
    w = res.worst
    return {"a": res.a, "N": res.N, "eps": cell(res.eps), "delta": cell(res.delta),
            "metric": "deck-minimized max(circle, height) distance, window K",
            "samples": res.samples, "seed": res.seed, "separated": res.separated,
            "worst": cell({k: w[k] for k in ("pair", "x", "r", "s", "iterate", "time",
                                               "distance")}) if w else None,
            "controls": cell(res.controls)}


def probe_rows(res) -> list[list[str]]:
    out = []
    for row in res.rows:
        t = flat(row["time"])
        d = flat(row["distance"])
        out.append([str(row["pair"]), str(row["iterate"]), t[0], t[1], d[0], d[1],
                    str(row["separated"])])
    return out


PROBE_COLUMNS = ["pair", "iterate", "time", "time_decimal", "distance", "distance_decimal",
                 "separated"]


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    """Write to a temporary file in the target directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
