"""Command-line entry point: ``adskit verify | factorize | act``.

Exit codes: 0 success, 1 a verification suite failed, 2 not in the open cell
(``factorize``), 3 invalid input.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import decomp, io, reps
from .io import InputError
from .verify import SUITES, run_suites
from .weylalg import Space

EXIT_OK, EXIT_FAIL, EXIT_NOT_IN_CELL, EXIT_INVALID = 0, 1, 2, 3
DEFAULT_MAX_Q = 8


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INVALID)


def max_q() -> int:
    raw = os.environ.get("ADSKIT_MAX_Q")
    if raw is None:
        return DEFAULT_MAX_Q
    try:
        return max(DEFAULT_MAX_Q, int(raw))
    except ValueError:
        return DEFAULT_MAX_Q


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# verify


def build_report(q: int, suite: str, seed: int, timing: bool = False) -> dict:
    names = SUITES if suite == "all" else (suite,)
    start = time.perf_counter()
    results = run_suites(q, names, seed)
    report = {
        "schema": io.SCHEMA,
        "q": q,
        "seed": seed,
        "suite": suite,
        "status": "pass" if all(r.passed for r in results) else "fail",
        "suites": [r.to_json() for r in results],
    }
    if timing:
        report["wall_time_s"] = round(time.perf_counter() - start, 3)
    return report


def render_report(report: dict) -> str:
    lines = [f"adskit verify  q={report['q']}  seed={report['seed']}"]
    for s in report["suites"]:
        c = s["counts"]
        lines.append(f"  {s['status'].upper():4}  {s['name']:<12} {c['checked'] - c['failed']}/{c['checked']} checks")
        for key, val in sorted(s["details"].items()):
            lines.append(f"        {key}: {val}")
        for note in s["notes"]:
            lines.append(f"        note: {note}")
        if "counterexample" in s:
            lines.append(f"        counterexample: {s['counterexample']}")
    lines.append(f"overall: {report['status'].upper()}")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    limit = max_q()
    if not 2 <= args.q <= limit:
        print(f"error: q must be in 2..{limit} (set ADSKIT_MAX_Q to raise the ceiling)", file=sys.stderr)
        return EXIT_INVALID
    report = build_report(args.q, args.suite, args.seed, args.timing)
    if args.json:
        _emit(io.dumps(report), args.json)
    if args.json != "-":
        sys.stdout.write(render_report(report))
    return EXIT_OK if report["status"] == "pass" else EXIT_FAIL


# ---------------------------------------------------------------------------
# factorize


def cmd_factorize(args) -> int:
    try:
        g = io.decode_group(io.load_json(args.input))
    except InputError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    fn = decomp.sekiguchi_factorize if args.mode == "sekiguchi" else decomp.bruhat_factorize
    try:
        result = io.encode_factors(fn(g))
        code = EXIT_OK
    except decomp.NotInCell as err:
        result = {"chart": args.mode, "in_cell": False, "reason": str(err)}
        code = EXIT_NOT_IN_CELL
    except decomp.ConventionError as err:
        print(f"internal convention error: {err}", file=sys.stderr)
        return EXIT_FAIL
    result["schema"] = io.SCHEMA
    _emit(io.dumps(result), args.out)
    return code


# ---------------------------------------------------------------------------
# act


def _parse_delta(text: str):
    try:
        d = Fraction(text)
    except (ValueError, ZeroDivisionError):
        try:
            return float(text)
        except ValueError:
            raise InputError(f"bad --delta {text!r}") from None
    return int(d) if d.denominator == 1 else d


def _parse_points(data, q: int, rep: str):
    if not isinstance(data, list):
        raise InputError("points must be a JSON list")
    out = []
    for item in data:
        if rep == "bulk":
            if isinstance(item, dict):
                x, y = item.get("x"), item.get("y")
            elif isinstance(item, list) and len(item) == q + 1:
                x, y = item[:q], item[q]
            else:
                raise InputError(f"bulk point must be {{'x': [...], 'y': ...}} or a list of {q + 1}")
            if not isinstance(x, list) or len(x) != q:
                raise InputError(f"bulk point needs {q} x-coordinates")
            y = io.decode_scalar(y, exact=False)
            if y <= 0:
                raise InputError("bulk points need y > 0")
            out.append(([io.decode_scalar(v, exact=False) for v in x], y))
        else:
            x = item.get("x") if isinstance(item, dict) else item
            if not isinstance(x, list) or len(x) != q:
                raise InputError(f"boundary point needs {q} coordinates")
            out.append([io.decode_scalar(v, exact=False) for v in x])
    return out


def cmd_act(args) -> int:
    try:
        g = io.decode_group(io.load_json(args.g))
        q = g.q
        space = Space(q)
        f = io.parse_poly(args.poly, space)
        if args.rep == "boundary" and (space.yi in f.variables() or any(space.zi(m) in f.variables() for m in range(q))):
            raise InputError("boundary fields depend on x0..x{q-1} only")
        if args.rep == "bulk" and any(space.zi(m) in f.variables() for m in range(q)):
            raise InputError("scalar bulk fields depend on x and y only")
        delta = _parse_delta(args.delta) if args.delta is not None else 0
        points = _parse_points(io.load_json(args.points), q, args.rep)
    except InputError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID

    if args.rep == "boundary":
        action = reps.boundary_action(g, delta, f)
    else:
        action = reps.bulk_action(g, f)
    rows = []
    for pt in points:
        shown = {"x": [io.encode_scalar(v) for v in pt[0]], "y": io.encode_scalar(pt[1])} if args.rep == "bulk" else {
            "x": [io.encode_scalar(v) for v in pt]
        }
        try:
            value = action(*pt) if args.rep == "bulk" else action(pt)
            rows.append({"point": shown, "value": io.encode_scalar(value)})
        except decomp.NotInCell:
            rows.append({"point": shown, "value": "undefined"})
    result = {
        "schema": io.SCHEMA,
        "rep": args.rep,
        "poly": str(f),
        "values": rows,
    }
    if args.rep == "boundary":
        result["delta"] = io.encode_scalar(Fraction(delta) if not isinstance(delta, float) else delta)
    _emit(io.dumps(result), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="adskit", description="Exact computations for SO(q,2) and its AdS realizations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run invariant suites")
    v.add_argument("--q", type=int, required=True)
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", "--report", dest="json", metavar="PATH", help="write the JSON report here ('-' for stdout only)")
    v.add_argument("--timing", action="store_true", help="include wall time (makes reports non-reproducible)")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("factorize", help="factorize a group element")
    f.add_argument("--mode", choices=("sekiguchi", "bruhat"), required=True)
    f.add_argument("--in", dest="input", required=True, metavar="PATH")
    f.add_argument("--out", metavar="PATH")
    f.set_defaults(func=cmd_factorize)

    a = sub.add_parser("act", help="evaluate a finite group action on a polynomial field")
    a.add_argument("--rep", choices=("boundary", "bulk"), required=True)
    a.add_argument("--g", required=True, metavar="PATH")
    a.add_argument("--delta", help="conformal weight (boundary only)")
    a.add_argument("--poly", required=True)
    a.add_argument("--points", required=True, metavar="PATH")
    a.add_argument("--out", metavar="PATH")
    a.set_defaults(func=cmd_act)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
