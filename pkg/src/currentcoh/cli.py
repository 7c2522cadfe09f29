"""Command-line front end.

Exit codes: 0 success, 1 bad input, 2 arithmetic disagreement between primes.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from . import classes, engine, exactla, repro, schemes
from .liealg import LieAlgebraSpec
from .superspace import as_multidegree, level

log = logging.getLogger("currentcoh")

EXIT_OK, EXIT_INPUT, EXIT_ARITH = 0, 1, 2

# JSON schema shipped for each subcommand's json output
SCHEMAS = {
    "sector": "sector_report",
    "table": "level_table",
    "compare": "compare",
    "restriction": "restriction",
    "verify": "class_report",
    "fortuitous": "fortuitous",
    "repro": "repro",
}


def load_schema(command: str) -> dict:
    from importlib.resources import files

    return json.loads(files("currentcoh").joinpath("schemas", SCHEMAS[command] + ".json").read_text())


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _multidegree(text: str) -> tuple[int, ...]:
    try:
        parts = [int(x) for x in text.split(",")]
        return as_multidegree(parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected five comma-separated non-negative integers, got {text!r}") from exc


def _algebra(text: str) -> str:
    try:
        return LieAlgebraSpec.parse(text).name
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


# --- output -------------------------------------------------------------------------


def _emit(payload, rows: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        return
    if not rows:
        out.write("(no rows)\n" if fmt == "pretty" else "")
        return
    cols = list(rows[0])
    flat = [{k: (" ".join(map(str, v)) if isinstance(v, (list, tuple)) else v) for k, v in r.items()} for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        w.writerows(flat)
        out.write(buf.getvalue())
        return
    widths = {c: max(len(c), *(len(str(r[c])) for r in flat)) for c in cols}
    out.write("  ".join(c.ljust(widths[c]) for c in cols) + "\n")
    for r in flat:
        out.write("  ".join(str(r[c]).ljust(widths[c]) for c in cols) + "\n")


def _primes(args) -> tuple[int, ...]:
    return tuple(exactla.choose_primes(args.primes, seed=args.seed))


def _cache(args) -> engine.ResultCache:
    return engine.ResultCache.from_env(args.cache_dir)


# --- commands -------------------------------------------------------------------------


def cmd_sector(args):
    ps = [args.p] if args.p is not None else None
    reps = engine.sector_reports(args.g, args.n, ps, backend=args.backend, primes=_primes(args), seed=args.seed, cache=_cache(args))
    rows = [r.to_json() for r in reps]
    return (rows[0] if len(rows) == 1 else rows), rows


def cmd_table(args):
    lo = args.level if args.level is not None else args.lmin
    hi = args.level if args.level is not None else args.lmax
    if hi is None or lo > hi:
        raise InputError("give --level or a range --lmin/--lmax")
    tables = [
        engine.level_table(args.g, L, threads=args.threads, backend=args.backend, primes=_primes(args), seed=args.seed, cache=_cache(args))
        for L in range(lo, hi + 1)
    ]
    payload = [t.to_json() for t in tables]
    rows = [r.to_json() for t in tables for r in (t.reports if args.all else t.nonzero())]
    return (payload[0] if len(payload) == 1 else payload), rows


def cmd_compare(args):
    mism = engine.compare_langlands(
        args.a, args.b, args.lmax, args.lmin, threads=args.threads, backend=args.backend, primes=_primes(args), seed=args.seed, cache=_cache(args)
    )
    rows = [m.to_json() for m in mism]
    payload = {"a": args.a, "b": args.b, "l_min": args.lmin, "l_max": args.lmax, "mismatches": rows}
    return payload, rows


def cmd_restriction(args):
    rep = schemes.non_cartan_kernel(args.g, args.n, primes=_primes(args))
    return rep.to_json(), [rep.to_json()]


def _load_word(target: str) -> tuple[classes.TraceWord, str | None]:
    if target in classes.BUILTINS:
        return classes.builtin_representative(target), classes.default_algebra(target)
    path = Path(target)
    if not path.exists():
        raise InputError(f"{target!r} is neither a builtin ({', '.join(sorted(classes.BUILTINS))}) nor a file")
    return classes.parse_trace_word(path.read_text()), None


def cmd_verify(args):
    word, default_g = _load_word(args.target)
    g = args.g or default_g
    if g is None:
        raise InputError("--g is required for a trace word file")
    rep = classes.verify_class(
        word, g, primes=_primes(args), seed=args.seed, check_fortuitous=not args.no_fortuitous, check_exact=not args.no_exact, certify=args.certify
    )
    out = rep.to_json()
    out["name"] = args.target
    return out, [out]


def cmd_fortuitous(args):
    h, span = classes.graviton_span_in_H(args.g, args.p, args.n, primes=_primes(args), seed=args.seed)
    out = {"g": args.g, "p": args.p, "n": list(args.n), "level": level(args.n), "dim_H": h, "graviton_span": span, "fortuitous_dim": h - span}
    return out, [out]


def cmd_repro(args):
    def progress(r):
        log.info(r.line())

    results = repro.run_all(extended=args.extended, progress=progress, cache_dir=args.cache_dir)
    rows = [
        {"criterion": r.number, "title": r.title, "status": "SKIP" if r.skipped else ("PASS" if r.passed else "FAIL"), "detail": r.detail}
        for r in results
    ]
    return {"criteria": [r.to_json() for r in results]}, rows


# --- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_nonneg, default=0, help="seeds prime selection and evaluation points (default 0)")
    common.add_argument("--threads", type=_nonneg, default=1, help="worker processes for level tables (default 1)")
    common.add_argument("--cache-dir", default=None, help=f"result cache directory (default ${engine.CACHE_ENV}, else none)")
    common.add_argument("--format", choices=("json", "csv", "pretty"), default="json")
    common.add_argument("--backend", choices=engine.BACKENDS, default="auto")
    common.add_argument("--primes", type=int, default=2, help="number of primes (default 2)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="currentcoh", description="Relative cohomology of current superalgebras g[z+, z-, theta1..3].")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sector", parents=[common], help="dim H for one multidegree")
    s.add_argument("--g", type=_algebra, required=True)
    s.add_argument("--n", type=_multidegree, required=True)
    s.add_argument("--p", type=_nonneg, default=None, help="word length (default: all)")
    s.set_defaults(func=cmd_sector)

    s = sub.add_parser("table", parents=[common], help="all sectors at a level")
    s.add_argument("--g", type=_algebra, required=True)
    s.add_argument("--level", type=_nonneg, default=None)
    s.add_argument("--lmin", type=_nonneg, default=0)
    s.add_argument("--lmax", type=_nonneg, default=None)
    s.add_argument("--all", action="store_true", help="include zero sectors in csv/pretty output")
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("compare", parents=[common], help="sector differences between two algebras")
    s.add_argument("--a", type=_algebra, required=True)
    s.add_argument("--b", type=_algebra, required=True)
    s.add_argument("--lmax", type=_nonneg, required=True)
    s.add_argument("--lmin", type=_nonneg, default=0)
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("restriction", parents=[common], help="Cartan restriction kernel in top degree")
    s.add_argument("--g", type=_algebra, required=True)
    s.add_argument("--n", type=_multidegree, required=True)
    s.set_defaults(func=cmd_restriction)

    s = sub.add_parser("verify", parents=[common], help="check a builtin representative or a trace word file")
    s.add_argument("target")
    s.add_argument("--g", type=_algebra, default=None)
    s.add_argument("--certify", action="store_true", help="confirm closedness over Q by coordinate expansion")
    s.add_argument("--no-fortuitous", action="store_true")
    s.add_argument("--no-exact", action="store_true")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("fortuitous", parents=[common], help="cohomology not spanned by graviton products")
    s.add_argument("--g", type=_algebra, required=True)
    s.add_argument("--p", type=_nonneg, required=True)
    s.add_argument("--n", type=_multidegree, required=True)
    s.set_defaults(func=cmd_fortuitous)

    s = sub.add_parser("repro", parents=[common], help="run the reproduction checks")
    s.add_argument("--extended", action="store_true", help=f"include the long checks (also via ${repro.EXTENDED_ENV}=1)")
    s.set_defaults(func=cmd_repro, extended=None)
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s", stream=sys.stderr)
    if args.command == "repro" and args.extended is None:
        args.extended = repro.extended_enabled()
    if args.primes < 1:
        parser.error("--primes must be at least 1")
    if args.threads == 0:
        args.threads = os.cpu_count() or 1
    try:
        payload, rows = args.func(args)
    except exactla.ArithmeticDisagreement as exc:
        print(f"arithmetic disagreement: {exc}", file=sys.stderr)
        return EXIT_ARITH
    except (InputError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(payload, rows, args.format, out)
    if args.command == "repro" and any(not r["passed"] and not r["skipped"] for r in payload["criteria"]):
        return EXIT_ARITH
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
