"""Command-line interface: ``khinlab moments|constants|extract|verify|counterexample``.

Exit codes: 0 success, 1 suite failures, 2 parse or domain error,
3 dimension too large for exact enumeration, 4 weight below the mode threshold.
"""
from __future__ import annotations

import argparse
import csv
from decimal import Decimal
import io
import json
from pathlib import Path
import sys

from ._numbers import to_decimal
from .constants import euler_limit, haagerup_Bq, l0_tail_threshold_refined, zero_mass_threshold
from .errors import BelowThreshold, DimensionTooLarge, DomainError, KhinlabError, ParseError
from .montecarlo import McConfig, mc_moment
from .rademacher import CoefficientVector, exact_moment
from .schema import SCHEMA_VERSION
from .verifier import SUITES, CaseGenerator, counterexample_demo, run_suite
from .weighted import extract_constants
from .weights import WeightSpec

EXIT_FAILURES = 1
EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_THRESHOLD = 4


def read_coefficients(path: str) -> CoefficientVector:
    """JSON array of decimals, or one decimal per line ('#' starts a comment)."""
    text = _read(path)
    stripped = text.strip()
    if stripped.startswith("["):
        try:
            items = json.loads(stripped, parse_float=Decimal, parse_int=Decimal)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(items, list) or not all(isinstance(v, (str, Decimal)) for v in items):
            raise ParseError(f"{path}: expected a JSON array of decimal strings")
    else:
        items = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        items = [ln for ln in items if ln]
    try:
        return CoefficientVector(items)
    except DomainError as exc:
        raise ParseError(f"{path}: {exc}") from None


def read_weight(path: str) -> WeightSpec:
    try:
        obj = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    return WeightSpec.from_json(obj)


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _g12(x: float) -> str:
    return format(float(x), ".12g")


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj if not isinstance(obj, list) else " ".join(map(str, obj))


def render(doc: dict, fmt: str, rows: list[dict] | None = None) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        else:
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["key", "value"])
            writer.writerows(_flatten(doc))
        return buf.getvalue()
    pairs = list(_flatten(doc))
    width = max(len(k) for k, _ in pairs)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in pairs)


def _emit(args, doc: dict, rows: list[dict] | None = None) -> None:
    text = render(doc, args.format, rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_moments(args) -> int:
    if args.samples is not None and not args.mc:
        raise DomainError("--samples only applies with --mc")
    coeffs = read_coefficients(args.coeffs)
    weight = read_weight(args.weight) if args.weight else None
    p_values = [p for chunk in args.p for p in chunk.split(",") if p]
    reports = []
    for p in p_values:
        if args.mc:
            cfg = McConfig(args.samples or 100_000, args.seed)
            reports.append(mc_moment(coeffs, p, weight, cfg))
        else:
            reports.append(exact_moment(coeffs, p, weight, n_max=args.n_max))
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "moments",
        "coefficients": coeffs.texts,
        "weight": weight.to_json() if weight else None,
        "seed": args.seed if args.mc else None,
        "reports": [r.to_json() for r in reports],
    }
    _emit(args, doc, [r.to_json() for r in reports])
    return 0


def cmd_constants(args) -> int:
    if args.q is not None:
        q = float(to_decimal(args.q))
        if not q >= 2:
            raise DomainError(f"B_q needs q >= 2, got {args.q}")
        quantity, inputs, values = "haagerup_Bq", {"q": args.q}, {"B_q": _g12(haagerup_Bq(q))}
    elif args.beta is not None:
        a = float(to_decimal(args.beta))
        quantity, inputs = "refined_threshold", {"a": args.beta}
        values = {"beta": _g12(l0_tail_threshold_refined(a)), "classic": _g12((1 - a * a) ** 2 / 3)}
    elif args.limit_check:
        z = zero_mass_threshold()
        quantity, inputs = "limit_check", {"q": _g12(z.q_check)}
        values = {"B_q^(-2q/(q-2))": _g12(z.numeric_limit_check), "2e^(-2+gamma)": _g12(z.limit),
                  "abs_diff": _g12(abs(z.numeric_limit_check - z.limit))}
    else:
        z = zero_mass_threshold()
        quantity, inputs = "zero_mass", {}
        values = {"1-2e^(-2+gamma)": _g12(z.exact), "2e^(-2+gamma)": _g12(euler_limit())}
    doc = {"schema_version": SCHEMA_VERSION, "kind": "constants", "quantity": quantity,
           "inputs": inputs, "values": values}
    _emit(args, doc)
    return 0


def cmd_extract(args) -> int:
    weight = read_weight(args.weight)
    report = extract_constants(weight, args.p, args.q, args.mode)
    doc = {"schema_version": SCHEMA_VERSION, "kind": "extract", "weight": weight.to_json(),
           "report": report.to_json()}
    _emit(args, doc)
    return 0


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise DomainError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    gen = CaseGenerator(args.seed)
    report = run_suite(gen, args.suite, args.cases, args.mode)
    doc = {"schema_version": SCHEMA_VERSION, "kind": "verify", "report": report.to_json()}
    row = {k: v for k, v in report.to_json().items() if k != "failures"}
    row["failure_count"] = len(report.failures)
    _emit(args, doc, [row])
    return 0 if report.ok else EXIT_FAILURES


def cmd_counterexample(args) -> int:
    doc = {"schema_version": SCHEMA_VERSION, "kind": "counterexample",
           "report": counterexample_demo().to_json()}
    _emit(args, doc)
    return 0


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="khinlab", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "human"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", parents=[common], help="E|w xi|^p, exact or Monte Carlo")
    p.add_argument("coeffs", help="coefficient file ('-' for stdin)")
    p.add_argument("--p", action="append", required=True, help="exponent(s); repeat or comma-separate")
    p.add_argument("--weight", help="WeightSpec JSON file")
    how = p.add_mutually_exclusive_group()
    how.add_argument("--exact", action="store_true", help="enumerate all sign patterns (default)")
    how.add_argument("--mc", action="store_true", help="Monte Carlo estimate")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--n-max", type=int, help="enumeration cap (default KHINLAB_NMAX or 26)")
    p.set_defaults(func=cmd_moments)

    c = sub.add_parser("constants", parents=[common], help="B_q and zero-mass constants")
    which = c.add_mutually_exclusive_group()
    which.add_argument("--q", help="print B_q")
    which.add_argument("--beta", metavar="A", help="print the refined tail threshold at level A")
    which.add_argument("--limit-check", action="store_true")
    which.add_argument("--zero-mass", action="store_true")
    c.set_defaults(func=cmd_constants)

    e = sub.add_parser("extract", parents=[common], help="explicit weighted Khintchine constants")
    e.add_argument("--weight", required=True)
    e.add_argument("--p", required=True)
    e.add_argument("--q", required=True)
    e.add_argument("--mode", choices=("classic", "refined"), default="classic")
    e.set_defaults(func=cmd_extract)

    v = sub.add_parser("verify", parents=[common], help="run a property suite")
    v.add_argument("--suite", required=True)
    v.add_argument("--cases", type=_nonneg_int, default=200)
    v.add_argument("--seed", type=_nonneg_int, default=0)
    v.add_argument("--mode", choices=("classic", "refined"))
    v.set_defaults(func=cmd_verify)

    x = sub.add_parser("counterexample", parents=[common], help="sharpness counterexample")
    x.set_defaults(func=cmd_counterexample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except BelowThreshold as exc:
        print(f"khinlab: {exc}", file=sys.stderr)
        return EXIT_THRESHOLD
    except DimensionTooLarge as exc:
        print(f"khinlab: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except (KhinlabError, ValueError) as exc:
        print(f"khinlab: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
