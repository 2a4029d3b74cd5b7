"""Command-line driver: ``achcr validate|solve|verify|sphere-coeff``.

Exit codes: 0 ok, 2 invalid input, 3 solver assertion or failed identity
check, 4 unreadable input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Sequence

from .errors import BadParameter, ParseError, SolverError, ValidationError
from .frame import validate
from .report import ALL_CHECKS, dumps, load_input, solve_report, verify_report
from .scalar import as_mpq, q_str
from .sphere import closed_form, leading_recursion

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_VALIDATION", "EXIT_SOLVER", "EXIT_PARSE"]

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_PARSE = 4


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="achcr", description="Exact ACH-Einstein expansions over invariant CR structures.")
    sub = p.add_subparsers(dest="command", required=True)

    def add_input(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("source", nargs="?", help="AlgebraDocument path or builtin:<name>")
        sp.add_argument("--input", dest="input", help="same as the positional argument")
        sp.add_argument("--output", help="write the JSON report here instead of stdout")

    sp = sub.add_parser("validate", help="check the axioms of an algebra document")
    add_input(sp)

    sp = sub.add_parser("solve", help="run the full pipeline and report phi, O, E, u, v")
    add_input(sp)
    sp.add_argument("--truncation", type=int, help="number of rho-degrees kept (default 2n+6)")
    sp.add_argument("--timing", action="store_true", help="include wall time (makes output nondeterministic)")

    sp = sub.add_parser("verify", help="run identity suites")
    add_input(sp)
    sp.add_argument("--truncation", type=int)
    sp.add_argument("--checks", default="all", help=f"comma list from {', '.join(ALL_CHECKS)} or 'all'")
    sp.add_argument("--lambda", dest="lam", default="4", help="rescaling factor for the scaling check")
    sp.add_argument("--timing", action="store_true")

    sp = sub.add_parser("sphere-coeff", help="leading variation coefficients at the sphere")
    sp.add_argument("--n", type=int, required=True)
    return p


def _source(args: argparse.Namespace) -> str:
    if args.source and args.input and args.source != args.input:
        raise ParseError("give the input either positionally or with --input, not both")
    ref = args.source or args.input
    if not ref:
        raise ParseError("no input given")
    return ref


def _emit(report: dict[str, Any], output: str | None) -> None:
    text = dumps(report)
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _truncation(args: argparse.Namespace, options: dict[str, Any]) -> int | None:
    if args.truncation is not None:
        return args.truncation
    t = options.get("truncation")
    if t is not None and (not isinstance(t, int) or isinstance(t, bool)):
        raise ParseError("'options.truncation' must be an integer")
    return t


def _checks(args: argparse.Namespace, options: dict[str, Any]) -> list[str]:
    raw = args.checks
    if raw == "all" and "checks" in options:
        raw = options["checks"]
        if isinstance(raw, list):
            raw = ",".join(raw)
    if raw == "all":
        return list(ALL_CHECKS)
    return [c.strip() for c in str(raw).split(",") if c.strip()]


def cmd_validate(args: argparse.Namespace) -> int:
    algebra, _ = load_input(_source(args))
    rep = validate(algebra)
    _emit({"input": algebra.to_document(), "validation": rep.to_json()}, args.output)
    return EXIT_OK if rep.ok else EXIT_VALIDATION


def cmd_solve(args: argparse.Namespace) -> int:
    algebra, options = load_input(_source(args))
    report = solve_report(algebra, _truncation(args, options), timing=args.timing)
    _emit(report, args.output)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    algebra, options = load_input(_source(args))
    try:
        lam = as_mpq(args.lam)
    except (TypeError, ParseError) as exc:
        raise ValidationError(f"--lambda must be a positive rational: {exc}") from exc
    if lam <= 0:
        raise ValidationError("--lambda must be a positive rational")
    report = verify_report(algebra, _checks(args, options), lam, _truncation(args, options), timing=args.timing)
    _emit(report, args.output)
    return EXIT_OK if report["ok"] else EXIT_SOLVER


def cmd_sphere_coeff(args: argparse.Namespace) -> int:
    n = args.n
    if not 1 <= n <= 8:
        raise BadParameter("--n must lie in 1..8")
    rec = leading_recursion(n)
    for l, c in enumerate(rec.c, start=1):
        print(f"c_{l} = {_plain(c)}")
    ok = rec.a == closed_form(n)
    print(f"a_{n + 1} = {_plain(rec.a)}  {'OK' if ok else 'MISMATCH (closed form ' + _plain(closed_form(n)) + ')'}")
    return EXIT_OK if ok else EXIT_SOLVER


def _plain(x: Any) -> str:
    return str(x.numerator) if x.denominator == 1 else q_str(x)


COMMANDS = {
    "validate": cmd_validate,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "sphere-coeff": cmd_sphere_coeff,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"achcr: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"achcr: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverError as exc:
        print(f"achcr: solver error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
