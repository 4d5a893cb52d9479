"""Command line driver: parse, resolve, check, then evaluate or translate.

Exit codes: 0 success, 1 type or coverage error, 2 parse or resolve error,
3 usage error, 4 reduction budget exhausted. Diagnostics go to stderr, one
per line, as FILE:LINE:COL: error[Ennn]: message.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from . import pattern_ops
from .core import DataDecl, Signature, Term, pretty, pretty_pattern
from .diagnostics import (
    FuelError,
    LexError,
    ParseError,
    ResolveError,
    SitError,
    Warning,
)
from .evaluator import DEFAULT_FUEL, Fuel, normalize
from .frontend import Resolver, parse_expression, parse_file
from .translate import emit_general, synth_ctor_type, to_general
from .typecheck import TypeChecker

EXIT_OK = 0
EXIT_TYPE_ERROR = 1
EXIT_SYNTAX_ERROR = 2
EXIT_USAGE = 3
EXIT_FUEL = 4


@dataclass
class Options:
    file: str
    fuel: int = DEFAULT_FUEL
    trace_match: bool = False
    coverage: bool = True
    strict_row_fields: bool = False


@dataclass
class Checked:
    sig: Signature
    resolver: Resolver
    warnings: list[Warning]


def _trace(terms, pats, outcome) -> None:
    from .pattern_ops import Matched, Stuck

    lhs = ", ".join(pretty(t) for t in terms)
    rhs = ", ".join(pretty_pattern(p) for p in pats)
    match outcome:
        case Matched(sub):
            binds = ", ".join(f"{x.text} := {pretty(t)}" for x, t in sub.pairs)
            shown = f"matched {{{binds}}}"
        case Stuck(pos):
            shown = f"stuck at {pos}"
        case _:
            shown = "mismatch"
    print(f"match [{lhs}] ~ [{rhs}] -> {shown}", file=sys.stderr)


def _load(opts: Options) -> Checked:
    with open(opts.file, encoding="utf-8") as fh:
        text = fh.read()
    surface = parse_file(text, opts.file)
    resolver = Resolver()
    decls = resolver.run(surface)
    checker = TypeChecker(
        fuel_limit=opts.fuel, strict_row_fields=opts.strict_row_fields
    )
    sig = checker.check_signature(decls, coverage=opts.coverage)
    return Checked(sig, resolver, checker.warnings)


def _print_warnings(warnings: list[Warning]) -> None:
    for w in warnings:
        print(w.render(), file=sys.stderr)


def _classify(err: SitError) -> int:
    if isinstance(err, FuelError):
        return EXIT_FUEL
    if isinstance(err, (LexError, ParseError, ResolveError)):
        return EXIT_SYNTAX_ERROR
    return EXIT_TYPE_ERROR


def run(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="sit", description="Type check, evaluate, and translate .sit files."
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="source file (.sit)")
    common.add_argument(
        "--fuel", type=int, default=DEFAULT_FUEL, help="reduction step limit"
    )
    common.add_argument(
        "--trace-match",
        action="store_true",
        help="log every pattern matching call and its outcome",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", parents=[common], help="type check a file")
    p_check.add_argument(
        "--no-coverage", action="store_true", help="skip exhaustiveness checking"
    )
    p_check.add_argument(
        "--strict-fig6",
        dest="strict_row_fields",
        action="store_true",
        help="also check pattern-row constructor fields under the data "
        "telescope scope and report differences",
    )

    p_eval = sub.add_parser(
        "eval", parents=[common], help="normalize an expression in a checked file"
    )
    p_eval.add_argument("-e", "--expr", required=True, help="expression to evaluate")

    p_translate = sub.add_parser(
        "translate", parents=[common], help="print data declarations in GADT style"
    )
    p_translate.add_argument("-o", "--output", help="write to a file instead of stdout")

    p_ctor = sub.add_parser(
        "ctor-type", parents=[common], help="print a constructor's standalone type"
    )
    p_ctor.add_argument("ctor", help="constructor name")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    opts = Options(
        file=args.file,
        fuel=args.fuel,
        trace_match=args.trace_match,
        coverage=not getattr(args, "no_coverage", False),
        strict_row_fields=getattr(args, "strict_row_fields", False),
    )
    if opts.trace_match:
        pattern_ops.trace_hook = _trace
    try:
        return _dispatch(args, opts)
    except SitError as err:
        print(err.render(), file=sys.stderr)
        return _classify(err)
    except OSError as err:
        print(f"sit: {err}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if opts.trace_match:
            pattern_ops.trace_hook = None


def _dispatch(args, opts: Options) -> int:
    checked = _load(opts)
    _print_warnings(checked.warnings)
    if args.command == "check":
        return EXIT_OK
    if args.command == "eval":
        surface = parse_expression(args.expr)
        term: Term = checked.resolver.resolve_expression(surface)
        result = normalize(checked.sig, term, Fuel(opts.fuel))
        print(pretty(result))
        return EXIT_OK
    if args.command == "translate":
        chunks = [
            emit_general(to_general(checked.sig, decl))
            for decl in checked.sig.decls
            if isinstance(decl, DataDecl)
        ]
        text = "\n".join(chunks)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            print(text, end="")
        return EXIT_OK
    if args.command == "ctor-type":
        print(pretty(synth_ctor_type(checked.sig, args.ctor)))
        return EXIT_OK
    raise AssertionError(f"unhandled command {args.command}")


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
