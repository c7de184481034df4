"""``remodel-check`` command line.

Exit codes: 0 ok, 1 parse/usage/strict failure, 2 deadlock, 3 fuel exhausted,
4 yielding order differs from the expected one.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, TextIO

from .composer import CompositionError, CompositionResult, Outcome
from .pipeline import (
    LoadError, Loaded, SelectionError, compare_order, compose_loaded, last_as_tuple,
    load_path, parse_groups, read_expected_order,
)
from .syntax import format_type
from .typeexpr import TypeExprError
from .typer import UNKNOWN_IDENTIFIER

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DEADLOCK = 2
EXIT_FUEL = 3
EXIT_ORDER = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors share the parse-error code
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="remodel-check",
                     description="Type REModel contracts as coroutines and compose them.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("file", type=Path, help=".remodel model, or a 'name: type' fixture file")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    def composing(p):
        p.add_argument("--select", help="comma-separated names to compose, in order")
        p.add_argument("--group", default="", help='tuples composed as a unit, e.g. "(a,b)(c,d)"')
        p.add_argument("--last", help="comma-separated clean-up names composed after a tuple "
                       "of all the others")
        p.add_argument("--fuel", type=int, default=None, help="step budget for composition")
        p.add_argument("--expected-order", type=Path, help="file with one name per line")
        p.add_argument("--trace", action="store_true", help="print every rewrite step")

    p_type = sub.add_parser("type", help="print the coroutine type of every contract")
    common(p_type)
    p_type.add_argument("--strict", action="store_true", help="unknown identifiers are errors")

    p_compose = sub.add_parser("compose", help="compose contract types")
    common(p_compose)
    composing(p_compose)

    p_check = sub.add_parser("check", help="parse, type and compose; exit 0 if consistent")
    common(p_check)
    composing(p_check)
    p_check.add_argument("--strict", action="store_true", help="unknown identifiers are errors")
    return parser


# ----------------------------------------------------------------------------


def _type_lines(loaded: Loaded) -> List[str]:
    return [f"{name}: {format_type(c.coroutine)}"
            for name, c in zip(loaded.names, loaded.contracts)]


def _notes(loaded: Loaded):
    out = list(loaded.warnings)
    for c in loaded.contracts:
        out.extend(c.notes)
    return out


def _strict_failures(loaded: Loaded):
    return [n for n in _notes(loaded) if n.code == UNKNOWN_IDENTIFIER]


def _types_json(loaded: Loaded) -> list:
    return [{"name": name, "contract": c.name, "type": format_type(c.coroutine),
             "notes": [n.to_json() for n in c.notes]}
            for name, c in zip(loaded.names, loaded.contracts)]


def _composition_lines(result: CompositionResult, trace: bool) -> List[str]:
    lines = []
    if trace:
        lines.extend(f"  {event}" for event in result.trace)
    lines.append(f"composed: {format_type(result.result)}")
    lines.append(f"outcome: {result.outcome.value}")
    lines.append("order: " + " -> ".join(result.order))
    lines.append("first: " + ", ".join(dict.fromkeys(result.order)))
    if result.pruned:
        lines.append("never activated: " + ", ".join(result.pruned))
    if result.remaining:
        lines.append("stuck: " + ", ".join(result.remaining))
    return lines


def _names(text: Optional[str]) -> List[str]:
    return [s.strip() for s in (text or "").split(",") if s.strip()]


def _exit_for(result: CompositionResult) -> int:
    if result.outcome is Outcome.DEADLOCK:
        return EXIT_DEADLOCK
    if result.outcome is Outcome.FUEL_EXHAUSTED:
        return EXIT_FUEL
    return EXIT_OK


def _emit_diagnostics(diagnostics, as_json: bool, out: TextIO, err: TextIO) -> None:
    if as_json:
        json.dump({"diagnostics": [d.to_json() for d in diagnostics]}, out, indent=2)
        out.write("\n")
    else:
        for d in diagnostics:
            err.write(f"{d}\n")


def run(argv: Optional[List[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)

    try:
        loaded = load_path(args.file)
    except OSError as exc:
        err.write(f"{args.file}: error: {exc.strerror or exc}\n")
        return EXIT_ERROR
    except LoadError as exc:
        _emit_diagnostics(exc.diagnostics, args.json, out, err)
        return EXIT_ERROR

    strict = getattr(args, "strict", False)
    report: dict = {"file": str(args.file), "contracts": _types_json(loaded),
                    "warnings": [w.to_json() for w in loaded.warnings]}
    text: List[str] = []
    status = EXIT_OK

    if args.command in ("type", "check"):
        text.extend(_type_lines(loaded))
        if strict and _strict_failures(loaded):
            status = EXIT_ERROR

    if args.command in ("compose", "check") and status == EXIT_OK:
        try:
            select = _names(args.select) or None
            groups = parse_groups(args.group)
            if args.last:
                select, groups = last_as_tuple(loaded, select, groups, _names(args.last))
            result = compose_loaded(loaded, select, groups, args.fuel)
        except (SelectionError, CompositionError, TypeExprError) as exc:
            err.write(f"{args.file}: error: {exc}\n")
            return EXIT_ERROR
        if text:
            text.append("")
        text.extend(_composition_lines(result, args.trace))
        report["composition"] = result.to_json()
        status = _exit_for(result)
        if args.expected_order is not None:
            try:
                expected = read_expected_order(args.expected_order)
            except OSError as exc:
                err.write(f"{args.expected_order}: error: {exc.strerror or exc}\n")
                return EXIT_ERROR
            ok, actual = compare_order(result.order, expected)
            report["expected_order"] = {"match": ok, "expected": expected, "actual": actual}
            if ok:
                text.append("expected order: match")
            else:
                text.append("expected order: MISMATCH")
                text.append("  expected: " + ", ".join(expected))
                text.append("  actual:   " + ", ".join(actual))
                if status == EXIT_OK:
                    status = EXIT_ORDER

    report["exit"] = status
    if args.json:
        json.dump(report, out, indent=2)
        out.write("\n")
    else:
        for line in text:
            out.write(line + "\n")
        for note in _notes(loaded):
            err.write(f"{note}\n")
    return status


def main(argv: Optional[List[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
