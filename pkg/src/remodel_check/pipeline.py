"""Glue between files on disk and the typer/composer."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .composer import CompositionResult, Group, NamedCoroutine, compose
from .remodel.ast import Diagnostic, Span
from .remodel.parser import ModelSyntaxError, parse_model
from .remodel.symbols import SymbolError, collect_symbols
from .syntax import FixtureError, parse_fixture
from .typeexpr import TypeExpr
from .typer import TypedContract, type_model


class LoadError(Exception):
    def __init__(self, diagnostics: List[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class SelectionError(ValueError):
    pass


@dataclass(frozen=True)
class Loaded:
    """Typed input ready for composition, from either a model or a fixture."""

    contracts: Tuple[TypedContract, ...]
    names: Tuple[str, ...]
    hierarchy: Mapping[str, str] = field(default_factory=dict)
    warnings: Tuple[Diagnostic, ...] = ()

    def entries(self) -> List[Tuple[str, TypeExpr]]:
        return [(n, c.coroutine) for n, c in zip(self.names, self.contracts)]


def display_names(qualified: Sequence[str]) -> List[str]:
    """Operation names where unique, ``Service::op`` otherwise."""
    short = [q.split("::", 1)[-1] for q in qualified]
    return [s if short.count(s) == 1 else q for s, q in zip(short, qualified)]


def load_model_text(text: str, source: str = "<input>") -> Loaded:
    try:
        model = parse_model(text, source)
        env = collect_symbols(model, source)
    except (ModelSyntaxError, SymbolError) as exc:
        raise LoadError(exc.diagnostics) from None
    typed = type_model(model, env, source)
    names = display_names([t.name for t in typed])
    return Loaded(tuple(typed), tuple(names), dict(env.hierarchy), model.warnings + env.warnings)


def load_fixture_text(text: str, source: str = "<fixture>") -> Loaded:
    try:
        entries = parse_fixture(text, source)
    except FixtureError as exc:
        raise LoadError([Diagnostic("error", exc.detail, Span(exc.line, exc.col), source)]) from None
    typed = tuple(TypedContract(name, t) for name, t in entries)
    return Loaded(typed, tuple(name for name, _ in entries))


def is_model_path(path: Path) -> bool:
    return path.suffix == ".remodel"


def load_path(path: Path) -> Loaded:
    text = path.read_text(encoding="utf-8")
    if is_model_path(path):
        return load_model_text(text, str(path))
    return load_fixture_text(text, str(path))


def parse_groups(text: str) -> List[List[str]]:
    """``"(a,b)(c,d)"`` to ``[["a", "b"], ["c", "d"]]``."""
    groups: List[List[str]] = []
    rest = text.strip()
    while rest:
        if not rest.startswith("("):
            raise SelectionError(f"bad group syntax near {rest!r}; expected '(name, ...)'")
        close = rest.find(")")
        if close < 0:
            raise SelectionError(f"unclosed group in {text!r}")
        names = [n.strip() for n in rest[1:close].split(",") if n.strip()]
        if not names:
            raise SelectionError("empty group")
        groups.append(names)
        rest = rest[close + 1:].lstrip(" ,")
    return groups


def arrange(entries: Sequence[Tuple[str, TypeExpr]], select: Optional[Sequence[str]] = None,
            groups: Sequence[Sequence[str]] = ()) -> list:
    """Build the composition input: pick entries, then fold groups into tuples.

    A group takes the place of its first member in the selected order.
    """
    table: Dict[str, TypeExpr] = {}
    for name, t in entries:
        table[name] = t
    order = list(select) if select else [name for name, _ in entries]
    for name in order:
        if name not in table:
            raise SelectionError(f"unknown name {name!r}")
    if len(set(order)) != len(order):
        raise SelectionError("a name is selected twice")
    owner: Dict[str, int] = {}
    for gi, members in enumerate(groups):
        for name in members:
            if name not in order:
                raise SelectionError(f"group member {name!r} is not selected")
            if name in owner:
                raise SelectionError(f"{name!r} appears in more than one group")
            owner[name] = gi
    items: list = []
    placed = set()
    for name in order:
        gi = owner.get(name)
        if gi is None:
            items.append(NamedCoroutine(name, table[name]))
        elif gi not in placed:
            placed.add(gi)
            members = groups[gi]
            label = "(" + ",".join(members) + ")"
            items.append(Group(label, tuple(NamedCoroutine(m, table[m]) for m in members)))
    return items


def last_as_tuple(loaded: Loaded, select: Optional[Sequence[str]],
                  groups: Sequence[Sequence[str]], last: Sequence[str]):
    """Wrap everything except ``last`` in one tuple so ``last`` runs at the end."""
    order = list(select) if select else list(loaded.names)
    missing = [n for n in last if n not in order]
    if missing:
        raise SelectionError(f"unknown name {missing[0]!r}")
    if groups:
        raise SelectionError("--last cannot be combined with --group")
    rest = [n for n in order if n not in last]
    return rest + list(last), ([rest] if rest else [])


def compose_loaded(loaded: Loaded, select: Optional[Sequence[str]] = None,
                   groups: Sequence[Sequence[str]] = (),
                   fuel: Optional[int] = None) -> CompositionResult:
    return compose(arrange(loaded.entries(), select, groups), loaded.hierarchy, fuel)


def read_expected_order(path: Path) -> List[str]:
    lines = path.read_text(encoding="utf-8").splitlines()
    return [ln.split("#", 1)[0].strip() for ln in lines if ln.split("#", 1)[0].strip()]


def compare_order(order: Sequence[str], expected: Sequence[str]) -> Tuple[bool, List[str]]:
    """Project first occurrences onto the expected names and compare."""
    wanted = set(expected)
    actual = [n for n in dict.fromkeys(order) if n in wanted]
    return actual == list(expected), actual
