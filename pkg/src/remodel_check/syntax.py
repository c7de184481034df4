"""Canonical text form of type expressions.

    [recv; yld]      coroutine
    <a, b>           sequence
    (a, b)           product
    Void
    T^5  T^*  T^n    lists
    t / x <: User    constrained
    t / (x, y) notin {(John, Sue), (Jane, Sue)}
    t / x notin {John, Sam} and y <: User

Identifiers starting with a lowercase letter are variables.
"""

from __future__ import annotations

import re
from typing import List, Tuple

from .typeexpr import (
    STAR, Concrete, Conjunction, Constrained, Coroutine, ListOf, NotInSet, Product,
    Sequence, SubtypeOf, TypeExpr, Variable, Void, is_void, normalize,
)


class TypeSyntaxError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int = 0):
        super().__init__(f"{message} at offset {pos}" if text else message)
        self.pos = pos


class FixtureError(TypeSyntaxError):
    """A fixture line that does not parse; ``line``/``col`` are 1-based."""

    def __init__(self, source: str, line: int, col: int, detail: str):
        super().__init__(f"{source}:{line}:{col}: {detail}")
        self.source, self.line, self.col, self.detail = source, line, col, detail


# --------------------------------------------------------------------------
# Printing


def format_type(t: TypeExpr) -> str:
    if is_void(t):
        return "Void"
    if isinstance(t, (Concrete, Variable)):
        return t.name
    if isinstance(t, Sequence):
        return "<" + ", ".join(format_type(i) for i in t.items) + ">"
    if isinstance(t, Product):
        return "(" + ", ".join(format_type(i) for i in t.items) + ")"
    if isinstance(t, Coroutine):
        return f"[{format_type(t.receive)}; {format_type(t.yield_)}]"
    if isinstance(t, ListOf):
        element = format_type(t.element)
        if isinstance(t.element, Constrained):
            element = f"({element})"
        length = "*" if t.length is STAR else str(t.length)
        return f"{element}^{length}"
    if isinstance(t, Constrained):
        return f"{format_type(t.base)} / {format_predicate(t.predicate)}"
    raise TypeError(f"not a type expression: {t!r}")


def format_predicate(p) -> str:
    if isinstance(p, SubtypeOf):
        return f"{p.var} <: {p.upper}"
    if isinstance(p, NotInSet):
        if len(p.vars) == 1:
            rows = ", ".join(row[0] for row in p.excluded)
            return f"{p.vars[0]} notin {{{rows}}}"
        rows = ", ".join("(" + ", ".join(row) + ")" for row in p.excluded)
        return "(" + ", ".join(p.vars) + f") notin {{{rows}}}"
    return " and ".join(format_predicate(part) for part in p.parts)


# --------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(r"\s*(?:(<:)|([A-Za-z_][A-Za-z0-9_]*)|(\d+)|(.))")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1):
            tokens.append(("op", "<:", m.start(1)))
        elif m.group(2):
            tokens.append(("id", m.group(2), m.start(2)))
        elif m.group(3):
            tokens.append(("num", m.group(3), m.start(3)))
        elif m.group(4):
            tokens.append(("op", m.group(4), m.start(4)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, offset: int = 0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str):
        raise TypeSyntaxError(message, self.text, self.peek()[2])

    def expect(self, value: str):
        tok = self.next()
        if tok[1] != value or tok[0] == "eof":
            self.i -= 1
            self.error(f"expected {value!r}, found {tok[1]!r}")
        return tok

    def at(self, value: str) -> bool:
        tok = self.peek()
        return tok[0] != "eof" and tok[1] == value

    def type_(self) -> TypeExpr:
        t = self.postfix()
        if self.at("/"):
            self.next()
            t = Constrained(t, self.predicate())
        return t

    def postfix(self) -> TypeExpr:
        t = self.atom()
        while self.at("^"):
            self.next()
            tok = self.next()
            if tok[1] == "*":
                t = ListOf(t, STAR)
            elif tok[0] == "num":
                t = ListOf(t, int(tok[1]))
            elif tok[0] == "id" and tok[1][0].islower():
                t = ListOf(t, tok[1])
            else:
                self.i -= 1
                self.error("expected list length")
        return t

    def _items(self, close: str) -> Tuple[TypeExpr, ...]:
        items = []
        if not self.at(close):
            items.append(self.type_())
            while self.at(","):
                self.next()
                items.append(self.type_())
        self.expect(close)
        return tuple(items)

    def atom(self) -> TypeExpr:
        kind, value, _ = self.peek()
        if value == "[" and kind == "op":
            self.next()
            receive = self.type_()
            self.expect(";")
            yield_ = self.type_()
            self.expect("]")
            return Coroutine(receive, yield_)
        if value == "<" and kind == "op":
            self.next()
            return Sequence(self._items(">"))
        if value == "(" and kind == "op":
            self.next()
            items = self._items(")")
            # a parenthesised single constrained type is grouping, not a 1-tuple
            if len(items) == 1 and isinstance(items[0], Constrained):
                return items[0]
            return Product(items)
        if kind == "id":
            self.next()
            if value == "Void":
                return Void
            if value[0].islower() or value[0] == "_":
                return Variable(value)
            return Concrete(value)
        self.error(f"unexpected {value!r}" if kind != "eof" else "unexpected end of input")

    def predicate(self):
        parts = [self.predicate_atom()]
        while self.at("and"):
            self.next()
            parts.append(self.predicate_atom())
        return parts[0] if len(parts) == 1 else Conjunction(tuple(parts))

    def _name(self) -> str:
        tok = self.next()
        if tok[0] != "id":
            self.i -= 1
            self.error("expected identifier")
        return tok[1]

    def predicate_atom(self):
        if self.at("("):
            self.next()
            names = [self._name()]
            while self.at(","):
                self.next()
                names.append(self._name())
            self.expect(")")
            self.expect("notin")
            self.expect("{")
            rows = []
            if not self.at("}"):
                rows.append(self._row(len(names)))
                while self.at(","):
                    self.next()
                    rows.append(self._row(len(names)))
            self.expect("}")
            return NotInSet(tuple(names), tuple(dict.fromkeys(rows)))
        var = self._name()
        if self.at("<:"):
            self.next()
            return SubtypeOf(var, self._name())
        self.expect("notin")
        self.expect("{")
        rows = []
        if not self.at("}"):
            rows.append((self._name(),))
            while self.at(","):
                self.next()
                rows.append((self._name(),))
        self.expect("}")
        return NotInSet((var,), tuple(dict.fromkeys(rows)))

    def _row(self, arity: int) -> Tuple[str, ...]:
        self.expect("(")
        row = [self._name()]
        while self.at(","):
            self.next()
            row.append(self._name())
        self.expect(")")
        if len(row) != arity:
            self.error(f"expected a {arity}-tuple")
        return tuple(row)


def parse_type(text: str, *, normalized: bool = True) -> TypeExpr:
    p = _Parser(text)
    t = p.type_()
    if p.peek()[0] != "eof":
        p.error(f"trailing input {p.peek()[1]!r}")
    return normalize(t) if normalized else t


# --------------------------------------------------------------------------
# Fixture files: one ``name: <type>`` per line


def parse_fixture(text: str, source: str = "<fixture>") -> List[Tuple[str, TypeExpr]]:
    entries: List[Tuple[str, TypeExpr]] = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0].split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, rest = line.partition(":")
        name = name.strip()
        if not sep or not re.fullmatch(r"[A-Za-z_][\w.]*", name):
            raise FixtureError(source, lineno, 1, "expected 'name: type'")
        if name in seen:
            raise FixtureError(source, lineno, 1, f"duplicate name {name!r}")
        seen.add(name)
        try:
            entries.append((name, parse_type(rest)))
        except TypeSyntaxError as exc:
            col = raw.index(":") + 2 + exc.pos
            raise FixtureError(source, lineno, col, str(exc).rsplit(" at offset ", 1)[0]) from None
    return entries


def format_fixture(entries) -> str:
    return "".join(f"{name}: {format_type(t)}\n" for name, t in entries)
