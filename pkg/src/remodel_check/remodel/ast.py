"""Syntax tree for the REModel subset we read.

Spans are carried for diagnostics but excluded from equality, so a parsed
model compares equal to the parse of its pretty-printed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int = 0
    end_col: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NO_SPAN = Span(0, 0)


def _span():
    return field(default=NO_SPAN, compare=False, repr=False)


# --------------------------------------------------------------------------
# Types as written in the model


@dataclass(frozen=True)
class TypeRef:
    name: str
    # Set(T), Sequence(T), ... carry the element type
    element: Optional["TypeRef"] = None
    enum_values: Tuple[str, ...] = ()

    def __str__(self) -> str:
        if self.element is not None:
            return f"{self.name}({self.element})"
        if self.enum_values:
            return f"{self.name}[{'|'.join(self.enum_values)}]"
        return self.name


# --------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class Name:
    id: str
    span: Span = _span()


@dataclass(frozen=True)
class Self:
    span: Span = _span()


@dataclass(frozen=True)
class Literal:
    value: object
    kind: str  # "int" | "real" | "string" | "bool" | "null"
    span: Span = _span()


@dataclass(frozen=True)
class EnumLiteral:
    enum: str
    value: str
    span: Span = _span()


@dataclass(frozen=True)
class Property:
    target: "Expr"
    name: str
    at_pre: bool = False
    span: Span = _span()


@dataclass(frozen=True)
class Call:
    """``target.name(args)``; ``target`` is None for a bare function call."""

    target: Optional["Expr"]
    name: str
    args: Tuple["Expr", ...] = ()
    at_pre: bool = False
    span: Span = _span()


@dataclass(frozen=True)
class Iterator:
    name: str
    type: Optional[TypeRef] = None


@dataclass(frozen=True)
class CollectionCall:
    """``target->op(...)``, either with arguments or with an iterator body."""

    target: "Expr"
    op: str
    args: Tuple["Expr", ...] = ()
    iterator: Optional[Iterator] = None
    body: Optional["Expr"] = None
    span: Span = _span()


@dataclass(frozen=True)
class Unary:
    op: str  # "not" | "-"
    operand: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class LetBinding:
    name: str
    type: Optional[TypeRef]
    init: Optional["Expr"] = None


@dataclass(frozen=True)
class Let:
    bindings: Tuple[LetBinding, ...]
    body: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class If:
    cond: "Expr"
    then: "Expr"
    else_: Optional["Expr"] = None
    span: Span = _span()


@dataclass(frozen=True)
class Opaque:
    """Source text we could not parse; kept so the rest of the file is checkable."""

    text: str
    span: Span = _span()


Expr = Union[Name, Self, Literal, EnumLiteral, Property, Call, CollectionCall, Unary,
             Binary, Let, If, Opaque]


# --------------------------------------------------------------------------
# Declarations


@dataclass(frozen=True)
class Param:
    name: str
    type: Optional[TypeRef] = None


@dataclass(frozen=True)
class OperationSig:
    name: str
    params: Tuple[str, ...] = ()


@dataclass(frozen=True)
class TempProperty:
    name: str
    type: TypeRef
    span: Span = _span()


@dataclass(frozen=True)
class ServiceDecl:
    name: str
    operations: Tuple[OperationSig, ...] = ()
    temp_properties: Tuple[TempProperty, ...] = ()
    span: Span = _span()

    @property
    def is_system(self) -> bool:
        return self.name.endswith("System")


@dataclass(frozen=True)
class ActorDecl:
    name: str
    parent: Optional[str] = None
    use_cases: Tuple[str, ...] = ()
    description: Optional[str] = None
    span: Span = _span()


@dataclass(frozen=True)
class Definition:
    name: str
    type: TypeRef
    expr: Expr
    span: Span = _span()


@dataclass(frozen=True)
class ContractAst:
    service: str
    operation: str
    params: Tuple[Param, ...] = ()
    return_type: Optional[TypeRef] = None
    definitions: Tuple[Definition, ...] = ()
    precondition: Optional[Expr] = None
    postcondition: Optional[Expr] = None
    span: Span = _span()

    @property
    def qualified_name(self) -> str:
        return f"{self.service}::{self.operation}"


@dataclass(frozen=True)
class ModelAst:
    services: Tuple[ServiceDecl, ...] = ()
    actors: Tuple[ActorDecl, ...] = ()
    contracts: Tuple[ContractAst, ...] = ()
    ignored: Tuple[Span, ...] = field(default=(), compare=False)
    warnings: Tuple["Diagnostic", ...] = field(default=(), compare=False)

    def service(self, name: str) -> Optional[ServiceDecl]:
        return next((s for s in self.services if s.name == name), None)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning" | "note"
    message: str
    span: Span = NO_SPAN
    source: str = "<input>"
    code: str = ""

    def __str__(self) -> str:
        return f"{self.source}:{self.span.line}:{self.span.col}: {self.severity}: {self.message}"

    def to_json(self) -> dict:
        return {"file": self.source, "line": self.span.line, "col": self.span.col,
                "severity": self.severity, "code": self.code, "message": self.message}
