"""Pretty-printer producing REModel text that parses back to an equal tree."""

from __future__ import annotations

import json
from typing import List, Optional

from .ast import (
    ActorDecl, Binary, Call, CollectionCall, ContractAst, EnumLiteral, Expr, If, Let,
    Literal, ModelAst, Name, Opaque, Property, Self, ServiceDecl, Unary,
)


def _atomic(e: Expr) -> bool:
    return not isinstance(e, (Binary, Unary, Let, If, Opaque))


_PREC = {"implies": 1, "xor": 2, "or": 3, "and": 4, "=": 5, "<>": 5, "<": 6, ">": 6,
         "<=": 6, ">=": 6, "+": 7, "-": 7, "*": 8, "/": 8, "div": 8, "mod": 8}


def _prec(e: Expr) -> int:
    # unary operators bind tighter than any binary one
    if isinstance(e, Binary):
        return _PREC[e.op]
    return 9 if isinstance(e, Unary) else 0


def _wrap(e: Expr) -> str:
    text = format_expr(e)
    return text if _atomic(e) else f"({text})"


def _literal(e: Literal) -> str:
    if e.kind == "bool":
        return "true" if e.value else "false"
    if e.kind == "null":
        return "null"
    if e.kind == "string":
        return json.dumps(e.value)
    return repr(e.value)


def format_expr(e: Expr) -> str:
    if isinstance(e, Name):
        return e.id
    if isinstance(e, Self):
        return "self"
    if isinstance(e, Literal):
        return _literal(e)
    if isinstance(e, EnumLiteral):
        return f"{e.enum}::{e.value}"
    if isinstance(e, Property):
        return f"{_wrap(e.target)}.{e.name}" + ("@pre" if e.at_pre else "")
    if isinstance(e, Call):
        args = ", ".join(format_expr(a) for a in e.args)
        head = f"{_wrap(e.target)}." if e.target is not None else ""
        return f"{head}{e.name}({args})" + ("@pre" if e.at_pre else "")
    if isinstance(e, CollectionCall):
        if e.iterator is not None:
            it = e.iterator.name
            if e.iterator.type is not None:
                it += f" : {e.iterator.type}"
            inner = f"{it} | {format_expr(e.body)}"
        else:
            inner = ", ".join(format_expr(a) for a in e.args)
        return f"{_wrap(e.target)}->{e.op}({inner})"
    if isinstance(e, Unary):
        sep = " " if e.op == "not" else ""
        return f"{e.op}{sep}{_wrap(e.operand)}"
    if isinstance(e, Binary):
        prec = _PREC[e.op]
        left = format_expr(e.left)
        if not (_atomic(e.left) or _prec(e.left) >= prec):
            left = f"({left})"
        right = format_expr(e.right)
        if not (_atomic(e.right) or _prec(e.right) > prec):
            right = f"({right})"
        return f"{left} {e.op} {right}"
    if isinstance(e, Let):
        parts = []
        for b in e.bindings:
            text = b.name
            if b.type is not None:
                text += f" : {b.type}"
            if b.init is not None:
                text += f" = {_wrap(b.init)}"
            parts.append(text)
        return f"let {', '.join(parts)} in {format_expr(e.body)}"
    if isinstance(e, If):
        text = f"if {format_expr(e.cond)} then {format_expr(e.then)}"
        if e.else_ is not None:
            text += f" else {format_expr(e.else_)}"
        return text + " endif"
    if isinstance(e, Opaque):
        return e.text
    raise TypeError(f"not an expression: {e!r}")


def _service(s: ServiceDecl) -> List[str]:
    lines = [f"Service {s.name} {{"]
    if s.operations:
        lines.append("\t[Operation]")
        for op in s.operations:
            lines.append(f"\t{op.name}({', '.join(op.params)})")
    if s.temp_properties:
        lines.append("\t[TempProperty]")
        for p in s.temp_properties:
            lines.append(f"\t{p.name} : {p.type}")
    lines.append("}")
    return lines


def _actor(a: ActorDecl) -> List[str]:
    head = f"Actor {a.name}" + (f" extends {a.parent}" if a.parent else "")
    lines = [head + " {"]
    if a.description is not None:
        lines.append(f"\t@Description({json.dumps(a.description)})")
    lines.extend(f"\t{u}" for u in a.use_cases)
    lines.append("}")
    return lines


def _section(keyword: str, e: Optional[Expr]) -> List[str]:
    return [] if e is None else [f"\t{keyword}:", f"\t\t{format_expr(e)}"]


def _contract(c: ContractAst) -> List[str]:
    params = ", ".join(p.name + (f" : {p.type}" if p.type else "") for p in c.params)
    head = f"Contract {c.qualified_name}({params})"
    if c.return_type is not None:
        head += f" : {c.return_type}"
    lines = [head + " {"]
    if c.definitions:
        lines.append("\tdefinition:")
        defs = [f"\t\t{d.name} : {d.type} = {format_expr(d.expr)}" for d in c.definitions]
        lines.append(",\n".join(defs))
    lines += _section("precondition", c.precondition)
    lines += _section("postcondition", c.postcondition)
    lines.append("}")
    return lines


def format_model(model: ModelAst) -> str:
    blocks = ([_service(s) for s in model.services] + [_actor(a) for a in model.actors]
              + [_contract(c) for c in model.contracts])
    return "\n\n".join("\n".join(b) for b in blocks) + "\n"
