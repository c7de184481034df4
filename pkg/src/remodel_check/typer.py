"""Contract typing: preconditions become receive parts, postconditions yield parts."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

from .remodel.ast import (
    NO_SPAN, Binary, Call, CollectionCall, ContractAst, Diagnostic, Expr, If, ModelAst, Name,
    Property, Self, Span, Unary,
)
from .remodel.conjuncts import let_bindings, to_conjuncts
from .remodel.symbols import TypeEnv, type_of_ref
from .typeexpr import (
    Concrete, Conjunction, Constrained, Coroutine, ListOf, Sequence, SubtypeOf, TypeExpr,
    Variable, Void, co, free_vars, normalize, seq,
)

Scope = Dict[str, TypeExpr]

# note codes
UNKNOWN_IDENTIFIER = "unknown-identifier"
CONDITIONAL = "conditional-postcondition"
UNTYPED_LET = "untyped-let"


@dataclass(frozen=True)
class TypedContract:
    name: str
    coroutine: TypeExpr
    notes: Tuple[Diagnostic, ...] = ()

    def to_json(self) -> dict:
        from .syntax import format_type
        return {"name": self.name, "type": format_type(self.coroutine),
                "notes": [n.to_json() for n in self.notes]}


class ContractTyper:
    """Per-contract state: the scope and the notes gathered while typing."""

    def __init__(self, contract: ContractAst, env: TypeEnv, source: str):
        self.contract = contract
        self.env = env
        self.source = source
        self.fields = env.fields_for(contract.service)
        self.scope: Scope = env.scope_for(contract)
        for d in contract.definitions:
            self.scope[d.name] = type_of_ref(d.type)
        self.notes: List[Diagnostic] = []

    def note(self, code: str, message: str, span: Span = NO_SPAN,
             severity: str = "warning") -> None:
        self.notes.append(Diagnostic(severity, f"{self.contract.qualified_name}: {message}",
                                     span, self.source, code))

    def bind_lets(self, e: Optional[Expr]) -> None:
        for b in let_bindings(e):
            if b.type is not None:
                self.scope[b.name] = type_of_ref(b.type)
            else:
                self.note(UNTYPED_LET, f"let variable {b.name!r} has no declared type", NO_SPAN)

    # -------------------------------------------------------------- lookups

    def lookup(self, e: Expr) -> TypeExpr:
        """Gamma applied to an identifier expression; anything else is empty."""
        if isinstance(e, Property) and isinstance(e.target, Self):
            ident = e.name
        elif isinstance(e, Name):
            ident = e.id
        else:
            return Void
        if ident in self.scope:
            return self.scope[ident]
        self.note(UNKNOWN_IDENTIFIER, f"unknown identifier {ident!r}", e.span, "note")
        return Void

    def field_name(self, e: Expr) -> Optional[str]:
        if isinstance(e, Property) and isinstance(e.target, Self):
            return e.name if e.name in self.fields else None
        if isinstance(e, Name) and e.id in self.fields:
            return e.id
        return None

    # -------------------------------------------------------------- rules

    @staticmethod
    def _all_instances(e: Expr, op: str) -> Optional[Expr]:
        """The ``x`` of ``T.allInstance()->op(x)``, when it is a bare identifier."""
        if (isinstance(e, CollectionCall) and e.op == op and e.iterator is None
                and len(e.args) == 1 and isinstance(e.target, Call)
                and e.target.name in ("allInstance", "allInstances")
                and isinstance(e.args[0], (Name, Property))):
            return e.args[0]
        return None

    def _membership(self, e: Expr) -> Optional[TypeExpr]:
        if isinstance(e, Unary) and e.op == "not":
            x = self._all_instances(e.operand, "excludes")
            if x is not None:
                return self.lookup(x)
        x = self._all_instances(e, "includes")
        if x is not None:
            return self.lookup(x)
        return None

    def required(self, e: Expr) -> TypeExpr:
        if isinstance(e, Unary) and e.op == "not":
            inner = e.operand
            if isinstance(inner, Call) and inner.name == "oclIsUndefined" and inner.target is not None:
                return self.lookup(inner.target)
        found = self._membership(e)
        return Void if found is None else found

    def added(self, e: Expr) -> TypeExpr:
        if isinstance(e, Call) and e.name == "oclIsNew" and e.target is not None:
            return self.lookup(e.target)
        if isinstance(e, Binary) and e.op == "=":
            name = self.field_name(e.left)
            if name is not None:
                return self.scope.get(name, Concrete(name))
        found = self._membership(e)
        return Void if found is None else found

    def deleted(self, e: Expr) -> TypeExpr:
        if isinstance(e, Call) and e.name == "oclIsUndefined" and e.target is not None:
            return self.lookup(e.target)
        x = self._all_instances(e, "excludes")
        return Void if x is None else self.lookup(x)

    # -------------------------------------------------------------- contract

    def run(self) -> TypedContract:
        c = self.contract
        self.bind_lets(c.precondition)
        t1 = [self.required(e) for e in to_conjuncts(c.precondition)]
        self.bind_lets(c.postcondition)
        t2: List[TypeExpr] = []
        t3: List[TypeExpr] = []
        for e in to_conjuncts(c.postcondition):
            if isinstance(e, If):
                self.note(CONDITIONAL, "conditional postcondition is not typed", e.span)
                continue
            t2.append(self.added(e))
            t3.append(self.deleted(e))
        receive = _dedup(_flat(t1))
        yield_ = _dedup(_remove(receive, _flat(t3)) + _flat(t2))
        return TypedContract(c.qualified_name, co(seq(*receive), seq(*yield_)), tuple(self.notes))


def _flat(parts: List[TypeExpr]) -> List[TypeExpr]:
    out: List[TypeExpr] = []
    for t in parts:
        t = normalize(t)
        if isinstance(t, Sequence):
            out.extend(t.items)
        elif t is not Void:
            out.append(t)
    return out


def _dedup(items: List[TypeExpr]) -> List[TypeExpr]:
    return list(dict.fromkeys(items))


def _remove(items: List[TypeExpr], removed: List[TypeExpr]) -> List[TypeExpr]:
    """Multiset difference; removing an absent element has no effect."""
    out = list(items)
    for r in removed:
        if r in out:
            out.remove(r)
    return out


def type_contract(contract: ContractAst, env: TypeEnv, source: str = "<input>") -> TypedContract:
    return ContractTyper(contract, env, source).run()


# ----------------------------------------------------------------------------
# Supertypes become constrained variables


def _fresh_names(taken) -> Iterator[str]:
    base = (chr(c) for c in range(ord("x"), ord("z") + 1))
    rest = (chr(c) for c in range(ord("a"), ord("x")))
    numbered = (f"x{i}" for i in itertools.count(1))
    return (n for n in itertools.chain(base, rest, numbered) if n not in taken)


def _replace(t: TypeExpr, mapping: Mapping[Concrete, Variable]) -> TypeExpr:
    if isinstance(t, Concrete):
        return mapping.get(t, t)
    if isinstance(t, Sequence):
        return Sequence(tuple(_replace(i, mapping) for i in t.items))
    if isinstance(t, Coroutine):
        return Coroutine(_replace(t.receive, mapping), _replace(t.yield_, mapping))
    if isinstance(t, ListOf):
        return ListOf(_replace(t.element, mapping), t.length)
    if isinstance(t, Constrained):
        return Constrained(_replace(t.base, mapping), t.predicate)
    return t


def lift_supertypes(typed: TypedContract, hierarchy: Mapping[str, str]) -> TypedContract:
    """Replace receive-part supertypes with variables bounded by that supertype."""
    t = typed.coroutine
    base = t.base if isinstance(t, Constrained) else t
    receive = base.receive
    items = receive.items if isinstance(receive, Sequence) else (receive,)
    parents = set(hierarchy.values())
    supers = [i for i in dict.fromkeys(items) if isinstance(i, Concrete) and i.name in parents]
    if not supers:
        return typed
    names = _fresh_names(free_vars(t))
    mapping = {s: Variable(next(names)) for s in supers}
    bounds = tuple(SubtypeOf(v.name, s.name) for s, v in mapping.items())
    predicate = bounds[0] if len(bounds) == 1 else Conjunction(bounds)
    lifted = Constrained(_replace(base, mapping), predicate)
    if isinstance(t, Constrained):
        lifted = Constrained(lifted, t.predicate)
    return TypedContract(typed.name, normalize(lifted), typed.notes)


def type_model(model: ModelAst, env: TypeEnv, source: str = "<input>") -> List[TypedContract]:
    return [lift_supertypes(type_contract(c, env, source), env.hierarchy) for c in model.contracts]
