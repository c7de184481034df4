"""Identifier environment built from Service and Actor blocks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

from ..typeexpr import STAR, Concrete, ListOf, TypeExpr
from .ast import ContractAst, Diagnostic, ModelAst, TypeRef

# OCL collection constructors; all map to T^*
COLLECTIONS = ("Set", "Sequence", "Bag", "OrderedSet", "Collection")


class SymbolError(Exception):
    def __init__(self, diagnostics: List[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


def type_of_ref(ref: TypeRef) -> TypeExpr:
    """Map a declared type to a type expression; ``Set(T)`` becomes ``T^*``."""
    if ref.element is not None and ref.name in COLLECTIONS:
        return ListOf(type_of_ref(ref.element), STAR)
    return Concrete(ref.name)


@dataclass(frozen=True)
class TypeEnv:
    # field name -> type named after the field
    gamma: Mapping[str, TypeExpr]
    hierarchy: Mapping[str, str]
    system_fields: FrozenSet[str]
    service_fields: Mapping[str, FrozenSet[str]]
    # field name -> declared class, kept for diagnostics only
    field_classes: Mapping[str, TypeRef] = field(default_factory=dict)
    warnings: Tuple[Diagnostic, ...] = ()

    def fields_for(self, service: str) -> FrozenSet[str]:
        return self.system_fields | self.service_fields.get(service, frozenset())

    def scope_for(self, contract: ContractAst) -> Dict[str, TypeExpr]:
        """Gamma as seen from inside one contract, before definitions and lets."""
        visible = self.fields_for(contract.service)
        scope = {name: self.gamma[name] for name in visible}
        for p in contract.params:
            if p.type is not None:
                scope[p.name] = type_of_ref(p.type)
        return scope

    def has_children(self, name: str) -> bool:
        return name in self.hierarchy.values()


def collect_symbols(model: ModelAst, source: str = "<input>") -> TypeEnv:
    errors: List[Diagnostic] = []
    warnings: List[Diagnostic] = []

    seen_services: Dict[str, object] = {}
    for s in model.services:
        if s.name in seen_services:
            errors.append(Diagnostic("error", f"duplicate service {s.name!r}", s.span, source))
        seen_services[s.name] = s

    gamma: Dict[str, TypeExpr] = {}
    classes: Dict[str, TypeRef] = {}
    service_fields: Dict[str, FrozenSet[str]] = {}
    system: set = set()
    for s in model.services:
        names = set()
        for p in s.temp_properties:
            # fields are typed by their own name, not their class
            gamma[p.name] = Concrete(p.name)
            classes[p.name] = p.type
            names.add(p.name)
        service_fields[s.name] = frozenset(names)
        if s.is_system:
            system |= names

    actors = {}
    for a in model.actors:
        if a.name in actors:
            errors.append(Diagnostic("error", f"duplicate actor {a.name!r}", a.span, source))
        actors[a.name] = a
    hierarchy: Dict[str, str] = {}
    for a in model.actors:
        if a.parent is None:
            continue
        if a.parent not in actors:
            errors.append(Diagnostic("error", f"actor {a.name!r} extends unknown actor {a.parent!r}",
                                     a.span, source))
            continue
        hierarchy[a.name] = a.parent
    for a in model.actors:
        cycle = _cycle_from(a.name, hierarchy)
        if cycle and cycle[0] == a.name:
            errors.append(Diagnostic("error", "inheritance cycle: " + " -> ".join(cycle),
                                     a.span, source))

    for c in model.contracts:
        if c.service not in seen_services:
            warnings.append(Diagnostic("warning", f"contract {c.qualified_name} names undeclared "
                                       f"service {c.service!r}", c.span, source))
        params = {p.name for p in c.params}
        for d in c.definitions:
            if d.name in params:
                warnings.append(Diagnostic("warning", f"definition {d.name!r} shadows a parameter "
                                           f"of {c.qualified_name}", d.span, source))

    if errors:
        raise SymbolError(errors)
    return TypeEnv(gamma, hierarchy, frozenset(system), service_fields, classes, tuple(warnings))


def _cycle_from(name: str, hierarchy: Mapping[str, str]) -> Optional[List[str]]:
    path = [name]
    current = name
    while current in hierarchy:
        current = hierarchy[current]
        if current in path:
            return path[path.index(current):] + [current]
        path.append(current)
    return None
