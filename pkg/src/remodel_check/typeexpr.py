"""Coroutine type expressions: construction, normalization, head/tail, matching
and substitution.

All values are immutable; every function here is pure.  A binding set is a
plain ``dict`` mapping variable names to a :data:`TypeExpr` (or an ``int`` /
:data:`STAR` for list-length variables).  Match failure is ``None``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple, Union


class TypeExprError(Exception):
    """Raised when a type operation is applied outside its domain.

    Signals an internal rule misapplication, never a user error.
    """


class ConstraintViolation(TypeExprError):
    pass


# --------------------------------------------------------------------------
# Type expressions


@dataclass(frozen=True)
class Concrete:
    name: str


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class _VoidType:
    pass


Void = _VoidType()


@dataclass(frozen=True)
class Sequence:
    items: Tuple["TypeExpr", ...]


@dataclass(frozen=True)
class Product:
    items: Tuple["TypeExpr", ...]


@dataclass(frozen=True)
class Coroutine:
    receive: "TypeExpr"
    yield_: "TypeExpr"


class _Star:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "STAR"

    def __reduce__(self):
        return (_Star, ())


STAR = _Star()

Length = Union[int, _Star, str]  # a str length is a length variable


@dataclass(frozen=True)
class ListOf:
    element: "TypeExpr"
    length: Length


# --------------------------------------------------------------------------
# Constraint predicates


@dataclass(frozen=True)
class SubtypeOf:
    var: str
    upper: str


@dataclass(frozen=True)
class NotInSet:
    vars: Tuple[str, ...]
    excluded: Tuple[Tuple[str, ...], ...]


@dataclass(frozen=True)
class Conjunction:
    parts: Tuple["Predicate", ...]


Predicate = Union[SubtypeOf, NotInSet, Conjunction]


@dataclass(frozen=True)
class Constrained:
    base: "TypeExpr"
    predicate: Predicate


TypeExpr = Union[Concrete, Variable, _VoidType, Sequence, Product, Coroutine, ListOf, Constrained]

Bindings = Dict[str, object]
Hierarchy = Mapping[str, str]


def seq(*items: TypeExpr) -> TypeExpr:
    """Build a normalized sequence."""
    return normalize(Sequence(tuple(items)))


def co(receive: TypeExpr, yield_: TypeExpr) -> Coroutine:
    return Coroutine(normalize(receive), normalize(yield_))


def is_void(t: TypeExpr) -> bool:
    return t is Void or isinstance(t, _VoidType)


def strip(t: TypeExpr) -> TypeExpr:
    """The type without its constraint."""
    return t.base if isinstance(t, Constrained) else t


def is_coroutine(t: TypeExpr) -> bool:
    return isinstance(strip(t), Coroutine)


# --------------------------------------------------------------------------
# Normalization


def normalize(t: TypeExpr) -> TypeExpr:
    if isinstance(t, Sequence):
        flat = []
        for item in t.items:
            item = normalize(item)
            if isinstance(item, Sequence):
                flat.extend(item.items)
            elif not is_void(item):
                flat.append(item)
        if not flat:
            return Void
        if len(flat) == 1:
            return flat[0]
        return Sequence(tuple(flat))
    if isinstance(t, Product):
        return Product(tuple(normalize(i) for i in t.items))
    if isinstance(t, Coroutine):
        return Coroutine(normalize(t.receive), normalize(t.yield_))
    if isinstance(t, ListOf):
        element = normalize(t.element)
        if t.length == 0 or is_void(element):
            return Void
        return ListOf(element, t.length)
    if isinstance(t, Constrained):
        base = normalize(t.base)
        pred = t.predicate
        if isinstance(base, Constrained):
            base, pred = base.base, Conjunction((base.predicate, pred))
        pred = _flatten_predicate(pred)
        if pred is None:
            return base
        return Constrained(base, pred)
    return t


def _flatten_predicate(p: Predicate) -> Optional[Predicate]:
    if isinstance(p, Conjunction):
        parts = []
        for part in p.parts:
            part = _flatten_predicate(part)
            if part is None:
                continue
            if isinstance(part, Conjunction):
                parts.extend(part.parts)
            else:
                parts.append(part)
        if not parts:
            return None
        if len(parts) == 1:
            return parts[0]
        return Conjunction(tuple(parts))
    return p


# --------------------------------------------------------------------------
# Head and tail


def head(t: TypeExpr) -> TypeExpr:
    if is_void(t):
        raise TypeExprError("head of Void")
    if isinstance(t, Sequence):
        return head(t.items[0])
    if isinstance(t, ListOf):
        return t.element
    # concrete, variable, coroutine, product (as an atomic datum), constrained
    return t


def tail(t: TypeExpr) -> TypeExpr:
    if is_void(t):
        raise TypeExprError("tail of Void")
    if isinstance(t, Sequence):
        return normalize(Sequence((tail(t.items[0]),) + t.items[1:]))
    if isinstance(t, ListOf):
        if isinstance(t.length, int):
            return normalize(ListOf(t.element, t.length - 1))
        return t
    return Void


def items_of(t: TypeExpr) -> Tuple[TypeExpr, ...]:
    """Sequence items of a normalized type (Void has none)."""
    if is_void(t):
        return ()
    if isinstance(t, Sequence):
        return t.items
    return (t,)


def product_to_sequence(p: TypeExpr) -> TypeExpr:
    if not isinstance(p, Product):
        raise TypeExprError(f"not a product: {p!r}")
    return normalize(Sequence(p.items))


# --------------------------------------------------------------------------
# Variables


def free_vars(t: TypeExpr) -> set:
    if isinstance(t, Variable):
        return {t.name}
    if isinstance(t, (Sequence, Product)):
        out = set()
        for item in t.items:
            out |= free_vars(item)
        return out
    if isinstance(t, Coroutine):
        return free_vars(t.receive) | free_vars(t.yield_)
    if isinstance(t, ListOf):
        out = free_vars(t.element)
        if isinstance(t.length, str):
            out.add(t.length)
        return out
    if isinstance(t, Constrained):
        return free_vars(t.base)
    return set()


def predicate_vars(p: Predicate) -> set:
    if isinstance(p, SubtypeOf):
        return {p.var}
    if isinstance(p, NotInSet):
        return set(p.vars)
    out = set()
    for part in p.parts:
        out |= predicate_vars(part)
    return out


# --------------------------------------------------------------------------
# Subtyping and constraints


def is_subtype(child: str, parent: str, hierarchy: Optional[Hierarchy]) -> bool:
    """Reflexive-transitive nominal subtyping."""
    seen = set()
    current: Optional[str] = child
    while current is not None and current not in seen:
        if current == parent:
            return True
        seen.add(current)
        current = hierarchy.get(current) if hierarchy else None
    return False


def _atom_name(value) -> Optional[str]:
    if isinstance(value, Concrete):
        return value.name
    return None


def residual(p: Predicate, d: Mapping[str, object], hierarchy: Optional[Hierarchy] = None):
    """Partially evaluate ``p`` under bindings ``d``.

    Returns ``True`` (satisfied), ``False`` (violated) or the residual
    predicate over the variables that are still unbound.
    """
    if isinstance(p, SubtypeOf):
        if p.var not in d:
            return p
        value = d[p.var]
        if isinstance(value, Variable):
            return SubtypeOf(value.name, p.upper)
        name = _atom_name(value)
        return name is not None and is_subtype(name, p.upper, hierarchy)
    if isinstance(p, NotInSet):
        keep = [i for i, v in enumerate(p.vars) if v not in d or isinstance(d[v], Variable)]
        bound = [i for i in range(len(p.vars)) if i not in keep]
        candidates = []
        for row in p.excluded:
            if all(_atom_name(d[p.vars[i]]) == row[i] for i in bound):
                candidates.append(tuple(row[i] for i in keep))
        if not keep:
            return not candidates
        names = tuple(d[p.vars[i]].name if p.vars[i] in d else p.vars[i] for i in keep)
        if not candidates:
            return True
        return NotInSet(names, tuple(dict.fromkeys(candidates)))
    parts = []
    for part in p.parts:
        r = residual(part, d, hierarchy)
        if r is False:
            return False
        if r is not True:
            parts.append(r)
    if not parts:
        return True
    return parts[0] if len(parts) == 1 else Conjunction(tuple(parts))


def eval_constraint(p: Predicate, d: Mapping[str, object], hierarchy: Optional[Hierarchy] = None) -> bool:
    missing = predicate_vars(p) - set(d)
    if missing:
        raise TypeExprError(f"unbound constraint variables: {sorted(missing)}")
    r = residual(p, d, hierarchy)
    if r is True or r is False:
        return r
    raise TypeExprError("constraint not fully determined")


# --------------------------------------------------------------------------
# Matching


def join(a: Optional[Bindings], b: Optional[Bindings]) -> Optional[Bindings]:
    """Union of two binding sets; ``None`` is absorbing."""
    if a is None or b is None:
        return None
    out = dict(a)
    for k, v in b.items():
        if k in out and out[k] != v:
            return None
        out[k] = v
    return out


def _match_length(candidate: Length, pattern: Length) -> Optional[Bindings]:
    if pattern is STAR:
        return {}
    if isinstance(pattern, str):
        return {pattern: candidate}
    return {} if candidate == pattern else None


def match(candidate: TypeExpr, pattern: TypeExpr,
          hierarchy: Optional[Hierarchy] = None) -> Optional[Bindings]:
    """Bindings making ``pattern`` accept ``candidate``, or ``None``."""
    if isinstance(pattern, Constrained):
        base = pattern.base
        if isinstance(base, Coroutine):
            c = strip(candidate)
            if not isinstance(c, Coroutine):
                return None
            d = join(match(c.receive, base.receive, hierarchy),
                     match(c.yield_, base.yield_, hierarchy))
        else:
            if is_void(base):
                return None
            d = match(candidate, head(base), hierarchy)
        if d is None or residual(pattern.predicate, d, hierarchy) is False:
            return None
        return d

    if isinstance(pattern, Coroutine):
        c = strip(candidate)
        if not isinstance(c, Coroutine):
            return None
        return join(match(c.receive, pattern.receive, hierarchy),
                    match(c.yield_, pattern.yield_, hierarchy))

    if isinstance(pattern, Variable):
        return {pattern.name: candidate}

    if isinstance(pattern, Concrete):
        if isinstance(candidate, Concrete) and is_subtype(candidate.name, pattern.name, hierarchy):
            return {}
        return None

    if is_void(pattern):
        return {} if is_void(candidate) else None

    if isinstance(pattern, Product):
        if not isinstance(candidate, Product) or len(candidate.items) != len(pattern.items):
            return None
        d: Optional[Bindings] = {}
        for c, p in zip(candidate.items, pattern.items):
            d = join(d, match(c, p, hierarchy))
            if d is None:
                return None
        return d

    if isinstance(pattern, ListOf):
        if isinstance(candidate, ListOf):
            return join(match(candidate.element, pattern.element, hierarchy),
                        _match_length(candidate.length, pattern.length))
        items = items_of(candidate)
        d = _match_length(len(items), pattern.length)
        for c in items:
            d = join(d, match(c, pattern.element, hierarchy))
            if d is None:
                return None
        return d

    if isinstance(pattern, Sequence):
        if isinstance(candidate, ListOf) and isinstance(candidate.length, int):
            candidate = Sequence((candidate.element,) * candidate.length)
        if not isinstance(candidate, Sequence) or len(candidate.items) != len(pattern.items):
            return None
        d = {}
        for c, p in zip(candidate.items, pattern.items):
            d = join(d, match(c, p, hierarchy))
            if d is None:
                return None
        return d

    raise TypeExprError(f"unknown pattern {pattern!r}")


# --------------------------------------------------------------------------
# Substitution


def substitute(t: TypeExpr, d: Mapping[str, object],
               hierarchy: Optional[Hierarchy] = None) -> TypeExpr:
    if d is None:
        raise TypeExprError("cannot substitute the failure binding")
    return normalize(_subst(t, d, hierarchy))


def _subst(t, d, hierarchy):
    if isinstance(t, Variable):
        value = d.get(t.name, t)
        if not isinstance(value, (Concrete, Variable, _VoidType, Sequence, Product,
                                  Coroutine, ListOf, Constrained)):
            raise TypeExprError(f"variable {t.name} is bound to a length, not a type")
        return value
    if isinstance(t, Sequence):
        return Sequence(tuple(_subst(i, d, hierarchy) for i in t.items))
    if isinstance(t, Product):
        return Product(tuple(_subst(i, d, hierarchy) for i in t.items))
    if isinstance(t, Coroutine):
        return Coroutine(_subst(t.receive, d, hierarchy), _subst(t.yield_, d, hierarchy))
    if isinstance(t, ListOf):
        length = t.length
        if isinstance(length, str) and length in d:
            length = d[length]
        return ListOf(_subst(t.element, d, hierarchy), length)
    if isinstance(t, Constrained):
        base = _subst(t.base, d, hierarchy)
        r = residual(t.predicate, d, hierarchy)
        if r is False:
            raise ConstraintViolation(f"substitution violates constraint {t.predicate!r}")
        if r is True:
            return base
        return Constrained(base, r)
    return t
