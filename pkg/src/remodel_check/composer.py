"""Demand-driven composition of coroutine types.

The engine rewrites a state ``(pending, external) |- compose(theta)`` one rule
at a time until a terminal rule fires.  Rule choice is deterministic:

    remove-void > compose-tuple
    pending /= Void:  resume > external
    pending == Void:  yield-co > resume-co > yield > loop-external
                      > e-to-one / prune / co-to-ext   (terminal handling)

A resumed coroutine takes control: ``yield`` prefers the most recently
resumed coroutine that can still yield, and only then falls back to the
first yielder in ``theta``.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, List, Optional, Sequence as Seq, Tuple, Union

from .syntax import format_type
from .typeexpr import (
    Constrained, Coroutine, Hierarchy, Product, Sequence, TypeExpr, TypeExprError, Void,
    head, is_coroutine, is_void, items_of, match, normalize, residual, strip, substitute,
    tail,
)

DEFAULT_FUEL = 10_000


def default_fuel() -> int:
    value = os.environ.get("REMODEL_CHECK_FUEL")
    return int(value) if value else DEFAULT_FUEL


class Rule(str, enum.Enum):
    REMOVE_VOID = "remove-void"
    COMPOSE_TUPLE = "compose-tuple"
    E_TO_ONE = "e-to-one"
    YIELD = "yield"
    YIELD_CO = "yield-co"
    CO_TO_EXT = "co-to-ext"
    RESUME = "resume"
    EXTERNAL = "external"
    RESUME_CO = "resume-co"
    LOOP_EXTERNAL = "loop-external"
    PRUNE = "prune"


class Outcome(str, enum.Enum):
    COMPOSED = "composed"
    DEADLOCK = "deadlock"
    FUEL_EXHAUSTED = "fuel-exhausted"


class CompositionError(Exception):
    pass


@dataclass(frozen=True)
class NamedCoroutine:
    name: str
    type: TypeExpr
    # composites built by compose-tuple do not appear in the yielding order
    synthetic: bool = False


@dataclass(frozen=True)
class Group:
    """A tuple of coroutines composed together before meeting the rest."""

    name: str
    members: Tuple[Union[NamedCoroutine, "Group"], ...]


Item = Union[NamedCoroutine, Group]


@dataclass(frozen=True)
class TraceEvent:
    rule: Rule
    actor: Optional[str] = None
    detail: Optional[TypeExpr] = None
    recorded: bool = False

    def to_json(self) -> dict:
        return {
            "rule": self.rule.value,
            "actor": self.actor,
            "detail": None if self.detail is None else format_type(self.detail),
        }

    def __str__(self) -> str:
        parts = [self.rule.value]
        if self.actor is not None:
            parts.append(self.actor)
        if self.detail is not None:
            parts.append(format_type(self.detail))
        return " ".join(parts)


@dataclass(frozen=True)
class Context:
    pending: TypeExpr = Void
    external: TypeExpr = Void


@dataclass(frozen=True)
class State:
    ctx: Context
    theta: Tuple[Item, ...]
    touched: frozenset = frozenset()
    active: Tuple[str, ...] = ()
    nested: bool = False
    fresh: int = 0
    outcome: Optional[Outcome] = None
    result: Optional[TypeExpr] = None

    @property
    def done(self) -> bool:
        return self.outcome is not None


@dataclass(frozen=True)
class CompositionResult:
    result: TypeExpr
    outcome: Outcome
    trace: Tuple[TraceEvent, ...]
    remaining: Tuple[str, ...] = ()
    pruned: Tuple[str, ...] = ()

    @property
    def order(self) -> List[str]:
        return yielding_order(self.trace)

    def to_json(self) -> dict:
        return {
            "result": format_type(self.result),
            "outcome": self.outcome.value,
            "order": self.order,
            "trace": [e.to_json() for e in self.trace],
            "remaining": list(self.remaining),
            "pruned": list(self.pruned),
        }


# --------------------------------------------------------------------------
# Helpers


def first_match(theta: Seq, pred: Callable) -> Tuple[Optional[object], list, list]:
    """Earliest element satisfying ``pred`` with its prefix and suffix."""
    for i, item in enumerate(theta):
        if pred(item):
            return item, list(theta[:i]), list(theta[i + 1:])
    return None, list(theta), []


def _parts(t: TypeExpr) -> Optional[Coroutine]:
    base = strip(t)
    return base if isinstance(base, Coroutine) else None


def _is_removable(t: TypeExpr) -> bool:
    if is_void(t):
        return True
    c = _parts(t)
    return c is not None and is_void(c.receive) and is_void(c.yield_)


def receive_bindings(item: Item, pending: TypeExpr, hierarchy: Optional[Hierarchy]):
    """Bindings if ``item`` can receive ``pending`` as the head of its demand."""
    if not isinstance(item, NamedCoroutine):
        return None
    c = _parts(item.type)
    if c is None or is_void(c.receive):
        return None
    d = match(pending, head(c.receive), hierarchy)
    if d is None:
        return None
    if isinstance(item.type, Constrained) and residual(item.type.predicate, d, hierarchy) is False:
        return None
    return d


def _advance(t: TypeExpr, d, hierarchy) -> TypeExpr:
    """``[t(s); u][D]`` keeping the coroutine's constraint."""
    c = _parts(t)
    advanced: TypeExpr = Coroutine(tail(c.receive), c.yield_)
    if isinstance(t, Constrained):
        advanced = Constrained(advanced, t.predicate)
    return substitute(advanced, d, hierarchy)


def _yieldable(item: Item) -> bool:
    if not isinstance(item, NamedCoroutine):
        return False
    c = _parts(item.type)
    return c is not None and is_void(c.receive) and not is_void(c.yield_)


def _as_item(name: str, t: TypeExpr) -> Item:
    t = normalize(t)
    if isinstance(t, Product):
        return Group(name, tuple(_as_item(f"{name}.{i + 1}", m) for i, m in enumerate(t.items)))
    return NamedCoroutine(name, t)


def _names(items: Iterable[Item]) -> List[str]:
    out = []
    for item in items:
        if isinstance(item, Group):
            out.extend(_names(item.members))
        else:
            out.append(item.name)
    return out


def _flat_types(items: Iterable[Item]) -> List[TypeExpr]:
    out = []
    for item in items:
        if isinstance(item, Group):
            out.extend(_flat_types(item.members))
        else:
            out.append(item.type)
    return out


def initial_state(theta: Iterable[Union[Item, Tuple[str, TypeExpr]]], *, nested: bool = False) -> State:
    items = []
    for entry in theta:
        if isinstance(entry, tuple):
            entry = _as_item(*entry)
        elif isinstance(entry, NamedCoroutine):
            entry = _as_item(entry.name, entry.type) if isinstance(entry.type, Product) \
                else replace(entry, type=normalize(entry.type))
        items.append(entry)
    names = _names(items)
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise CompositionError(f"duplicate coroutine names: {', '.join(dupes)}")
    return State(Context(), tuple(items), nested=nested)


# --------------------------------------------------------------------------
# One rewrite step


def step(state: State, hierarchy: Optional[Hierarchy] = None,
         fuel: int = DEFAULT_FUEL) -> Tuple[State, Tuple[TraceEvent, ...]]:
    """Apply exactly one rule.  Returns the new state and the events it produced.

    ``compose-tuple`` runs a nested composition and so may return many events.
    """
    if state.done:
        raise CompositionError("step on a terminal state")
    theta = list(state.theta)
    pending, external = state.ctx.pending, state.ctx.external

    found, before, after = first_match(
        theta, lambda it: isinstance(it, NamedCoroutine) and _is_removable(it.type))
    if found is not None:
        return (replace(state, theta=tuple(before + after)),
                (TraceEvent(Rule.REMOVE_VOID, found.name, found.type),))

    found, before, after = first_match(theta, lambda it: isinstance(it, Group))
    if found is not None:
        return _compose_tuple(state, found, before, after, hierarchy, fuel)

    if not is_void(pending):
        found, before, after = first_match(
            theta, lambda it: receive_bindings(it, pending, hierarchy) is not None)
        if found is not None:
            d = receive_bindings(found, pending, hierarchy)
            resumed = replace(found, type=_advance(found.type, d, hierarchy))
            new = replace(state, ctx=Context(Void, external),
                          theta=tuple(before + [resumed] + after),
                          touched=state.touched | {found.name},
                          active=state.active + (found.name,))
            return new, (TraceEvent(Rule.RESUME, found.name, pending, not found.synthetic),)
        new = replace(state, ctx=Context(Void, normalize(Sequence((external, pending)))))
        return new, (TraceEvent(Rule.EXTERNAL, None, pending),)

    # yield-co: a yielded coroutine joins theta right after its source
    def yields_coroutine(it):
        return _yieldable(it) and is_coroutine(head(_parts(it.type).yield_))

    found, before, after = first_match(theta, yields_coroutine)
    if found is not None:
        s = _parts(found.type).yield_
        spawned = NamedCoroutine(f"{found.name}#{state.fresh + 1}", head(s), found.synthetic)
        source = replace(found, type=_with_yield(found.type, tail(s)))
        new = replace(state, theta=tuple(before + [source, spawned] + after),
                      touched=state.touched | {found.name}, fresh=state.fresh + 1)
        return new, (TraceEvent(Rule.YIELD_CO, found.name, spawned.type, not found.synthetic),)

    # resume-co: a coroutine whose demand is a coroutine pattern takes a matching one
    def wants_coroutine(it):
        if not isinstance(it, NamedCoroutine):
            return False
        c = _parts(it.type)
        return c is not None and not is_void(c.receive) and is_coroutine(head(c.receive))

    for i, receiver in enumerate(theta):
        if not wants_coroutine(receiver):
            continue
        others = [it for j, it in enumerate(theta) if j != i]
        given, _, _ = first_match(
            others, lambda it: receive_bindings(receiver, it.type, hierarchy) is not None
            if isinstance(it, NamedCoroutine) else False)
        if given is None:
            continue
        d = receive_bindings(receiver, given.type, hierarchy)
        resumed = replace(receiver, type=_advance(receiver.type, d, hierarchy))
        rest = [resumed if it is receiver else it for it in theta if it is not given]
        new = replace(state, theta=tuple(rest),
                      touched=state.touched | {receiver.name, given.name},
                      active=state.active + (receiver.name,))
        return new, (TraceEvent(Rule.RESUME_CO, receiver.name, given.type, not receiver.synthetic),)

    # yield: the running coroutine first, otherwise the first one able to
    yielder = None
    for name in reversed(state.active):
        candidate = next((it for it in theta if isinstance(it, NamedCoroutine) and it.name == name), None)
        if candidate is not None and _yieldable(candidate):
            yielder = candidate
            break
    if yielder is None:
        yielder, _, _ = first_match(theta, _yieldable)
    if yielder is not None:
        s = _parts(yielder.type).yield_
        out = head(s)
        source = replace(yielder, type=_with_yield(yielder.type, tail(s)))
        active = tuple(n for n in state.active if n != yielder.name) + (yielder.name,)
        new = replace(state, ctx=Context(out, external),
                      theta=tuple(source if it is yielder else it for it in theta),
                      touched=state.touched | {yielder.name}, active=active)
        return new, (TraceEvent(Rule.YIELD, yielder.name, out, not yielder.synthetic),)

    # loop-external: feed an earlier external yield to a waiting coroutine
    ext_items = list(items_of(external))
    for k, t in enumerate(ext_items):
        found, before, after = first_match(
            theta, lambda it: receive_bindings(it, t, hierarchy) is not None)
        if found is None:
            continue
        d = receive_bindings(found, t, hierarchy)
        resumed = replace(found, type=_advance(found.type, d, hierarchy))
        remaining = normalize(Sequence(tuple(ext_items[:k] + ext_items[k + 1:])))
        new = replace(state, ctx=Context(Void, remaining),
                      theta=tuple(before + [resumed] + after),
                      touched=state.touched | {found.name},
                      active=state.active + (found.name,))
        return new, (TraceEvent(Rule.LOOP_EXTERNAL, found.name, t),)

    return _terminal(state, theta, hierarchy)


def _with_yield(t: TypeExpr, new_yield: TypeExpr) -> TypeExpr:
    c = _parts(t)
    updated: TypeExpr = Coroutine(c.receive, normalize(new_yield))
    if isinstance(t, Constrained):
        updated = Constrained(updated, t.predicate)
    return updated


def _terminal(state: State, theta: List[Item], hierarchy) -> Tuple[State, Tuple[TraceEvent, ...]]:
    external = state.ctx.external
    if not theta:
        result = Coroutine(Void, external)
        return (replace(state, outcome=Outcome.COMPOSED, result=result),
                (TraceEvent(Rule.E_TO_ONE, None, result),))
    if not state.nested:
        if len(theta) == 1 and theta[0].name in state.touched:
            only = theta[0]
            c = _parts(only.type)
            result: TypeExpr = Coroutine(c.receive, normalize(Sequence((external, c.yield_))))
            if isinstance(only.type, Constrained):
                result = Constrained(result, only.type.predicate)
            return (replace(state, outcome=Outcome.COMPOSED, result=normalize(result)),
                    (TraceEvent(Rule.E_TO_ONE, only.name, result),))
        dormant = [it for it in theta if it.name not in state.touched]
        if state.touched and dormant:
            keep = [it for it in theta if it.name in state.touched]
            return (replace(state, theta=tuple(keep)),
                    tuple(TraceEvent(Rule.PRUNE, it.name, it.type) for it in dormant))
    result = normalize(Sequence((external,) + tuple(it.type for it in theta)))
    return (replace(state, outcome=Outcome.DEADLOCK, result=result),
            (TraceEvent(Rule.CO_TO_EXT, None, result),))


def _compose_tuple(state: State, group: Group, before, after, hierarchy, fuel):
    sub = run(initial_state(group.members, nested=True), hierarchy, fuel)
    events = sub.trace
    if sub.outcome is Outcome.FUEL_EXHAUSTED:
        raise _FuelExhausted(events)
    final = sub.state
    external = final.ctx.external
    spliced: List[Item] = []
    if not is_void(external):
        spliced.append(NamedCoroutine(group.name, Coroutine(Void, external), synthetic=True))
    spliced.extend(final.theta)
    touched = state.touched | final.touched | {group.name}
    new = replace(state, theta=tuple(before + spliced + after), touched=touched,
                  fresh=state.fresh + final.fresh)
    return new, (TraceEvent(Rule.COMPOSE_TUPLE, group.name, None),) + tuple(events)


class _FuelExhausted(Exception):
    def __init__(self, events):
        super().__init__("fuel exhausted")
        self.events = events


# --------------------------------------------------------------------------
# Driving the engine


@dataclass(frozen=True)
class _Run:
    state: State
    trace: Tuple[TraceEvent, ...]
    outcome: Outcome


def run(state: State, hierarchy: Optional[Hierarchy] = None, fuel: int = DEFAULT_FUEL) -> _Run:
    trace: List[TraceEvent] = []
    while not state.done:
        if len(trace) >= fuel:
            return _Run(state, tuple(trace), Outcome.FUEL_EXHAUSTED)
        try:
            state, events = step(state, hierarchy, fuel - len(trace))
        except _FuelExhausted as exc:
            trace.extend(exc.events)
            return _Run(state, tuple(trace), Outcome.FUEL_EXHAUSTED)
        trace.extend(events)
    return _Run(state, tuple(trace), state.outcome)


def compose(theta: Iterable[Union[Item, Tuple[str, TypeExpr]]],
            hierarchy: Optional[Hierarchy] = None,
            fuel: Optional[int] = None) -> CompositionResult:
    """Compose a list of named coroutine types into one coroutine type."""
    state = initial_state(theta)
    if not state.theta:
        raise CompositionError("nothing to compose")
    done = run(state, hierarchy, default_fuel() if fuel is None else fuel)
    final = done.state
    if done.outcome is Outcome.FUEL_EXHAUSTED:
        result = normalize(Sequence((final.ctx.pending, final.ctx.external) + tuple(_flat_types(final.theta))))
    else:
        result = final.result
    remaining = tuple(_names(final.theta)) if done.outcome is not Outcome.COMPOSED else ()
    pruned = tuple(e.actor for e in done.trace if e.rule is Rule.PRUNE)
    return CompositionResult(result, done.outcome, done.trace, remaining, pruned)


def yielding_order(trace: Iterable[TraceEvent]) -> List[str]:
    """Names of coroutines in activation order, duplicates kept."""
    return [e.actor for e in trace if e.recorded]


def first_occurrences(order: Iterable[str]) -> List[str]:
    return list(dict.fromkeys(order))


def group(name: str, members: Iterable[Item]) -> Group:
    return Group(name, tuple(members))


__all__ = [
    "DEFAULT_FUEL", "CompositionError", "CompositionResult", "Context", "Group",
    "NamedCoroutine", "Outcome", "Rule", "State", "TraceEvent", "compose", "first_match",
    "first_occurrences", "group", "initial_state", "receive_bindings", "run", "step",
    "yielding_order", "TypeExprError",
]
