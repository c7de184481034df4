"""Flattening of conditions into ordered conjunct lists."""

from __future__ import annotations

from typing import List, Optional

from .ast import Binary, Call, CollectionCall, Expr, Let, LetBinding, Literal, Unary


def _is_bool(e: Expr) -> Optional[bool]:
    if isinstance(e, Literal) and e.kind == "bool":
        return bool(e.value)
    return None


def _negate(e: Expr) -> Expr:
    if isinstance(e, Unary) and e.op == "not":
        return e.operand
    return Unary("not", e)


def normalize_negation(e: Expr) -> Expr:
    """Rewrite ``call = false`` as ``not call`` and ``call = true`` as ``call``.

    Only calls qualify: ``self.IsComplete = false`` is a property check and
    ``self.Flag = true`` may be an assignment, so both are left alone.
    """
    if isinstance(e, Unary) and e.op == "not":
        inner = normalize_negation(e.operand)
        return _negate(inner)
    if isinstance(e, Binary) and e.op in ("=", "<>"):
        for call, lit in ((e.left, e.right), (e.right, e.left)):
            value = _is_bool(lit)
            if value is None or not isinstance(normalize_negation(call), (Call, CollectionCall, Unary)):
                continue
            positive = value if e.op == "=" else not value
            inner = normalize_negation(call)
            return inner if positive else _negate(inner)
    return e


def to_conjuncts(e: Optional[Expr]) -> List[Expr]:
    """Ordered conjuncts of ``e``; let bodies are flattened, bindings dropped."""
    if e is None:
        return []
    if isinstance(e, Let):
        return to_conjuncts(e.body)
    if isinstance(e, Binary) and e.op == "and":
        return to_conjuncts(e.left) + to_conjuncts(e.right)
    return [normalize_negation(e)]


def let_bindings(e: Optional[Expr]) -> List[LetBinding]:
    """Let bindings reachable along the conjunct spine, outermost first."""
    if isinstance(e, Let):
        return list(e.bindings) + let_bindings(e.body)
    if isinstance(e, Binary) and e.op == "and":
        return let_bindings(e.left) + let_bindings(e.right)
    return []
