"""Coroutine types for REModel contracts, and their composition."""

from .composer import (
    CompositionResult, Group, NamedCoroutine, Outcome, Rule, compose, first_occurrences,
    yielding_order,
)
from .pipeline import load_fixture_text, load_model_text, load_path
from .syntax import format_type, parse_fixture, parse_type
from .typer import TypedContract, lift_supertypes, type_contract, type_model

__all__ = [
    "CompositionResult", "Group", "NamedCoroutine", "Outcome", "Rule", "TypedContract",
    "compose", "first_occurrences", "format_type", "lift_supertypes", "load_fixture_text",
    "load_model_text", "load_path", "parse_fixture", "parse_type", "type_contract",
    "type_model", "yielding_order",
]
