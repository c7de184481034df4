"""Acceptance criteria 1-7; each test prints one PASS/FAIL line (run with ``-s``)."""

from __future__ import annotations

import random
import traceback

from remodel_check.composer import Outcome, compose
from remodel_check.pipeline import compare_order, compose_loaded, last_as_tuple, load_path
from remodel_check.remodel import collect_symbols, parse_model
from remodel_check.syntax import format_type, parse_type as T
from remodel_check.typeexpr import items_of, strip
from remodel_check.typer import CONDITIONAL, type_model

import test_composer
import test_type_properties
from conftest import FIXTURES
from test_composer import family
from test_parser import SERVICES
from test_typer import ENTER_ITEM

CLEANUP = ["deleteStore", "deleteCashDesk", "deleteItem"]
EXPECTED_TYPES = [
    "openStore: [Store; <Store, CurrentStore>]",
    "openCashDesk: [<CashDesk, CurrentStore>; <CashDesk, CurrentStore, CurrentCashDesk>]",
    "makeNewSale: [CurrentCashDesk; <CurrentCashDesk, Sale, CurrentSale>]",
    "enterItem: [<CurrentSale, Item>; <CurrentSale, Item, SalesLineItem, CurrentSaleLine>]",
    "makeCashPayment: [CurrentSale; CashPayment]",
    "createStore: [Void; Store]",
    "deleteStore: [Store; Void]",
    "createCashDesk: [Void; CashDesk]",
    "deleteCashDesk: [CashDesk; Void]",
    "createItem: [Void; Item]",
    "deleteItem: [Item; Void]",
]
FIRST_OCCURRENCES = ["createStore", "openStore", "createCashDesk", "openCashDesk", "createItem",
                     "makeNewSale", "enterItem", "makeCashPayment"] + CLEANUP


def criterion(number: int, title: str, check) -> None:
    try:
        check()
    except AssertionError as exc:
        detail = str(exc).splitlines()[0] if str(exc) else traceback.format_exc().splitlines()[-1]
        print(f"\ncriterion {number}: FAIL  {title}  ({detail})")
        raise
    print(f"\ncriterion {number}: PASS  {title}")


def _cocome(name: str):
    loaded = load_path(FIXTURES / name)
    select, groups = last_as_tuple(loaded, None, (), CLEANUP)
    return loaded, compose_loaded(loaded, select, groups)


def test_criterion_1_enter_item_typing():
    def check():
        model = parse_model(SERVICES + ENTER_ITEM)
        (typed,) = type_model(model, collect_symbols(model))
        got = format_type(typed.coroutine)
        want = "[<CurrentSale, Item>; <CurrentSale, Item, SalesLineItem, CurrentSaleLine>]"
        assert got == want, f"got {got}"
    criterion(1, "enterItem typing", check)


def test_criterion_2_cocome_types():
    def check():
        loaded = load_path(FIXTURES / "cocome.remodel")
        got = [f"{n}: {format_type(c.coroutine)}" for n, c in zip(loaded.names, loaded.contracts)]
        for want, line in zip(EXPECTED_TYPES, got):
            assert line == want, f"got {line}"
        assert len(got) == len(EXPECTED_TYPES), f"{len(got)} contracts"
    criterion(2, "CoCoME contract types", check)


def test_criterion_3_cocome_composition():
    def check():
        _, result = _cocome("cocome.remodel")
        assert result.outcome is Outcome.COMPOSED, result.outcome.value
        got = format_type(result.result)
        assert got == ("[Void; <CurrentStore, CurrentCashDesk, Sale, CashPayment, "
                       "SalesLineItem, CurrentSaleLine>]"), f"got {got}"
        ok, actual = compare_order(result.order, FIRST_OCCURRENCES)
        assert ok, f"first occurrences {actual}"
    criterion(3, "CoCoME composition", check)


def test_criterion_4_negative_cocome():
    def check():
        loaded, result = _cocome("cocome_negative.remodel")
        enter = dict(zip(loaded.names, loaded.contracts))["enterItem"]
        got = format_type(enter.coroutine)
        assert got == "[Item; <Item, SalesLineItem, CurrentSaleLine>]", f"got {got}"
        ok, actual = compare_order(result.order, FIRST_OCCURRENCES)
        assert not ok
        assert actual.index("enterItem") < actual.index("makeNewSale"), f"order {actual}"
    criterion(4, "negative CoCoME case", check)


def test_criterion_5_prolog_fixture():
    def check():
        sam = compose(family("Sam"))
        assert sam.outcome is Outcome.COMPOSED, f"Sam: {sam.outcome.value}"
        assert sam.result == T("[Void; Yes]"), f"Sam: {format_type(sam.result)}"
        sue = compose(family("Sue"))
        assert sue.outcome is Outcome.DEADLOCK, (
            f"Sue: {sue.outcome.value} with {format_type(sue.result)}")
    criterion(5, "Prolog fixture (Sam composes, Sue deadlocks)", check)


def test_criterion_6_constraint_order_independence():
    def check():
        entries = family("Sam")
        facts = [e for e in entries if e[0].startswith(("child", "male"))]
        rules = [e for e in entries if e not in facts]
        rng = random.Random(2024)
        for trial in range(25):
            shuffled = list(facts)
            rng.shuffle(shuffled)
            result = compose(shuffled + rules)
            assert result.outcome is Outcome.COMPOSED and result.result == T("[Void; Yes]"), (
                f"permutation {trial}: {format_type(result.result)}")
        unconstrained = [("childOther", T("[(Child, x, y); No]"))] + [
            e for e in entries if e[0] != "childOther"]
        result = compose(unconstrained)
        assert T("No") in items_of(strip(result.result).yield_), format_type(result.result)
    criterion(6, "constraint order independence", check)


def test_criterion_7_property_suites():
    def check():
        # (a) normalize idempotence and flattening associativity, 1000 cases each
        test_type_properties.test_normalize_idempotent()
        test_type_properties.test_sequence_flattening_is_associative()
        # (b) match/substitute consistency on variable-linear patterns
        test_type_properties.test_match_substitute_consistency()
        # (c) determinism and (d) the shrink invariant
        test_composer.test_composition_is_deterministic()
        test_composer.test_parts_never_grow_except_yield_co()
        test_composer.test_cocome_parts_never_grow()
        # (e) conditional postconditions
        model = parse_model((FIXTURES / "atm.remodel").read_text())
        card = type_model(model, collect_symbols(model))[0]
        assert card.coroutine == T("[Void; Void]"), format_type(card.coroutine)
        assert any(n.code == CONDITIONAL for n in card.notes), "no warning"
    criterion(7, "property suites", check)
