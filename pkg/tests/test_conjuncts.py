from __future__ import annotations

from remodel_check.remodel import parse_model
from remodel_check.remodel.ast import Binary, Call, Literal, Name, Property, Unary
from remodel_check.remodel.conjuncts import let_bindings, normalize_negation, to_conjuncts
from test_parser import expr

ENTER_ITEM_PRE = """
		CurrentSale.oclIsUndefined() = false and
		CurrentSale.IsComplete = false and
		item.oclIsUndefined() = false and
		item.StockNumber > 0
"""


def undefined(name):
    return Call(Name(name), "oclIsUndefined")


def test_enter_item_precondition():
    parts = to_conjuncts(expr(ENTER_ITEM_PRE))
    assert parts == [
        Unary("not", undefined("CurrentSale")),
        Binary("=", Property(Name("CurrentSale"), "IsComplete"), Literal(False, "bool")),
        Unary("not", undefined("item")),
        Binary(">", Property(Name("item"), "StockNumber"), Literal(0, "int")),
    ]


def test_associativity():
    assert to_conjuncts(expr("a and (b and c)")) == [Name("a"), Name("b"), Name("c")]
    assert to_conjuncts(expr("(a and b) and c")) == [Name("a"), Name("b"), Name("c")]


def test_negation_forms_agree():
    forms = ["not (x.oclIsUndefined())", "x.oclIsUndefined() = false", "false = x.oclIsUndefined()",
             "x.oclIsUndefined() <> true", "not not not x.oclIsUndefined()"]
    shapes = {tuple(to_conjuncts(expr(f))) for f in forms}
    assert shapes == {(Unary("not", undefined("x")),)}


def test_positive_forms_agree():
    forms = ["x.oclIsUndefined()", "x.oclIsUndefined() = true", "not (x.oclIsUndefined() = false)"]
    assert {tuple(to_conjuncts(expr(f))) for f in forms} == {(undefined("x"),)}


def test_property_comparison_left_alone():
    e = expr("self.Flag = true")
    assert normalize_negation(e) == e


def test_disjunction_kept_whole():
    parts = to_conjuncts(expr("a and (b or c) and (d implies e)"))
    assert [type(p).__name__ for p in parts] == ["Name", "Binary", "Binary"]
    assert parts[1].op == "or" and parts[2].op == "implies"


def test_let_flattened_and_bindings_collected():
    e = parse_model("Contract S::op() { postcondition: let s:Sale in s.oclIsNew() and "
                    "let t:Item in t.oclIsNew() }").contracts[0].postcondition
    assert [b.name for b in let_bindings(e)] == ["s", "t"]
    assert len(to_conjuncts(e)) == 2


def test_missing_condition():
    assert to_conjuncts(None) == []
