from __future__ import annotations

import pytest

from remodel_check.syntax import parse_type as T
from remodel_check.typeexpr import (
    STAR, Concrete, ConstraintViolation, Conjunction, Coroutine, ListOf, NotInSet, Product,
    Sequence, SubtypeOf, TypeExprError, Variable, Void, eval_constraint, head, join, match,
    normalize, product_to_sequence, residual, seq, substitute, tail,
)

A, B, C = Concrete("A"), Concrete("B"), Concrete("C")
HIER = {"Faculty": "User", "Student": "User", "PhD": "Student"}


class TestNormalize:
    def test_nested_sequences_flatten(self):
        assert normalize(Sequence((Sequence((A, B)), C))) == Sequence((A, B, C))

    def test_void_items_dropped(self):
        assert normalize(Sequence((A, Void, B))) == Sequence((A, B))

    def test_all_void_collapses(self):
        assert normalize(Sequence((Void, Void))) is Void

    def test_singleton_collapses(self):
        assert normalize(Sequence((Void, A))) == A

    def test_empty_list_is_void(self):
        assert normalize(ListOf(A, 0)) is Void

    def test_coroutine_parts_normalized(self):
        t = Coroutine(Sequence((Sequence((A,)), Void)), Sequence((B, Sequence((C,)))))
        assert normalize(t) == Coroutine(A, Sequence((B, C)))

    def test_duplicates_kept(self):
        assert normalize(Sequence((A, A))) == Sequence((A, A))

    def test_product_items_normalized_but_kept(self):
        assert normalize(Product((Sequence((A,)), B))) == Product((A, B))


class TestHeadTail:
    def test_atom(self):
        assert head(Concrete("Int")) == Concrete("Int")
        assert tail(Concrete("Int")) is Void

    def test_sequence(self):
        t = T("<Store, Item>")
        assert head(t) == Concrete("Store")
        assert tail(t) == Concrete("Item")

    def test_coroutine_is_whole(self):
        co = T("[A; B]")
        assert head(co) == co
        assert tail(co) is Void

    def test_sequence_headed_by_coroutine(self):
        t = T("<[A; B], C>")
        assert head(t) == T("[A; B]")
        assert tail(t) == C

    def test_list(self):
        assert head(T("Int^3")) == Concrete("Int")
        assert tail(T("Int^3")) == T("Int^2")
        assert tail(T("Int^1")) is Void
        assert tail(T("Int^*")) == T("Int^*")

    def test_product_is_one_datum(self):
        fact = T("(Parent, Sam, Jane)")
        assert head(T("<(Parent, Sam, Jane), Yes>")) == fact
        assert tail(fact) is Void

    @pytest.mark.parametrize("f", [head, tail])
    def test_void_is_an_error(self, f):
        with pytest.raises(TypeExprError):
            f(Void)


class TestMatch:
    def test_list_length_binds(self):
        assert match(T("Int^5"), T("Int^n")) == {"n": 5}

    def test_non_coroutine_against_coroutine_fails(self):
        assert match(T("Store"), T("[A; B]")) is None

    def test_subtype_constrained_variable(self):
        assert match(T("Faculty"), T("x / x <: User"), HIER) == {"x": Concrete("Faculty")}

    def test_subtype_constraint_rejects_unrelated(self):
        assert match(T("Store"), T("x / x <: User"), HIER) is None

    def test_concrete_self(self):
        assert match(A, A) == {}

    def test_concrete_mismatch(self):
        assert match(A, B) is None

    def test_concrete_supertype_pattern(self):
        assert match(Concrete("PhD"), Concrete("User"), HIER) == {}
        assert match(Concrete("User"), Concrete("PhD"), HIER) is None

    def test_variable_binds(self):
        assert match(T("<A, B>"), Variable("x")) == {"x": T("<A, B>")}

    def test_coroutine_parts_union(self):
        assert match(T("[A; B]"), T("[x; y]")) == {"x": A, "y": B}

    def test_coroutine_conflict_is_failure(self):
        assert match(T("[A; B]"), T("[x; x]")) is None

    def test_constrained_coroutine_checks_predicate(self):
        pattern = T("[x; B] / x <: User")
        assert match(T("[Faculty; B]"), pattern, HIER) == {"x": Concrete("Faculty")}
        assert match(T("[Store; B]"), pattern, HIER) is None

    def test_product_componentwise(self):
        assert match(T("(Parent, Sam, Jane)"), T("(Parent, y, x)")) == {
            "y": Concrete("Sam"), "x": Concrete("Jane")}
        assert match(T("(Parent, Sam)"), T("(Parent, y, x)")) is None

    def test_not_in_set(self):
        pattern = T("(Male, x) / x notin {John, Sam, George}")
        assert match(T("(Male, Sam)"), pattern) is None
        assert match(T("(Male, Sue)"), pattern) == {"x": Concrete("Sue")}

    def test_star_lists(self):
        assert match(T("A^*"), T("A^*")) == {}
        assert match(T("A^3"), T("A^*")) == {}

    def test_failure_absorbs(self):
        assert join({"x": A}, None) is None
        assert join(None, {}) is None
        assert join({"x": A}, {"x": B}) is None
        assert join({"x": A}, {"y": B}) == {"x": A, "y": B}


class TestSubstitute:
    def test_direct(self):
        assert substitute(T("<x, Book>"), {"x": Concrete("User")}) == T("<User, Book>")

    def test_length_oracle(self):
        # oracle: Int^5 must accept exactly a five-item sequence of Int
        result = substitute(T("Int^n"), {"n": 5})
        five = Sequence((Concrete("Int"),) * 5)
        assert match(five, result) == {}
        assert match(Sequence((Concrete("Int"),) * 4), result) is None

    def test_identity(self):
        assert substitute(A, {}) == A

    def test_satisfied_constraint_dropped(self):
        t = substitute(T("[x; B] / x <: User"), {"x": Concrete("Faculty")}, HIER)
        assert t == T("[Faculty; B]")

    def test_partial_constraint_kept(self):
        t = substitute(T("[<x, y>; B] / x <: User and y <: User"), {"x": Concrete("Faculty")}, HIER)
        assert t == T("[<Faculty, y>; B] / y <: User")

    def test_violation_is_error(self):
        with pytest.raises(ConstraintViolation):
            substitute(T("[x; B] / x <: User"), {"x": Concrete("Store")}, HIER)

    def test_failure_binding_rejected(self):
        with pytest.raises(TypeExprError):
            substitute(A, None)


class TestProductToSequence:
    def test_pair(self):
        assert product_to_sequence(T("(A, B)")) == T("<A, B>")

    def test_singleton(self):
        assert product_to_sequence(Product((A,))) == A

    def test_one_level_only(self):
        assert product_to_sequence(T("((A, B), C)")) == Sequence((T("(A, B)"), C))

    def test_non_product(self):
        with pytest.raises(TypeExprError):
            product_to_sequence(A)


class TestConstraints:
    def test_subtype_holds(self):
        assert eval_constraint(SubtypeOf("x", "User"), {"x": Concrete("Faculty")}, HIER)

    def test_subtype_transitive_and_reflexive(self):
        assert eval_constraint(SubtypeOf("x", "User"), {"x": Concrete("PhD")}, HIER)
        assert eval_constraint(SubtypeOf("x", "User"), {"x": Concrete("User")}, HIER)

    def test_subtype_unrelated(self):
        assert not eval_constraint(SubtypeOf("x", "User"), {"x": Concrete("Store")}, HIER)

    def test_exclusion_set(self):
        p = NotInSet(("x", "y"), (("John", "Sue"), ("Jane", "Sue")))
        assert not eval_constraint(p, {"x": Concrete("John"), "y": Concrete("Sue")})
        assert eval_constraint(p, {"x": Concrete("John"), "y": Concrete("Sam")})

    def test_conjunction(self):
        p = Conjunction((SubtypeOf("x", "User"), NotInSet(("x",), (("Faculty",),))))
        assert not eval_constraint(p, {"x": Concrete("Faculty")}, HIER)
        assert eval_constraint(p, {"x": Concrete("PhD")}, HIER)

    def test_unbound_is_error(self):
        with pytest.raises(TypeExprError):
            eval_constraint(SubtypeOf("x", "User"), {}, HIER)

    def test_residual(self):
        p = Conjunction((SubtypeOf("x", "User"), SubtypeOf("y", "User")))
        assert residual(p, {"x": Concrete("Faculty")}, HIER) == SubtypeOf("y", "User")
        assert residual(p, {"x": Concrete("Store")}, HIER) is False
        assert residual(p, {"x": Concrete("User"), "y": Concrete("PhD")}, HIER) is True


def test_seq_helper_normalizes():
    assert seq(A, Void, seq(B, C)) == Sequence((A, B, C))
    assert seq() is Void
    assert ListOf(A, STAR) == T("A^*")
