"""Algebraic properties of the type core over generated type trees."""

from __future__ import annotations

import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from remodel_check.syntax import format_type, parse_type
from remodel_check.typeexpr import (
    STAR, Coroutine, ListOf, Product, Sequence, Variable, Void, free_vars, head, match,
    normalize, substitute, tail,
)
from strategies import concretes, data_items, ground_trees, trees


@settings(max_examples=1000)
@given(trees)
def test_normalize_idempotent(t):
    once = normalize(t)
    assert normalize(once) == once


@settings(max_examples=1000)
@given(trees, trees, trees)
def test_sequence_flattening_is_associative(a, b, c):
    left = normalize(Sequence((Sequence((a, b)), c)))
    right = normalize(Sequence((a, Sequence((b, c)))))
    assert left == right


@settings(max_examples=300)
@given(trees)
def test_normal_form_shape(t):
    def check(u):
        if isinstance(u, Sequence):
            assert len(u.items) >= 2
            for item in u.items:
                assert not isinstance(item, Sequence) and item is not Void
                check(item)
        elif isinstance(u, (Product,)):
            for item in u.items:
                check(item)
        elif isinstance(u, Coroutine):
            check(u.receive)
            check(u.yield_)
        elif isinstance(u, ListOf):
            assert u.length != 0
    check(normalize(t))


def _expand(t):
    """Oracle: the flat item list a sequence stands for, lists unrolled."""
    t = normalize(t)
    if t is Void:
        return []
    if isinstance(t, Sequence):
        return [x for item in t.items for x in _expand(item)]
    if isinstance(t, ListOf) and isinstance(t.length, int):
        return _expand(t.element) * t.length
    return [t]


finite_data = st.lists(
    st.one_of(data_items, st.tuples(concretes, st.integers(1, 3)).map(lambda p: ListOf(*p)),
              st.tuples(concretes, concretes).map(lambda p: Coroutine(*p))),
    min_size=1, max_size=6,
).map(lambda xs: normalize(Sequence(tuple(xs))))


@settings(max_examples=500)
@given(finite_data)
def test_head_tail_reconstructs(t):
    heads = []
    rest = t
    while rest is not Void:
        heads.append(head(rest))
        rest = tail(rest)
    assert heads == _expand(t)


@settings(max_examples=500)
@given(ground_trees)
def test_match_reflexive(t):
    t = normalize(t)
    assert match(t, t) == {}


@st.composite
def linear_patterns(draw):
    """A ground type and a pattern made by abstracting some subterms to fresh variables."""
    t = normalize(draw(ground_trees))
    names = (f"v{i}" for i in itertools.count())

    def abstract(u, top=False):
        if not top and draw(st.integers(0, 3)) == 0:
            return Variable(next(names))
        if isinstance(u, Sequence):
            return Sequence(tuple(abstract(i) for i in u.items))
        if isinstance(u, Product):
            return Product(tuple(abstract(i) for i in u.items))
        if isinstance(u, Coroutine):
            return Coroutine(abstract(u.receive), abstract(u.yield_))
        return u

    return t, abstract(t, top=True)


@settings(max_examples=500)
@given(linear_patterns())
def test_match_substitute_consistency(case):
    candidate, pattern = case
    d = match(candidate, pattern)
    assert d is not None
    assert set(d) == free_vars(pattern)
    assert substitute(pattern, d) == candidate


@settings(max_examples=300)
@given(ground_trees, ground_trees)
def test_match_implies_substitution_agrees(candidate, other):
    # any successful match of a ground pattern binds nothing
    candidate, other = normalize(candidate), normalize(other)
    d = match(candidate, other)
    if d is not None:
        assert d == {}


@settings(max_examples=500)
@given(trees)
def test_print_parse_round_trip(t):
    t = normalize(t)
    assert parse_type(format_type(t)) == t


def test_star_list_is_its_own_tail():
    t = ListOf(parse_type("A"), STAR)
    assert tail(t) == t
