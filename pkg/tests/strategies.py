"""Hypothesis generators for type expressions."""

from __future__ import annotations

from hypothesis import strategies as st

from remodel_check.typeexpr import (
    STAR, Concrete, Coroutine, ListOf, Product, Sequence, Variable, Void,
)

CONCRETE_NAMES = ["A", "B", "C", "Int", "Store", "Item", "User", "Faculty"]
VAR_NAMES = ["x", "y", "z", "w"]

concretes = st.sampled_from(CONCRETE_NAMES).map(Concrete)
variables = st.sampled_from(VAR_NAMES).map(Variable)
lengths = st.one_of(st.integers(0, 4), st.just(STAR))


def _extend(children):
    return st.one_of(
        st.lists(children, min_size=0, max_size=4).map(lambda xs: Sequence(tuple(xs))),
        st.lists(children, min_size=2, max_size=3).map(lambda xs: Product(tuple(xs))),
        st.tuples(children, children).map(lambda p: Coroutine(*p)),
        st.tuples(concretes, lengths).map(lambda p: ListOf(*p)),
    )


# raw, possibly non-normal trees over concrete leaves
ground_trees = st.recursive(st.one_of(concretes, st.just(Void)), _extend, max_leaves=12)

# trees that may contain variables as leaves
trees = st.recursive(st.one_of(concretes, variables, st.just(Void)), _extend, max_leaves=12)

# flat data without lists or coroutines: what head/tail walk over
data_items = st.one_of(concretes, st.lists(concretes, min_size=2, max_size=3).map(
    lambda xs: Product(tuple(xs))))
