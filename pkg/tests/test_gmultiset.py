import pytest
from hypothesis import given, settings, strategies as st

from astivm.gmultiset import GMultiset, contains, difference, union

from oracles import gm

mults = st.dictionaries(st.integers(0, 20), st.integers(-3, 3), max_size=12)


def test_union_cancels_to_empty():
    assert union(GMultiset({1: 1}), GMultiset({1: -1})) == GMultiset()
    assert len(union(GMultiset({1: 1}), GMultiset({1: -1}))) == 0


def test_union_of_disjoint():
    assert dict(union(GMultiset({"a": 1}), GMultiset({"b": 1})).items()) == {"a": 1, "b": 1}


def test_self_difference_and_negation():
    a = GMultiset({1: 2, 3: -1})
    assert difference(a, a) == GMultiset()
    assert difference(GMultiset(), GMultiset({7: 1})) == {7: -1}


def test_contains_uses_nonzero_multiplicity():
    assert contains(GMultiset({4: -1}), 4)
    assert not contains(GMultiset(), 4)
    assert not contains(union(GMultiset({4: 1}), GMultiset({4: -1})), 4)


def test_zero_entries_are_never_stored():
    m = GMultiset({1: 0, 2: 3})
    assert list(m) == [2]
    m.add(2, -3)
    assert len(m) == 0 and not m


def test_overflow_is_an_error():
    with pytest.raises(OverflowError):
        GMultiset({1: 2**63 - 1}) + GMultiset({1: 1})


def test_not_hashable():
    with pytest.raises(TypeError):
        hash(GMultiset())


@settings(max_examples=300, deadline=None)
@given(mults, mults)
def test_round_trip(a, b):
    ga, gb = GMultiset(a), GMultiset(b)
    assert (ga - gb) + gb == ga
    assert dict((ga - gb).items()) == gm({k: a.get(k, 0) - b.get(k, 0) for k in set(a) | set(b)})


@settings(max_examples=300, deadline=None)
@given(mults, mults, mults)
def test_group_laws(a, b, c):
    ga, gb, gc = GMultiset(a), GMultiset(b), GMultiset(c)
    assert (ga + gb) + gc == ga + (gb + gc)
    assert ga + gb == gb + ga
    assert ga + GMultiset() == ga
    assert ga + (-ga) == GMultiset()
    assert set(ga) == {k for k, v in a.items() if v}
