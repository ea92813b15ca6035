import random

import pytest
from hypothesis import given, settings, strategies as st

from astivm.arena import Arena, EventKind, Label, Record, parse_sexpr
from astivm.arith import ARITH_SCHEMA, random_subtree, random_tree, two_y_plus_x
from astivm.errors import ChildAlreadyAttached, ReplacementAttached, SchemaViolation, UnknownNode
from astivm.jitd import JITD_SCHEMA

from oracles import reachable


@pytest.fixture
def fig():
    arena = Arena(ARITH_SCHEMA)
    return arena, two_y_plus_x(arena)


def check_links(arena):
    for nid in reachable(arena):
        for c in arena.children(nid):
            assert arena.parent(c) == nid
    assert arena.parent(arena.root_id) is None


def test_labels_are_interned():
    assert Label("Arith") is Label("Arith")
    assert Label("Arith").id == Label("Arith").id
    assert Label("Arith") != Label("Const")


def test_create_leaf_and_parent_links():
    arena = Arena(ARITH_SCHEMA)
    c1 = arena.create_node("Const", {"val": 0})
    c2 = arena.create_node("Var", {"name": "b"})
    plus = arena.create_node("Arith", {"op": "+"}, [c1, c2])
    assert arena.children(plus) == [c1, c2]
    assert arena.parent(c1) == plus and arena.parent(c2) == plus
    assert arena.attrs(c1) == {"val": 0}


def test_attached_child_is_rejected():
    arena = Arena(ARITH_SCHEMA)
    c1 = arena.create_node("Const", {"val": 0})
    arena.create_node("Arith", {"op": "+"}, [c1, arena.create_node("Const", {"val": 1})])
    with pytest.raises(ChildAlreadyAttached):
        arena.create_node("Arith", {"op": "+"}, [c1])


def test_duplicate_child_is_rejected():
    arena = Arena(ARITH_SCHEMA)
    c = arena.create_node("Const", {"val": 0})
    with pytest.raises(ChildAlreadyAttached):
        arena.create_node("Arith", {"op": "+"}, [c, c])


@pytest.mark.parametrize("label, attrs, n_kids", [
    ("Const", {}, 0),
    ("Const", {"val": 1, "extra": 2}, 0),
    ("Const", {"val": 1}, 1),
    ("Nope", {}, 0),
])
def test_schema_violations(label, attrs, n_kids):
    arena = Arena(ARITH_SCHEMA)
    kids = [arena.create_node("Const", {"val": i}) for i in range(n_kids)]
    with pytest.raises(SchemaViolation):
        arena.create_node(label, attrs, kids)


def test_descendants(fig):
    arena, ids = fig
    assert dict(arena.descendants(ids["x"]).items()) == {ids["x"]: 1}
    assert dict(arena.descendants(ids["plus"]).items()) == {n: 1 for n in ids.values()}


def test_descendants_of_random_tree_match_enumeration():
    arena = random_tree(random.Random(3), 49)
    d = arena.descendants(arena.root_id)
    assert len(d) == 49 == len(reachable(arena))
    assert set(d) == set(reachable(arena))
    assert all(m == 1 for _, m in d.items())


def test_ancestor(fig):
    arena, ids = fig
    assert arena.ancestor(ids["y"], 0) == ids["y"]
    assert arena.ancestor(ids["plus"], 1) is None
    assert arena.ancestor(ids["y"], 2) == ids["plus"]
    assert arena.ancestor(ids["y"], 3) is None
    with pytest.raises(UnknownNode):
        arena.ancestor(999, 1)


def test_replace_left_subtree(fig):
    arena, ids = fig
    zero = arena.create_node("Const", {"val": 0})
    change = arena.replace(ids["times"], zero)
    assert dict(change.removed.items()) == {ids["times"]: 1, ids["two"]: 1, ids["y"]: 1}
    assert dict(change.inserted.items()) == {zero: 1}
    assert arena.children(ids["plus"]) == [zero, ids["x"]]
    assert ids["times"] not in arena and ids["y"] not in arena
    check_links(arena)


def test_replace_root(fig):
    arena, ids = fig
    new = arena.create_node("Var", {"name": "z"})
    change = arena.replace(ids["plus"], new)
    assert set(change.removed) == set(ids.values())
    assert arena.root_id == new and len(arena) == 1


def test_replace_requires_detached_replacement(fig):
    arena, ids = fig
    with pytest.raises(ReplacementAttached):
        arena.replace(ids["times"], ids["x"])
    loose = arena.create_node("Const", {"val": 1})
    with pytest.raises(ReplacementAttached):
        arena.replace(loose, arena.create_node("Const", {"val": 2}))
    with pytest.raises(UnknownNode):
        arena.replace(12345, loose)


def test_events_once_per_allocation_and_reclamation(fig):
    arena, ids = fig
    seen = []
    arena.subscribe(seen.append)
    zero = arena.create_node("Const", {"val": 0})
    arena.replace(ids["times"], zero)
    kinds = [(e.kind, e.node) for e in seen]
    assert kinds[0] == (EventKind.INSERTED, zero)
    assert sorted(n for k, n in kinds if k is EventKind.REMOVED) == sorted([ids["times"], ids["two"], ids["y"]])
    assert len(kinds) == 4


def test_random_replaces_conserve_reachable_nodes():
    rng = random.Random(11)
    arena = random_tree(rng, 301)
    for _ in range(100):
        before = set(reachable(arena))
        target = rng.choice(sorted(before))
        new = random_subtree(arena, rng, rng.randrange(1, 12))
        change = arena.replace(target, new)
        after = set(reachable(arena))
        assert after == (before - set(change.removed)) | set(change.inserted)
        assert len(arena) == len(after)
        check_links(arena)
        d = arena.descendants(arena.root_id)
        assert all(m == 1 for _, m in d.items())


def test_ids_are_never_reused(fig):
    arena, ids = fig
    zero = arena.create_node("Const", {"val": 0})
    arena.replace(ids["times"], zero)
    assert arena.create_node("Const", {"val": 5}) > max(ids.values()) + 1


def test_dump_format(fig):
    arena, _ = fig
    assert arena.dump() == "(Arith {op: +} (Arith {op: *} (Const {val: 2}) (Var {name: y})) (Var {name: x}))"


def test_dump_records():
    arena = Arena(JITD_SCHEMA)
    a = arena.create_node("Array", {"data": (Record(5, 1), Record(1, 2))})
    s = arena.create_node("Singleton", {"data": Record(3, 4)})
    arena.set_root(arena.create_node("Concat", {}, [a, s]))
    text = arena.dump()
    assert text == "(Concat (Array {data: [<5,1> <1,2>]}) (Singleton {data: <3,4>}))"
    other = Arena(JITD_SCHEMA)
    assert other.dump(parse_sexpr(other, text)) == text


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 60), st.integers(0, 10**6))
def test_dump_parse_round_trip(size, seed):
    arena = random_tree(random.Random(seed), size)
    text = arena.dump()
    other = Arena(ARITH_SCHEMA)
    assert other.dump(parse_sexpr(other, text)) == text
