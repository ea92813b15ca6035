import random

import pytest
from hypothesis import given, settings, strategies as st

from astivm.arena import Arena, Record
from astivm.baseline import naive_search
from astivm.engine import Engine
from astivm.jitd import (
    JITD_SCHEMA, WRITES, OpKind, WorkloadOp, apply_workload_op, build_rules, bulk_load, contents,
    load_array, read, run_optimizer, scan, separator_violations,
)

from oracles import as_records, match_set, reachable, tree_records


def make_engine(threshold=4, seed=0, method="ivm-inlined", **kw):
    arena = Arena(JITD_SCHEMA)
    engine = Engine(arena, build_rules(threshold), method=method,
                    extra_rules=list(WRITES.values()), env={"rng": random.Random(seed)}, **kw)
    return arena, engine


def rule(engine, name):
    return next(r for r in engine.rules if r.name == name)


def names(arena, nid=None):
    return arena.label(arena.root_id if nid is None else nid).name


def leaves(arena):
    return [n for n in reachable(arena) if names(arena, n) == "Array"]


def test_crack_splits_around_pivot():
    arena, engine = make_engine(threshold=3)
    recs = [Record(k, k * 10) for k in (5, 1, 9)]
    load_array(engine, recs)
    view = engine.view("ivm-inlined", "CrackArray")
    nid, _ = view.pop()
    assert engine.apply_rule(rule(engine, "CrackArray"), nid)
    root = arena.root_id
    sep = arena.attrs(root)["sep"]
    assert names(arena) == "BinTree" and sep in (5, 9)
    left, right = arena.children(root)
    assert all(r.key < sep for r in arena.attrs(left)["data"])
    assert all(r.key >= sep for r in arena.attrs(right)["data"])
    assert arena.attrs(left)["data"] and arena.attrs(right)["data"]
    assert contents(arena) == as_records({5: 50, 1: 10, 9: 90})


def test_small_or_uniform_arrays_are_not_cracked():
    arena, engine = make_engine(threshold=4)
    load_array(engine, [Record(k, 0) for k in (1, 2, 3)])
    assert len(engine.view("ivm-inlined", "CrackArray")) == 0
    arena, engine = make_engine(threshold=4)
    load_array(engine, [Record(7, i) for i in range(10)])
    assert len(engine.view("ivm-inlined", "CrackArray")) == 0


def test_insert_and_delete_wrap_the_root():
    arena, engine = make_engine()
    old = load_array(engine, [Record(1, 1)])
    apply_workload_op(engine, WorkloadOp(OpKind.INSERT, 2, 20))
    assert names(arena) == "Concat"
    assert arena.children(arena.root_id)[0] == old
    assert arena.dump() == "(Concat (Array {data: [<1,1>]}) (Singleton {data: <2,20>}))"
    apply_workload_op(engine, WorkloadOp(OpKind.DELETE, 1))
    assert arena.dump().startswith("(DeleteSingleton {key: 1} (Concat")
    assert contents(arena) == as_records({2: 20})
    assert read(arena, 1) is None and read(arena, 2) == 20


def test_update_and_read_modify_write():
    arena, engine = make_engine()
    load_array(engine, [Record(1, 1), Record(2, 2)])
    apply_workload_op(engine, WorkloadOp(OpKind.UPDATE, 1, 11))
    apply_workload_op(engine, WorkloadOp(OpKind.READ_MODIFY_WRITE, 2, 22))
    assert contents(arena) == as_records({1: 11, 2: 22})
    assert apply_workload_op(engine, WorkloadOp(OpKind.READ, 2)) == 22
    assert apply_workload_op(engine, WorkloadOp(OpKind.SCAN, 2, length=5)) == [Record(2, 22)]


def tree_with_bintree(arena, engine):
    a1 = arena.create_node("Array", {"data": (Record(1, 1),)})
    a2 = arena.create_node("Array", {"data": (Record(9, 9),)})
    bt = arena.create_node("BinTree", {"sep": 5}, [a1, a2])
    engine.set_root(bt)
    return bt, a1, a2


@pytest.mark.parametrize("key, side", [(2, 0), (5, 1), (7, 1)])
def test_singleton_is_pushed_to_its_side(key, side):
    arena, engine = make_engine()
    bt, a1, a2 = tree_with_bintree(arena, engine)
    apply_workload_op(engine, WorkloadOp(OpKind.INSERT, key, 0))
    run_optimizer(engine)
    assert names(arena) == "BinTree" and arena.root_id != bt
    child = arena.children(arena.root_id)[side]
    assert names(arena, child) == "Concat"
    assert arena.children(child)[0] == (a1, a2)[side]
    assert separator_violations(arena) == []


@pytest.mark.parametrize("key, side", [(1, 0), (5, 1)])
def test_delete_is_pushed_to_its_side(key, side):
    arena, engine = make_engine()
    tree_with_bintree(arena, engine)
    apply_workload_op(engine, WorkloadOp(OpKind.DELETE, key))
    run_optimizer(engine)
    child = arena.children(arena.root_id)[side]
    assert names(arena, child) == "DeleteSingleton" and arena.attrs(child) == {"key": key}
    assert contents(arena) == (as_records({9: 9}) if key == 1 else as_records({1: 1, 9: 9}))


def test_cracking_to_fixpoint_yields_one_bintree_per_extra_leaf():
    arena, engine = make_engine(threshold=8, seed=3)
    recs = [Record(k, k) for k in random.Random(1).sample(range(10_000), 1000)]
    load_array(engine, recs)
    stats = run_optimizer(engine)
    assert stats.reached_fixpoint
    n_leaves = len(leaves(arena))
    assert stats.firings["CrackArray"] == n_leaves - 1
    assert all(len(arena.attrs(n)["data"]) < 8 for n in leaves(arena))
    assert separator_violations(arena) == []
    assert contents(arena) == tree_records(arena) == as_records({r.key: r.value for r in recs})


def test_thousand_inserts_reach_fixpoint():
    arena, engine = make_engine(threshold=8, seed=2)
    bulk_load(engine, [Record(k, k) for k in range(0, 2000, 2)], random.Random(4), 8)
    rng = random.Random(9)
    ref = {k: k for k in range(0, 2000, 2)}
    for k in rng.sample(range(1, 2000, 2), 1000):
        apply_workload_op(engine, WorkloadOp(OpKind.INSERT, k, -k))
        ref[k] = -k
    stats = run_optimizer(engine)
    assert stats.reached_fixpoint
    for r in engine.rules:
        assert naive_search(arena, r.pattern) is None
        assert len(engine.view("ivm-inlined", r.name)) == 0
    assert contents(arena) == as_records(ref)
    assert separator_violations(arena) == []


def test_bulk_load_matches_cracked_shape():
    arena, engine = make_engine(threshold=16)
    recs = [Record(k, k) for k in range(500)]
    bulk_load(engine, recs, random.Random(0), 16)
    n_leaves = len(leaves(arena))
    n_bintrees = sum(names(arena, n) == "BinTree" for n in reachable(arena))
    assert n_bintrees == n_leaves - 1
    assert all(len(arena.attrs(n)["data"]) < 16 for n in leaves(arena))
    assert separator_violations(arena) == []
    assert naive_search(arena, rule(engine, "CrackArray").pattern) is None
    assert contents(arena) == as_records({k: k for k in range(500)})


def test_separator_violation_is_reported():
    arena, engine = make_engine()
    a1 = arena.create_node("Array", {"data": (Record(6, 1),)})
    a2 = arena.create_node("Array", {"data": (Record(9, 9),)})
    bt = arena.create_node("BinTree", {"sep": 5}, [a1, a2])
    engine.set_root(bt)
    assert separator_violations(arena) == [bt]


def test_scan_is_sorted_and_bounded():
    arena, engine = make_engine()
    load_array(engine, [Record(k, k) for k in (9, 3, 7, 1, 5)])
    assert scan(arena, 3, 2) == [Record(3, 3), Record(5, 5)]


ops = st.lists(st.tuples(st.sampled_from([OpKind.INSERT, OpKind.DELETE, OpKind.UPDATE, OpKind.READ]),
                         st.integers(0, 60), st.integers(0, 99)), max_size=60)


@settings(max_examples=40, deadline=None)
@given(ops, st.integers(0, 10**6), st.sampled_from(["naive", "index", "ivm", "ivm-inlined"]))
def test_workload_preserves_contents_and_separators(seq, seed, method):
    arena, engine = make_engine(threshold=4, seed=seed, method=method)
    ref = {k: k for k in range(0, 60, 3)}
    bulk_load(engine, [Record(k, v) for k, v in ref.items()], random.Random(seed), 4)
    for i, (kind, key, value) in enumerate(seq):
        if kind is OpKind.INSERT and key in ref:
            kind = OpKind.UPDATE
        got = apply_workload_op(engine, WorkloadOp(kind, key, value))
        if kind is OpKind.READ:
            assert got == ref.get(key)
        elif kind is OpKind.DELETE:
            ref.pop(key, None)
        else:
            ref[key] = value
        if i % 3 == 0:
            run_optimizer(engine)
        assert contents(arena) == tree_records(arena) == as_records(ref)
        assert separator_violations(arena) == []
    stats = run_optimizer(engine)
    assert stats.reached_fixpoint
    assert all(not match_set(arena, r.pattern) for r in engine.rules)
