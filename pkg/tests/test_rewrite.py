import random

import pytest
from hypothesis import given, settings, strategies as st

from astivm.arena import Arena, Record
from astivm.arith import ARITH_SCHEMA, add_zero_pattern, add_zero_rule, all_rules, random_tree, two_y_plus_x
from astivm.engine import Engine
from astivm.errors import HostFnFailure, MatchMismatch, UnboundReuse, UnsafeGenerator
from astivm.gmultiset import GMultiset, contains
from astivm.jitd import JITD_SCHEMA, build_rules, crack_rule
from astivm.pattern import AnyNode, match, match_node
from astivm.rewrite import (
    Gen, HostFn, Reuse, RewriteRule, generate, generated_pairs, is_safe, match_pairs, rewrite_delta,
)

from oracles import reachable


def plus_zero_x():
    arena = Arena(ARITH_SCHEMA)
    c = arena.create_node("Const", {"val": 0})
    v = arena.create_node("Var", {"name": "x"})
    root = arena.create_node("Arith", {"op": "+"}, [c, v])
    arena.set_root(root)
    return arena, root, c, v


def bindings(arena, q, nid):
    return match_node(q, arena.node(nid))


def label_delta(arena, delta):
    out = {}
    for nid, m in delta.items():
        name = arena.label(nid).name
        out[name] = out.get(name, 0) + m
    return {k: v for k, v in out.items() if v}


def test_reuse_returns_bound_node():
    arena, root, _, v = plus_zero_x()
    scope, mu = bindings(arena, add_zero_pattern(), root)
    assert generate(arena, Reuse("C"), scope, mu) == v


def test_gen_builds_fresh_node_from_scope():
    arena, root, _, _ = plus_zero_x()
    scope, mu = bindings(arena, add_zero_pattern(), root)
    nid = generate(arena, Gen("Const", {"val": HostFn("one", lambda s, e: 1)}), scope, mu)
    assert arena.attrs(nid) == {"val": 1} and nid not in {0, 1, 2}


def test_crack_generator_splits_at_pivot():
    arena = Arena(JITD_SCHEMA)
    data = (Record(5, 1), Record(1, 2), Record(9, 3))
    arr = arena.create_node("Array", {"data": data})
    arena.set_root(arr)
    rule = crack_rule(threshold=2)
    scope, mu = bindings(arena, rule.pattern, arr)
    out = generate(arena, rule.generator, scope, mu, {"sep": 5})
    assert arena.dump(out) == "(BinTree {sep: 5} (Array {data: [<1,2>]}) (Array {data: [<5,1> <9,3>]}))"


def test_unbound_reuse_and_host_failure():
    arena, root, _, _ = plus_zero_x()
    scope, mu = bindings(arena, add_zero_pattern(), root)
    with pytest.raises(UnboundReuse):
        generate(arena, Reuse("Q"), scope, mu)
    with pytest.raises(HostFnFailure):
        generate(arena, Gen("Const", {"val": HostFn("bad", lambda s, e: 1 // 0)}), scope, mu)


def test_match_pairs():
    arena, root, c, v = plus_zero_x()
    assert match_pairs(arena, add_zero_pattern(), root) == {(): root, (0,): c, (1,): v}
    assert match_pairs(arena, AnyNode("T"), root) == {(): root}
    with pytest.raises(MatchMismatch):
        match_pairs(arena, add_zero_pattern(), c)


def test_match_pairs_of_pushdown_include_wildcards():
    arena = Arena(JITD_SCHEMA)
    a1 = arena.create_node("Array", {"data": (Record(1, 1),)})
    a2 = arena.create_node("Array", {"data": (Record(9, 9),)})
    bt = arena.create_node("BinTree", {"sep": 5}, [a1, a2])
    s = arena.create_node("Singleton", {"data": Record(2, 2)})
    cat = arena.create_node("Concat", {}, [bt, s])
    arena.set_root(cat)
    rule = {r.name: r for r in build_rules()}["PushDownSingletonBtreeLeft"]
    mp = match_pairs(arena, rule.pattern, cat)
    assert mp == {(): cat, (0,): bt, (0, 0): a1, (0, 1): a2, (1,): s}
    assert rule.removed_paths() == [(), (0,)]


@pytest.mark.parametrize("pattern, gen, safe", [
    (add_zero_pattern(), Reuse("C"), True),
    (add_zero_pattern(), Gen("Const", {"val": 0}), True),
    (match("Arith", "A", [AnyNode("X"), AnyNode("Y")]), Reuse("X"), False),
    (match("Arith", "A", [AnyNode("X"), AnyNode("Y")]),
     Gen("Arith", {"op": "+"}, [Reuse("X"), Reuse("X")]), False),
    (match("Arith", "A", [AnyNode("X"), AnyNode("Y")]),
     Gen("Arith", {"op": "+"}, [Reuse("Y"), Reuse("X")]), True),
    (match("Arith", "A", [AnyNode(), AnyNode("Y")]), Reuse("Y"), False),
    (add_zero_pattern(), Gen("Arith", {"op": "+"}, [Reuse("A"), Reuse("C")]), False),
    (add_zero_pattern(), Reuse("Z"), False),
])
def test_is_safe(pattern, gen, safe):
    assert is_safe(pattern, gen) is safe
    if not safe:
        with pytest.raises(UnsafeGenerator):
            RewriteRule("r", pattern, gen)


def test_delta_of_running_rule():
    arena, root, c, v = plus_zero_x()
    rule = add_zero_rule()
    scope, mu = bindings(arena, rule.pattern, root)
    mp = match_pairs(arena, rule.pattern, root)
    positions = {}
    generate(arena, rule.generator, scope, mu, positions=positions)
    delta = rewrite_delta(generated_pairs(rule.pattern, rule.generator, positions, mp), mp)
    assert dict(delta.items()) == {root: -1, c: -1}
    assert label_delta(arena, delta) == {"Arith": -1, "Const": -1}


def test_delta_of_crack():
    arena = Arena(JITD_SCHEMA)
    arr = arena.create_node("Array", {"data": (Record(5, 1), Record(1, 2), Record(9, 3))})
    arena.set_root(arr)
    rule = crack_rule(threshold=2)
    scope, mu = bindings(arena, rule.pattern, arr)
    mp = match_pairs(arena, rule.pattern, arr)
    positions = {}
    generate(arena, rule.generator, scope, mu, {"sep": 5}, positions)
    delta = rewrite_delta(generated_pairs(rule.pattern, rule.generator, positions, mp), mp)
    assert label_delta(arena, delta) == {"BinTree": 1, "Array": 1}
    assert sorted(m for _, m in delta.items()) == [-1, 1, 1, 1]


def test_identity_rewrite_cancels_fully():
    arena, root, _, _ = plus_zero_x()
    rule = RewriteRule("id", AnyNode("T"), Reuse("T"))
    scope, mu = bindings(arena, rule.pattern, root)
    mp = match_pairs(arena, rule.pattern, root)
    positions = {}
    generate(arena, rule.generator, scope, mu, positions=positions)
    assert rewrite_delta(generated_pairs(rule.pattern, rule.generator, positions, mp), mp) == GMultiset()


def test_apply_rule_after_left_subtree_becomes_zero():
    arena = Arena(ARITH_SCHEMA)
    ids = two_y_plus_x(arena)
    engine = Engine(arena, [add_zero_rule()])
    engine.replace(ids["times"], arena.create_node("Const", {"val": 0}))
    assert engine.view("ivm-inlined", "AddZero").ids() == {ids["plus"]}
    nid, _ = engine.search(engine.rules[0])
    assert engine.apply_rule(engine.rules[0], nid)
    assert arena.root_id == ids["x"] and arena.dump() == "(Var {name: x})"
    assert len(engine.view("ivm-inlined", "AddZero")) == 0


def test_stale_match_is_not_applied():
    arena = Arena(ARITH_SCHEMA)
    ids = two_y_plus_x(arena)
    engine = Engine(arena, [add_zero_rule()])
    assert not engine.apply_rule(engine.rules[0], ids["plus"])
    assert not engine.apply_rule(engine.rules[0], 999)
    assert arena.dump() == "(Arith {op: +} (Arith {op: *} (Const {val: 2}) (Var {name: y})) (Var {name: x}))"


def test_builtin_rules_are_safe():
    for rule in all_rules() + build_rules():
        assert is_safe(rule.pattern, rule.generator)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 150), st.integers(0, 10**6))
def test_firing_delta_equals_structural_change(size, seed):
    rng = random.Random(seed)
    arena = random_tree(rng, size)
    for _ in range(10):
        hits = [(rule, n) for rule in all_rules() for n in reachable(arena)
                if match_node(rule.pattern, arena.node(n)) is not None]
        if not hits:
            break
        rule, at = rng.choice(hits)
        before = set(reachable(arena))
        scope, mu = bindings(arena, rule.pattern, at)
        mp = match_pairs(arena, rule.pattern, at)
        positions = {}
        r_new = generate(arena, rule.generator, scope, mu, positions=positions)
        change = arena.replace(at, r_new)
        gp = generated_pairs(rule.pattern, rule.generator, positions, mp)
        delta = rewrite_delta(gp, mp)
        assert delta == change.inserted - change.removed
        assert not any(contains(delta, mu[v]) for v in rule.reused_vars)
        assert len(delta) <= len(list(rule.pattern.positions())) + len(list(rule.generator.positions()))
        assert set(reachable(arena)) == (before - set(change.removed)) | set(change.inserted)
        # every generated node is live and appears once
        assert all(nid in arena for nid in gp.values())
