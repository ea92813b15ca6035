"""A small arithmetic expression language used by examples and tests.

Labels: ``Arith{op}`` with two children, ``Const{val}`` and ``Var{name}``
leaves.  The canonical tree is ``2 * y + x`` and the canonical rule rewrites
``0 + v`` to ``v``.
"""
from __future__ import annotations

import random
from typing import Optional

from .arena import Arena, Schema
from .pattern import AnyNode, Eq, HostPred, Match, attr, match
from .rewrite import Gen, HostFn, Reuse, RewriteRule

ARITH_SCHEMA = Schema({
    "Arith": (("op",), 2),
    "Const": (("val",), 0),
    "Var": (("name",), 0),
})

OPS = ("+", "-", "*")


def two_y_plus_x(arena: Arena) -> dict[str, int]:
    """Build ``(2 * y) + x`` as the arena root; returns ids by role."""
    two = arena.create_node("Const", {"val": 2})
    y = arena.create_node("Var", {"name": "y"})
    times = arena.create_node("Arith", {"op": "*"}, [two, y])
    x = arena.create_node("Var", {"name": "x"})
    plus = arena.create_node("Arith", {"op": "+"}, [times, x])
    arena.set_root(plus)
    return {"plus": plus, "times": times, "two": two, "y": y, "x": x}


def add_zero_pattern() -> Match:
    """``Arith A [Const B, Var C]`` with ``A.op = +`` and ``B.val = 0``."""
    return match("Arith", "A", [
        match("Const", "B", where=Eq(attr("B", "val"), 0)),
        match("Var", "C"),
    ], where=Eq(attr("A", "op"), "+"))


def add_zero_rule() -> RewriteRule:
    return RewriteRule("AddZero", add_zero_pattern(), Reuse("C"), cli_name="add-zero")


def _fold(scope, env):
    a = scope["A"][1]["op"]
    left, right = scope["B"][1]["val"], scope["C"][1]["val"]
    return {"+": left + right, "-": left - right, "*": left * right}[a]


def extra_rules() -> list[RewriteRule]:
    """Further rules with varied shapes, for randomized testing."""
    is_arith_op = HostPred("folds", lambda s: s["A"][1]["op"] in OPS, uses=("A",))
    return [
        RewriteRule(
            "MulOne",
            match("Arith", "A", [AnyNode("X"), match("Const", "B", where=Eq(attr("B", "val"), 1))],
                  where=Eq(attr("A", "op"), "*")),
            Reuse("X")),
        RewriteRule(
            "FoldConst",
            match("Arith", "A", [match("Const", "B"), match("Const", "C")], where=is_arith_op),
            Gen("Const", {"val": HostFn("fold", _fold)})),
        RewriteRule(
            "ReassocAdd",
            match("Arith", "A", [
                match("Arith", "B", [AnyNode("X"), AnyNode("Y")], where=Eq(attr("B", "op"), "+")),
                AnyNode("Z"),
            ], where=Eq(attr("A", "op"), "+")),
            Gen("Arith", {"op": attr("A", "op")}, [
                Reuse("X"), Gen("Arith", {"op": attr("B", "op")}, [Reuse("Y"), Reuse("Z")])])),
        RewriteRule(
            "SwapVarLeft",
            match("Arith", "A", [match("Var", "V"), match("Const", "K")],
                  where=Eq(attr("A", "op"), "+")),
            Gen("Arith", {"op": "+"}, [Reuse("K"), Reuse("V")])),
    ]


def all_rules() -> list[RewriteRule]:
    return [add_zero_rule(), *extra_rules()]


def random_subtree(arena: Arena, rng: random.Random, size: int, max_const: int = 3,
                   names: str = "xyzw") -> int:
    """Detached random expression with about ``size`` nodes (always odd)."""
    if size <= 1:
        if rng.random() < 0.5:
            return arena.create_node("Const", {"val": rng.randrange(max_const)})
        return arena.create_node("Var", {"name": rng.choice(names)})
    left = rng.randrange(0, size - 1) | 1
    right = max(1, size - 1 - left)
    return arena.create_node("Arith", {"op": rng.choice(OPS)}, [
        random_subtree(arena, rng, left, max_const, names),
        random_subtree(arena, rng, right, max_const, names),
    ])


def random_tree(rng: random.Random, size: int, arena: Optional[Arena] = None) -> Arena:
    arena = arena or Arena(ARITH_SCHEMA)
    arena.set_root(random_subtree(arena, rng, size))
    return arena
