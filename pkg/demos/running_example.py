"""Maintain a match view of ``0 + v`` while an expression tree is rewritten.

    python demos/running_example.py
"""
from astivm import Arena, Engine
from astivm.arith import ARITH_SCHEMA, add_zero_rule, two_y_plus_x
from astivm.match_view import maximal_search_set
from astivm.sql import pattern_to_sql


def main():
    arena = Arena(ARITH_SCHEMA)
    ids = two_y_plus_x(arena)
    rule = add_zero_rule()
    engine = Engine(arena, [rule], record=True)
    view = engine.view("ivm-inlined", rule.name)
    print("tree:   ", arena.dump())
    print("pattern:", pattern_to_sql(rule.pattern))
    print("matches:", sorted(view.ids()))

    zero = arena.create_node("Const", {"val": 0})
    change = engine.replace(ids["times"], zero)
    mss = maximal_search_set(arena, change, view.depth)
    print("\nreplace 2*y with 0")
    print("tree:   ", arena.dump())
    print("delta:  ", dict(mss.as_gmultiset().items()))
    print("matches:", sorted(view.ids()))

    nid, _ = engine.search(rule)
    engine.apply_rule(rule, nid)
    report = engine.last_firing
    print("\nfire AddZero at", nid)
    print("tree:   ", arena.dump())
    print("checked:", sorted(report.candidates[rule.name]))
    print("matches:", sorted(view.ids()))


if __name__ == "__main__":
    main()
