"""Crack an array into a search tree, then push writes down to the leaves.

    python demos/jitd_walkthrough.py
"""
import random

from astivm import Arena, Engine
from astivm.arena import Record
from astivm.jitd import (
    JITD_SCHEMA, WRITES, OpKind, WorkloadOp, apply_workload_op, build_rules, contents, load_array,
    read, run_optimizer, separator_violations,
)


def show(arena, title):
    print(f"{title}\n  {arena.dump()}\n")


def main():
    arena = Arena(JITD_SCHEMA)
    engine = Engine(arena, build_rules(threshold=4), extra_rules=list(WRITES.values()),
                    env={"rng": random.Random(7)})
    load_array(engine, [Record(k, k * 10) for k in (8, 3, 5, 1, 9, 2, 7)])
    show(arena, "loaded")

    stats = run_optimizer(engine)
    show(arena, f"cracked ({dict(stats.firings)})")

    apply_workload_op(engine, WorkloadOp(OpKind.INSERT, 4, 40))
    apply_workload_op(engine, WorkloadOp(OpKind.DELETE, 9))
    show(arena, "after insert 4 and delete 9")

    stats = run_optimizer(engine)
    show(arena, f"writes pushed down ({dict(stats.firings)})")

    print("read(4) =", read(arena, 4), " read(9) =", read(arena, 9))
    print("records:", sorted(contents(arena)))
    print("separator violations:", separator_violations(arena))


if __name__ == "__main__":
    main()
