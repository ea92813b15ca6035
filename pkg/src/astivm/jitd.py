"""An adaptive key-value index expressed as an AST and reorganized by rewrites.

Leaves hold records (``Array`` with many, ``Singleton`` with one).  Writes
wrap the current root: an insert becomes ``Concat[root, Singleton]``, a
delete ``DeleteSingleton{key}[root]``.  Five rules then crack large arrays
into a ``BinTree`` and push pending writes down towards the leaves.

The logical content of a tree is the multiset of records under it, minus
every record beneath a ``DeleteSingleton`` that carries the same key.
"""
from __future__ import annotations

import enum
from collections import Counter
from typing import NamedTuple, Optional, Sequence

from .arena import Arena, Record, Schema
from .engine import Engine, OptimizerBudget, OptimizerStats, run_optimizer
from .pattern import AnyNode, HostPred, Lt, Not, attr, match
from .rewrite import Gen, HostFn, Reuse, RewriteRule

JITD_SCHEMA = Schema({
    "Array": (("data",), 0),
    "Singleton": (("data",), 0, ("data",)),
    "DeleteSingleton": (("key",), 1),
    "Concat": ((), 2),
    "BinTree": (("sep",), 2),
})

CRACK_THRESHOLD = 16

__all__ = [
    "JITD_SCHEMA", "CRACK_THRESHOLD", "OpKind", "WorkloadOp", "build_rules", "write_rules",
    "load_array", "bulk_load", "apply_workload_op", "read", "scan", "contents", "separator_violations",
    "run_optimizer", "OptimizerBudget", "OptimizerStats",
]


# ---------------------------------------------------------------------------
# rules


def _crackable(threshold: int):
    def test(scope) -> bool:
        data = scope["A"][1]["data"]
        if len(data) < threshold:
            return False
        first = data[0].key
        return any(r.key != first for r in data)
    return test


def _pick_pivot(scope, env):
    # pivots strictly above the minimum key keep both halves non-empty
    keys = sorted({r.key for r in scope["A"][1]["data"]})
    return {"sep": keys[1 + env["rng"].randrange(len(keys) - 1)]}


def _left(scope, env):
    sep = env["sep"]
    return tuple(r for r in scope["A"][1]["data"] if r.key < sep)


def _right(scope, env):
    sep = env["sep"]
    return tuple(r for r in scope["A"][1]["data"] if r.key >= sep)


def _pushdown_singleton(left: bool) -> RewriteRule:
    below = Lt(attr("S", "data", "key"), attr("B", "sep"))
    pattern = match("Concat", "C", [
        match("BinTree", "B", [AnyNode("q1"), AnyNode("q2")]),
        match("Singleton", "S"),
    ], where=below if left else Not(below))
    if left:
        gen = Gen("BinTree", {"sep": attr("B", "sep")}, [
            Gen("Concat", {}, [Reuse("q1"), Reuse("S")]), Reuse("q2")])
    else:
        gen = Gen("BinTree", {"sep": attr("B", "sep")}, [
            Reuse("q1"), Gen("Concat", {}, [Reuse("q2"), Reuse("S")])])
    side = "Left" if left else "Right"
    return RewriteRule(f"PushDownSingletonBtree{side}", pattern, gen,
                       cli_name=f"pushdown-s-{side[0].lower()}")


def _pushdown_delete(left: bool) -> RewriteRule:
    below = Lt(attr("D", "key"), attr("B", "sep"))
    pattern = match("DeleteSingleton", "D", [
        match("BinTree", "B", [AnyNode("q1"), AnyNode("q2")]),
    ], where=below if left else Not(below))
    key = {"key": attr("D", "key")}
    if left:
        gen = Gen("BinTree", {"sep": attr("B", "sep")}, [
            Gen("DeleteSingleton", key, [Reuse("q1")]), Reuse("q2")])
    else:
        gen = Gen("BinTree", {"sep": attr("B", "sep")}, [
            Reuse("q1"), Gen("DeleteSingleton", key, [Reuse("q2")])])
    side = "Left" if left else "Right"
    return RewriteRule(f"PushDownDeleteSingletonBtree{side}", pattern, gen,
                       cli_name=f"pushdown-ds-{side[0].lower()}")


def crack_rule(threshold: int = CRACK_THRESHOLD) -> RewriteRule:
    """Split an Array of at least ``threshold`` records around a random key.

    The engine environment must carry a seeded ``random.Random`` as ``rng``.
    """
    pattern = match("Array", "A", where=HostPred(f"len_ge_{threshold}", _crackable(threshold), ("A",)))
    gen = Gen("BinTree", {"sep": HostFn("pivot", lambda s, env: env["sep"])}, [
        Gen("Array", {"data": HostFn("below_pivot", _left)}),
        Gen("Array", {"data": HostFn("from_pivot", _right)}),
    ])
    return RewriteRule("CrackArray", pattern, gen, bind=_pick_pivot, cli_name="crack")


def build_rules(threshold: int = CRACK_THRESHOLD) -> list[RewriteRule]:
    return [
        crack_rule(threshold),
        _pushdown_singleton(True),
        _pushdown_singleton(False),
        _pushdown_delete(True),
        _pushdown_delete(False),
    ]


def write_rules() -> dict[str, RewriteRule]:
    """Root-wrapping rules that realise inserts and deletes as rewrites."""
    insert = RewriteRule("Insert", AnyNode("T"), Gen("Concat", {}, [
        Reuse("T"), Gen("Singleton", {"data": HostFn("record", lambda s, env: env["record"])})]))
    delete = RewriteRule("Delete", AnyNode("T"), Gen(
        "DeleteSingleton", {"key": HostFn("key", lambda s, env: env["key"])}, [Reuse("T")]))
    return {"insert": insert, "delete": delete}


WRITES = write_rules()


# ---------------------------------------------------------------------------
# workload operations


class OpKind(enum.Enum):
    INSERT = "insert"
    DELETE = "delete"
    READ = "read"
    SCAN = "scan"
    UPDATE = "update"
    READ_MODIFY_WRITE = "rmw"


class WorkloadOp(NamedTuple):
    kind: OpKind
    key: int
    value: int = 0
    length: int = 0


def load_array(engine: Engine, records: Sequence[Record]) -> int:
    arena = engine.arena
    root = arena.create_node("Array", {"data": tuple(records)})
    engine.set_root(root)
    return root


def bulk_load(engine: Engine, records: Sequence[Record], rng, threshold: int = CRACK_THRESHOLD) -> int:
    """Install the tree CrackArray would reach at fixpoint, built directly.

    Pivots are drawn exactly as the rule draws them, so the result has the
    same distribution as loading one Array and cracking it to completion.
    """
    arena = engine.arena
    crackable = _crackable(threshold)

    def build(data: tuple) -> int:
        scope = {"A": (None, {"data": data})}
        if not crackable(scope):
            return arena.create_node("Array", {"data": data})
        env = {"rng": rng}
        env.update(_pick_pivot(scope, env))
        left, right = build(_left(scope, env)), build(_right(scope, env))
        return arena.create_node("BinTree", {"sep": env["sep"]}, [left, right])

    root = build(tuple(records))
    engine.set_root(root)
    return root


def apply_workload_op(engine: Engine, op: WorkloadOp, writes: Optional[dict] = None):
    """Apply one operation at the root; returns the read result for reads."""
    writes = writes or WRITES
    arena = engine.arena
    kind = op.kind
    if kind is OpKind.READ:
        return read(arena, op.key)
    if kind is OpKind.SCAN:
        return scan(arena, op.key, op.length)
    if kind is OpKind.READ_MODIFY_WRITE:
        read(arena, op.key)
        kind = OpKind.UPDATE
    if kind in (OpKind.DELETE, OpKind.UPDATE):
        engine.apply_rule(writes["delete"], arena.root_id, {"key": op.key})
    if kind in (OpKind.INSERT, OpKind.UPDATE):
        engine.apply_rule(writes["insert"], arena.root_id, {"record": Record(op.key, op.value)})
    return arena.root_id


# ---------------------------------------------------------------------------
# semantics


def read(arena: Arena, key: int) -> Optional[int]:
    """Value stored under ``key``, following separators where possible."""
    if arena.root is None:
        return None
    stack = [arena.root]
    while stack:
        node = stack.pop()
        name = node.label.name
        if name == "BinTree":
            stack.append(node.children[0] if key < node.attrs["sep"] else node.children[1])
        elif name == "Concat":
            stack.extend(node.children)
        elif name == "DeleteSingleton":
            if node.attrs["key"] != key:
                stack.append(node.children[0])
        elif name == "Singleton":
            if node.attrs["data"].key == key:
                return node.attrs["data"].value
        else:
            for r in node.attrs["data"]:
                if r.key == key:
                    return r.value
    return None


def contents(arena: Arena, nid: Optional[int] = None) -> Counter:
    """Multiset of live records under ``nid`` (default: the root)."""
    node = arena.root if nid is None else arena.node(nid)
    out: Counter = Counter()
    if node is None:
        return out
    hidden: Counter = Counter()
    stack: list = [node]
    while stack:
        item = stack.pop()
        if isinstance(item, int):  # leaving a DeleteSingleton
            hidden[item] -= 1
            continue
        name = item.label.name
        if name == "DeleteSingleton":
            k = item.attrs["key"]
            hidden[k] += 1
            stack.append(k)
            stack.append(item.children[0])
        elif name == "Singleton":
            r = item.attrs["data"]
            if not hidden[r.key]:
                out[r] += 1
        elif name == "Array":
            for r in item.attrs["data"]:
                if not hidden[r.key]:
                    out[r] += 1
        else:
            stack.extend(item.children)
    return out


def scan(arena: Arena, key: int, length: int) -> list[Record]:
    recs = sorted(r for r in contents(arena) if r.key >= key)
    return recs[:length]


def separator_violations(arena: Arena) -> list[int]:
    """BinTree ids whose left subtree holds a key >= sep or right a key < sep.

    Keys are taken physically (records and pending delete keys alike).
    """
    if arena.root is None:
        return []
    bounds: dict[int, tuple] = {}
    bad = []
    stack = [(arena.root, False)]
    while stack:
        node, done = stack.pop()
        if not done:
            stack.append((node, True))
            stack.extend((c, False) for c in node.children)
            continue
        name = node.label.name
        if name == "Array":
            keys = [r.key for r in node.attrs["data"]]
            lo, hi = (min(keys), max(keys)) if keys else (None, None)
        elif name == "Singleton":
            lo = hi = node.attrs["data"].key
        else:
            parts = [bounds.pop(c.id) for c in node.children]
            if name == "DeleteSingleton":
                parts.append((node.attrs["key"], node.attrs["key"]))
            if name == "BinTree":
                sep = node.attrs["sep"]
                (llo, lhi), (rlo, rhi) = parts
                if (lhi is not None and lhi >= sep) or (rlo is not None and rlo < sep):
                    bad.append(node.id)
            los = [p[0] for p in parts if p[0] is not None]
            his = [p[1] for p in parts if p[1] is not None]
            lo, hi = (min(los) if los else None), (max(his) if his else None)
        bounds[node.id] = (lo, hi)
    return bad
