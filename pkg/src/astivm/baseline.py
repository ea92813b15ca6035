"""Search strategies without materialized views: full traversal and a label index."""
from __future__ import annotations

from typing import Optional

from .arena import Arena, ChangeEvent, EventKind, Label
from .pattern import AnyNode, Pattern, Scope, match_node


class LabelIndex:
    """Label -> insertion-ordered set of live node ids, fed by arena events."""

    def __init__(self, arena: Arena, subscribe: bool = True):
        self.arena = arena
        self._by_label: dict[Label, dict[int, None]] = {}
        self._size = 0
        self.peak = 0
        if subscribe:
            for node in arena.nodes.values():
                self._add(node.label, node.id)
            arena.subscribe(self.on_event)

    def _add(self, label: Label, nid: int) -> None:
        bucket = self._by_label.get(label)
        if bucket is None:
            bucket = self._by_label[label] = {}
        bucket[nid] = None
        self._size += 1
        if self._size > self.peak:
            self.peak = self._size

    def on_event(self, event: ChangeEvent) -> None:
        if event.kind is EventKind.INSERTED:
            self._add(event.label, event.node)
        else:
            bucket = self._by_label.get(event.label)
            if bucket is not None and bucket.pop(event.node, 0) is None:
                self._size -= 1

    def __getitem__(self, label: Label) -> list[int]:
        return list(self._by_label.get(label, ()))

    def __len__(self) -> int:
        return self._size

    def labels(self):
        return self._by_label.keys()


def naive_search(arena: Arena, q: Pattern, root: Optional[int] = None) -> Optional[tuple[int, Scope]]:
    """First match in depth-first preorder."""
    node = arena.root if root is None else arena.node(root)
    if node is None:
        return None
    if isinstance(q, AnyNode):
        return node.id, {}
    label = q.label
    bind = q.bind
    stack = [node]
    pop, extend = stack.pop, stack.extend
    while stack:
        n = pop()
        if n.label is label:
            scope: dict = {}
            if bind(n, scope, {}):
                return n.id, scope
        kids = n.children
        if kids:
            extend(reversed(kids))
    return None


def index_lookup(q: Pattern, idx: LabelIndex) -> Optional[tuple[int, Scope]]:
    """Scan the nodes carrying the pattern's root label, re-checking each one."""
    arena = idx.arena
    if isinstance(q, AnyNode):
        return None if arena.root is None else (arena.root.id, {})
    bucket = idx._by_label.get(q.label)
    if not bucket:
        return None
    nodes = arena.nodes
    bind = q.bind
    for nid in bucket:
        n = nodes[nid]
        if n.in_tree:
            scope: dict = {}
            if bind(n, scope, {}):
                return nid, scope
    return None
