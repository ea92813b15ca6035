"""Arena-owned ASTs with stable integer ids and parent pointers.

Every node lives in an :class:`Arena` keyed by a monotonically increasing id
that is never reused, so an id held by a stale view entry can always be
recognised as dead.  Subtree replacement is a single slot swap: the
replaced subtree is reclaimed eagerly and ancestors are never copied.

Subscribers receive one :class:`ChangeEvent` per allocation and per
reclamation.  Inside :meth:`Arena.batch` events are queued and delivered when
the outermost batch exits.
"""
from __future__ import annotations

import enum
import re
from contextlib import contextmanager
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Optional, Union

from .errors import (
    ChildAlreadyAttached,
    ReplacementAttached,
    SchemaViolation,
    UnknownNode,
)
from .gmultiset import GMultiset


class Record(NamedTuple):
    key: int
    value: int


AttrValue = Union[int, str, Record, tuple]


class Label:
    """Interned label: two labels are equal iff they are the same object."""

    __slots__ = ("id", "name")
    _registry: dict[str, "Label"] = {}

    def __new__(cls, name: str) -> "Label":
        existing = cls._registry.get(name)
        if existing is not None:
            return existing
        self = object.__new__(cls)
        self.id = len(cls._registry)
        self.name = name
        cls._registry[name] = self
        return self

    def __reduce__(self):
        return (Label, (self.name,))

    def __repr__(self) -> str:
        return self.name


def label_of(label: Union[str, Label]) -> Label:
    return label if isinstance(label, Label) else Label(label)


class LabelSchema(NamedTuple):
    attrs: tuple[str, ...]
    max_children: int
    record_attrs: frozenset = frozenset()


class Schema:
    """Per-label attribute list and child bound.

    ``Schema({"Arith": (("op",), 2), "Const": (("val",), 0)})``.  A third
    tuple element names attributes holding a :class:`Record`; the relational
    encoding flattens those into ``<attr>_key``/``<attr>_value`` columns.
    """

    def __init__(self, entries: Mapping[Union[str, Label], tuple]):
        self._entries: dict[Label, LabelSchema] = {}
        for name, entry in entries.items():
            attrs, max_children, *rest = entry
            record_attrs = frozenset(rest[0]) if rest else frozenset()
            self._entries[label_of(name)] = LabelSchema(tuple(attrs), int(max_children), record_attrs)

    def __getitem__(self, label: Union[str, Label]) -> LabelSchema:
        try:
            return self._entries[label_of(label)]
        except KeyError:
            raise SchemaViolation(f"label {label} is not in the schema") from None

    def __contains__(self, label: object) -> bool:
        return label_of(label) in self._entries

    def __iter__(self) -> Iterator[Label]:
        return iter(self._entries)

    def items(self):
        return self._entries.items()


class Node:
    __slots__ = ("id", "label", "attrs", "children", "parent", "in_tree")

    def __init__(self, nid: int, label: Label, attrs: dict, children: list):
        self.id = nid
        self.label = label
        self.attrs = attrs
        self.children = children
        self.parent: Optional[Node] = None
        self.in_tree = False

    def __repr__(self) -> str:
        return f"Node({self.id}, {self.label.name}, {self.attrs})"


class EventKind(enum.Enum):
    INSERTED = "inserted"
    REMOVED = "removed"


class ChangeEvent(NamedTuple):
    kind: EventKind
    node: int
    label: Label


class ChangeSet(NamedTuple):
    """Result of a replacement.  Both multisets hold only positive entries."""

    removed: GMultiset
    inserted: GMultiset
    new_root: int

    def delta(self) -> GMultiset:
        return self.inserted - self.removed


Slot = Optional[tuple]  # (parent Node, child index); None means the tree root


class Arena:
    def __init__(self, schema: Optional[Schema] = None):
        self.schema = schema
        self.nodes: dict[int, Node] = {}
        self.root: Optional[Node] = None
        self._next_id = 0
        self._subscribers: list[Callable[[ChangeEvent], None]] = []
        self._batch_depth = 0
        self._pending: list[ChangeEvent] = []

    # -- events -----------------------------------------------------------

    def subscribe(self, fn: Callable[[ChangeEvent], None]) -> None:
        self._subscribers.append(fn)

    def _emit(self, kind: EventKind, node: Node) -> None:
        if not self._subscribers:
            return
        event = ChangeEvent(kind, node.id, node.label)
        if self._batch_depth:
            self._pending.append(event)
        else:
            for fn in self._subscribers:
                fn(event)

    @contextmanager
    def batch(self, flush: bool = True):
        """Queue events; deliver them on exit unless ``flush`` is False."""
        self._batch_depth += 1
        try:
            yield
        finally:
            self._batch_depth -= 1
            if flush and not self._batch_depth:
                self.flush_events()

    def flush_events(self) -> None:
        pending, self._pending = self._pending, []
        for event in pending:
            for fn in self._subscribers:
                fn(event)

    # -- access -----------------------------------------------------------

    def node(self, nid: int) -> Node:
        try:
            return self.nodes[nid]
        except KeyError:
            raise UnknownNode(nid) from None

    __getitem__ = node

    def __contains__(self, nid: object) -> bool:
        return nid in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def root_id(self) -> Optional[int]:
        return None if self.root is None else self.root.id

    def label(self, nid: int) -> Label:
        return self.node(nid).label

    def attrs(self, nid: int) -> dict:
        return self.node(nid).attrs

    def children(self, nid: int) -> list[int]:
        return [c.id for c in self.node(nid).children if c is not None]

    def parent(self, nid: int) -> Optional[int]:
        p = self.node(nid).parent
        return None if p is None else p.id

    def is_detached(self, nid: int) -> bool:
        node = self.node(nid)
        return node.parent is None and node is not self.root

    # -- construction -----------------------------------------------------

    def create_node(self, label: Union[str, Label], attrs: Optional[Mapping] = None,
                    children: Iterable[int] = ()) -> int:
        label = label_of(label)
        attrs = dict(attrs or {})
        kids = [self.node(c) for c in children]
        if self.schema is not None:
            entry = self.schema[label]
            if set(attrs) != set(entry.attrs):
                raise SchemaViolation(
                    f"{label.name} expects attributes {sorted(entry.attrs)}, got {sorted(attrs)}")
            if len(kids) > entry.max_children:
                raise SchemaViolation(
                    f"{label.name} allows at most {entry.max_children} children, got {len(kids)}")
        seen = set()
        for kid in kids:
            if kid.parent is not None or kid is self.root or kid.id in seen:
                raise ChildAlreadyAttached(kid.id)
            seen.add(kid.id)
        nid = self._next_id
        self._next_id += 1
        node = Node(nid, label, attrs, kids)
        for kid in kids:
            kid.parent = node
        self.nodes[nid] = node
        self._emit(EventKind.INSERTED, node)
        return nid

    def set_root(self, nid: int) -> GMultiset:
        """Install a detached subtree as the tree root (initial load)."""
        node = self.node(nid)
        if node.parent is not None:
            raise ReplacementAttached(nid)
        if self.root is not None and self.root is not node:
            raise ReplacementAttached(f"arena already has root {self.root.id}")
        self.root = node
        return self._mark_in_tree(node)

    # -- navigation -------------------------------------------------------

    def iter_subtree(self, nid: int) -> Iterator[Node]:
        """Preorder walk of the subtree rooted at ``nid``."""
        stack = [self.node(nid)]
        while stack:
            node = stack.pop()
            yield node
            kids = node.children
            if kids:
                stack.extend(c for c in reversed(kids) if c is not None)

    def descendants(self, nid: int) -> GMultiset:
        return GMultiset.of(n.id for n in self.iter_subtree(nid))

    def ancestor(self, nid: int, i: int) -> Optional[int]:
        node = self.node(nid)
        for _ in range(i):
            node = node.parent
            if node is None:
                return None
        return node.id

    # -- mutation ---------------------------------------------------------

    def detach(self, nid: int) -> Slot:
        """Unhook ``nid`` from its parent, leaving a hole; returns the slot."""
        node = self.node(nid)
        parent = node.parent
        if parent is None:
            if node is self.root:
                self.root = None
            return None
        idx = next(i for i, c in enumerate(parent.children) if c is node)
        parent.children[idx] = None
        node.parent = None
        return (parent, idx)

    def attach(self, slot: Slot, nid: int) -> GMultiset:
        """Fill a hole left by :meth:`detach`; returns the nodes newly in the tree."""
        node = self.node(nid)
        if node.parent is not None or node is self.root:
            raise ReplacementAttached(nid)
        if slot is None:
            if self.root is not None:
                raise ReplacementAttached(f"arena already has root {self.root.id}")
            self.root = node
            return self._mark_in_tree(node)
        parent, idx = slot
        if parent.children[idx] is not None:
            raise ReplacementAttached(f"slot {idx} of node {parent.id} is occupied")
        parent.children[idx] = node
        node.parent = parent
        if parent.in_tree:
            return self._mark_in_tree(node)
        return GMultiset()

    def _mark_in_tree(self, node: Node) -> GMultiset:
        fresh = GMultiset()
        stack = [node]
        while stack:
            n = stack.pop()
            if n.in_tree:
                continue
            n.in_tree = True
            fresh.add(n.id)
            stack.extend(c for c in n.children if c is not None)
        return fresh

    def reclaim(self, nid: int) -> GMultiset:
        """Deallocate a detached subtree, skipping holes."""
        node = self.node(nid)
        if node.parent is not None or node is self.root:
            raise ReplacementAttached(f"cannot reclaim attached node {nid}")
        removed = GMultiset()
        stack = [node]
        nodes = self.nodes
        while stack:
            n = stack.pop()
            del nodes[n.id]
            removed.add(n.id)
            self._emit(EventKind.REMOVED, n)
            for c in n.children:
                if c is not None and c.parent is n:
                    stack.append(c)
            n.parent = None
        return removed

    def replace(self, r: int, r_new: int) -> ChangeSet:
        """Swap the subtree at ``r`` for the detached subtree ``r_new``."""
        old = self.node(r)
        new = self.node(r_new)
        if new.parent is not None or new is self.root:
            raise ReplacementAttached(r_new)
        if old.parent is None and old is not self.root:
            raise ReplacementAttached(f"node {r} is not part of the tree")
        with self.batch():
            slot = self.detach(r)
            removed = self.reclaim(r)
            inserted = self.attach(slot, r_new)
        return ChangeSet(removed, inserted, r_new)

    # -- debug dump -------------------------------------------------------

    def dump(self, nid: Optional[int] = None) -> str:
        if nid is None:
            if self.root is None:
                return ""
            nid = self.root.id
        return _dump(self.node(nid))


def _fmt_value(v) -> str:
    if isinstance(v, Record):
        return f"<{v.key},{v.value}>"
    if isinstance(v, tuple):
        return "[" + " ".join(_fmt_value(r) for r in v) + "]"
    return str(v)


def _dump(node: Optional[Node]) -> str:
    if node is None:
        return "_"
    parts = [node.label.name]
    if node.attrs:
        parts.append("{" + ", ".join(f"{k}: {_fmt_value(v)}" for k, v in node.attrs.items()) + "}")
    parts.extend(_dump(c) for c in node.children)
    return "(" + " ".join(parts) + ")"


_TOKEN = re.compile(r"\s*(?:(<-?\d+,-?\d+>)|([(){}\[\],:])|([^\s(){}\[\],:<>]+))")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot tokenize at {text[pos:pos + 20]!r}")
        out.append(m.group(m.lastindex))
        pos = m.end()
    return out


def _parse_value(tok: str, toks: list[str]):
    if tok == "[":
        seq = []
        while toks[0] != "]":
            seq.append(_parse_value(toks.pop(0), toks))
        toks.pop(0)
        return tuple(seq)
    if tok.startswith("<"):
        k, v = tok[1:-1].split(",")
        return Record(int(k), int(v))
    if re.fullmatch(r"-?\d+", tok):
        return int(tok)
    return tok


def parse_sexpr(arena: Arena, text: str) -> int:
    """Build the detached subtree described by a :meth:`Arena.dump` line."""
    toks = _tokenize(text)

    def node() -> int:
        if toks.pop(0) != "(":
            raise ValueError("expected '('")
        label = toks.pop(0)
        attrs = {}
        if toks[0] == "{":
            toks.pop(0)
            while toks[0] != "}":
                name = toks.pop(0)
                if toks.pop(0) != ":":
                    raise ValueError("expected ':'")
                attrs[name] = _parse_value(toks.pop(0), toks)
                if toks[0] == ",":
                    toks.pop(0)
            toks.pop(0)
        kids = []
        while toks[0] != ")":
            kids.append(node())
        toks.pop(0)
        return arena.create_node(label, attrs, kids)

    nid = node()
    if toks:
        raise ValueError(f"trailing tokens: {toks[:5]}")
    return nid
