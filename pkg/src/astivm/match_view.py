"""Materialized per-pattern match views and their incremental maintenance."""
from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .arena import Arena, ChangeSet
from .gmultiset import GMultiset
from .pattern import Pattern, Scope, match_all, match_node, pattern_depth


class MatchView:
    """Insertion-ordered multiset of node ids currently matching ``pattern``.

    At quiescence every member has multiplicity 1 and the member set equals
    ``match_all(pattern)``.  Removal of an entry whose node has already been
    reclaimed is done by id: a view that was correct before a change already
    records whether that node matched.
    """

    def __init__(self, arena: Arena, pattern: Pattern, name: str = ""):
        self.arena = arena
        self.pattern = pattern
        self.name = name
        self.depth = pattern_depth(pattern)
        self._members: OrderedDict[int, int] = OrderedDict()
        self.stale_discards = 0
        self.peak = 0

    @classmethod
    def materialize(cls, arena: Arena, pattern: Pattern, name: str = "") -> "MatchView":
        view = cls(arena, pattern, name)
        view.rebuild()
        return view

    def rebuild(self) -> None:
        self._members = OrderedDict((n, 1) for n in sorted(match_all(self.arena, self.pattern)))
        self.peak = max(self.peak, len(self._members))

    @property
    def members(self) -> GMultiset:
        return GMultiset(self._members)

    def ids(self) -> set[int]:
        return set(self._members)

    def __len__(self) -> int:
        return len(self._members)

    def __contains__(self, nid: object) -> bool:
        return nid in self._members

    # -- primitive updates ----------------------------------------------

    def _bump(self, nid: int, mult: int) -> None:
        total = self._members.get(nid, 0) + mult
        if total:
            self._members[nid] = total
            if len(self._members) > self.peak:
                self.peak = len(self._members)
        else:
            self._members.pop(nid, None)

    def matches(self, nid: int) -> bool:
        node = self.arena.nodes.get(nid)
        return node is not None and self.pattern.bind(node, {}, {})

    def offer(self, nid: int, mult: int = 1) -> None:
        """Algorithm IVM's loop body for one live node."""
        if self.matches(nid):
            self._bump(nid, mult)

    def discard(self, nid: int) -> None:
        self._members.pop(nid, None)

    def recheck(self, nid: int) -> None:
        """Remove by id, then re-insert if the node matches the current tree."""
        self._members.pop(nid, None)
        if self.matches(nid):
            self._bump(nid, 1)

    # -- retrieval --------------------------------------------------------

    def peek(self) -> Optional[tuple[int, Scope]]:
        """Oldest member that is still live and matching, without removing it."""
        members = self._members
        while members:
            nid = next(iter(members))
            node = self.arena.nodes.get(nid)
            if node is not None and node.in_tree:
                found = match_node(self.pattern, node)
                if found is not None:
                    return nid, found[0]
            members.popitem(last=False)
            self.stale_discards += 1
        return None

    def pop(self) -> Optional[tuple[int, Scope]]:
        hit = self.peek()
        if hit is not None:
            self._members.popitem(last=False)
        return hit


def ivm_update(view: MatchView, delta: GMultiset, recheck: Iterable[int] = ()) -> None:
    """Apply a tree delta to ``view``.

    Entries whose node is live are evaluated and, on a match, added with their
    multiplicity.  Entries whose node has been reclaimed are applied by id when
    the view holds them.  ``recheck`` ids are shared ancestors handled as a
    paired remove/re-insert against the current tree.
    """
    nodes = view.arena.nodes
    for nid, mult in delta.items():
        if nid in nodes:
            view.offer(nid, mult)
        elif nid in view:
            view._bump(nid, mult)
    for nid in recheck:
        view.recheck(nid)


@dataclass
class SearchSet:
    """Maximal search set of one replacement for a pattern of a given depth.

    ``delta`` carries reclaimed nodes at -1 and newly inserted nodes at +1;
    the descendants shared by both sides (reused subtrees) cancel and are never
    materialized.  ``recheck`` lists the ancestors ``1..depth`` of the
    replacement, which the old and new trees share in the mutable model.
    """

    delta: GMultiset
    recheck: list = field(default_factory=list)

    def ids(self) -> set[int]:
        return set(self.delta) | set(self.recheck)

    def __len__(self) -> int:
        return len(self.delta) + len(self.recheck)

    def as_gmultiset(self) -> GMultiset:
        """The net multiset seen by a view that did not hold any rechecked ancestor."""
        return self.delta + GMultiset.of(self.recheck)


def ancestors(arena: Arena, nid: int, depth: int) -> list[int]:
    out = []
    node = arena.node(nid).parent
    while node is not None and len(out) < depth:
        out.append(node.id)
        node = node.parent
    return out


def maximal_search_set(arena: Arena, change: ChangeSet, depth: int) -> SearchSet:
    return SearchSet(change.inserted - change.removed, ancestors(arena, change.new_root, depth))


def pop_match(view: MatchView) -> Optional[tuple[int, Scope]]:
    return view.pop()
