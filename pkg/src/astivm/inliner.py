"""Static pruning of view maintenance for declarative rewrite rules.

For each (view pattern, rule) pair we decide at registration time which
positions of a firing can possibly change that view.  Only labels are
compared; attribute values are unknown until the rule fires.

A :class:`CandidateFn` names generator (or removed-pattern) positions whose
node may root a match, plus ancestor heights above the rewrite site.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .pattern import AnyNode, Pattern, pattern_depth
from .rewrite import Gen, Generator, Reuse


@dataclass(frozen=True)
class CandidateFn:
    self_candidates: frozenset
    ancestor_levels: frozenset

    def size_bound(self) -> int:
        return len(self.self_candidates) + len(self.ancestor_levels)


def align(q: Pattern, g: Generator, d: int = 0) -> bool:
    """Can a node generated by ``g`` sit at depth ``d`` of a match of ``q``?"""
    if d > 0:
        return any(align(qk, g, d - 1) for qk in q.children)
    if isinstance(q, AnyNode) or isinstance(g, Reuse):
        return True
    if q.label is not g.label or len(g.children) < len(q.children):
        return False
    return all(align(qk, gk, 0) for qk, gk in zip(q.children, g.children))


def align_removed(q: Pattern, m: Pattern, d: int = 0) -> bool:
    """Pattern-vs-pattern analogue of :func:`align` for removed shapes.

    Child positions ``m`` leaves unspecified are unknown and align.
    """
    if d > 0:
        return any(align_removed(qk, m, d - 1) for qk in q.children)
    if isinstance(q, AnyNode) or isinstance(m, AnyNode):
        return True
    if q.label is not m.label:
        return False
    return all(align_removed(qk, mk, 0) for qk, mk in zip(q.children, m.children))


def _normalize(raw: Iterable[tuple[tuple, int]]) -> CandidateFn:
    selves, levels = set(), set()
    for path, level in raw:
        if level <= len(path):
            selves.add(path[:len(path) - level])
        else:
            levels.add(level - len(path))
    return CandidateFn(frozenset(selves), frozenset(levels))


def inline_gen(q: Pattern, g: Generator) -> CandidateFn:
    """Candidates among the nodes a firing of ``g`` inserts, for view pattern ``q``.

    Reused positions are never self candidates: a reused subtree is spliced
    unchanged and a match depends only on the subtree below its root.
    """
    depth = pattern_depth(q)
    raw = []
    for path, gp in g.positions():
        if isinstance(gp, Gen) and align(q, gp, 0):
            raw.append((path, 0))
        raw.extend((path, i) for i in range(1, depth + 1) if align(q, gp, i))
    return _normalize(raw)


def inline_removed(q: Pattern, m: Pattern, removed_paths: Optional[Iterable[tuple]] = None) -> CandidateFn:
    """Candidates among the nodes a firing of a rule with pattern ``m`` reclaims."""
    depth = pattern_depth(q)
    if removed_paths is None:
        removed_paths = [path for path, p in m.positions() if not isinstance(p, AnyNode)]
    raw = []
    for path in removed_paths:
        mp = m.at(path)
        if align_removed(q, mp, 0):
            raw.append((path, 0))
        raw.extend((path, i) for i in range(1, depth + 1) if align_removed(q, mp, i))
    return _normalize(raw)
