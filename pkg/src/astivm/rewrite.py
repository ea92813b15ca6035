"""Declarative replacement generators and rewrite rules.

A generator either builds a fresh node (:class:`Gen`) or splices a node bound
by the rule's pattern back into the tree unchanged (:class:`Reuse`).  Reused
nodes keep their identity, which is what lets the rewrite delta cancel them.

``Reuse`` may name any bound variable, not only wildcard matches: rules that
push a leaf down a tree need to move a matched node, not just a wildcard.
To keep the delta exact, a reused Match contributes every matched position
beneath it to the generated pairs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Union

from .arena import Arena, Label, label_of
from .errors import AstIvmError, HostFnFailure, MatchMismatch, UnboundReuse, UnsafeGenerator
from .gmultiset import GMultiset
from .pattern import AnyNode, Atom, Const, Match, Pattern, Scope, match_node, pattern_depth


@dataclass(frozen=True)
class HostFn:
    """Named pure function ``(scope, env) -> AttrValue`` for computed attributes."""

    name: str
    fn: Callable = field(compare=False)

    def __str__(self):
        return f"{self.name}(…)"


AttrExpr = Union[Atom, HostFn]


class Generator:
    children: tuple = ()

    def positions(self, path: tuple = ()):
        yield path, self
        for i, child in enumerate(self.children):
            yield from child.positions(path + (i,))


@dataclass(frozen=True)
class Gen(Generator):
    label: Label
    attrs: tuple = ()
    children: tuple = ()

    def __init__(self, label, attrs: Optional[Mapping[str, AttrExpr]] = None, children=()):
        object.__setattr__(self, "label", label_of(label))
        items = attrs.items() if isinstance(attrs, Mapping) else (attrs or ())
        # bare literals are shorthand for constant atoms
        items = [(k, v if isinstance(v, (Atom, HostFn)) else Const(v)) for k, v in items]
        object.__setattr__(self, "attrs", tuple(items))
        object.__setattr__(self, "children", tuple(children))

    def __str__(self):
        attrs = ", ".join(f"{k}: {v}" for k, v in self.attrs)
        kids = ", ".join(map(str, self.children))
        return f"Gen({self.label.name}, [{attrs}], [{kids}])"


@dataclass(frozen=True)
class Reuse(Generator):
    var: str

    def __str__(self):
        return f"Reuse({self.var})"


def _eval_attr(expr: AttrExpr, scope: Scope, env: Mapping):
    if isinstance(expr, HostFn):
        try:
            return expr.fn(scope, env)
        except AstIvmError:
            raise
        except Exception as exc:  # host code is untrusted
            raise HostFnFailure(f"{expr.name}: {exc}") from exc
    return expr.value(scope)


def generate(arena: Arena, g: Generator, scope: Scope, mu: Mapping[str, int],
             env: Optional[Mapping] = None, positions: Optional[dict] = None,
             _path: tuple = ()) -> int:
    """Build ``g`` under ``(scope, mu)``; returns the id of the new subtree root.

    Reused nodes are detached from wherever they currently hang before being
    spliced in, so reclaiming the old subtree afterwards never touches them.
    ``positions`` (if given) receives ``generator path -> node id``.
    """
    env = env or {}
    if isinstance(g, Reuse):
        try:
            nid = mu[g.var]
        except KeyError:
            raise UnboundReuse(g.var) from None
        node = arena.node(nid)
        if node.parent is not None or node is arena.root:
            arena.detach(nid)
        if positions is not None:
            positions[_path] = nid
        return nid
    kids = [generate(arena, c, scope, mu, env, positions, _path + (i,))
            for i, c in enumerate(g.children)]
    attrs = {name: _eval_attr(expr, scope, env) for name, expr in g.attrs}
    nid = arena.create_node(g.label, attrs, kids)
    if positions is not None:
        positions[_path] = nid
    return nid


def match_pairs(arena: Arena, q: Pattern, r: int) -> dict[tuple, int]:
    """Pattern position -> matched node id, for a node on which ``q`` holds."""
    node = arena.node(r)
    if match_node(q, node) is None:
        raise MatchMismatch(f"pattern does not match node {r}")
    return _pairs(q, node)


def _pairs(q: Pattern, node) -> dict[tuple, int]:
    out = {}
    stack = [((), q, node)]
    while stack:
        path, p, n = stack.pop()
        out[path] = n.id
        for i, child in enumerate(p.children):
            stack.append((path + (i,), child, n.children[i]))
    return out


def _var_paths(q: Pattern) -> dict[str, tuple]:
    return {p.var: path for path, p in q.positions() if p.var is not None}


def is_safe(q: Pattern, g: Generator) -> bool:
    """True iff ``g`` reuses every wildcard of ``q`` exactly once.

    Reuse of Match-bound variables is allowed, but no variable may be reused
    twice and no reused position may sit beneath another reused position.
    """
    var_paths = _var_paths(q)
    reused = [p.var for _, p in g.positions() if isinstance(p, Reuse)]
    if len(reused) != len(set(reused)):
        return False
    if any(v not in var_paths for v in reused):
        return False
    for _, p in q.positions():
        if isinstance(p, AnyNode) and (p.var is None or p.var not in reused):
            return False
    paths = [var_paths[v] for v in reused]
    for a in paths:
        for b in paths:
            if a != b and b[:len(a)] == a:
                return False
    return True


def generated_pairs(q: Pattern, g: Generator, positions: Mapping[tuple, int],
                    mp: Mapping[tuple, int]) -> dict[tuple, int]:
    """Generator position -> node id, expanding reused Matches into their matched positions."""
    var_paths = _var_paths(q)
    out: dict[tuple, int] = {}
    for path, p in g.positions():
        out[("g",) + path] = positions[path]
        if isinstance(p, Reuse):
            root = var_paths[p.var]
            for mpath, nid in mp.items():
                if len(mpath) > len(root) and mpath[:len(root)] == root:
                    out[("g",) + path + ("m",) + mpath[len(root):]] = nid
    return out


def rewrite_delta(gp: Mapping, mp: Mapping) -> GMultiset:
    """``GP ⊖ MP``: generated nodes at +1, matched nodes at -1, reused nodes cancel."""
    return GMultiset.of(gp.values()) - GMultiset.of(mp.values())


class RewriteRule:
    """A ``(pattern, generator)`` pair checked for safety at construction.

    ``bind`` is an optional hook ``(scope, env) -> dict`` evaluated once per
    firing before generation; its result is merged into the environment seen
    by HostFns (e.g. a pivot shared by several generated attributes).
    """

    def __init__(self, name: str, pattern: Pattern, generator: Generator,
                 bind: Optional[Callable[[Scope, Mapping], Mapping]] = None, cli_name: str = ""):
        if not is_safe(pattern, generator):
            raise UnsafeGenerator(f"generator of rule {name} is not safe for its pattern")
        self.name = name
        self.cli_name = cli_name or name
        self.pattern = pattern
        self.generator = generator
        self.bind = bind
        self.depth = pattern_depth(pattern)
        self.var_paths = _var_paths(pattern)
        self.reused_vars = frozenset(p.var for _, p in generator.positions() if isinstance(p, Reuse))
        self.reused_paths = frozenset(self.var_paths[v] for v in self.reused_vars)
        self.removed_count = len(self.removed_paths())
        # view pattern -> (generated CandidateFn, removed CandidateFn); filled by the engine
        self.candidate_fns: dict = {}

    def removed_paths(self) -> list[tuple]:
        """Matched positions that a firing reclaims (everything not reused)."""
        reused = self.reused_paths
        return [path for path, p in self.pattern.positions()
                if isinstance(p, Match) and not any(path[:len(r)] == r for r in reused)]

    def __repr__(self):
        return f"RewriteRule({self.name})"
