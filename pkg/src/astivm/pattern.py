"""Pattern queries over arena nodes and the constraint language they carry.

A pattern is either :class:`AnyNode` (matches anything) or a :class:`Match`
naming a label, a node variable, positional child patterns and a constraint.
A Match with ``k`` child patterns accepts a node with at least ``k`` children;
extra children are unconstrained.

Constraints may reference any node variable bound by a Match in the same
subtree, including variables bound in sibling subtrees.  ``And``/``Or``
short-circuit left to right.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Union

from .arena import Arena, Label, Node, Record, label_of
from .errors import DivisionByZero, UnboundVariable, UnknownAttribute

Scope = dict  # node variable -> (node id, attribute map)


# ---------------------------------------------------------------------------
# atoms


class Atom:
    def value(self, scope: Scope):
        raise NotImplementedError

    def variables(self) -> set[str]:
        return set()


@dataclass(frozen=True)
class Const(Atom):
    val: object

    def value(self, scope):
        return self.val

    def __str__(self):
        return str(self.val)


@dataclass(frozen=True)
class VarAttr(Atom):
    """``var.attr``, optionally projecting a field out of a Record attribute."""

    var: str
    attr: str
    field: Optional[str] = None

    def value(self, scope):
        try:
            attrs = scope[self.var][1]
        except KeyError:
            raise UnboundVariable(self.var) from None
        try:
            v = attrs[self.attr]
        except KeyError:
            raise UnknownAttribute(f"{self.var}.{self.attr}") from None
        if self.field is None:
            return v
        if not isinstance(v, Record):
            raise UnknownAttribute(f"{self.var}.{self.attr} is not a record")
        return getattr(v, self.field)

    def variables(self):
        return {self.var}

    def __str__(self):
        path = f"{self.var}.{self.attr}"
        return path if self.field is None else f"{path}.{self.field}"


def _div(a, b):
    if b == 0:
        raise DivisionByZero("integer division by zero in constraint")
    return a // b


_ARITH: dict[str, Callable] = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _div,
}


@dataclass(frozen=True)
class Arith(Atom):
    op: str
    left: Atom
    right: Atom

    def __post_init__(self):
        if self.op not in _ARITH:
            raise ValueError(f"unknown arithmetic operator {self.op!r}")

    def value(self, scope):
        return _ARITH[self.op](self.left.value(scope), self.right.value(scope))

    def variables(self):
        return self.left.variables() | self.right.variables()

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


def attr(var: str, name: str, field: Optional[str] = None) -> VarAttr:
    return VarAttr(var, name, field)


def _atom(x) -> Atom:
    return x if isinstance(x, Atom) else Const(x)


# ---------------------------------------------------------------------------
# constraints


class Constraint:
    def holds(self, scope: Scope) -> bool:
        raise NotImplementedError

    def variables(self) -> set[str]:
        return set()


@dataclass(frozen=True)
class _Bool(Constraint):
    truth: bool

    def holds(self, scope):
        return self.truth

    def __str__(self):
        return "TRUE" if self.truth else "FALSE"


TRUE = _Bool(True)
FALSE = _Bool(False)


@dataclass(frozen=True)
class Eq(Constraint):
    left: Atom
    right: Atom

    def __init__(self, left, right):
        object.__setattr__(self, "left", _atom(left))
        object.__setattr__(self, "right", _atom(right))

    def holds(self, scope):
        return self.left.value(scope) == self.right.value(scope)

    def variables(self):
        return self.left.variables() | self.right.variables()

    def __str__(self):
        return f"{self.left} = {self.right}"


@dataclass(frozen=True)
class Lt(Constraint):
    left: Atom
    right: Atom

    def __init__(self, left, right):
        object.__setattr__(self, "left", _atom(left))
        object.__setattr__(self, "right", _atom(right))

    def holds(self, scope):
        return self.left.value(scope) < self.right.value(scope)

    def variables(self):
        return self.left.variables() | self.right.variables()

    def __str__(self):
        return f"{self.left} < {self.right}"


@dataclass(frozen=True)
class And(Constraint):
    terms: tuple

    def __init__(self, *terms):
        object.__setattr__(self, "terms", tuple(terms))

    def holds(self, scope):
        return all(t.holds(scope) for t in self.terms)

    def variables(self):
        return set().union(*(t.variables() for t in self.terms))

    def __str__(self):
        return "(" + " ∧ ".join(map(str, self.terms)) + ")"


@dataclass(frozen=True)
class Or(Constraint):
    terms: tuple

    def __init__(self, *terms):
        object.__setattr__(self, "terms", tuple(terms))

    def holds(self, scope):
        return any(t.holds(scope) for t in self.terms)

    def variables(self):
        return set().union(*(t.variables() for t in self.terms))

    def __str__(self):
        return "(" + " ∨ ".join(map(str, self.terms)) + ")"


@dataclass(frozen=True)
class Not(Constraint):
    term: Constraint

    def holds(self, scope):
        return not self.term.holds(scope)

    def variables(self):
        return self.term.variables()

    def __str__(self):
        return f"¬({self.term})"


@dataclass(frozen=True)
class HostPred(Constraint):
    """Named pure predicate over the scope, for tests the atom grammar cannot say."""

    name: str
    fn: Callable[[Scope], bool] = field(compare=False)
    uses: tuple = ()

    def holds(self, scope):
        for v in self.uses:
            if v not in scope:
                raise UnboundVariable(v)
        return bool(self.fn(scope))

    def variables(self):
        return set(self.uses)

    def __str__(self):
        return f"{self.name}({', '.join(self.uses)})"


def gt(a, b) -> Constraint:
    return Lt(b, a)


def ge(a, b) -> Constraint:
    return Not(Lt(a, b))


def le(a, b) -> Constraint:
    return Not(Lt(b, a))


def ne(a, b) -> Constraint:
    return Not(Eq(a, b))


def eval_constraint(theta: Constraint, scope: Scope) -> bool:
    return theta.holds(scope)


# ---------------------------------------------------------------------------
# patterns


class Pattern:
    children: tuple = ()

    def bind(self, node: Node, scope: dict, nodes: dict) -> bool:
        raise NotImplementedError

    def positions(self, path: tuple = ()) -> Iterator[tuple[tuple, "Pattern"]]:
        """Preorder ``(path, subpattern)`` pairs; paths are child-index tuples."""
        yield path, self
        for i, child in enumerate(self.children):
            yield from child.positions(path + (i,))

    def at(self, path: tuple) -> "Pattern":
        q = self
        for i in path:
            q = q.children[i]
        return q

    def variables(self) -> list[str]:
        return [q.var for _, q in self.positions() if q.var is not None]


@dataclass(frozen=True)
class AnyNode(Pattern):
    var: Optional[str] = None

    def bind(self, node, scope, nodes):
        if self.var is not None:
            nodes[self.var] = node.id
        return True

    def __str__(self):
        return "AnyNode" if self.var is None else f"AnyNode({self.var})"


@dataclass(frozen=True)
class Match(Pattern):
    label: Label
    var: str
    children: tuple = ()
    constraint: Constraint = TRUE

    def __post_init__(self):
        object.__setattr__(self, "label", label_of(self.label))
        object.__setattr__(self, "children", tuple(self.children))
        names = self.variables()
        if len(names) != len(set(names)):
            raise ValueError(f"node variables must be unique within a pattern: {names}")
        bound = {q.var for _, q in self.positions() if isinstance(q, Match)}
        free = self.constraint.variables() - bound
        if free:
            raise UnboundVariable(f"constraint of {self.var} references unbound {sorted(free)}")
        # child labels, checked before any binding work
        object.__setattr__(self, "_kid_labels", tuple(
            (i, q.label) for i, q in enumerate(self.children) if isinstance(q, Match)))
        object.__setattr__(self, "_arity", len(self.children))

    def bind(self, node, scope, nodes):
        if node.label is not self.label:
            return False
        kids = node.children
        if len(kids) < self._arity:
            return False
        for i, label in self._kid_labels:
            kid = kids[i]
            if kid is None or kid.label is not label:
                return False
        scope[self.var] = (node.id, node.attrs)
        nodes[self.var] = node.id
        for q, kid in zip(self.children, kids):
            if kid is None or not q.bind(kid, scope, nodes):
                return False
        return self.constraint is TRUE or self.constraint.holds(scope)

    def __str__(self):
        kids = ", ".join(map(str, self.children))
        return f"Match[{self.label.name}, {self.var}]([{kids}]){{{self.constraint}}}"


def match_node(q: Pattern, node: Node) -> Optional[tuple[Scope, dict]]:
    """Evaluate ``q`` at an arena node; returns ``(scope, node bindings)``."""
    scope: dict = {}
    nodes: dict = {}
    if q.bind(node, scope, nodes):
        return scope, nodes
    return None


def eval_pattern(arena: Arena, q: Pattern, nid: int) -> Optional[Scope]:
    found = match_node(q, arena.node(nid))
    return None if found is None else found[0]


def match_all(arena: Arena, q: Pattern, root: Optional[int] = None) -> set[int]:
    if root is None:
        root = arena.root_id
        if root is None:
            return set()
    out = set()
    for node in arena.iter_subtree(root):
        if q.bind(node, {}, {}):
            out.add(node.id)
    return out


def pattern_depth(q: Pattern) -> int:
    if not q.children:
        return 0
    return 1 + max(pattern_depth(c) for c in q.children)


def match(label: Union[str, Label], var: str, children=(), where: Constraint = TRUE) -> Match:
    return Match(label_of(label), var, tuple(children), where)
