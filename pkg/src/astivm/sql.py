"""Relational encoding of an AST schema and the SQL equivalent of a pattern.

Each label becomes a relation ``Label(id, attrs..., child1..childc)``.  A
pattern with k Match nodes becomes a k-way join aliased by (lowercased) node
variable.  Output is single-spaced, with child joins in preorder followed by
pattern constraints in preorder.
"""
from __future__ import annotations

from .arena import Schema
from .errors import UnsupportedRootAnyNode
from .pattern import (
    And, AnyNode, Arith, Atom, Const, Constraint, Eq, HostPred, Lt, Match, Not, Or,
    Pattern, VarAttr, _Bool,
)


def emit_schema(schema: Schema) -> str:
    lines = []
    for label, entry in schema.items():
        cols = ["id"]
        for a in entry.attrs:
            cols.extend((f"{a}_key", f"{a}_value") if a in entry.record_attrs else (a,))
        cols.extend(f"child{i}" for i in range(1, entry.max_children + 1))
        lines.append(f"CREATE TABLE {label.name}({', '.join(cols)});")
    return "\n".join(lines)


def _alias(var: str) -> str:
    return var.lower()


def _literal(v) -> str:
    if isinstance(v, str):
        return "'" + v.replace("'", "''") + "'"
    if isinstance(v, bool):
        return "TRUE" if v else "FALSE"
    return str(v)


def _atom(a: Atom) -> str:
    if isinstance(a, Const):
        return _literal(a.val)
    if isinstance(a, VarAttr):
        col = a.attr if a.field is None else f"{a.attr}_{a.field}"
        return f"{_alias(a.var)}.{col}"
    if isinstance(a, Arith):
        return f"({_atom(a.left)} {a.op} {_atom(a.right)})"
    raise TypeError(f"cannot render atom {a!r}")


def _terms(theta: Constraint) -> list[str]:
    """Conjuncts of ``theta`` with TRUE dropped; nested Ands are flattened."""
    if isinstance(theta, _Bool):
        return [] if theta.truth else ["FALSE"]
    if isinstance(theta, And):
        return [t for sub in theta.terms for t in _terms(sub)]
    return [_constraint(theta)]


def _constraint(theta: Constraint) -> str:
    if isinstance(theta, _Bool):
        return "TRUE" if theta.truth else "FALSE"
    if isinstance(theta, Eq):
        return f"{_atom(theta.left)} = {_atom(theta.right)}"
    if isinstance(theta, Lt):
        return f"{_atom(theta.left)} < {_atom(theta.right)}"
    if isinstance(theta, And):
        terms = _terms(theta)
        return "(" + " AND ".join(terms) + ")" if terms else "TRUE"
    if isinstance(theta, Or):
        return "(" + " OR ".join(_constraint(t) for t in theta.terms) + ")"
    if isinstance(theta, Not):
        return f"NOT ({_constraint(theta.term)})"
    if isinstance(theta, HostPred):
        # host predicates become calls to a user-defined function over node ids
        return f"{theta.name}({', '.join(_alias(v) + '.id' for v in theta.uses)})"
    raise TypeError(f"cannot render constraint {theta!r}")


def pattern_to_sql(q: Pattern) -> str:
    if isinstance(q, AnyNode):
        raise UnsupportedRootAnyNode("a pattern rooted at AnyNode has no relation to select from")
    tables, joins, theta = [], [], []
    for _, p in q.positions():
        if not isinstance(p, Match):
            continue
        tables.append(f"{p.label.name} {_alias(p.var)}")
        for i, child in enumerate(p.children, start=1):
            if isinstance(child, Match):
                joins.append(f"{_alias(p.var)}.child{i} = {_alias(child.var)}.id")
        theta.extend(_terms(p.constraint))
    where = " AND ".join(joins + theta) or "TRUE"
    return f"SELECT * FROM {', '.join(tables)} WHERE {where}"
