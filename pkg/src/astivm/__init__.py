"""Incrementally maintained pattern-match views over mutable ASTs."""
from .arena import Arena, ChangeEvent, ChangeSet, EventKind, Label, Node, Record, Schema, parse_sexpr
from .baseline import LabelIndex, index_lookup, naive_search
from .engine import Engine, FiringReport, OptimizerBudget, OptimizerStats, run_optimizer
from .errors import *  # noqa: F401,F403
from .gmultiset import GMultiset, contains, difference, union
from .inliner import CandidateFn, align, align_removed, inline_gen, inline_removed
from .match_view import MatchView, SearchSet, ivm_update, maximal_search_set, pop_match
from .pattern import (
    TRUE, FALSE, And, AnyNode, Arith, Const, Eq, HostPred, Lt, Match, Not, Or, VarAttr,
    attr, eval_constraint, eval_pattern, ge, gt, le, match, match_all, ne, pattern_depth,
)
from .rewrite import Gen, HostFn, Reuse, RewriteRule, generate, is_safe, match_pairs, rewrite_delta
from .sql import emit_schema, pattern_to_sql

__version__ = "0.1.0"
