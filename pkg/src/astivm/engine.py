"""Rule firing with view and index maintenance, plus the optimizer loop.

An :class:`Engine` owns the support structures for one search method and keeps
them correct across rule firings and raw subtree replacements.  Extra
structures can be tracked side by side (``track=``) so tests can compare
strategies on the very same tree.

Maintenance families:

``ivm``
    the rewrite delta plus a re-check of ancestors up to each view's depth.
``ivm-inlined``
    per-rule candidate functions computed at construction; only the positions
    that can root a match of a view are rechecked.
"""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .arena import Arena, ChangeSet
from .baseline import LabelIndex, index_lookup, naive_search
from .errors import ConfigError
from .gmultiset import GMultiset
from .inliner import inline_gen, inline_removed
from .match_view import MatchView, SearchSet, ancestors, ivm_update
from .pattern import Scope, match_node
from .rewrite import RewriteRule, _pairs, generate

METHODS = ("naive", "index", "ivm", "ivm-inlined")
VIEW_FAMILIES = ("ivm", "ivm-inlined")

_clock = time.perf_counter_ns


@dataclass
class FiringReport:
    rule: str
    site: int
    new_root: int
    removed: GMultiset
    inserted: GMultiset
    candidates: dict = field(default_factory=dict)   # view name -> set of ids
    search_sets: dict = field(default_factory=dict)  # view name -> SearchSet


class Engine:
    def __init__(self, arena: Arena, rules: Sequence[RewriteRule], method: str = "ivm-inlined",
                 track: Iterable[str] = (), extra_rules: Sequence[RewriteRule] = (),
                 env: Optional[dict] = None, record: bool = False):
        if method not in METHODS:
            raise ConfigError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")
        self.arena = arena
        self.rules = list(rules)
        self.method = method
        self.tracked = {method, *track}
        unknown = self.tracked - set(METHODS)
        if unknown:
            raise ConfigError(f"unknown tracked structures {sorted(unknown)}")
        self.env = env if env is not None else {}
        self.record = record
        self.last_firing: Optional[FiringReport] = None
        self.cursor = 0
        self.last_maint_ns = 0
        self.maint_total_ns = 0
        self.firing_count = 0
        self._max_depth = max((r.depth for r in self.rules), default=0)

        self._plans: dict[RewriteRule, list] = {}
        self.index = LabelIndex(arena) if "index" in self.tracked else None
        self.views: dict[str, dict[str, MatchView]] = {
            fam: {r.name: MatchView.materialize(arena, r.pattern, r.name) for r in self.rules}
            for fam in VIEW_FAMILIES if fam in self.tracked
        }
        if "ivm-inlined" in self.views:
            for rule in [*self.rules, *extra_rules]:
                self.compile(rule)

    def compile(self, rule: RewriteRule) -> list:
        """Cache candidate functions of ``rule`` against every view pattern.

        Returns the per-view plan ``(view, removed self paths, generated self
        paths, ancestor levels)`` used on every firing of ``rule``.
        """
        removed = rule.removed_paths()
        plan = []
        for view in self.views["ivm-inlined"].values():
            fns = rule.candidate_fns.get(view.pattern)
            if fns is None:
                fns = rule.candidate_fns[view.pattern] = (
                    inline_gen(view.pattern, rule.generator),
                    inline_removed(view.pattern, rule.pattern, removed),
                )
            gen_fn, rem_fn = fns
            plan.append((view, tuple(rem_fn.self_candidates), tuple(gen_fn.self_candidates),
                         tuple(sorted(gen_fn.ancestor_levels | rem_fn.ancestor_levels))))
        self._plans[rule] = plan
        return plan

    def rebuild_views(self) -> None:
        for views in self.views.values():
            for view in views.values():
                view.rebuild()

    def view(self, family: str, rule: str) -> MatchView:
        return self.views[family][rule]

    # -- search ------------------------------------------------------------

    def search(self, rule: RewriteRule, method: Optional[str] = None) -> Optional[tuple[int, Scope]]:
        """Find (and, for views, remove) one match of ``rule``."""
        method = method or self.method
        if method == "naive":
            return naive_search(self.arena, rule.pattern)
        if method == "index":
            return index_lookup(rule.pattern, self.index)
        return self.views[method][rule.name].pop()

    def exists(self, rule: RewriteRule, method: str) -> Optional[int]:
        """Like :meth:`search` but never consumes a view entry."""
        if method == "naive":
            hit = naive_search(self.arena, rule.pattern)
        elif method == "index":
            hit = index_lookup(rule.pattern, self.index)
        else:
            hit = self.views[method][rule.name].peek()
        return None if hit is None else hit[0]

    # -- mutation ------------------------------------------------------------

    def apply_rule(self, rule: RewriteRule, at: int, env: Optional[Mapping] = None) -> bool:
        """Fire ``rule`` at node ``at``; returns False if the match is stale."""
        arena = self.arena
        node = arena.nodes.get(at)
        if node is None or not node.in_tree:
            return False
        found = match_node(rule.pattern, node)
        if found is None:
            return False
        scope, mu = found
        mp = _pairs(rule.pattern, node)
        env = dict(self.env if env is None else env)
        if rule.bind is not None:
            env.update(rule.bind(scope, env))
        positions: dict = {}
        with arena.batch(flush=False):
            slot = arena.detach(at)
            r_new = generate(arena, rule.generator, scope, mu, env, positions)
            if r_new == at or any(mu[v] == at for v in rule.reused_vars):
                removed = GMultiset()
            else:
                removed = arena.reclaim(at)
            inserted = arena.attach(slot, r_new)
        change = ChangeSet(removed, inserted, r_new)
        t0 = _clock()
        arena.flush_events()
        self._maintain(change, rule, mp, positions)
        self.last_maint_ns = ns = _clock() - t0
        self.maint_total_ns += ns
        self.firing_count += 1
        return True

    def replace(self, r: int, r_new: int) -> ChangeSet:
        """Raw subtree replacement, maintained with the maximal search set."""
        arena = self.arena
        with arena.batch(flush=False):
            change = arena.replace(r, r_new)
        t0 = _clock()
        arena.flush_events()
        self._maintain(change, None, None, None)
        self.last_maint_ns = _clock() - t0
        return change

    def set_root(self, nid: int) -> None:
        self.arena.set_root(nid)
        self.rebuild_views()

    def _maintain(self, change: ChangeSet, rule: Optional[RewriteRule],
                  mp: Optional[dict], positions: Optional[dict]) -> None:
        anc = ancestors(self.arena, change.new_root, self._max_depth)
        report = None
        if self.record:
            report = self.last_firing = FiringReport(
                rule.name if rule else "", -1 if mp is None else mp[()], change.new_root,
                change.removed, change.inserted)
        delta = None
        for family, views in self.views.items():
            if family == "ivm" or rule is None:
                if delta is None:
                    delta = change.inserted - change.removed
                for view in views.values():
                    ivm_update(view, delta, anc[:view.depth])
                continue
            # nodes reclaimed below a Match's unconstrained extra children
            extras = ()
            if len(change.removed) > rule.removed_count:
                matched = set(mp.values())
                extras = [n for n in change.removed if n not in matched]
            plan = self._plans.get(rule)
            if plan is None:
                plan = self.compile(rule)
            for view, rem_self, gen_self, levels in plan:
                for p in rem_self:
                    view.discard(mp[p])
                for n in extras:
                    view.discard(n)
                for p in gen_self:
                    view.offer(positions[p])
                for level in levels:
                    if level <= len(anc):
                        view.recheck(anc[level - 1])
                if report is not None:
                    ids = {mp[p] for p in rem_self}
                    ids.update(positions[p] for p in gen_self)
                    ids.update(anc[level - 1] for level in levels if level <= len(anc))
                    report.candidates[view.name] = ids
        if report is not None:
            delta = change.inserted - change.removed if delta is None else delta
            for r in self.rules:
                report.search_sets[r.name] = SearchSet(delta, anc[:r.depth])


# ---------------------------------------------------------------------------
# optimizer loop


@dataclass(frozen=True)
class OptimizerBudget:
    """``fixpoint`` runs until no rule matches; otherwise stop after ``max_firings``."""

    max_firings: int = 0
    fixpoint: bool = True


@dataclass
class OptimizerStats:
    firings: Counter = field(default_factory=Counter)
    searches: Counter = field(default_factory=Counter)
    search_ns: dict = field(default_factory=dict)
    maint_ns: dict = field(default_factory=dict)
    reached_fixpoint: bool = False

    def merge(self, other: "OptimizerStats") -> None:
        self.firings.update(other.firings)
        self.searches.update(other.searches)
        for mine, theirs in ((self.search_ns, other.search_ns), (self.maint_ns, other.maint_ns)):
            for k, v in theirs.items():
                mine.setdefault(k, []).extend(v)
        self.reached_fixpoint = other.reached_fixpoint


def run_optimizer(engine: Engine, budget: OptimizerBudget = OptimizerBudget(),
                  on_step: Optional[Callable[[Engine, RewriteRule], None]] = None,
                  rules: Optional[Sequence[RewriteRule]] = None,
                  stats: Optional[OptimizerStats] = None) -> OptimizerStats:
    """Round-robin over rules, FIFO within a view, until fixpoint or budget.

    The rule cursor persists on the engine across calls.  ``on_step`` runs
    before every search with the rule about to be searched.
    """
    rules = list(engine.rules if rules is None else rules)
    stats = stats or OptimizerStats()
    if not rules:
        stats.reached_fixpoint = True
        return stats
    limit = None if budget.fixpoint else budget.max_firings
    fired = 0
    misses = 0
    search_ns = {r.name: stats.search_ns.setdefault(r.name, []) for r in rules}
    maint_ns = {r.name: stats.maint_ns.setdefault(r.name, []) for r in rules}
    while misses < len(rules):
        if limit is not None and fired >= limit:
            stats.reached_fixpoint = False
            return stats
        rule = rules[engine.cursor % len(rules)]
        if on_step is not None:
            on_step(engine, rule)
        t0 = _clock()
        hit = engine.search(rule)
        search_ns[rule.name].append(_clock() - t0)
        stats.searches[rule.name] += 1
        if hit is not None and engine.apply_rule(rule, hit[0]):
            maint_ns[rule.name].append(engine.last_maint_ns)
            stats.firings[rule.name] += 1
            fired += 1
            misses = 0
        else:
            misses += 1
        engine.cursor += 1
    stats.reached_fixpoint = True
    return stats
