"""Benchmark harness: run a workload under one search method and report CSV rows."""
from __future__ import annotations

import csv
import io
import random
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .arena import Arena, Record
from .engine import METHODS, Engine, OptimizerBudget, OptimizerStats, run_optimizer
from .errors import ConfigError
from .jitd import CRACK_THRESHOLD, JITD_SCHEMA, WRITES, apply_workload_op, build_rules, bulk_load
from .ycsb import WORKLOADS, generate_ops

COLUMNS = (
    "workload", "method", "rule", "trials", "searches", "mean_search_ns", "p99_search_ns",
    "mean_maint_ns", "firings", "view_entries_peak", "index_entries_peak", "arena_nodes_peak",
    "rss_kb",
)
TIMING_COLUMNS = ("mean_search_ns", "p99_search_ns", "mean_maint_ns", "rss_kb")


@dataclass
class BenchConfig:
    workload: str = "a"
    method: str = "ivm-inlined"
    keys: int = 100_000
    ops: int = 100_000
    seed: int = 1
    opt_every: int = 1
    inline: bool = True
    trials: int = 1
    warmup: int = 1000
    budget: int = 0  # max firings per optimizer window; 0 runs to fixpoint
    rules: Optional[Sequence[str]] = None  # cli names; None selects all
    crack_threshold: int = CRACK_THRESHOLD
    dump_ast: bool = False

    def validate(self) -> None:
        if self.workload.lower() not in WORKLOADS:
            raise ConfigError(f"unknown workload {self.workload!r}")
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}")
        for name, value, low in (("keys", self.keys, 1), ("ops", self.ops, 0),
                                 ("opt-every", self.opt_every, 1), ("trials", self.trials, 1),
                                 ("warmup", self.warmup, 0), ("budget", self.budget, 0),
                                 ("crack threshold", self.crack_threshold, 2)):
            if value < low:
                raise ConfigError(f"{name} must be at least {low}, got {value}")
        if self.rules is not None:
            known = {r.cli_name for r in build_rules()}
            unknown = [r for r in self.rules if r not in known]
            if unknown:
                raise ConfigError(f"unknown rules {unknown}; expected some of {sorted(known)}")

    @property
    def effective_method(self) -> str:
        return "ivm" if self.method == "ivm-inlined" and not self.inline else self.method


@dataclass
class TrialResult:
    rows: list
    engine: Engine
    stats: OptimizerStats
    write_maint_ns: list = field(default_factory=list)
    arena_nodes_peak: int = 0


def memory_report(engine: Engine) -> dict:
    """Entry counts of the support structures, as memory proxies."""
    view_entries = sum(len(v) for views in engine.views.values() for v in views.values())
    return {
        "view_entries": view_entries,
        "index_entries": 0 if engine.index is None else len(engine.index),
        "arena_nodes": len(engine.arena),
    }


def _rss_kb() -> str:
    try:
        with open("/proc/self/status") as fh:
            for line in fh:
                if line.startswith("VmRSS:"):
                    return line.split()[1]
    except OSError:
        pass
    return ""


def _mean(xs) -> float:
    return float(np.mean(xs)) if len(xs) else 0.0


def _p99(xs) -> float:
    return float(np.percentile(xs, 99)) if len(xs) else 0.0


def run_trial(config: BenchConfig, trial: int = 0, on_op=None, on_step=None,
              track: Sequence[str] = ()) -> TrialResult:
    """One run: bulk load a cracked tree, then interleave workload ops and optimizer windows.

    Only searches and firings after the warm-up ops are measured.  ``on_op``
    is called as ``on_op(engine, index, op)`` after each op's optimizer window,
    ``on_step`` is handed to the optimizer, and ``track`` names extra support
    structures to maintain alongside the measured one.
    """
    method = config.effective_method
    rules = build_rules(config.crack_threshold)
    if config.rules is not None:
        rules = [r for r in rules if r.cli_name in config.rules]
    arena = Arena(JITD_SCHEMA)
    seed = config.seed + trial
    engine = Engine(arena, rules, method, track=track, extra_rules=list(WRITES.values()),
                    env={"rng": random.Random(seed)})
    result = TrialResult([], engine, OptimizerStats())
    ops = generate_ops(config.workload, config.keys, config.ops, seed) if config.ops else []
    warmup = min(config.warmup, len(ops) // 2)
    budget = OptimizerBudget(config.budget, fixpoint=config.budget == 0)

    bulk_load(engine, [Record(k, k) for k in range(config.keys)], random.Random(seed),
              config.crack_threshold)
    peak = len(arena)
    measured = result.stats
    scratch = OptimizerStats()
    for i, op in enumerate(ops):
        stats = measured if i >= warmup else scratch
        maint, fired = engine.maint_total_ns, engine.firing_count
        apply_workload_op(engine, op)
        if i >= warmup:
            # one entry per root-level write (an update is two)
            n = engine.firing_count - fired
            if n:
                result.write_maint_ns.extend([(engine.maint_total_ns - maint) / n] * n)
        if (i + 1) % config.opt_every == 0:
            run_optimizer(engine, budget, on_step, stats=stats)
        peak = max(peak, len(arena))
        if on_op is not None:
            on_op(engine, i, op)
    result.arena_nodes_peak = peak
    if config.dump_ast:
        print(arena.dump(), file=sys.stderr)

    if not ops:
        return result
    rss = _rss_kb()
    index_peak = 0 if engine.index is None else engine.index.peak
    for rule in rules:
        search_ns = measured.search_ns.get(rule.name, [])
        view_peak = sum(views[rule.name].peak for views in engine.views.values())
        result.rows.append({
            "workload": config.workload.lower(),
            "method": method,
            "rule": rule.name,
            "trials": trial,
            "searches": measured.searches[rule.name],
            "mean_search_ns": f"{_mean(search_ns):.1f}",
            "p99_search_ns": f"{_p99(search_ns):.1f}",
            "mean_maint_ns": f"{_mean(measured.maint_ns.get(rule.name, [])):.1f}",
            "firings": measured.firings[rule.name],
            "view_entries_peak": view_peak,
            "index_entries_peak": index_peak,
            "arena_nodes_peak": peak,
            "rss_kb": rss,
        })
    return result


def run_benchmark(config: BenchConfig) -> list[dict]:
    config.validate()
    rows = []
    for trial in range(config.trials):
        rows.extend(run_trial(config, trial).rows)
    return rows


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
