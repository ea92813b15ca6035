"""``astivm-bench``: run workload benchmarks or print a rule's SQL."""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .arith import all_rules
from .bench import BenchConfig, rows_to_csv, run_benchmark
from .engine import METHODS
from .errors import AstIvmError, ConfigError
from .jitd import build_rules
from .sql import pattern_to_sql
from .ycsb import WORKLOADS


def rule_registry() -> dict:
    reg = {}
    for rule in [*build_rules(), *all_rules()]:
        reg[rule.cli_name] = rule
        reg[rule.name] = rule
    return reg


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="astivm-bench", description=__doc__)
    p.add_argument("--workload", default="a", type=str.lower, choices=sorted(WORKLOADS))
    p.add_argument("--method", default="ivm-inlined", choices=METHODS)
    p.add_argument("--keys", type=int, default=100_000)
    p.add_argument("--ops", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--opt-every", type=int, default=1, help="run the optimizer after every N ops")
    p.add_argument("--no-inline", action="store_true",
                   help="maintain ivm-inlined views with the plain search-set path")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.add_argument("--dump-ast", action="store_true", help="print the final tree to stderr")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--warmup", type=int, default=1000, help="unmeasured leading ops")
    p.add_argument("--budget", type=int, default=0, help="max firings per optimizer window (0: fixpoint)")
    p.add_argument("--rules", help="comma-separated subset, e.g. crack,pushdown-s-l")
    sub = p.add_subparsers(dest="command")
    sql = sub.add_parser("emit-sql", help="print the SQL equivalent of a rule's pattern")
    sql.add_argument("--rule", required=True)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "emit-sql":
            reg = rule_registry()
            if args.rule not in reg:
                raise ConfigError(f"unknown rule {args.rule!r}; known: {', '.join(sorted(reg))}")
            print(pattern_to_sql(reg[args.rule].pattern))
            return 0
        config = BenchConfig(
            workload=args.workload, method=args.method, keys=args.keys, ops=args.ops,
            seed=args.seed, opt_every=args.opt_every, inline=not args.no_inline,
            trials=args.trials, warmup=args.warmup, budget=args.budget,
            rules=None if args.rules is None else [r.strip() for r in args.rules.split(",") if r.strip()],
            dump_ast=args.dump_ast,
        )
        config.validate()
        print(f"astivm-bench: workload={config.workload} method={config.effective_method} "
              f"keys={config.keys} ops={config.ops} opt-every={config.opt_every}", file=sys.stderr)
        text = rows_to_csv(run_benchmark(config))
    except ConfigError as exc:
        print(f"astivm-bench: error: {exc}", file=sys.stderr)
        return 2
    except AstIvmError as exc:
        print(f"astivm-bench: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
