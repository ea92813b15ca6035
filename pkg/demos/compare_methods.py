"""Mean search latency of each method on a small workload-A run.

    python demos/compare_methods.py [keys] [ops]
"""
import sys

from astivm.bench import BenchConfig, run_trial
from astivm.engine import METHODS


def main(keys=10_000, ops=400):
    print(f"workload a, {keys} keys, {ops} ops")
    print(f"{'method':<12} {'searches':>9} {'mean ns':>12} {'p99 ns':>12} {'firings':>8}")
    for method in METHODS:
        result = run_trial(BenchConfig(workload="a", method=method, keys=keys, ops=ops,
                                       warmup=ops // 10))
        xs = sorted(x for v in result.stats.search_ns.values() for x in v)
        mean = sum(xs) / len(xs)
        p99 = xs[int(0.99 * (len(xs) - 1))]
        print(f"{method:<12} {len(xs):>9} {mean:>12.0f} {p99:>12.0f} {sum(result.stats.firings.values()):>8}")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:3]))
