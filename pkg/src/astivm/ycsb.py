"""Deterministic operation streams modelled on the YCSB core workloads."""
from __future__ import annotations

import random
from typing import NamedTuple

import numpy as np

from .errors import ConfigError
from .jitd import OpKind, WorkloadOp


class Mix(NamedTuple):
    read: float = 0.0
    update: float = 0.0
    insert: float = 0.0
    rmw: float = 0.0
    distribution: str = "zipfian"


WORKLOADS = {
    "a": Mix(read=0.5, update=0.5),
    "b": Mix(read=0.95, update=0.05),
    "c": Mix(read=1.0),
    "d": Mix(read=0.95, insert=0.05, distribution="latest"),
    "f": Mix(read=0.5, rmw=0.5),
}

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK = (1 << 64) - 1


def fnv1a64(x: int) -> int:
    h = _FNV_OFFSET
    for _ in range(8):
        h ^= x & 0xFF
        h = (h * _FNV_PRIME) & _MASK
        x >>= 8
    return h


class Zipfian:
    """Ranks in ``[0, n)`` with P(rank k) proportional to ``1 / (k+1)^theta``."""

    def __init__(self, n: int, rng: random.Random, theta: float = 0.99):
        if n < 1:
            raise ConfigError("zipfian item count must be positive")
        self.n, self.theta, self.rng = n, theta, rng
        self.zetan = self._zeta(n)
        zeta2 = self._zeta(min(n, 2))
        self.alpha = 1.0 / (1.0 - theta)
        self.eta = (1 - (2.0 / n) ** (1 - theta)) / (1 - zeta2 / self.zetan) if n > 2 else 1.0

    def _zeta(self, n: int) -> float:
        return float(np.sum(np.arange(1, n + 1, dtype=np.float64) ** -self.theta))

    def rank(self) -> int:
        u = self.rng.random()
        uz = u * self.zetan
        if uz < 1.0:
            return 0
        if uz < 1.0 + 0.5 ** self.theta:
            return min(1, self.n - 1)
        return min(self.n - 1, int(self.n * (self.eta * u - self.eta + 1) ** self.alpha))


class ScrambledZipfian:
    """Zipfian popularity spread over the key space by hashing the rank."""

    def __init__(self, n: int, rng: random.Random, theta: float = 0.99):
        self.n = n
        self.zipf = Zipfian(n, rng, theta)

    def next(self) -> int:
        return fnv1a64(self.zipf.rank()) % self.n


def generate_ops(workload: str, keys: int, ops: int, seed: int) -> list[WorkloadOp]:
    """Operation stream for ``workload`` over keys ``0..keys-1``.

    Inserts use fresh keys ``keys, keys+1, ...``.  The stream depends only on
    the four arguments.
    """
    try:
        mix = WORKLOADS[workload.lower()]
    except KeyError:
        raise ConfigError(f"unknown workload {workload!r}; expected one of {', '.join(WORKLOADS)}") from None
    if keys < 1 or ops < 0:
        raise ConfigError("keys must be positive and ops non-negative")
    rng = random.Random(seed)
    if mix.distribution == "latest":
        # rank 0 is the newest key; a fixed-size zipfian over the initial keys
        # is rescaled as the population grows
        latest = Zipfian(keys, rng)
    else:
        chooser = ScrambledZipfian(keys, rng)
    next_key = keys
    out = []
    cuts = np.cumsum([mix.read, mix.update, mix.insert, mix.rmw])
    for _ in range(ops):
        u = rng.random()
        kind = int(np.searchsorted(cuts, u, side="right"))
        if kind == 2:
            out.append(WorkloadOp(OpKind.INSERT, next_key, rng.randrange(1 << 30)))
            next_key += 1
            continue
        if mix.distribution == "latest":
            k = next_key - 1 - min(next_key - 1, latest.rank() * next_key // keys)
        else:
            k = chooser.next()
        if kind == 0 or kind >= 4:
            out.append(WorkloadOp(OpKind.READ, k))
        elif kind == 1:
            out.append(WorkloadOp(OpKind.UPDATE, k, rng.randrange(1 << 30)))
        else:
            out.append(WorkloadOp(OpKind.READ_MODIFY_WRITE, k, rng.randrange(1 << 30)))
    return out
