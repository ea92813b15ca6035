"""Generalized multisets: finite maps from node ids to signed multiplicities.

Zero multiplicities are never stored, so two multisets are equal exactly when
their stored dictionaries are equal.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Mapping

_I64_MAX = (1 << 63) - 1
_I64_MIN = -(1 << 63)


def _checked(m: int) -> int:
    if not (_I64_MIN <= m <= _I64_MAX):
        raise OverflowError(f"multiplicity {m} overflows a signed 64-bit integer")
    return m


class GMultiset:
    """A generalized multiset over hashable elements (node ids in practice).

    ``a + b`` is the pointwise sum, ``a - b`` the pointwise difference and
    ``n in a`` tests for a non-zero multiplicity.
    """

    __slots__ = ("_m",)

    def __init__(self, items: Mapping[int, int] | Iterable[tuple[int, int]] | None = None):
        self._m: dict[int, int] = {}
        if items is None:
            return
        pairs = items.items() if isinstance(items, Mapping) else items
        for key, mult in pairs:
            self._add(key, mult)

    @classmethod
    def of(cls, elements: Iterable[int], multiplicity: int = 1) -> GMultiset:
        """Lift a set of elements, mapping each one to ``multiplicity``."""
        out = cls()
        for e in elements:
            out._add(e, multiplicity)
        return out

    def _add(self, key: int, mult: int) -> None:
        if not mult:
            return
        total = _checked(self._m.get(key, 0) + mult)
        if total:
            self._m[key] = total
        else:
            del self._m[key]

    def add(self, key: int, mult: int = 1) -> None:
        """In-place ``self ⊕ {key ↦ mult}``."""
        self._add(key, mult)

    def union(self, other: GMultiset) -> GMultiset:
        out = self.copy()
        for key, mult in other._m.items():
            out._add(key, mult)
        return out

    def difference(self, other: GMultiset) -> GMultiset:
        out = self.copy()
        for key, mult in other._m.items():
            out._add(key, -mult)
        return out

    __add__ = union
    __sub__ = difference

    def __neg__(self) -> GMultiset:
        out = GMultiset()
        out._m = {k: _checked(-m) for k, m in self._m.items()}
        return out

    def copy(self) -> GMultiset:
        out = GMultiset()
        out._m = dict(self._m)
        return out

    def __getitem__(self, key: int) -> int:
        return self._m.get(key, 0)

    def __contains__(self, key: object) -> bool:
        return key in self._m

    def __iter__(self) -> Iterator[int]:
        return iter(self._m)

    def __len__(self) -> int:
        return len(self._m)

    def __bool__(self) -> bool:
        return bool(self._m)

    def items(self):
        return self._m.items()

    def positive(self) -> GMultiset:
        return GMultiset((k, m) for k, m in self._m.items() if m > 0)

    def negative(self) -> GMultiset:
        return GMultiset((k, m) for k, m in self._m.items() if m < 0)

    def support(self) -> frozenset[int]:
        return frozenset(self._m)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, GMultiset):
            return self._m == other._m
        if isinstance(other, Mapping):
            return self._m == {k: v for k, v in other.items() if v}
        return NotImplemented

    __hash__ = None  # mutable

    def __repr__(self) -> str:
        body = ", ".join(f"{k}↦{m}" for k, m in self._m.items())
        return "{|" + body + "|}"


def union(a: GMultiset, b: GMultiset) -> GMultiset:
    return a.union(b)


def difference(a: GMultiset, b: GMultiset) -> GMultiset:
    return a.difference(b)


def contains(a: GMultiset, n: int) -> bool:
    return n in a
