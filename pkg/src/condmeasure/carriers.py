"""Countable carriers and the finite/cofinite set algebra over their cells.

A carrier is a countable measurable space whose atoms ("cells") are indexed
by integers, or by integer pairs for product carriers. Measurable sets are
restricted to the algebra generated by finite sets: ``Finite``, ``Cofinite``
and ``All``. This algebra is closed under complement, finite union and finite
intersection, which is all the measure code ever needs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union

from .errors import CarrierMismatch, InvalidIndex, NotOnGrid

DEFAULT_PROBE = 64

Index = Union[int, tuple]


def lattice_order() -> Iterator[int]:
    """0, -1, 1, -2, 2, ... (the canonical enumeration of the integers)."""
    yield 0
    n = 1
    while True:
        yield -n
        yield n
        n += 1


@dataclass(frozen=True)
class FiniteAtoms:
    count: int

    def __post_init__(self):
        if not isinstance(self.count, int) or self.count < 1:
            raise ValueError(f"FiniteAtoms needs count >= 1, got {self.count!r}")

    is_finite = True

    def is_valid(self, k) -> bool:
        return isinstance(k, int) and 0 <= k < self.count

    def cells(self) -> list[int]:
        return list(range(self.count))

    def order(self) -> Iterator[int]:
        return iter(range(self.count))

    def probe(self, window: int = DEFAULT_PROBE) -> list[int]:
        return self.cells()

    def __str__(self):
        return f"atoms({self.count})"


@dataclass(frozen=True)
class IntegerLattice:
    is_finite = False

    def is_valid(self, k) -> bool:
        return isinstance(k, int) and not isinstance(k, bool)

    def order(self) -> Iterator[int]:
        return lattice_order()

    def probe(self, window: int = DEFAULT_PROBE) -> list[int]:
        return list(range(-window, window + 1))

    def __str__(self):
        return "lattice"


@dataclass(frozen=True)
class RealGrid:
    """The real line cut into cells ``[offset + k*width, offset + (k+1)*width)``."""

    width: Fraction
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "width", Fraction(self.width))
        object.__setattr__(self, "offset", Fraction(self.offset))
        if self.width <= 0:
            raise ValueError(f"RealGrid width must be positive, got {self.width}")

    is_finite = False

    def is_valid(self, k) -> bool:
        return isinstance(k, int) and not isinstance(k, bool)

    def order(self) -> Iterator[int]:
        return lattice_order()

    def probe(self, window: int = DEFAULT_PROBE) -> list[int]:
        return list(range(-window, window + 1))

    def boundary_index(self, x) -> int:
        steps = (Fraction(x) - self.offset) / self.width
        if steps.denominator != 1:
            raise NotOnGrid(f"{x} is not a boundary of {self}")
        return steps.numerator

    def __str__(self):
        from .extended import render

        return f"grid({render(self.width)}, {render(self.offset)})"


@dataclass(frozen=True)
class ProductCarrier:
    """Cells are pairs ``(left, right)``; by convention left is the parameter axis."""

    left: "Carrier"
    right: "Carrier"

    @property
    def is_finite(self) -> bool:
        return self.left.is_finite and self.right.is_finite

    def is_valid(self, k) -> bool:
        return (
            isinstance(k, tuple)
            and len(k) == 2
            and self.left.is_valid(k[0])
            and self.right.is_valid(k[1])
        )

    def cells(self) -> list[tuple]:
        return list(itertools.product(self.left.cells(), self.right.cells()))

    def order(self) -> Iterator[tuple]:
        # diagonal sweep over the two axis orders; finite axes are exhausted gracefully
        left, right = [], []
        lit, rit = self.left.order(), self.right.order()
        n = 0
        while True:
            for seq, it in ((left, lit), (right, rit)):
                nxt = next(it, None)
                if nxt is not None:
                    seq.append(nxt)
            emitted = False
            for i in range(n + 1):
                j = n - i
                if i < len(left) and j < len(right):
                    emitted = True
                    yield (left[i], right[j])
            if not emitted and n > len(left) + len(right):
                return
            n += 1

    def probe(self, window: int = DEFAULT_PROBE) -> list[tuple]:
        return list(itertools.product(self.left.probe(window), self.right.probe(window)))

    def __str__(self):
        return f"({self.left} x {self.right})"


Carrier = Union[FiniteAtoms, IntegerLattice, RealGrid, ProductCarrier]


def check_index(c: Carrier, k) -> None:
    if not c.is_valid(k):
        raise InvalidIndex(f"{k!r} is not a cell of {c}")


@dataclass(frozen=True)
class CellSet:
    """A set in the finite/cofinite algebra.

    ``kind`` is ``"finite"`` (``cells`` lists the members), ``"cofinite"``
    (``cells`` lists the excluded indices) or ``"all"``. ``Cofinite([])`` is
    stored as ``All``.
    """

    kind: str
    cells: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("finite", "cofinite", "all"):
            raise ValueError(f"unknown CellSet kind {self.kind!r}")
        cells = tuple(sorted(set(self.cells)))
        if self.kind == "all" and cells:
            raise ValueError("All carries no cell list")
        if self.kind == "cofinite" and not cells:
            object.__setattr__(self, "kind", "all")
        object.__setattr__(self, "cells", cells)

    def __contains__(self, k) -> bool:
        if self.kind == "all":
            return True
        if self.kind == "finite":
            return k in self._lookup
        return k not in self._lookup

    @property
    def _lookup(self) -> frozenset:
        cached = self.__dict__.get("_lookup_cache")
        if cached is None:
            cached = frozenset(self.cells)
            object.__setattr__(self, "_lookup_cache", cached)
        return cached

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def is_empty(self) -> bool:
        return self.kind == "finite" and not self.cells

    def __iter__(self):
        if self.kind != "finite":
            raise TypeError(f"cannot iterate an infinite cell set ({self.kind})")
        return iter(self.cells)

    def __len__(self):
        if self.kind != "finite":
            raise TypeError(f"an infinite cell set ({self.kind}) has no length")
        return len(self.cells)

    def __str__(self):
        if self.kind == "all":
            return "All"
        inner = ", ".join(_fmt_index(k) for k in self.cells)
        name = "Finite" if self.kind == "finite" else "Cofinite"
        return f"{name}([{inner}])"


def _fmt_index(k) -> str:
    if isinstance(k, tuple):
        return "(" + ", ".join(str(x) for x in k) + ")"
    return str(k)


def finite(cells=()) -> CellSet:
    return CellSet("finite", tuple(cells))


def cofinite(excluded=()) -> CellSet:
    return CellSet("cofinite", tuple(excluded))


ALL = CellSet("all")
EMPTY = CellSet("finite")


def check_set(s: CellSet, c: Carrier) -> None:
    for k in s.cells:
        check_index(c, k)


def normalize(s: CellSet, c: Carrier) -> CellSet:
    """Canonical form relative to a carrier: on finite carriers everything is ``Finite``."""
    check_set(s, c)
    if c.is_finite and s.kind != "finite":
        return finite(k for k in c.cells() if k in s)
    return s


def complement(s: CellSet, c: Carrier | None = None) -> CellSet:
    if c is not None:
        check_set(s, c)
    if s.kind == "all":
        out = EMPTY
    elif s.kind == "finite":
        out = cofinite(s.cells)
    else:
        out = finite(s.cells)
    return normalize(out, c) if c is not None else out


def union(a: CellSet, b: CellSet) -> CellSet:
    if a.kind == "all" or b.kind == "all":
        return ALL
    if a.kind == "finite" and b.kind == "finite":
        return finite(a.cells + b.cells)
    if a.kind == "finite":
        a, b = b, a
    # a is cofinite from here on
    if b.kind == "finite":
        return cofinite(set(a.cells) - set(b.cells))
    return cofinite(set(a.cells) & set(b.cells))


def intersect(a: CellSet, b: CellSet) -> CellSet:
    if a.kind == "all":
        return b
    if b.kind == "all":
        return a
    if a.kind == "finite" and b.kind == "finite":
        keep = set(b.cells)
        return finite(k for k in a.cells if k in keep)
    return complement(union(complement(a), complement(b)))


def difference(a: CellSet, b: CellSet) -> CellSet:
    return intersect(a, complement(b))


def is_subset(a: CellSet, b: CellSet) -> bool:
    return difference(a, b).is_empty


def interval_set(c: RealGrid, lo, hi) -> CellSet:
    """Cells of a grid carrier that make up the open interval ``(lo, hi)``."""
    if not isinstance(c, RealGrid):
        raise CarrierMismatch(f"interval_set needs a RealGrid carrier, got {c}")
    lo, hi = Fraction(lo), Fraction(hi)
    if not lo < hi:
        raise ValueError(f"empty interval ({lo}, {hi})")
    i, j = c.boundary_index(lo), c.boundary_index(hi)
    return finite(range(i, j))


def enumerate_on(s: CellSet, c: Carrier, window: int = DEFAULT_PROBE) -> list:
    """Members of ``s`` among the probe cells of ``c``."""
    return [k for k in c.probe(window) if k in s]


def observably_equal(a: CellSet, b: CellSet, c: Carrier, window: int = DEFAULT_PROBE) -> bool:
    return enumerate_on(a, c, window) == enumerate_on(b, c, window)
