"""Exact measures on countable carriers.

A :class:`Measure` pairs a carrier with a weight rule. Two rule families are
user facing:

* :class:`TableWithDefault` -- finitely many listed weights, one default for
  every other cell. With no entries this is a constant measure, which on a
  :class:`~condmeasure.carriers.RealGrid` with ``default == width`` is Lebesgue
  measure restricted to the grid algebra.
* :class:`Geometric` -- weight ``a * r**|k|`` on the integers.

Other modules add rules of their own (pushforwards, joints built from a prior
and a kernel, weights produced by the Renyi extension). A rule is any object
offering ``weight``, ``total_excluding``, ``scaled``, ``is_sigma_finite``,
``is_nonzero`` and ``validate``; mass evaluation here only talks to that
protocol.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .carriers import ALL, Carrier, CellSet, IntegerLattice, RealGrid, check_index, check_set
from .errors import NonPositiveScalar, UnsupportedRule, ZeroMeasure
from .extended import INF, Extended, ext_sum, render, to_extended


@dataclass(frozen=True)
class TableWithDefault:
    entries: tuple  # sorted ((index, weight), ...), no entry equal to the default
    default: Extended = Fraction(0)

    def __post_init__(self):
        default = to_extended(self.default)
        seen = {}
        for k, w in self.entries:
            if k in seen:
                raise ValueError(f"index {k!r} listed twice")
            w = to_extended(w)
            if w is not INF and w < 0:
                raise ValueError(f"negative weight {w} at {k!r}")
            seen[k] = w
        if default is not INF and default < 0:
            raise ValueError(f"negative default weight {default}")
        kept = tuple(sorted((k, w) for k, w in seen.items() if w != default))
        object.__setattr__(self, "default", default)
        object.__setattr__(self, "entries", kept)

    kind = "table"

    @property
    def lookup(self) -> dict:
        cached = self.__dict__.get("_lookup")
        if cached is None:
            cached = dict(self.entries)
            object.__setattr__(self, "_lookup", cached)
        return cached

    def validate(self, carrier: Carrier) -> None:
        for k, _ in self.entries:
            check_index(carrier, k)

    def normalized(self, carrier: Carrier) -> "TableWithDefault":
        if not carrier.is_finite or self.default == 0:
            return self
        # finite carriers: list every positive cell explicitly, default 0
        return TableWithDefault(tuple((k, self.weight(k)) for k in carrier.cells()), Fraction(0))

    def weight(self, k) -> Extended:
        return self.lookup.get(k, self.default)

    def total_excluding(self, carrier: Carrier, excluded=()) -> Extended:
        excluded = set(excluded)
        listed = ext_sum(w for k, w in self.entries if k not in excluded)
        if carrier.is_finite:
            n_rest = len(carrier.cells()) - len(self.lookup) - len(excluded - set(self.lookup))
            rest = self.default * n_rest if n_rest else Fraction(0)
        else:
            rest = INF if self.default > 0 else Fraction(0)
        return listed + rest

    def scaled(self, alpha: Fraction) -> "TableWithDefault":
        return TableWithDefault(tuple((k, w * alpha) for k, w in self.entries), self.default * alpha)

    def is_sigma_finite(self, carrier: Carrier) -> bool:
        if any(w is INF for _, w in self.entries):
            return False
        if self.default is INF:
            return carrier.is_finite and len(self.lookup) == len(carrier.cells())
        return True

    def is_nonzero(self, carrier: Carrier) -> bool:
        if any(w > 0 for _, w in self.entries):
            return True
        if self.default > 0:
            return not carrier.is_finite or len(self.lookup) < len(carrier.cells())
        return False

    def reference_candidates(self, carrier: Carrier):
        """Cells that can possibly be the first positive finite cell in canonical order."""
        cands = [k for k, w in self.entries if w is not INF and w > 0]
        if self.default is not INF and self.default > 0:
            for k in carrier.order():
                if k not in self.lookup:
                    cands.append(k)
                    break
        return cands

    def __str__(self):
        if not self.entries:
            return f"Constant({render(self.default)})"
        body = ", ".join(f"{k}: {render(w)}" for k, w in self.entries)
        return f"Table({{{body}}}, default {render(self.default)})"


@dataclass(frozen=True)
class Geometric:
    """Weight ``a * r**|k|`` on integer-indexed infinite carriers."""

    a: Fraction
    r: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "r", Fraction(self.r))
        if self.a <= 0:
            raise ValueError(f"Geometric needs a > 0, got {self.a}")
        if not 0 < self.r < 1:
            raise ValueError(f"Geometric needs 0 < r < 1, got {self.r}")

    kind = "geometric"

    def validate(self, carrier: Carrier) -> None:
        if not isinstance(carrier, (IntegerLattice, RealGrid)):
            raise UnsupportedRule(f"Geometric rule needs a lattice or grid carrier, got {carrier}")

    def normalized(self, carrier: Carrier) -> "Geometric":
        return self

    def weight(self, k) -> Fraction:
        return self.a * self.r ** abs(k)

    def total(self) -> Fraction:
        # a * (1 + 2r/(1-r))
        return self.a * (1 + self.r) / (1 - self.r)

    def total_excluding(self, carrier: Carrier, excluded=()) -> Fraction:
        return self.total() - sum((self.weight(k) for k in set(excluded)), Fraction(0))

    def scaled(self, alpha: Fraction) -> "Geometric":
        return Geometric(self.a * alpha, self.r)

    def is_sigma_finite(self, carrier: Carrier) -> bool:
        return True

    def is_nonzero(self, carrier: Carrier) -> bool:
        return True

    def reference_candidates(self, carrier: Carrier):
        return [0]

    def __str__(self):
        return f"Geometric({render(self.a)}, {render(self.r)})"


@dataclass(frozen=True)
class Measure:
    carrier: Carrier
    rule: Any

    def __post_init__(self):
        self.rule.validate(self.carrier)
        object.__setattr__(self, "rule", self.rule.normalized(self.carrier))
        if not self.rule.is_nonzero(self.carrier):
            raise ZeroMeasure(f"{self.rule} on {self.carrier} is identically zero")

    def weight(self, k) -> Extended:
        return weight(self, k)

    def mass(self, s: CellSet) -> Extended:
        return mass(self, s)

    def __str__(self):
        return f"{self.rule} on {self.carrier}"


# -- constructors -----------------------------------------------------------


def table(carrier: Carrier, entries: dict | None = None, default=0) -> Measure:
    items = tuple((k, to_extended(w)) for k, w in (entries or {}).items())
    return Measure(carrier, TableWithDefault(items, to_extended(default)))


def constant(carrier: Carrier, c=1) -> Measure:
    return table(carrier, {}, c)


def geometric(carrier: Carrier, a, r) -> Measure:
    return Measure(carrier, Geometric(Fraction(a), Fraction(r)))


def lebesgue(grid: RealGrid) -> Measure:
    """Lebesgue measure on the grid algebra: every cell weighs its width."""
    return constant(grid, grid.width)


def counting(carrier: Carrier) -> Measure:
    return constant(carrier, 1)


# -- operations -------------------------------------------------------------


def weight(m: Measure, k) -> Extended:
    check_index(m.carrier, k)
    return m.rule.weight(k)


def mass(m: Measure, s: CellSet) -> Extended:
    check_set(s, m.carrier)
    if s.kind == "finite":
        return ext_sum(m.rule.weight(k) for k in s.cells)
    if s.kind == "all":
        return m.rule.total_excluding(m.carrier, ())
    return m.rule.total_excluding(m.carrier, s.cells)


def total_mass(m: Measure) -> Extended:
    return mass(m, ALL)


def is_admissible(m: Measure, s: CellSet) -> bool:
    w = mass(m, s)
    return w is not INF and w > 0


def is_sigma_finite(m: Measure) -> bool:
    return m.rule.is_sigma_finite(m.carrier)


def scale(m: Measure, alpha) -> Measure:
    alpha = to_extended(alpha)
    if alpha is INF or alpha <= 0:
        raise NonPositiveScalar(f"scaling factor must be a positive rational, got {alpha}")
    return Measure(m.carrier, m.rule.scaled(alpha))
