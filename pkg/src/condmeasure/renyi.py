"""Bunches, Renyi families and their extension to a conditional measure.

A Renyi family assigns a probability law ``nu(. | B)`` to every member ``B``
of a bunch: a union-closed family of nonempty sets with a countable cover of
the carrier. :func:`extend` runs the structure-theorem construction: fix
``B0``, put ``mu(B) = nu(B | B0 u B) / nu(B0 | B0 u B)`` on members, then
``mu(A) = nu(A | B) mu(B)`` for ``A`` inside a member, and sum over a
disjoint decomposition along the covering sequence for everything else.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .carriers import (
    ALL,
    DEFAULT_PROBE,
    Carrier,
    CellSet,
    check_set,
    complement,
    difference,
    finite,
    intersect,
    is_subset,
    lattice_order,
    normalize,
    union,
)
from .cmeasure import CMeasure, equivalent, from_measure, reference_cell
from .errors import (
    CarrierMismatch,
    ConsistencyFailure,
    NotAdmissible,
    UnsupportedDecomposition,
)
from .extended import INF, render
from .measures import Geometric, Measure, TableWithDefault, is_admissible, mass


# -- bunches ----------------------------------------------------------------------


@dataclass(frozen=True)
class ExplicitBunch:
    """A finite list of members; axioms are checked, not assumed."""

    carrier: Carrier
    members: tuple

    def __post_init__(self):
        seen, kept = set(), []
        for s in self.members:
            s = normalize(s, self.carrier)
            if s not in seen:
                seen.add(s)
                kept.append(s)
        object.__setattr__(self, "members", tuple(kept))

    def contains(self, s: CellSet) -> bool:
        return normalize(s, self.carrier) in self.members

    def covering(self) -> Iterator[CellSet]:
        return iter(self.members)

    def covering_members_containing(self, k) -> list:
        return [b for b in self.members if k in b]

    def sample_members(self, limit: int | None = None) -> list:
        return list(self.members)

    def __str__(self):
        return "{" + ", ".join(str(b) for b in self.members) + "}"


@dataclass(frozen=True)
class TranslateBunch:
    """Finite nonempty unions of the translates ``window + i * step``, ``i`` an integer.

    With ``window = {0, 1}`` and ``step = 1`` on ``grid(1/2, 0)`` the generators
    are the open unit intervals ``(i/2, 1 + i/2)``.
    """

    carrier: Carrier
    window: CellSet
    step: int = 1

    def __post_init__(self):
        check_set(self.window, self.carrier)
        if self.carrier.is_finite:
            raise ValueError("translate bunches live on lattice or grid carriers")
        if not self.window.is_finite or self.window.is_empty:
            raise ValueError("the generating window must be a finite nonempty set")
        if self.step < 1:
            raise ValueError("step must be a positive integer")

    def generator(self, i: int) -> CellSet:
        return finite(k + i * self.step for k in self.window.cells)

    def generator_indices_containing(self, k) -> list:
        out = []
        for w in self.window.cells:
            if (k - w) % self.step == 0:
                out.append((k - w) // self.step)
        return sorted(set(out), key=_lattice_rank)

    def contains(self, s: CellSet) -> bool:
        if not s.is_finite or s.is_empty:
            return False
        for k in s.cells:
            if not any(is_subset(self.generator(i), s) for i in self.generator_indices_containing(k)):
                return False
        return True

    def covers(self) -> bool:
        residues = {k % self.step for k in self.window.cells}
        return len(residues) == self.step

    def covering(self) -> Iterator[CellSet]:
        return (self.generator(i) for i in lattice_order())

    def covering_members_containing(self, k) -> list:
        return [self.generator(i) for i in self.generator_indices_containing(k)]

    def sample_members(self, limit: int | None = None) -> list:
        """Generators in canonical order, then their pairwise unions."""
        n = max(2, limit if limit is not None else 8)
        gens = [self.generator(i) for i in itertools.islice(lattice_order(), n)]
        out = list(gens)
        for a, b in itertools.combinations(gens, 2):
            u = union(a, b)
            if u not in out:
                out.append(u)
        return out if limit is None else out[: max(limit, len(gens))]

    def __str__(self):
        return f"translates of {self.window} by {self.step}"


@dataclass(frozen=True)
class AdmissibleBunch:
    """All admissible sets of a conditional measure (the maximal bunch)."""

    cmeasure: CMeasure

    @property
    def carrier(self) -> Carrier:
        return self.cmeasure.carrier

    def contains(self, s: CellSet) -> bool:
        return is_admissible(self.cmeasure.representative, s)

    @property
    def _anchor(self):
        return reference_cell(self.cmeasure.representative)

    def _cover_member(self, k) -> CellSet:
        # zero-weight cells ride along with the reference cell
        return finite([k, self._anchor])

    def covering(self) -> Iterator[CellSet]:
        return (self._cover_member(k) for k in self.carrier.order())

    def covering_members_containing(self, k) -> list:
        return [self._cover_member(k)]

    def sample_members(self, limit: int | None = None) -> list:
        n = limit if limit is not None else 8
        cells = list(itertools.islice(self.carrier.order(), max(n, 2)))
        cover = [self._cover_member(k) for k in cells]
        out = []
        for s in cover + [union(a, b) for a, b in itertools.combinations(cover, 2)]:
            if s not in out:
                out.append(s)
        return out

    def __str__(self):
        return f"admissible sets of {self.cmeasure}"


def _lattice_rank(i: int) -> int:
    return 2 * i if i >= 0 else -2 * i - 1


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


def validate_bunch(b, c: Carrier | None = None) -> list:
    """Violations of the three bunch axioms (an empty list means valid)."""
    c = c if c is not None else b.carrier
    if b.carrier != c:
        raise CarrierMismatch(f"{b.carrier} vs {c}")
    out = []
    if isinstance(b, ExplicitBunch):
        if not b.members:
            out.append(Violation("cover", "no members"))
        for s in b.members:
            if s.is_empty:
                out.append(Violation("empty-member", "the empty set is a member"))
        for s, t in itertools.combinations(b.members, 2):
            u = normalize(union(s, t), c)
            if u not in b.members:
                out.append(Violation("union-closure", f"{s} u {t} = {u} is not a member"))
        total = finite()
        for s in b.members:
            total = union(total, s)
        if normalize(total, c) != normalize(ALL, c):
            out.append(Violation("cover", f"members only cover {normalize(total, c)}"))
    elif isinstance(b, TranslateBunch):
        if not b.covers():
            out.append(
                Violation("cover", f"translates of {b.window} by {b.step} miss some residues")
            )
    return out


def covering_witness(b) -> str:
    if isinstance(b, TranslateBunch):
        return (
            f"generators {b.window} + {b.step}*i for i = 0, -1, 1, ...; window residues "
            f"mod {b.step} = {sorted({k % b.step for k in b.window.cells})}"
        )
    if isinstance(b, AdmissibleBunch):
        return f"pairs {{k, {b._anchor}}} over all cells k"
    return "union of all members is the carrier"


# -- laws and families -------------------------------------------------------------


@dataclass(frozen=True)
class ProportionalLaw:
    """``nu(A | B) = base(A & B) / base(B)``."""

    base: Measure

    def _member_mass(self, B: CellSet):
        cache = self.__dict__.setdefault("_masses", {})
        if B not in cache:
            cache[B] = mass(self.base, B)
        return cache[B]

    def prob(self, A: CellSet, B: CellSet) -> Fraction:
        mb = self._member_mass(B)
        if mb is INF or mb == 0:
            raise NotAdmissible(f"{B} has base mass {mb}")
        if A.kind == "all":
            return Fraction(1)
        return Fraction(mass(self.base, intersect(A, B))) / mb

    def __str__(self):
        return f"proportional to {self.base.rule}"


def uniform_law(carrier: Carrier) -> ProportionalLaw:
    """Uniform laws on finite unions of equal-width cells."""
    return ProportionalLaw(Measure(carrier, TableWithDefault((), Fraction(1))))


@dataclass(frozen=True)
class ExplicitLaw:
    """One probability table per member, as ``((member, ((cell, p), ...)), ...)``."""

    tables: tuple

    def __post_init__(self):
        object.__setattr__(
            self,
            "tables",
            tuple((b, tuple(sorted((k, Fraction(p)) for k, p in dict(t).items()))) for b, t in self.tables),
        )

    @property
    def lookup(self) -> dict:
        cached = self.__dict__.get("_lookup")
        if cached is None:
            cached = {b: dict(t) for b, t in self.tables}
            object.__setattr__(self, "_lookup", cached)
        return cached

    def table(self, B: CellSet) -> dict:
        try:
            return self.lookup[B]
        except KeyError:
            raise NotAdmissible(f"no law given for {B}") from None

    def prob(self, A: CellSet, B: CellSet) -> Fraction:
        return sum((p for k, p in self.table(B).items() if k in A), Fraction(0))

    def __str__(self):
        return f"explicit tables for {len(self.tables)} members"


@dataclass(frozen=True)
class RenyiFamily:
    bunch: object
    law: object

    @property
    def carrier(self) -> Carrier:
        return self.bunch.carrier

    def _key(self, B: CellSet) -> CellSet:
        return normalize(B, self.carrier)

    def prob(self, A: CellSet, B: CellSet) -> Fraction:
        """``nu(A | B)`` for a member ``B``."""
        B = self._key(B)
        return self.law.prob(A, B)

    def members(self, limit: int | None = None) -> list:
        return self.bunch.sample_members(limit)


def explicit_family(carrier: Carrier, tables: dict) -> RenyiFamily:
    """Family from ``{member: {cell: probability}}``; the bunch is the key set."""
    keyed = {normalize(b, carrier): t for b, t in tables.items()}
    return RenyiFamily(ExplicitBunch(carrier, tuple(keyed)), ExplicitLaw(tuple(keyed.items())))


# -- validation ---------------------------------------------------------------------


def _nested_pairs(members: list, budget: int | None):
    n = 0
    for b1 in members:
        for b2 in members:
            if b1 != b2 and is_subset(b1, b2):
                yield b1, b2
                n += 1
                if budget is not None and n >= budget:
                    return


def _test_sets(f: RenyiFamily, b1: CellSet, b2: CellSet, rng: random.Random, n_random: int) -> list:
    sets = [ALL, b1]
    if b1.is_finite:
        sets.extend(finite([k]) for k in b1.cells)
    if b2.is_finite and b2.cells:
        for _ in range(n_random):
            sets.append(finite(k for k in b2.cells if rng.random() < 0.5))
    return sets


def validate_renyi(f: RenyiFamily, pair_budget: int = 200, seed: int = 0, n_random: int = 3) -> list:
    """Violations of the Renyi-space axioms, exact.

    Every sampled member is checked for normalization and concentration (and
    nonnegative entries, for explicit tables). Nested pairs ``B1 <= B2`` are
    checked for positivity and for ``nu(A|B1) = nu(A&B1|B2) / nu(B1|B2)``.
    Explicit bunches are checked in full; other bunches on the first
    ``pair_budget`` nested pairs of their deterministic member enumeration.
    """
    rng = random.Random(seed)
    out = []
    explicit = isinstance(f.bunch, ExplicitBunch)
    members = f.members(None if explicit else max(4, int(pair_budget**0.5) + 2))
    for b in members:
        try:
            if isinstance(f.law, ExplicitLaw):
                tab = f.law.table(b)
                for k, p in tab.items():
                    if p < 0:
                        out.append(Violation("negative", f"nu({{{k}}} | {b}) = {render(p)}"))
            total = f.prob(ALL, b)
            if total != 1:
                out.append(Violation("normalization", f"nu(All | {b}) = {render(total)}"))
            outside = f.prob(complement(b), b)
            if outside != 0:
                out.append(Violation("concentration", f"nu(complement | {b}) = {render(outside)}"))
        except NotAdmissible as exc:
            out.append(Violation("missing-law", str(exc)))
    for b1, b2 in _nested_pairs(members, None if explicit else pair_budget):
        try:
            p12 = f.prob(b1, b2)
            if p12 <= 0:
                out.append(Violation("positivity", f"nu({b1} | {b2}) = {render(p12)}"))
                continue
            for A in _test_sets(f, b1, b2, rng, n_random):
                lhs = f.prob(A, b1)
                rhs = f.prob(intersect(A, b1), b2) / p12
                if lhs != rhs:
                    out.append(
                        Violation(
                            "consistency",
                            f"B1={b1}, B2={b2}, A={A}: {render(lhs)} != {render(rhs)}",
                        )
                    )
                    break
        except NotAdmissible as exc:
            out.append(Violation("missing-law", str(exc)))
    return out


# -- extension ------------------------------------------------------------------------


class Extension:
    """The measure built from a Renyi family with normalization ``mu(B0) = 1``.

    Cell weights are computed lazily and memoized; every covering member that
    contains a queried cell is consulted and disagreement raises
    :class:`ConsistencyFailure`.
    """

    def __init__(self, family: RenyiFamily, b0: CellSet):
        self.family = family
        self.b0 = family._key(b0)
        if not family.bunch.contains(self.b0):
            raise NotAdmissible(f"{b0} is not a member of the bunch")
        self._weight = lru_cache(maxsize=None)(self._compute_weight)
        self.member_mass = lru_cache(maxsize=None)(self._member_mass)

    def _member_mass(self, B: CellSet) -> Fraction:
        """``mu(B) = nu(B | B0 u B) / nu(B0 | B0 u B)`` for a member ``B``."""
        joint = self.family._key(union(self.b0, B))
        if not self.family.bunch.contains(joint):
            raise ConsistencyFailure(f"{self.b0} u {B} is not a member; the bunch is not union-closed")
        return self.family.prob(B, joint) / self.family.prob(self.b0, joint)

    def mass_within(self, A: CellSet, B: CellSet) -> Fraction:
        """``mu(A) = nu(A | B) mu(B)`` for ``A`` inside the member ``B``."""
        return self.family.prob(A, B) * self.member_mass(B)

    def _compute_weight(self, k) -> Fraction:
        containing = self.family.bunch.covering_members_containing(k)
        if not containing:
            raise UnsupportedDecomposition(f"no covering member contains cell {k}")
        cell = finite([k])
        values = [self.mass_within(cell, B) for B in containing]
        if any(v != values[0] for v in values[1:]):
            raise ConsistencyFailure(
                f"cell {k}: members {[str(b) for b in containing]} give "
                f"{[render(v) for v in values]}"
            )
        return values[0]

    def weight(self, k) -> Fraction:
        return self._weight(k)

    def measure_of(self, A: CellSet) -> Fraction:
        """``mu(A)`` by disjoint decomposition along the covering sequence."""
        check_set(A, self.family.carrier)
        c = self.family.carrier
        if A.is_finite:
            return sum((self.weight(k) for k in A.cells), Fraction(0))
        if not isinstance(self.family.bunch, ExplicitBunch):
            raise UnsupportedDecomposition(f"{A} is infinite; only finite sets decompose lazily")
        total, seen = Fraction(0), finite()
        for B in self.family.bunch.covering():
            piece = normalize(difference(intersect(A, B), seen), c)
            if not piece.is_empty:
                total += self.mass_within(piece, B)
            seen = union(seen, B)
        if not normalize(difference(A, seen), c).is_empty:
            raise UnsupportedDecomposition(f"the covering sequence does not cover {A}")
        return total


@dataclass(frozen=True)
class ProceduralRule:
    """Weights read off an :class:`Extension`, optionally rescaled."""

    extension: Extension = field(compare=False)
    factor: Fraction = Fraction(1)
    kind = "procedural"

    def validate(self, carrier):
        if carrier != self.extension.family.carrier:
            raise CarrierMismatch(f"{carrier} vs {self.extension.family.carrier}")

    def normalized(self, carrier):
        return self

    def weight(self, k):
        return self.extension.weight(k) * self.factor

    def total_excluding(self, carrier, excluded=()):
        if carrier.is_finite:
            ex = set(excluded)
            return sum((self.weight(k) for k in carrier.cells() if k not in ex), Fraction(0))
        raise UnsupportedDecomposition("total mass of a procedural extension on an infinite carrier")

    def scaled(self, alpha):
        return ProceduralRule(self.extension, self.factor * alpha)

    def is_sigma_finite(self, carrier):
        return True

    def is_nonzero(self, carrier):
        return True

    def __str__(self):
        return "Procedural"


@dataclass(frozen=True)
class ExtensionResult:
    b0: CellSet
    measure: Measure  # normalized so that mu(B0) = 1
    cmeasure: CMeasure
    fitted: bool
    extension: Extension = field(compare=False, repr=False)

    def weight(self, k) -> Fraction:
        return self.extension.weight(k)


def _fit_rule(ext: Extension, carrier: Carrier, window: int, hypothesis: str | None):
    cells = carrier.probe(window)
    w = {k: ext.weight(k) for k in cells}
    if carrier.is_finite:
        return TableWithDefault(tuple(w.items()), Fraction(0))
    tries = [hypothesis] if hypothesis else ["constant", "geometric"]
    for kind in tries:
        if kind == "constant":
            vals = set(w.values())
            if len(vals) == 1:
                return TableWithDefault((), vals.pop())
        elif kind == "geometric":
            a = w.get(0, Fraction(0))
            if a > 0 and 1 in w:
                r = w[1] / a
                if 0 < r < 1 and all(v == a * r ** abs(k) for k, v in w.items()):
                    return Geometric(a, r)
        elif kind == "table":
            lo, hi = w[cells[0]], w[cells[-1]]
            if lo == hi:
                return TableWithDefault(tuple((k, v) for k, v in w.items() if v != lo), lo)
        else:
            raise ValueError(f"unknown rule hypothesis {kind!r}")
    return None


def extend(f: RenyiFamily, b0: CellSet, window: int = DEFAULT_PROBE, hypothesis: str | None = None) -> ExtensionResult:
    """Extend a Renyi family to the conditional measure it generates.

    The procedural weights are exact. When they match a closed-form rule on
    the probe window (every cell, on finite carriers) the measure is reported
    in that form; ``hypothesis`` restricts the fit to ``"constant"``,
    ``"geometric"`` or ``"table"``.
    """
    ext = Extension(f, b0)
    carrier = f.carrier
    rule = _fit_rule(ext, carrier, window, hypothesis)
    fitted = rule is not None
    if fitted:
        measure = Measure(carrier, rule)
    else:
        measure = Measure(carrier, ProceduralRule(ext))
    return ExtensionResult(ext.b0, measure, from_measure(measure), fitted, ext)


def extension_unique(f: RenyiFamily, k: int = 5, window: int = DEFAULT_PROBE) -> bool:
    """Whether extensions from several choices of ``B0`` give one class."""
    members = f.members(None) if isinstance(f.bunch, ExplicitBunch) else f.members(k)[:k]
    results = [extend(f, b, window).cmeasure for b in members]
    return all(equivalent(g1, g2, window) for g1, g2 in itertools.combinations(results, 2))


def maximal_extension(g: CMeasure) -> RenyiFamily:
    """The Renyi family of all elementary conditionals of ``g``."""
    return RenyiFamily(AdmissibleBunch(g), ProportionalLaw(g.representative))


def extends(big: RenyiFamily, small: RenyiFamily, limit: int | None = None) -> bool:
    """Whether ``big`` contains every (sampled) member of ``small`` with the same law."""
    if big.carrier != small.carrier:
        raise CarrierMismatch(f"{big.carrier} vs {small.carrier}")
    for B in small.members(limit):
        if not big.bunch.contains(B):
            return False
        tests = [ALL] + ([finite([k]) for k in B.cells] if B.is_finite else [])
        if any(big.prob(A, B) != small.prob(A, B) for A in tests):
            return False
    return True


def first_member(f: RenyiFamily) -> CellSet:
    return next(iter(f.bunch.covering()))


def same_cmeasure(f1: RenyiFamily, f2: RenyiFamily, window: int = DEFAULT_PROBE) -> bool:
    """Whether two families, possibly over different bunches, generate one class."""
    if f1.carrier != f2.carrier:
        raise CarrierMismatch(f"{f1.carrier} vs {f2.carrier}")
    g1 = extend(f1, first_member(f1), window).cmeasure
    g2 = extend(f2, first_member(f2), window).cmeasure
    return equivalent(g1, g2, window)
