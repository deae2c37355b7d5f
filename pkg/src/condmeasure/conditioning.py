"""Statistics, image measures and conditioning on a statistic or a partition.

Conditionals are atomic: for a sigma-finite statistic ``d`` and a codomain
cell ``z`` of positive image weight, ``mu^z(A) = mu(A & [d = z]) / mu_d({z})``.
On a countable carrier this is the Radon-Nikodym density that solves the
defining relation; composing with ``d`` gives the function-valued version.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .carriers import (
    ALL,
    EMPTY,
    Carrier,
    CellSet,
    FiniteAtoms,
    IntegerLattice,
    ProductCarrier,
    RealGrid,
    check_index,
    check_set,
    cofinite,
    finite,
    intersect,
)
from .cmeasure import CMeasure
from .errors import (
    CarrierMismatch,
    IndeterminateMass,
    NoBlockContains,
    NotAdmissible,
    NotSigmaFiniteStatistic,
    NullFiber,
    UnsupportedFiberSum,
)
from .extended import INF, Extended, ext_sum
from .measures import Geometric, Measure, TableWithDefault, is_sigma_finite, mass


class UnsupportedPreimage(UnsupportedFiberSum):
    """The preimage of a set is not in the finite/cofinite algebra."""


# -- statistics ---------------------------------------------------------------


@dataclass(frozen=True)
class Identity:
    domain: Carrier
    kind = "identity"

    @property
    def codomain(self) -> Carrier:
        return self.domain

    def apply(self, k):
        return k

    def fiber(self, z) -> CellSet:
        return finite([z])

    def __str__(self):
        return "Identity"


@dataclass(frozen=True)
class FiniteTable:
    domain: FiniteAtoms
    codomain: Carrier
    mapping: tuple  # image of cell i at position i
    kind = "table"

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(self.mapping))
        if not self.domain.is_finite:
            raise ValueError("FiniteTable statistics need a finite domain")
        if len(self.mapping) != len(self.domain.cells()):
            raise ValueError("FiniteTable needs one image per domain cell")
        for z in self.mapping:
            check_index(self.codomain, z)

    def apply(self, k):
        check_index(self.domain, k)
        return self.mapping[k]

    def fiber(self, z) -> CellSet:
        return finite(k for k, img in enumerate(self.mapping) if img == z)

    def __str__(self):
        return f"FiniteTable({list(self.mapping)})"


@dataclass(frozen=True)
class Modulo:
    """``k -> k mod m`` into FiniteAtoms(m); fibers are arithmetic progressions."""

    domain: Carrier
    m: int
    kind = "modulo"

    def __post_init__(self):
        if not isinstance(self.domain, (IntegerLattice, RealGrid)):
            raise ValueError("Modulo statistics need a lattice or grid domain")
        if self.m < 1:
            raise ValueError("Modulo needs m >= 1")

    @property
    def codomain(self) -> Carrier:
        return FiniteAtoms(self.m)

    def apply(self, k):
        return k % self.m

    def fiber(self, z):
        return None

    def __str__(self):
        return f"Modulo({self.m})"


@dataclass(frozen=True)
class BlockQuotient:
    """``k -> floor(k / m)`` into the integer lattice; fibers are blocks of m cells."""

    domain: Carrier
    m: int
    kind = "block"

    def __post_init__(self):
        if not isinstance(self.domain, (IntegerLattice, RealGrid)):
            raise ValueError("BlockQuotient statistics need a lattice or grid domain")
        if self.m < 1:
            raise ValueError("BlockQuotient needs m >= 1")

    @property
    def codomain(self) -> Carrier:
        return IntegerLattice()

    def apply(self, k):
        return k // self.m

    def fiber(self, z) -> CellSet:
        return finite(range(z * self.m, (z + 1) * self.m))

    def __str__(self):
        return f"BlockQuotient({self.m})"


@dataclass(frozen=True)
class Projection:
    domain: ProductCarrier
    axis: str  # "left" or "right"
    kind = "projection"

    def __post_init__(self):
        if not isinstance(self.domain, ProductCarrier):
            raise ValueError("Projection needs a product carrier")
        if self.axis not in ("left", "right"):
            raise ValueError(f"axis must be 'left' or 'right', got {self.axis!r}")

    @property
    def codomain(self) -> Carrier:
        return self.domain.left if self.axis == "left" else self.domain.right

    @property
    def other(self) -> Carrier:
        return self.domain.right if self.axis == "left" else self.domain.left

    def apply(self, k):
        return k[0] if self.axis == "left" else k[1]

    def cell(self, here, there):
        """The product cell with ``here`` on this axis and ``there`` on the other."""
        return (here, there) if self.axis == "left" else (there, here)

    def fiber(self, z):
        if not self.other.is_finite:
            return None
        return finite(self.cell(z, t) for t in self.other.cells())

    def __str__(self):
        return f"Projection({self.axis})"


def _check_domain(m: Measure, d) -> None:
    if d.domain != m.carrier:
        raise CarrierMismatch(f"statistic {d} is defined on {d.domain}, measure on {m.carrier}")


# -- preimages and fiber sums -------------------------------------------------


def preimage(d, A: CellSet) -> CellSet:
    """``d^-1(A)`` when it lies in the finite/cofinite algebra."""
    check_set(A, d.codomain)
    if isinstance(d, Identity):
        return A
    if A.kind == "all":
        return ALL
    if A.is_empty:
        return EMPTY
    if isinstance(d, FiniteTable):
        return finite(k for k, z in enumerate(d.mapping) if z in A)
    if isinstance(d, BlockQuotient):
        cells = [k for z in A.cells for k in d.fiber(z).cells]
        return finite(cells) if A.kind == "finite" else cofinite(cells)
    if isinstance(d, Modulo):
        hit = [z for z in range(d.m) if z in A]
        if len(hit) == d.m:
            return ALL
        if not hit:
            return EMPTY
        raise UnsupportedPreimage(f"preimage of {A} under {d} is an infinite, co-infinite progression")
    if isinstance(d, Projection):
        if d.other.is_finite:
            cells = [d.cell(z, t) for z in A.cells for t in d.other.cells()]
            return finite(cells) if A.kind == "finite" else cofinite(cells)
        raise UnsupportedPreimage(f"preimage of {A} under {d} is a union of infinite lines")
    raise UnsupportedFiberSum(f"no preimage rule for {d}")


def _progression_sum_geometric(rule: Geometric, m: int, j: int) -> Fraction:
    """Sum of a*r**|k| over k = j (mod m), in closed form."""
    q = rule.r**m
    up = rule.r**j  # k = j, j+m, j+2m, ...
    jn = (-j) % m
    down = rule.r ** (jn if jn else m)  # k = -jn, -jn-m, ... excluding 0
    return rule.a * (up + down) / (1 - q)


def fiber_weight(m: Measure, d, z) -> Extended:
    """Exact (possibly infinite) mass of the fiber ``d^-1({z})``."""
    _check_domain(m, d)
    check_index(d.codomain, z)
    fib = d.fiber(z)
    if fib is not None:
        return mass(m, fib)
    rule = m.rule
    if isinstance(d, Modulo):
        if isinstance(rule, TableWithDefault):
            listed = ext_sum(w for k, w in rule.entries if k % d.m == z)
            return listed + (INF if rule.default > 0 else Fraction(0))
        if isinstance(rule, Geometric):
            return _progression_sum_geometric(rule, d.m, z)
    if isinstance(d, Projection):
        own = getattr(rule, "projection_weight", None)
        if own is not None:
            return own(d.axis, z)
        if isinstance(rule, TableWithDefault):
            listed = ext_sum(w for k, w in rule.entries if d.apply(k) == z)
            return listed + (INF if rule.default > 0 else Fraction(0))
    raise UnsupportedFiberSum(f"cannot sum {rule} over the fibers of {d}")


def fiber_mass_within(m: Measure, d, z, S: CellSet) -> Extended:
    """``mu(S & [d = z])``."""
    check_set(S, m.carrier)
    fib = d.fiber(z)
    if fib is not None:
        return mass(m, intersect(S, fib))
    if S.kind == "finite":
        return ext_sum(m.rule.weight(k) for k in S.cells if d.apply(k) == z)
    total = fiber_weight(m, d, z)
    if S.kind == "all":
        return total
    return total - ext_sum(m.rule.weight(k) for k in S.cells if d.apply(k) == z)


@dataclass(frozen=True)
class PushforwardRule:
    """Image weights evaluated lazily through fiber sums."""

    source: Measure
    statistic: object
    kind = "pushforward"

    def validate(self, carrier):
        if carrier != self.statistic.codomain:
            raise CarrierMismatch(f"{carrier} is not the codomain of {self.statistic}")

    def normalized(self, carrier):
        return self

    def weight(self, z):
        return fiber_weight(self.source, self.statistic, z)

    def total_excluding(self, carrier, excluded=()):
        total = mass(self.source, ALL)
        if total is not INF:
            return total - ext_sum(self.weight(z) for z in set(excluded))
        try:
            return mass(self.source, preimage(self.statistic, cofinite(excluded)))
        except UnsupportedPreimage as exc:
            raise IndeterminateMass(f"cannot evaluate infinite image mass: {exc}") from exc

    def scaled(self, alpha):
        from .measures import scale

        return PushforwardRule(scale(self.source, alpha), self.statistic)

    def is_sigma_finite(self, carrier):
        if carrier.is_finite:
            return all(self.weight(z) is not INF for z in carrier.cells())
        return is_sigma_finite(self.source) and (
            self.statistic.fiber(0) is not None or mass(self.source, ALL) is not INF
        )

    def is_nonzero(self, carrier):
        return True

    def __str__(self):
        return f"Pushforward({self.source.rule} by {self.statistic})"


def _block_image(rule: TableWithDefault, b: int) -> TableWithDefault:
    blocks = sorted({k // b for k, _ in rule.entries})
    entries = tuple(
        (z, ext_sum(rule.weight(k) for k in range(z * b, (z + 1) * b))) for z in blocks
    )
    return TableWithDefault(entries, rule.default * b if rule.default != 0 else Fraction(0))


def image_measure(m: Measure, d) -> Measure:
    """The push-forward ``mu_d(B) = mu(d in B)`` on the codomain of ``d``."""
    _check_domain(m, d)
    if isinstance(d, Identity):
        return m
    cod = d.codomain
    rule = m.rule
    if cod.is_finite:
        weights = tuple((z, fiber_weight(m, d, z)) for z in cod.cells())
        return Measure(cod, TableWithDefault(weights, Fraction(0)))
    if isinstance(d, BlockQuotient) and isinstance(rule, TableWithDefault):
        return Measure(cod, _block_image(rule, d.m))
    if isinstance(d, Projection):
        own = getattr(rule, "marginal_rule", None)
        if own is not None:
            closed = own(d.axis)
            if closed is not None:
                return Measure(cod, closed)
        elif isinstance(rule, TableWithDefault) and not d.other.is_finite:
            coords = sorted({d.apply(k) for k, _ in rule.entries})
            entries = tuple((z, fiber_weight(m, d, z)) for z in coords)
            default = INF if rule.default > 0 else Fraction(0)
            return Measure(cod, TableWithDefault(entries, default))
    return Measure(cod, PushforwardRule(m, d))


def is_sigma_finite_statistic(m: Measure, d) -> bool:
    return is_sigma_finite(image_measure(m, d))


# -- conditionals ---------------------------------------------------------------


def _checked_image(m: Measure, d) -> Measure:
    img = image_measure(m, d)
    if not is_sigma_finite(img):
        raise NotSigmaFiniteStatistic(
            f"{d} is not sigma-finite for {m}: its image measure has an infinite atom"
        )
    return img


def conditional_given_value(m: Measure, d, z, A: CellSet) -> Fraction:
    """``mu(A | d = z)``."""
    img = _checked_image(m, d)
    check_index(d.codomain, z)
    wz = img.rule.weight(z)
    if wz == 0:
        raise NullFiber(f"the fiber of {d} at {z} has measure zero")
    return Fraction(fiber_mass_within(m, d, z, A)) / wz


def _pulled_region(m: Measure, phi, d, z, A: CellSet) -> CellSet:
    """A domain set whose trace on the fiber ``[d = z]`` is ``[phi in A]``."""
    if phi.domain != m.carrier:
        raise CarrierMismatch(f"{phi} is defined on {phi.domain}, measure on {m.carrier}")
    check_set(A, phi.codomain)
    if isinstance(phi, Identity):
        return A
    fib = d.fiber(z)
    if fib is not None:
        return finite(k for k in fib.cells if phi.apply(k) in A)
    try:
        return preimage(phi, A)
    except UnsupportedPreimage:
        pass
    if isinstance(phi, Projection) and isinstance(d, Projection) and phi.axis != d.axis:
        cells = [phi.cell(a, z) for a in A.cells]
        if A.kind == "finite":
            return finite(cells)
        return cofinite(cells) if A.kind == "cofinite" else ALL
    raise UnsupportedFiberSum(f"cannot intersect [{phi} in {A}] with the fibers of {d}")


def pushed_conditional(m: Measure, phi, d, z, A: CellSet) -> Fraction:
    """``mu_phi^z(A) = mu^z(phi in A)``; ``phi`` itself need not be sigma-finite."""
    _check_domain(m, d)
    return conditional_given_value(m, d, z, _pulled_region(m, phi, d, z, A))


# -- partitions -------------------------------------------------------------------


@dataclass(frozen=True)
class ExplicitPartition:
    carrier: Carrier
    blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        for i, a in enumerate(self.blocks):
            check_set(a, self.carrier)
            for b in self.blocks[i + 1 :]:
                if not intersect(a, b).is_empty:
                    raise ValueError(f"partition blocks {a} and {b} overlap")

    def block_of(self, x):
        check_index(self.carrier, x)
        for b in self.blocks:
            if x in b:
                return b
        raise NoBlockContains(f"no block contains {x}")


@dataclass(frozen=True)
class FiberPartition:
    """The partition of the domain into the fibers of a statistic."""

    statistic: object

    @property
    def carrier(self) -> Carrier:
        return self.statistic.domain


def conditional_given_partition(g: CMeasure, p, x, A: CellSet) -> Fraction:
    """``g(A | F1)(x)`` for the sigma-field generated by the partition ``p``."""
    rep = g.representative
    if p.carrier != g.carrier:
        raise CarrierMismatch(f"{p.carrier} vs {g.carrier}")
    check_index(g.carrier, x)
    check_set(A, g.carrier)
    if isinstance(p, FiberPartition):
        d = p.statistic
        z = d.apply(x)
        block_mass = fiber_weight(rep, d, z)
        if block_mass is INF or block_mass == 0:
            raise NotAdmissible(f"the block of {x} ({d} = {z}) has mass {block_mass}")
        return Fraction(fiber_mass_within(rep, d, z, A)) / block_mass
    block = p.block_of(x)
    block_mass = mass(rep, block)
    if block_mass is INF or block_mass == 0:
        raise NotAdmissible(f"block {block} has mass {block_mass}")
    return Fraction(mass(rep, intersect(A, block))) / block_mass


# -- identity checks --------------------------------------------------------------


def _restricted_mass(m: Measure, d, A: CellSet, B: CellSet) -> Extended:
    """``mu(A & [d in B])`` computed directly on the domain."""
    try:
        return mass(m, intersect(A, preimage(d, B)))
    except UnsupportedPreimage:
        pass
    if A.kind == "finite":
        return ext_sum(m.rule.weight(k) for k in A.cells if d.apply(k) in B)
    # d has a finite codomain here (Modulo); go fiber by fiber on the domain side
    return ext_sum(fiber_mass_within(m, d, z, A) for z in d.codomain.cells() if z in B)


def _relation_rhs(m: Measure, d, A: CellSet, B: CellSet, img: Measure) -> Extended:
    """``sum over z in B of mu^z(A) * mu_d({z})``."""

    def term(z, S):
        wz = img.rule.weight(z)
        if wz == 0:
            return Fraction(0)
        return conditional_given_value(m, d, z, S) * wz

    cod = d.codomain
    if B.kind == "finite" or cod.is_finite:
        zs = B.cells if B.kind == "finite" else [z for z in cod.cells() if z in B]
        return ext_sum(term(z, A) for z in zs)
    # infinite B: only finitely many z meet a finite A
    if A.kind == "finite":
        zs = sorted(z for z in {d.apply(k) for k in A.cells} if z in B)
        return ext_sum(term(z, A) for z in zs)
    excluded = finite(A.cells) if A.kind == "cofinite" else EMPTY
    touched = sorted(z for z in {d.apply(k) for k in excluded.cells} if z in B)
    base = mass(img, B)
    return base - ext_sum(term(z, excluded) for z in touched)


def check_defining_relation(m: Measure, d, A: CellSet, B: CellSet) -> bool:
    """Verify ``mu(A & [d in B]) == sum_{z in B} mu^z(A) mu_d({z})`` exactly."""
    _check_domain(m, d)
    check_set(A, m.carrier)
    check_set(B, d.codomain)
    img = _checked_image(m, d)
    return _restricted_mass(m, d, A, B) == _relation_rhs(m, d, A, B, img)


def check_factorization(m: Measure, phi: Projection, d: Projection, rect) -> bool:
    """Verify the joint law of ``(phi, d)`` factors as ``mu_phi^z(dy) mu_d(dz)`` on a rectangle."""
    rect_y, rect_z = rect
    if not (isinstance(phi, Projection) and isinstance(d, Projection)) or phi.axis == d.axis:
        raise ValueError("factorization needs the two distinct projections of a product carrier")
    _check_domain(m, d)
    check_set(rect_y, phi.codomain)
    check_set(rect_z, d.codomain)
    if not (rect_y.is_finite and rect_z.is_finite):
        raise ValueError("factorization rectangles must have finite sides")
    img = _checked_image(m, d)
    lhs = ext_sum(m.rule.weight(d.cell(z, y)) for z in rect_z.cells for y in rect_y.cells)
    rhs = Fraction(0)
    for z in rect_z.cells:
        wz = img.rule.weight(z)
        if wz == 0:
            continue
        rhs += pushed_conditional(m, phi, d, z, rect_y) * wz
    return lhs == rhs
