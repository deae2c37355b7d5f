"""Conditional measures: sigma-finite measures up to a positive scalar.

A :class:`CMeasure` stores one canonical representative. The reference cell
is the first cell, in the carrier's canonical order (0, -1, 1, -2, 2, ... on
infinite carriers, 0, 1, 2, ... on finite ones), whose weight is positive
and finite; the representative is scaled so that this weight equals 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import islice

from .carriers import DEFAULT_PROBE, Carrier, CellSet, intersect
from .errors import CarrierMismatch, NotAdmissible, NotSigmaFinite, ZeroMeasure
from .extended import INF
from .measures import Measure, is_sigma_finite, mass, scale

CLOSED_FORM_KINDS = ("table", "geometric")

# hard stop for the reference-cell search on rules that cannot name candidates
_SEARCH_LIMIT = 1_000_000


def reference_cell(m: Measure):
    """First cell in canonical order with positive, finite weight."""
    hint = getattr(m.rule, "reference_candidates", None)
    if hint is not None:
        candidates = set(hint(m.carrier))
        if not candidates:
            raise ZeroMeasure(f"{m} has no cell of positive finite weight")
        for k in m.carrier.order():
            if k in candidates:
                return k
    for k in islice(m.carrier.order(), _SEARCH_LIMIT):
        w = m.rule.weight(k)
        if w is not INF and w > 0:
            return k
    raise ZeroMeasure(f"no positive finite cell found for {m}")


@dataclass(frozen=True)
class CMeasure:
    representative: Measure

    @property
    def carrier(self) -> Carrier:
        return self.representative.carrier

    def __str__(self):
        return f"[{self.representative.rule}]"


def from_measure(m: Measure) -> CMeasure:
    if not is_sigma_finite(m):
        raise NotSigmaFinite(f"{m} is not sigma-finite")
    ref = reference_cell(m)
    w = m.rule.weight(ref)
    rep = m if w == 1 else scale(m, 1 / Fraction(w))
    return CMeasure(rep)


def equivalent(g1: CMeasure, g2: CMeasure, window: int = DEFAULT_PROBE) -> bool:
    """Whether two classes coincide.

    Closed-form rules are compared structurally; their canonical forms are
    unique, and a table (eventually constant) can never equal a geometric
    rule (strictly decaying). Anything procedural is compared cell by cell
    over the probe window, which is exhaustive on finite carriers.
    """
    if g1.carrier != g2.carrier:
        raise CarrierMismatch(f"{g1.carrier} vs {g2.carrier}")
    r1, r2 = g1.representative.rule, g2.representative.rule
    k1, k2 = getattr(r1, "kind", None), getattr(r2, "kind", None)
    if k1 in CLOSED_FORM_KINDS and k2 in CLOSED_FORM_KINDS:
        return r1 == r2
    return all(r1.weight(k) == r2.weight(k) for k in g1.carrier.probe(window))


def cond_prob(g: CMeasure, B: CellSet, A: CellSet) -> Fraction:
    """Elementary conditional probability of ``B`` given the admissible ``A``."""
    rep = g.representative
    mass_a = mass(rep, A)
    if mass_a is INF or mass_a == 0:
        raise NotAdmissible(f"{A} has mass {mass_a} under {g}; not an admissible condition")
    return Fraction(mass(rep, intersect(B, A))) / mass_a


def elementary_family(g: CMeasure, bunch, window: int = DEFAULT_PROBE):
    """The Renyi family ``B -> g(. | B)`` over ``bunch``."""
    from .renyi import ProportionalLaw, RenyiFamily

    if bunch.carrier != g.carrier:
        raise CarrierMismatch(f"{bunch.carrier} vs {g.carrier}")
    for member in bunch.sample_members(window):
        w = mass(g.representative, member)
        if w is INF or w == 0:
            raise NotAdmissible(f"bunch member {member} has mass {w} under {g}")
    return RenyiFamily(bunch, ProportionalLaw(g.representative))
