from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from condmeasure.carriers import ALL, FiniteAtoms, IntegerLattice, RealGrid, finite, interval_set
from condmeasure.cmeasure import CMeasure, cond_prob, elementary_family, equivalent, from_measure, reference_cell
from condmeasure.errors import CarrierMismatch, NotAdmissible, NotSigmaFinite
from condmeasure.extended import INF
from condmeasure.measures import constant, geometric, lebesgue, scale, table
from condmeasure.renyi import ExplicitBunch

Z = IntegerLattice()
HALF = RealGrid(Fraction(1, 2))


def test_from_measure_normalizes_reference_cell():
    g = from_measure(constant(Z, 5))
    assert g.representative.rule == constant(Z, 1).rule
    assert str(g) == "[Constant(1)]"


def test_reference_cell_skips_zero_and_infinite_cells():
    m = table(Z, {0: 0, -1: 2, 1: 5}, 0)
    assert reference_cell(m) == -1
    assert from_measure(m).representative.rule.weight(1) == Fraction(5, 2)


def test_from_measure_rejects_infinite_atom():
    with pytest.raises(NotSigmaFinite):
        from_measure(table(Z, {0: INF}, 1))


def test_equivalence_examples():
    assert equivalent(from_measure(constant(Z, 1)), from_measure(constant(Z, 9)))
    assert equivalent(from_measure(geometric(Z, 1, Fraction(1, 2))), from_measure(geometric(Z, 3, Fraction(1, 2))))
    assert not equivalent(from_measure(geometric(Z, 1, Fraction(1, 2))), from_measure(geometric(Z, 1, Fraction(1, 3))))
    with pytest.raises(CarrierMismatch):
        equivalent(from_measure(constant(Z)), from_measure(constant(HALF)))


def test_cond_prob_examples():
    leb = from_measure(lebesgue(HALF))
    assert cond_prob(leb, interval_set(HALF, 0, 1), interval_set(HALF, 0, 2)) == Fraction(1, 2)
    A = interval_set(HALF, -3, 4)
    assert cond_prob(leb, A, A) == 1
    with pytest.raises(NotAdmissible):
        cond_prob(from_measure(constant(Z)), finite([0]), ALL)
    with pytest.raises(NotAdmissible):
        cond_prob(leb, ALL, finite())


def test_elementary_family_finite_example():
    c = FiniteAtoms(2)
    g = from_measure(table(c, {0: 1, 1: 3}))
    f = elementary_family(g, ExplicitBunch(c, (ALL,)))
    assert f.prob(finite([0]), ALL) == Fraction(1, 4)


def test_elementary_family_rejects_inadmissible_member():
    c = FiniteAtoms(3)
    g = from_measure(table(c, {0: 1, 1: 0, 2: 1}))
    with pytest.raises(NotAdmissible):
        elementary_family(g, ExplicitBunch(c, (finite([1]), ALL)))


alphas = st.sampled_from([Fraction(1, 7), Fraction(3), Fraction(1000)]) | st.fractions(
    min_value=Fraction(1, 100), max_value=100
).filter(lambda a: a > 0)


@given(alphas, st.integers(-6, 6), st.integers(1, 6), st.integers(-6, 6))
def test_cond_prob_scale_invariant(alpha, lo, span, shift):
    base = geometric(Z, Fraction(2, 3), Fraction(1, 3))
    A = finite(range(lo, lo + span))
    B = finite(range(shift, shift + 3))
    g1, g2 = from_measure(base), from_measure(scale(base, alpha))
    assert g1 == g2
    # non-canonical representatives give the same answers
    assert cond_prob(CMeasure(base), B, A) == cond_prob(CMeasure(scale(base, alpha)), B, A)


@given(st.lists(st.integers(0, 20), min_size=3, max_size=3), st.integers(1, 30), st.integers(1, 30))
def test_equivalence_is_an_equivalence_relation(ws, p, q):
    c = FiniteAtoms(3)
    if not any(ws):
        ws = [1, 0, 0]
    m = table(c, dict(enumerate(ws)))
    a = from_measure(m)
    b = from_measure(scale(m, Fraction(p, q)))
    c2 = from_measure(scale(m, Fraction(q, p + q)))
    bumped = list(ws)
    bumped[(ws.index(next(w for w in ws if w)) + 1) % 3] += 1  # breaks proportionality
    other = from_measure(table(c, dict(enumerate(bumped))))
    assert equivalent(a, a)
    assert equivalent(a, b) and equivalent(b, a)
    assert equivalent(b, c2) and equivalent(a, c2)
    assert not equivalent(a, other) and not equivalent(other, a)
