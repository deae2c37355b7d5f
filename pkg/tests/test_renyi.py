import itertools
import random
from fractions import Fraction

import pytest
from conftest import random_finite_measure, random_union_closed_bunch

from condmeasure.carriers import ALL, FiniteAtoms, IntegerLattice, RealGrid, finite, interval_set
from condmeasure.cmeasure import elementary_family, equivalent, from_measure
from condmeasure.errors import ConsistencyFailure, NotAdmissible
from condmeasure.measures import constant, geometric, lebesgue, table
from condmeasure.renyi import (
    ExplicitBunch,
    ProportionalLaw,
    RenyiFamily,
    TranslateBunch,
    explicit_family,
    extend,
    extends,
    extension_unique,
    maximal_extension,
    same_cmeasure,
    uniform_law,
    validate_bunch,
    validate_renyi,
)

HALF = RealGrid(Fraction(1, 2))
SIXTH = RealGrid(Fraction(1, 6))
Z = IntegerLattice()


def unit_intervals():
    return RenyiFamily(TranslateBunch(HALF, finite([0, 1]), 1), uniform_law(HALF))


def test_unit_intervals_bunch_valid():
    b = TranslateBunch(HALF, finite([0, 1]), 1)
    assert validate_bunch(b) == []
    assert b.generator(1) == interval_set(HALF, Fraction(1, 2), Fraction(3, 2))
    assert b.contains(interval_set(HALF, -1, 3))
    assert not b.contains(finite([0]))


def test_translate_bunch_missing_residue():
    [v] = validate_bunch(TranslateBunch(Z, finite([0, 2]), 4))
    assert v.kind == "cover"


def test_explicit_bunch_violations():
    c = FiniteAtoms(2)
    kinds = [v.kind for v in validate_bunch(ExplicitBunch(c, (finite([0]), finite([1]))))]
    assert kinds == ["union-closure"]
    kinds = [v.kind for v in validate_bunch(ExplicitBunch(c, (finite(), ALL)))]
    assert "empty-member" in kinds


def test_unit_intervals_family_is_consistent():
    assert validate_renyi(unit_intervals()) == []


def test_unit_intervals_extension_is_lebesgue():
    f = unit_intervals()
    b0 = interval_set(HALF, 0, 1)
    res = extend(f, b0)
    assert res.extension.member_mass(interval_set(HALF, Fraction(1, 2), Fraction(3, 2))) == 1
    assert all(res.weight(k) == Fraction(1, 2) for k in HALF.probe(64))
    assert res.fitted
    assert res.measure.rule == lebesgue(HALF).rule
    assert equivalent(res.cmeasure, from_measure(lebesgue(HALF)))


def test_unit_intervals_base_independence():
    f = unit_intervals()
    g1 = extend(f, interval_set(HALF, 0, 1)).cmeasure
    g2 = extend(f, interval_set(HALF, Fraction(1, 2), Fraction(3, 2))).cmeasure
    assert equivalent(g1, g2)
    assert extension_unique(f)


def test_halves_and_thirds_generate_one_class():
    halves = RenyiFamily(TranslateBunch(SIXTH, finite(range(6)), 3), uniform_law(SIXTH))
    thirds = RenyiFamily(TranslateBunch(SIXTH, finite(range(6)), 2), uniform_law(SIXTH))
    assert same_cmeasure(halves, thirds)
    assert same_cmeasure(halves, halves)


def test_uniform_and_geometric_families_differ():
    bunch = TranslateBunch(Z, finite([0, 1]), 1)
    flat = RenyiFamily(bunch, uniform_law(Z))
    geo = RenyiFamily(bunch, ProportionalLaw(geometric(Z, 1, Fraction(1, 2))))
    assert validate_renyi(geo) == []
    assert not same_cmeasure(flat, geo)
    assert extend(geo, finite([0, 1])).measure.rule.kind == "geometric"


def all_subsets(n):
    cells = range(n)
    return [finite(s) for r in range(1, n + 1) for s in itertools.combinations(cells, r)]


def brute_extension(weights, members, b0):
    """Solve the proof formulas directly: mu(B) from nu on B0 u B, then mu({k})."""
    def nu(A, B):
        return Fraction(sum(weights[k] for k in A.cells if k in B)) / sum(weights[k] for k in B.cells)

    def mu(B):
        joint = finite(set(B.cells) | set(b0.cells))
        return nu(B, joint) / nu(b0, joint)

    out = {}
    for k in weights:
        B = next(b for b in members if k in b)
        out[k] = nu(finite([k]), B) * mu(B)
    return out


def test_three_atom_example_against_brute_force():
    c = FiniteAtoms(3)
    weights = {0: Fraction(1), 1: Fraction(2), 2: Fraction(3)}
    g = from_measure(table(c, weights))
    members = all_subsets(3)
    assert len(members) == 7
    f = elementary_family(g, ExplicitBunch(c, tuple(members)))
    assert validate_renyi(f) == []
    for b0 in members:
        res = extend(f, b0)
        brute = brute_extension(weights, members, b0)
        assert {k: res.weight(k) for k in range(3)} == brute
        assert sum(brute[k] for k in b0.cells) == 1
        assert equivalent(res.cmeasure, g)
    assert extension_unique(f)


def test_round_trip_random(rng):
    for _ in range(60):
        m = random_finite_measure(rng)
        n = m.carrier.count
        weights = {k: m.rule.weight(k) for k in range(n)}
        members = random_union_closed_bunch(rng, n, weights)
        g = from_measure(m)
        f = elementary_family(g, ExplicitBunch(m.carrier, tuple(members)))
        assert validate_renyi(f) == []
        res = extend(f, members[0])
        assert equivalent(res.cmeasure, g)
        again = elementary_family(res.cmeasure, f.bunch)
        for B in members:
            for k in range(n):
                assert again.prob(finite([k]), B) == f.prob(finite([k]), B)


def test_maximal_extension_contains_family():
    g = from_measure(lebesgue(HALF))
    big = maximal_extension(g)
    assert extends(big, unit_intervals(), limit=12)
    assert big.prob(interval_set(HALF, 0, 1), interval_set(HALF, 0, 2)) == Fraction(1, 2)
    assert validate_renyi(big, pair_budget=50) == []
    with pytest.raises(NotAdmissible):
        big.prob(ALL, ALL)


def test_maximal_extension_of_finite_measure_skips_null_cells():
    c = FiniteAtoms(3)
    g = from_measure(table(c, {0: 0, 1: 2, 2: 1}))
    big = maximal_extension(g)
    assert big.bunch.contains(finite([0, 2]))
    assert not big.bunch.contains(finite([0]))


def test_inconsistent_explicit_family_detected():
    c = FiniteAtoms(2)
    f = explicit_family(
        c,
        {
            finite([0]): {0: 1},
            finite([1]): {1: 1},
            ALL: {0: Fraction(1, 2), 1: Fraction(1, 2)},
        },
    )
    assert validate_renyi(f) == []
    bad = explicit_family(
        c,
        {
            finite([0]): {0: 1},
            finite([1]): {1: 1},
            ALL: {0: Fraction(1, 2), 1: Fraction(1, 3)},
        },
    )
    kinds = {v.kind for v in validate_renyi(bad)}
    assert "normalization" in kinds


def test_consistency_failure_during_extension():
    # two covering members disagree about the weight of cell 1
    c = FiniteAtoms(3)
    f = explicit_family(
        c,
        {
            finite([0, 1]): {0: Fraction(1, 2), 1: Fraction(1, 2)},
            finite([1, 2]): {1: Fraction(1, 2), 2: Fraction(1, 2)},
            ALL: {0: Fraction(1, 4), 1: Fraction(1, 4), 2: Fraction(1, 2)},
        },
    )
    assert {v.kind for v in validate_renyi(f)} == {"consistency"}
    with pytest.raises(ConsistencyFailure):
        extend(f, ALL)


def test_planted_perturbation_is_detected():
    rng = random.Random(3)
    c = FiniteAtoms(3)
    g = from_measure(table(c, {0: 1, 1: 2, 2: 3}))
    members = all_subsets(3)
    tables = {}
    for B in members:
        total = sum(g.representative.rule.weight(k) for k in B.cells)
        tables[B] = {k: Fraction(g.representative.rule.weight(k)) / total for k in B.cells}
    B = rng.choice([b for b in members if 1 < len(b.cells) < 3])
    k = B.cells[0]
    tables[B][k] += Fraction(1, 10)
    s = sum(tables[B].values())
    tables[B] = {j: p / s for j, p in tables[B].items()}
    assert validate_renyi(explicit_family(c, tables)) != []


def test_uniform_law_constant_base():
    assert uniform_law(Z).base == constant(Z)
