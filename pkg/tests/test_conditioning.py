import random
from fractions import Fraction

import pytest
from conftest import random_relation_case

from condmeasure.bayes import BayesModel, RowTable, joint, theta_projection, x_projection
from condmeasure.carriers import (
    ALL,
    EMPTY,
    FiniteAtoms,
    IntegerLattice,
    ProductCarrier,
    RealGrid,
    cofinite,
    finite,
    interval_set,
)
from condmeasure.cmeasure import CMeasure, from_measure
from condmeasure.conditioning import (
    BlockQuotient,
    ExplicitPartition,
    FiberPartition,
    FiniteTable,
    Identity,
    Modulo,
    Projection,
    check_defining_relation,
    check_factorization,
    conditional_given_partition,
    conditional_given_value,
    fiber_weight,
    image_measure,
    is_sigma_finite_statistic,
    pushed_conditional,
)
from condmeasure.errors import NoBlockContains, NotSigmaFiniteStatistic, NullFiber
from condmeasure.extended import INF
from condmeasure.measures import Measure, constant, geometric, lebesgue, scale, table, weight

Z = IntegerLattice()
HALF = RealGrid(Fraction(1, 2))
GEO = geometric(Z, 1, Fraction(1, 2))


def brute_progression(a, r, m, j, radius):
    return sum(a * r ** abs(k) for k in range(-radius, radius + 1) if k % m == j)


def test_image_block_quotient_of_constant():
    img = image_measure(constant(Z), BlockQuotient(Z, 3))
    assert img.carrier == Z
    assert img.rule == constant(Z, 3).rule


def test_image_modulo_of_constant_has_infinite_atoms():
    img = image_measure(constant(Z), Modulo(Z, 2))
    assert img.carrier == FiniteAtoms(2)
    assert weight(img, 0) is INF and weight(img, 1) is INF


def test_image_modulo_of_geometric_matches_partial_sums():
    img = image_measure(GEO, Modulo(Z, 2))
    assert weight(img, 0) == Fraction(5, 3)
    assert weight(img, 1) == Fraction(4, 3)
    for j in (0, 1):
        brute = brute_progression(Fraction(1), Fraction(1, 2), 2, j, 128)
        assert 0 <= weight(img, j) - brute < Fraction(1, 2**120)


@pytest.mark.parametrize("m", [3, 4, 5])
@pytest.mark.parametrize("r", [Fraction(1, 3), Fraction(2, 5)])
def test_progression_sums_general_modulus(m, r):
    g = geometric(Z, Fraction(3, 2), r)
    for j in range(m):
        closed = fiber_weight(g, Modulo(Z, m), j)
        brute = brute_progression(Fraction(3, 2), r, m, j, 200)
        assert 0 <= closed - brute < Fraction(1, 10**70)


def test_sigma_finite_statistic_examples():
    assert is_sigma_finite_statistic(constant(Z), BlockQuotient(Z, 3))
    assert not is_sigma_finite_statistic(constant(Z), Modulo(Z, 2))
    assert is_sigma_finite_statistic(GEO, Modulo(Z, 2))


def test_conditional_given_value_examples():
    assert conditional_given_value(constant(Z), BlockQuotient(Z, 2), 0, finite([0])) == Fraction(1, 2)
    assert conditional_given_value(GEO, Modulo(Z, 2), 0, finite([0])) == Fraction(3, 5)
    assert conditional_given_value(GEO, Modulo(Z, 2), 1, ALL) == 1
    assert conditional_given_value(constant(Z), BlockQuotient(Z, 5), -3, ALL) == 1
    with pytest.raises(NotSigmaFiniteStatistic):
        conditional_given_value(constant(Z), Modulo(Z, 2), 0, finite([0]))


def test_null_fiber():
    m = table(FiniteAtoms(3), {0: 1, 1: 0, 2: 0})
    d = FiniteTable(FiniteAtoms(3), FiniteAtoms(2), (0, 1, 1))
    with pytest.raises(NullFiber):
        conditional_given_value(m, d, 1, ALL)


def test_partition_examples():
    leb = from_measure(lebesgue(HALF))
    unit = FiberPartition(BlockQuotient(HALF, 2))
    assert conditional_given_partition(leb, unit, 1, interval_set(HALF, 0, Fraction(1, 2))) == Fraction(1, 2)
    assert conditional_given_partition(leb, unit, 1, interval_set(HALF, 0, 1)) == 1
    parity = FiberPartition(Modulo(Z, 2))
    assert conditional_given_partition(from_measure(GEO), parity, 0, finite([0])) == Fraction(3, 5)


def test_explicit_partition():
    c = FiniteAtoms(4)
    p = ExplicitPartition(c, (finite([0, 1]), finite([2])))
    g = from_measure(table(c, {0: 1, 1: 3, 2: 2, 3: 1}))
    assert conditional_given_partition(g, p, 1, finite([0])) == Fraction(1, 4)
    with pytest.raises(NoBlockContains):
        conditional_given_partition(g, p, 3, finite([3]))
    with pytest.raises(ValueError):
        ExplicitPartition(c, (finite([0, 1]), finite([1, 2])))


def test_pushed_conditional_examples():
    assert pushed_conditional(constant(Z), Modulo(Z, 2), BlockQuotient(Z, 2), 0, finite([0])) == Fraction(1, 2)
    assert pushed_conditional(constant(Z), Modulo(Z, 2), BlockQuotient(Z, 2), 0, ALL) == 1


def test_defining_relation_examples():
    assert check_defining_relation(GEO, Modulo(Z, 2), finite([0, 1]), ALL)
    assert check_defining_relation(GEO, Modulo(Z, 2), finite([0, 1]), EMPTY)
    assert check_defining_relation(constant(Z), BlockQuotient(Z, 3), finite([-4, 0, 7]), cofinite([0]))
    assert check_defining_relation(GEO, BlockQuotient(Z, 2), cofinite([0, 5]), cofinite([2]))


def test_defining_relation_randomized():
    rng = random.Random(7)
    for _ in range(400):
        m, d, A, B = random_relation_case(rng)
        assert check_defining_relation(m, d, A, B), (m, d, A, B)


def test_identity_statistic_is_pointwise():
    m = table(Z, {0: 2, 3: 5}, 0)
    assert conditional_given_value(m, Identity(Z), 3, finite([3])) == 1
    assert check_defining_relation(m, Identity(Z), finite([0, 3]), finite([3]))


def test_route_partition_matches_value():
    rng = random.Random(11)
    for _ in range(100):
        m, d, A, _ = random_relation_case(rng)
        if m.carrier.is_finite:
            x = rng.choice([k for k in m.carrier.cells() if fiber_weight(m, d, d.apply(k)) > 0])
        else:
            x = rng.randint(-10, 10)
        by_value = conditional_given_value(m, d, d.apply(x), A)
        by_partition = conditional_given_partition(from_measure(m), FiberPartition(d), x, A)
        assert by_value == by_partition


@pytest.mark.parametrize("alpha", [Fraction(1, 7), Fraction(3), Fraction(1000)])
def test_representative_independence(alpha):
    rng = random.Random(5)
    for _ in range(50):
        m, d, A, _ = random_relation_case(rng)
        z = d.apply(0)
        if fiber_weight(m, d, z) == 0:
            continue
        assert conditional_given_value(m, d, z, A) == conditional_given_value(scale(m, alpha), d, z, A)
        g = CMeasure(scale(m, alpha))
        assert conditional_given_partition(g, FiberPartition(d), 0, A) == conditional_given_value(m, d, z, A)


def test_factorization_independent_product():
    c = ProductCarrier(FiniteAtoms(2), FiniteAtoms(3))
    left, right = [1, 2], [3, 1, 1]
    m = table(c, {(i, j): left[i] * right[j] for i in range(2) for j in range(3)})
    phi, d = Projection(c, "right"), Projection(c, "left")
    assert check_factorization(m, phi, d, (finite([0, 2]), finite([0, 1])))
    assert check_factorization(m, phi, d, (finite([1]), EMPTY))
    # the conditional law of phi does not depend on z
    assert pushed_conditional(m, phi, d, 0, finite([0])) == pushed_conditional(m, phi, d, 1, finite([0]))


def test_factorization_on_bayes_joint():
    t, x = FiniteAtoms(2), FiniteAtoms(2)
    model = BayesModel(RowTable(t, x, ((0, {0: Fraction(1, 2), 1: Fraction(1, 2)}), (1, {0: Fraction(1, 4), 1: Fraction(3, 4)}))), table(t, {0: 1, 1: 1}))
    m = joint(model)
    assert check_factorization(m, theta_projection(model), x_projection(model), (finite([0, 1]), finite([1])))
    assert check_factorization(m, x_projection(model), theta_projection(model), (finite([1]), finite([0, 1])))
    assert isinstance(m, Measure)
