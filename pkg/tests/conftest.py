import os
import random
from fractions import Fraction

import hypothesis
import pytest

from condmeasure.bayes import BayesModel, RowTable
from condmeasure.carriers import FiniteAtoms, IntegerLattice, cofinite, finite
from condmeasure.conditioning import BlockQuotient, FiniteTable, Modulo
from condmeasure.measures import constant, geometric, table

Z = IntegerLattice()

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=1000, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def random_weights(rng: random.Random, n: int, zero_prob: float = 0.15) -> dict:
    """Random nonnegative rational weights on n atoms, at least one positive."""
    while True:
        w = {
            k: (Fraction(0) if rng.random() < zero_prob else Fraction(rng.randint(1, 40), rng.randint(1, 12)))
            for k in range(n)
        }
        if any(w.values()):
            return w


def random_finite_measure(rng: random.Random, max_atoms: int = 12, zero_prob: float = 0.15):
    n = rng.randint(1, max_atoms)
    c = FiniteAtoms(n)
    return table(c, random_weights(rng, n, zero_prob), 0)


def random_union_closed_bunch(rng: random.Random, n: int, weights: dict, max_generators: int = 4) -> list:
    """A random union-closed family of admissible subsets of range(n) that covers range(n)."""
    cells = list(range(n))
    gens = []
    for _ in range(rng.randint(1, max_generators)):
        size = rng.randint(1, n)
        gens.append(frozenset(rng.sample(cells, size)))
    covered = frozenset().union(*gens)
    if len(covered) < n:
        gens.append(frozenset(cells) - covered)
    members = set(gens)
    changed = True
    while changed:
        changed = False
        for a in list(members):
            for b in list(members):
                u = a | b
                if u not in members:
                    members.add(u)
                    changed = True
    admissible = [m for m in members if sum(weights[k] for k in m) > 0]
    admissible.sort(key=lambda s: (len(s), sorted(s)))
    return [finite(sorted(m)) for m in admissible]


def random_relation_case(rng: random.Random):
    """A supported (measure, statistic, A, B) for the defining relation."""
    kind = rng.randrange(4)
    if kind == 0:
        m = geometric(Z, Fraction(rng.randint(1, 9), rng.randint(1, 9)), Fraction(1, rng.randint(2, 5)))
        d = Modulo(Z, rng.randint(1, 4))
    elif kind == 1:
        m = constant(Z, Fraction(rng.randint(1, 9), rng.randint(1, 4)))
        d = BlockQuotient(Z, rng.randint(1, 4))
    elif kind == 2:
        m = geometric(Z, 1, Fraction(1, rng.randint(2, 5)))
        d = BlockQuotient(Z, rng.randint(1, 4))
    else:
        n = rng.randint(1, 8)
        entries = {k: rng.randint(0, 5) for k in range(n)}
        entries[0] = rng.randint(1, 5)
        c = FiniteAtoms(n)
        m = table(c, entries)
        d = FiniteTable(c, FiniteAtoms(3), tuple(rng.randrange(3) for _ in range(n)))
    cells = list(range(-8, 9)) if not m.carrier.is_finite else m.carrier.cells()
    A = finite(rng.sample(cells, rng.randint(0, min(6, len(cells)))))
    if not m.carrier.is_finite and rng.random() < 0.3 and kind != 1:
        A = cofinite(A.cells)
    codomain = d.codomain
    zs = list(range(-4, 5)) if not codomain.is_finite else codomain.cells()
    B = finite(rng.sample(zs, rng.randint(0, len(zs))))
    if not codomain.is_finite and rng.random() < 0.3:
        B = cofinite(B.cells)
    return m, d, A, B


def random_finite_model(rng: random.Random):
    """RowTable model with up to 6 thetas and 6 outcomes and a random finite prior."""
    nt, nx = rng.randint(1, 6), rng.randint(1, 6)
    tc, xc = FiniteAtoms(nt), FiniteAtoms(nx)
    rows = []
    for t in range(nt):
        raw = [rng.randint(0, 5) for _ in range(nx)]
        raw[rng.randrange(nx)] += 1
        rows.append((t, {x: Fraction(w, sum(raw)) for x, w in enumerate(raw)}))
    prior = {t: Fraction(rng.randint(0, 9), rng.randint(1, 4)) for t in range(nt)}
    prior[rng.randrange(nt)] += 1
    return BayesModel(RowTable(tc, xc, tuple(rows)), table(tc, prior))


@pytest.fixture
def rng():
    return random.Random(20240611)
