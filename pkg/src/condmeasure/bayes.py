"""Statistical models with possibly improper priors.

The joint law lives on ``ProductCarrier(theta, x)`` with weight
``prior(theta) * P_theta({x})``. The posterior at ``x`` is the conditional of
the joint given the x-projection, and it exists only when that projection is
sigma-finite, i.e. when the marginal of the observation has no infinite atom.
Priors for which it does not are refused rather than regularized.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .carriers import (
    ALL,
    Carrier,
    IntegerLattice,
    ProductCarrier,
    check_index,
    finite,
)
from .cmeasure import CMeasure
from .conditioning import Projection, conditional_given_value, image_measure
from .errors import (
    CarrierMismatch,
    NotSigmaFiniteObservation,
    NullObservation,
    UnsupportedCombination,
    WindowTooSmall,
)
from .extended import INF, ext_sum
from .measures import Geometric, Measure, TableWithDefault, is_sigma_finite, mass


def _prob_table(table) -> tuple:
    items = tuple(sorted((k, Fraction(p)) for k, p in dict(table).items() if Fraction(p) != 0))
    if any(p < 0 for _, p in items):
        raise ValueError("probabilities must be nonnegative")
    if sum(p for _, p in items) != 1:
        raise ValueError(f"probability table sums to {sum(p for _, p in items)}, not 1")
    return items


@dataclass(frozen=True)
class RowTable:
    """One finite probability table per listed theta."""

    theta_carrier: Carrier
    x_carrier: Carrier
    rows: tuple  # ((theta, ((x, p), ...)), ...)

    def __post_init__(self):
        rows = []
        for theta, row in dict(self.rows).items():
            check_index(self.theta_carrier, theta)
            items = _prob_table(row)
            for x, _ in items:
                check_index(self.x_carrier, x)
            rows.append((theta, items))
        object.__setattr__(self, "rows", tuple(sorted(rows)))

    @property
    def lookup(self) -> dict:
        cached = self.__dict__.get("_lookup")
        if cached is None:
            cached = {t: dict(r) for t, r in self.rows}
            object.__setattr__(self, "_lookup", cached)
        return cached

    def prob(self, theta, x) -> Fraction:
        return self.lookup.get(theta, {}).get(x, Fraction(0))

    def column_support(self, x):
        return [t for t, r in self.lookup.items() if x in r]

    def has_row(self, theta) -> bool:
        return theta in self.lookup


@dataclass(frozen=True)
class ShiftInvariant:
    """Location family on the integers: ``P_theta({x}) = f(x - theta)``."""

    offsets: tuple  # ((d, p), ...)
    theta_carrier: Carrier = IntegerLattice()
    x_carrier: Carrier = IntegerLattice()

    def __post_init__(self):
        object.__setattr__(self, "offsets", _prob_table(self.offsets))
        if not (isinstance(self.theta_carrier, IntegerLattice) and isinstance(self.x_carrier, IntegerLattice)):
            raise ValueError("ShiftInvariant kernels act on lattice carriers")

    def prob(self, theta, x) -> Fraction:
        return dict(self.offsets).get(x - theta, Fraction(0))

    def column_support(self, x):
        return sorted(x - d for d, _ in self.offsets)

    def has_row(self, theta) -> bool:
        return True


@dataclass(frozen=True)
class ConstantRows:
    """The same law ``p`` for every theta: the data carry no information."""

    theta_carrier: Carrier
    x_carrier: Carrier
    p: tuple

    def __post_init__(self):
        object.__setattr__(self, "p", _prob_table(self.p))
        for x, _ in self.p:
            check_index(self.x_carrier, x)

    def prob(self, theta, x) -> Fraction:
        return dict(self.p).get(x, Fraction(0))

    def column_support(self, x):
        return None  # every theta

    def has_row(self, theta) -> bool:
        return True


def _prior_support(prior: Measure):
    """Finite list of prior cells with positive weight, or None if infinite."""
    rule = prior.rule
    if prior.carrier.is_finite:
        return [k for k in prior.carrier.cells() if rule.weight(k) > 0]
    if isinstance(rule, TableWithDefault) and rule.default == 0:
        return [k for k, w in rule.entries if w > 0]
    return None


@dataclass(frozen=True)
class JointRule:
    """Weights ``prior(theta) * kernel(theta, x)`` on the product carrier."""

    prior: Measure
    kernel: object
    kind = "joint"

    def validate(self, carrier):
        expected = ProductCarrier(self.prior.carrier, self.kernel.x_carrier)
        if carrier != expected:
            raise CarrierMismatch(f"{carrier} vs {expected}")

    def normalized(self, carrier):
        return self

    def weight(self, cell):
        theta, x = cell
        p = self.kernel.prob(theta, x)
        return self.prior.rule.weight(theta) * p if p else Fraction(0)

    def total_excluding(self, carrier, excluded=()):
        total = mass(self.prior, ALL)  # rows are probabilities
        if total is INF:
            # finitely many removed cells cannot exhaust infinitely many positive rows
            return INF
        return total - ext_sum(self.weight(c) for c in set(excluded))

    def scaled(self, alpha):
        from .measures import scale

        return JointRule(scale(self.prior, alpha), self.kernel)

    def is_sigma_finite(self, carrier):
        return is_sigma_finite(self.prior)

    def is_nonzero(self, carrier):
        return True

    def projection_weight(self, axis, z):
        if axis == "left":
            return self.prior.rule.weight(z) if self.kernel.has_row(z) else Fraction(0)
        support = self.kernel.column_support(z)
        if support is None:
            p = self.kernel.prob(None, z)
            return mass(self.prior, ALL) * p if p else Fraction(0)
        return ext_sum(self.prior.rule.weight(t) * self.kernel.prob(t, z) for t in support)

    def marginal_rule(self, axis):
        """Closed-form rule of the image on ``axis`` where one exists, else None."""
        if axis == "left":
            return self.prior.rule
        k, rule = self.kernel, self.prior.rule
        if isinstance(k, ConstantRows):
            return TableWithDefault(tuple((x, self.projection_weight("right", x)) for x, _ in k.p), Fraction(0))
        if isinstance(k, RowTable):
            xs = sorted({x for _, r in k.rows for x, _ in r})
            return TableWithDefault(tuple((x, self.projection_weight("right", x)) for x in xs), Fraction(0))
        if isinstance(k, ShiftInvariant) and isinstance(rule, TableWithDefault):
            # sum_theta prior(theta) f(x - theta) = default + sum over entries of (w - default) f(x - e)
            xs = sorted({e + d for e, _ in rule.entries for d, _ in k.offsets})
            return TableWithDefault(tuple((x, self.projection_weight("right", x)) for x in xs), rule.default)
        return None

    def __str__(self):
        return f"Joint({self.prior.rule}, {type(self.kernel).__name__})"


@dataclass(frozen=True)
class BayesModel:
    """A kernel plus a prior. The prior may be a Measure (kept as representative) or a CMeasure."""

    kernel: object
    prior: object

    def __post_init__(self):
        prior = self.prior.representative if isinstance(self.prior, CMeasure) else self.prior
        if not is_sigma_finite(prior):
            raise UnsupportedCombination(f"prior {prior} is not sigma-finite")
        if prior.carrier != self.kernel.theta_carrier:
            raise CarrierMismatch(f"prior on {prior.carrier}, kernel on {self.kernel.theta_carrier}")
        object.__setattr__(self, "prior", prior)
        _check_supported(self.kernel, prior)

    @property
    def product(self) -> ProductCarrier:
        return ProductCarrier(self.kernel.theta_carrier, self.kernel.x_carrier)


def _check_supported(kernel, prior: Measure) -> None:
    rule = prior.rule
    if prior.carrier.is_finite and kernel.x_carrier.is_finite:
        if isinstance(kernel, RowTable):
            missing = [t for t in prior.carrier.cells() if rule.weight(t) > 0 and not kernel.has_row(t)]
            if missing:
                raise UnsupportedCombination(f"no kernel row for theta in {missing}")
        return
    if isinstance(kernel, ShiftInvariant):
        if not isinstance(rule, (TableWithDefault, Geometric)):
            raise UnsupportedCombination(f"ShiftInvariant kernel with prior {rule}")
        return
    if isinstance(kernel, ConstantRows):
        if not isinstance(rule, (TableWithDefault, Geometric)):
            raise UnsupportedCombination(f"ConstantRows kernel with prior {rule}")
        return
    if isinstance(kernel, RowTable):
        support = _prior_support(prior)
        if support is None or any(not kernel.has_row(t) for t in support):
            raise UnsupportedCombination("RowTable kernels need every prior-charged theta listed")
        return
    raise UnsupportedCombination(f"unsupported kernel {kernel!r}")


def joint(model: BayesModel) -> Measure:
    return Measure(model.product, JointRule(model.prior, model.kernel))


def x_projection(model: BayesModel) -> Projection:
    return Projection(model.product, "right")


def theta_projection(model: BayesModel) -> Projection:
    return Projection(model.product, "left")


def marginal_x(model: BayesModel) -> Measure:
    """Law of the observation: the image of the joint under the x-projection."""
    return image_measure(joint(model), x_projection(model))


def observation_is_sigma_finite(model: BayesModel) -> bool:
    return is_sigma_finite(marginal_x(model))


def _column_support(model: BayesModel, x):
    support = model.kernel.column_support(x)
    if support is None:
        support = _prior_support(model.prior)
        if support is None:
            return None
    return sorted(t for t in support if model.prior.rule.weight(t) * model.kernel.prob(t, x) > 0)


def posterior(model: BayesModel, x) -> dict:
    """Exact posterior table ``{theta: probability}`` over the thetas it charges."""
    check_index(model.kernel.x_carrier, x)
    marg = marginal_x(model)
    if not is_sigma_finite(marg):
        raise NotSigmaFiniteObservation(
            "the marginal law of the observation has an infinite atom; "
            "the prior is not permissible for this kernel"
        )
    if marg.rule.weight(x) == 0:
        raise NullObservation(f"x = {x} has marginal weight 0")
    support = _column_support(model, x)
    if support is None:
        raise UnsupportedCombination("posterior support is infinite; no finite table exists")
    m, d = joint(model), x_projection(model)
    return {t: conditional_given_value(m, d, x, finite([(t, x)])) for t in support}


def brute_force_posterior(model: BayesModel, x, window) -> dict:
    """Normalize ``prior * likelihood`` over the thetas of ``window`` (an inclusive index range)."""
    lo, hi = window
    thetas = range(lo, hi + 1)
    if model.kernel.theta_carrier.is_finite:
        thetas = [t for t in thetas if model.kernel.theta_carrier.is_valid(t)]
    raw = {t: model.prior.rule.weight(t) * model.kernel.prob(t, x) for t in thetas}
    raw = {t: w for t, w in raw.items() if w != 0}
    total = sum(raw.values(), Fraction(0))
    return {t: w / total for t, w in raw.items()}


def posterior_against_oracle(model: BayesModel, x, window) -> bool:
    lo, hi = window
    support = _column_support(model, x)
    if support is None or any(not lo <= t <= hi for t in support):
        raise WindowTooSmall(f"posterior support escapes the window [{lo}, {hi}]")
    return posterior(model, x) == brute_force_posterior(model, x, window)
