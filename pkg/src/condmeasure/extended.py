"""Exact extended nonnegative rationals: ``Fraction`` values plus ``INF``."""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from .errors import IndeterminateMass


class Infinity:
    """The value +inf of [0, inf]. A singleton; compare with ``is INF``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __hash__(self):
        return hash("condmeasure.INF")

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        _check_nonneg(other)
        return self

    __radd__ = __add__

    def __mul__(self, other):
        _check_nonneg(other)
        if other == 0:
            raise IndeterminateMass("0 * inf is undefined")
        return self

    __rmul__ = __mul__

    def __sub__(self, other):
        if other is self:
            raise IndeterminateMass("inf - inf is undefined")
        return self

    def __rsub__(self, other):
        raise IndeterminateMass(f"{other} - inf is negative")

    def __truediv__(self, other):
        if other is self:
            raise IndeterminateMass("inf / inf is undefined")
        if other <= 0:
            raise IndeterminateMass(f"inf / {other} is undefined")
        return self

    def __rtruediv__(self, other):
        raise IndeterminateMass(f"{other} / inf is not used in exact conditionals")


INF = Infinity()

Extended = Union[Fraction, Infinity]


def _check_nonneg(x):
    if x is INF:
        return
    if x < 0:
        raise IndeterminateMass(f"negative operand {x} in extended arithmetic")


def to_extended(value) -> Extended:
    """Coerce ints, Fractions, rational strings and ``"inf"`` into the extended type."""
    if value is INF:
        return INF
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity"):
            return INF
        return Fraction(text)
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a Fraction or 'p/q' string")
    return Fraction(value)


def is_finite(x: Extended) -> bool:
    return x is not INF


def ext_sum(values) -> Extended:
    total = Fraction(0)
    for v in values:
        total = total + v
    return total


def render(x) -> str:
    """Render ``x`` as ``p/q`` in lowest terms, an integer when ``q == 1``, or ``inf``."""
    if x is INF:
        return "inf"
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
