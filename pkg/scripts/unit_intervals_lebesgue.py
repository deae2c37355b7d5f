"""Extend the uniform unit-interval family on grid(1/2) and show it is Lebesgue measure.

    python3 scripts/unit_intervals_lebesgue.py [--window N]
"""

import argparse
from fractions import Fraction

from condmeasure.carriers import RealGrid, finite, interval_set
from condmeasure.cmeasure import equivalent, from_measure
from condmeasure.measures import lebesgue
from condmeasure.renyi import RenyiFamily, TranslateBunch, extend, same_cmeasure, uniform_law, validate_renyi


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--window", type=int, default=16)
    args = ap.parse_args()

    grid = RealGrid(Fraction(1, 2))
    family = RenyiFamily(TranslateBunch(grid, finite([0, 1]), 1), uniform_law(grid))
    print(f"violations: {len(validate_renyi(family))}")

    for lo in (Fraction(0), Fraction(1, 2)):
        b0 = interval_set(grid, lo, lo + 1)
        res = extend(family, b0, window=args.window)
        weights = sorted({res.weight(k) for k in grid.probe(args.window)})
        print(f"B0 = ({lo}, {lo + 1}): weights on the probe window {[str(w) for w in weights]}, "
              f"rule {res.measure.rule}, Lebesgue class: {equivalent(res.cmeasure, from_measure(lebesgue(grid)))}")

    sixth = RealGrid(Fraction(1, 6))
    halves = RenyiFamily(TranslateBunch(sixth, finite(range(6)), 3), uniform_law(sixth))
    thirds = RenyiFamily(TranslateBunch(sixth, finite(range(6)), 2), uniform_law(sixth))
    print(f"(m/2) and (m/3) bunches generate one class: {same_cmeasure(halves, thirds, args.window)}")


if __name__ == "__main__":
    main()
