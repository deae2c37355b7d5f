"""Scenario documents: named definitions plus a list of commands.

A scenario is a JSON object with optional sections ``carriers``, ``sets``,
``measures``, ``cmeasures``, ``statistics``, ``bunches``, ``families``,
``models`` and a ``commands`` list. Definitions are built lazily, on first
reference, and cached. Rationals are written as strings (``"1/2"``, ``"inf"``)
or integers.

Set expressions (``sets`` entries and every set-valued command argument):

* ``"all"``, ``"empty"``
* ``"{0, 2, 5}"``, ``"{-3..3}"``, ``"{(0,1), (1,1)}"`` -- finite sets
* ``"~{1, 2}"`` -- everything except the listed cells
* ``"(0,1)"``, ``"(0,1) u (5,6)"`` -- unions of open grid intervals
* a JSON list of cells, or ``{"finite": [...]}`` / ``{"cofinite": [...]}``
* the name of an entry in ``sets``
"""

from __future__ import annotations

import json
import re

from . import bayes, conditioning, renyi
from .carriers import (
    ALL,
    EMPTY,
    FiniteAtoms,
    IntegerLattice,
    ProductCarrier,
    RealGrid,
    cofinite,
    finite,
    interval_set,
    union,
)
from .cmeasure import CMeasure, from_measure
from .errors import ParseError, ScenarioNameError
from .extended import to_extended
from .measures import Geometric, Measure, TableWithDefault, lebesgue, scale

SINGULAR = {
    "carriers": "carrier",
    "sets": "set",
    "measures": "measure",
    "cmeasures": "cmeasure",
    "statistics": "statistic",
    "bunches": "bunch",
    "families": "family",
    "models": "model",
}

SECTIONS = (
    "carriers",
    "sets",
    "measures",
    "cmeasures",
    "statistics",
    "bunches",
    "families",
    "models",
)


def load(path) -> "Scenario":
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse(text)


def parse(text: str) -> "Scenario":
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("a scenario must be a JSON object")
    unknown = set(doc) - set(SECTIONS) - {"commands", "description"}
    if unknown:
        raise ParseError(f"unknown scenario sections: {sorted(unknown)}")
    commands = doc.get("commands", [])
    if not isinstance(commands, list) or not all(isinstance(c, dict) and "op" in c for c in commands):
        raise ParseError("'commands' must be a list of objects with an 'op' field")
    return Scenario({s: dict(doc.get(s, {})) for s in SECTIONS}, commands)


# -- small parsers --------------------------------------------------------------------


def _int(value, what="index"):
    if isinstance(value, bool):
        raise ParseError(f"expected an integer {what}, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and re.fullmatch(r"\s*-?\d+\s*", value):
        return int(value)
    raise ParseError(f"expected an integer {what}, got {value!r}")


def _rational(value):
    try:
        return to_extended(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {value!r}: {exc}") from None


def parse_index(value):
    """An integer cell, or a pair written ``[t, x]`` / ``"(t, x)"``."""
    if isinstance(value, list):
        if len(value) != 2:
            raise ParseError(f"product cells are pairs, got {value!r}")
        return (_int(value[0]), _int(value[1]))
    if isinstance(value, str) and value.strip().startswith("("):
        parts = value.strip()[1:-1].split(",")
        if len(parts) != 2:
            raise ParseError(f"bad pair {value!r}")
        return (_int(parts[0]), _int(parts[1]))
    return _int(value)


_INTERVAL = re.compile(r"\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)")


def _split_cells(body: str) -> list:
    cells, depth, cur = [], 0, ""
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            cells.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        cells.append(cur)
    out = []
    for c in cells:
        c = c.strip()
        m = re.fullmatch(r"(-?\d+)\s*\.\.\s*(-?\d+)", c)
        if m:
            out.extend(range(int(m.group(1)), int(m.group(2)) + 1))
        else:
            out.append(parse_index(c))
    return out


def parse_set_text(text: str, carrier):
    t = text.strip()
    low = t.lower()
    if low == "all":
        return ALL
    if low == "empty":
        return EMPTY
    if t.startswith("~{") and t.endswith("}"):
        return cofinite(_split_cells(t[2:-1]))
    if t.startswith("{") and t.endswith("}"):
        return finite(_split_cells(t[1:-1]))
    if t.startswith("("):
        pieces = re.split(r"\s*(?:u|U|∪)\s*", t)
        out = EMPTY
        for piece in pieces:
            m = _INTERVAL.fullmatch(piece.strip())
            if not m:
                raise ParseError(f"bad interval {piece!r} in {text!r}")
            if not isinstance(carrier, RealGrid):
                raise ParseError(f"interval {piece!r} needs a grid carrier, not {carrier}")
            out = union(out, interval_set(carrier, _rational(m.group(1)), _rational(m.group(2))))
        return out
    raise ParseError(f"cannot parse set expression {text!r}")


class Scenario:
    def __init__(self, sections: dict, commands: list):
        self.sections = sections
        self.commands = commands
        self._cache = {}
        self._building = set()

    # -- lookup ----------------------------------------------------------------

    def get(self, section: str, name):
        if not isinstance(name, str):
            raise ParseError(f"expected a {SINGULAR[section]} name, got {name!r}")
        key = (section, name)
        if key in self._cache:
            return self._cache[key]
        if name not in self.sections[section]:
            raise ScenarioNameError(f"undefined {SINGULAR[section]} {name!r}")
        if key in self._building:
            raise ParseError(f"cyclic definition involving {SINGULAR[section]} {name!r}")
        self._building.add(key)
        try:
            spec = self.sections[section][name]
            builder = getattr(self, f"_build_{section}")
            try:
                value = builder(spec)
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad {SINGULAR[section]} {name!r}: {exc!r}") from None
        finally:
            self._building.discard(key)
        self._cache[key] = value
        return value

    def set_expr(self, expr, carrier):
        if isinstance(expr, str) and expr in self.sections["sets"]:
            expr = self.sections["sets"][expr]
        if isinstance(expr, str):
            return parse_set_text(expr, carrier)
        if isinstance(expr, list):
            return finite(parse_index(v) for v in expr)
        if isinstance(expr, dict):
            if "finite" in expr:
                return finite(parse_index(v) for v in expr["finite"])
            if "cofinite" in expr:
                return cofinite(parse_index(v) for v in expr["cofinite"])
        raise ParseError(f"cannot parse set expression {expr!r}")

    # -- builders --------------------------------------------------------------

    def _build_carriers(self, spec):
        kind = spec["kind"]
        if kind == "atoms":
            return FiniteAtoms(_int(spec["count"], "count"))
        if kind == "lattice":
            return IntegerLattice()
        if kind == "grid":
            return RealGrid(_rational(spec["width"]), _rational(spec.get("offset", 0)))
        if kind == "product":
            return ProductCarrier(self.get("carriers", spec["left"]), self.get("carriers", spec["right"]))
        raise ParseError(f"unknown carrier kind {kind!r}")

    def _build_sets(self, spec):
        raise ParseError("sets are resolved against a carrier where they are used")

    def _rule(self, spec, carrier):
        kind = spec["kind"]
        if kind == "constant":
            return TableWithDefault((), _rational(spec["value"]))
        if kind == "table":
            entries = tuple((parse_index(k), _rational(v)) for k, v in spec.get("entries", {}).items())
            return TableWithDefault(entries, _rational(spec.get("default", 0)))
        if kind == "geometric":
            return Geometric(_rational(spec["a"]), _rational(spec["r"]))
        if kind == "lebesgue":
            return lebesgue(carrier).rule
        raise ParseError(f"unknown rule kind {kind!r}")

    def _build_measures(self, spec):
        carrier = self.get("carriers", spec["carrier"])
        m = Measure(carrier, self._rule(spec["rule"], carrier))
        if "scale" in spec:
            m = scale(m, _rational(spec["scale"]))
        return m

    def _build_cmeasures(self, spec):
        return from_measure(self.get("measures", spec["measure"]))

    def _build_statistics(self, spec):
        kind = spec["kind"]
        dom = self.get("carriers", spec["domain"])
        if kind == "identity":
            return conditioning.Identity(dom)
        if kind == "modulo":
            return conditioning.Modulo(dom, _int(spec["m"], "modulus"))
        if kind == "block":
            return conditioning.BlockQuotient(dom, _int(spec["m"], "block size"))
        if kind == "table":
            cod = self.get("carriers", spec["codomain"])
            return conditioning.FiniteTable(dom, cod, tuple(parse_index(v) for v in spec["map"]))
        if kind == "projection":
            return conditioning.Projection(dom, spec["axis"])
        raise ParseError(f"unknown statistic kind {kind!r}")

    def _build_bunches(self, spec):
        kind = spec["kind"]
        carrier = self.get("carriers", spec["carrier"])
        if kind == "translates":
            return renyi.TranslateBunch(carrier, self.set_expr(spec["window"], carrier), _int(spec.get("step", 1), "step"))
        if kind == "explicit":
            return renyi.ExplicitBunch(carrier, tuple(self.set_expr(s, carrier) for s in spec["members"]))
        if kind == "admissible":
            return renyi.AdmissibleBunch(self.get("cmeasures", spec["cmeasure"]))
        raise ParseError(f"unknown bunch kind {kind!r}")

    def _build_families(self, spec):
        law = spec["law"]
        kind = law["kind"]
        if kind == "explicit":
            carrier = self.get("carriers", spec["carrier"])
            tables = {}
            for entry in law["tables"]:
                member = self.set_expr(entry["member"], carrier)
                tables[member] = {parse_index(k): _rational(v) for k, v in entry["weights"].items()}
            return renyi.explicit_family(carrier, tables)
        if kind == "maximal":
            return renyi.maximal_extension(self.get("cmeasures", law["cmeasure"]))
        bunch = self.get("bunches", spec["bunch"])
        if kind == "uniform":
            return renyi.RenyiFamily(bunch, renyi.uniform_law(bunch.carrier))
        if kind == "proportional":
            return renyi.RenyiFamily(bunch, renyi.ProportionalLaw(self.get("measures", law["measure"])))
        if kind == "elementary":
            from .cmeasure import elementary_family

            return elementary_family(self.get("cmeasures", law["cmeasure"]), bunch)
        raise ParseError(f"unknown law kind {kind!r}")

    def _prob_map(self, raw):
        return {parse_index(k): _rational(v) for k, v in raw.items()}

    def _build_models(self, spec):
        k = spec["kernel"]
        kind = k["kind"]
        if kind == "shift":
            kernel = bayes.ShiftInvariant(tuple(self._prob_map(k["offsets"]).items()))
        elif kind == "rows":
            theta, x = self.get("carriers", k["theta"]), self.get("carriers", k["x"])
            rows = tuple((parse_index(t), tuple(self._prob_map(r).items())) for t, r in k["rows"].items())
            kernel = bayes.RowTable(theta, x, rows)
        elif kind == "constant_rows":
            theta, x = self.get("carriers", k["theta"]), self.get("carriers", k["x"])
            kernel = bayes.ConstantRows(theta, x, tuple(self._prob_map(k["p"]).items()))
        else:
            raise ParseError(f"unknown kernel kind {kind!r}")
        prior_name = spec["prior"]
        if prior_name in self.sections["cmeasures"]:
            prior = self.get("cmeasures", prior_name)
        else:
            prior = self.get("measures", prior_name)
        return bayes.BayesModel(kernel, prior)

    def lookup_any(self, name):
        """A cmeasure or a measure, whichever section defines ``name``."""
        if name in self.sections["cmeasures"]:
            return self.get("cmeasures", name)
        return self.get("measures", name)


def as_cmeasure(obj) -> CMeasure:
    return obj if isinstance(obj, CMeasure) else from_measure(obj)
