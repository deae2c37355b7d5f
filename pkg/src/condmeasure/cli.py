"""Command-line front end.

    condmeasure --scenario FILE [--out PATH] [--probe-window N] [COMMAND ...]

Without a subcommand every command listed in the scenario runs in order
(``run`` does the same explicitly). A subcommand runs one command against the
scenario's definitions. Exit status: 0 success, 1 validation violations,
2 precondition/model errors, 3 parse/name errors.
"""

from __future__ import annotations

import sys

import click

from . import bayes, conditioning, renyi
from .carriers import RealGrid
from .cmeasure import cond_prob, equivalent, from_measure
from .errors import ModelError, ScenarioError
from .extended import render
from .measures import lebesgue
from .scenario import Scenario, as_cmeasure, load, parse_index

EXIT_OK, EXIT_VIOLATIONS, EXIT_MODEL, EXIT_PARSE = 0, 1, 2, 3


class Outcome:
    def __init__(self, lines, status=EXIT_OK):
        self.lines = lines
        self.status = status


def _bool(x: bool) -> str:
    return "true" if x else "false"


def render_table(table: dict) -> str:
    return "{" + ", ".join(f"{k}:{render(v)}" for k, v in sorted(table.items())) + "}"


def render_violations(violations) -> Outcome:
    noun = "violation" if len(violations) == 1 else "violations"
    lines = [f"{len(violations)} {noun}"]
    lines += [f"  - {v}" for v in violations]
    return Outcome(lines, EXIT_VIOLATIONS if violations else EXIT_OK)


# -- command handlers ---------------------------------------------------------------------


def _validate(sc: Scenario, cmd: dict, window: int) -> Outcome:
    if "bunch" in cmd:
        b = sc.get("bunches", cmd["bunch"])
        out = render_violations(renyi.validate_bunch(b))
        out.lines.append(f"cover: {renyi.covering_witness(b)}")
        return out
    f = sc.get("families", cmd["family"])
    budget = int(cmd.get("pair_budget", 200))
    violations = renyi.validate_bunch(f.bunch) if not isinstance(f.bunch, renyi.AdmissibleBunch) else []
    violations += renyi.validate_renyi(f, pair_budget=budget)
    return render_violations(violations)


def _describe_class(result: renyi.ExtensionResult) -> list:
    rule = result.measure.rule
    carrier = result.measure.carrier
    if result.fitted and getattr(rule, "kind", None) == "table" and not rule.entries:
        text = f"class: Constant({render(rule.default)}) per cell"
    elif result.fitted:
        text = f"class: {rule}"
    else:
        text = "class: procedural (no closed form on the probe window)"
    if isinstance(carrier, RealGrid):
        leb = equivalent(result.cmeasure, from_measure(lebesgue(carrier)))
        text += "; Lebesgue-equivalent" if leb else "; not Lebesgue-equivalent"
    return [text, f"canonical: {result.cmeasure}", f"normalization: mu({result.b0}) = 1"]


def _extend(sc: Scenario, cmd: dict, window: int) -> Outcome:
    f = sc.get("families", cmd["family"])
    base = sc.set_expr(cmd["base"], f.carrier) if "base" in cmd else renyi.first_member(f)
    result = renyi.extend(f, base, window, cmd.get("hypothesis"))
    return Outcome(_describe_class(result))


def _condprob(sc: Scenario, cmd: dict, window: int) -> Outcome:
    g = as_cmeasure(sc.lookup_any(cmd["cmeasure"]))
    given = sc.set_expr(cmd["given"], g.carrier)
    of = sc.set_expr(cmd["of"], g.carrier)
    return Outcome([render(cond_prob(g, of, given))])


def _condition(sc: Scenario, cmd: dict, window: int) -> Outcome:
    if "partition" in cmd:
        g = as_cmeasure(sc.lookup_any(cmd["cmeasure"]))
        part = conditioning.FiberPartition(sc.get("statistics", cmd["partition"]))
        A = sc.set_expr(cmd["set"], g.carrier)
        return Outcome([render(conditioning.conditional_given_partition(g, part, parse_index(cmd["x"]), A))])
    obj = sc.lookup_any(cmd["measure"])
    m = obj.representative if hasattr(obj, "representative") else obj
    d = sc.get("statistics", cmd["statistic"])
    z = parse_index(cmd["value"])
    if "phi" in cmd:
        phi = sc.get("statistics", cmd["phi"])
        A = sc.set_expr(cmd["set"], phi.codomain)
        return Outcome([render(conditioning.pushed_conditional(m, phi, d, z, A))])
    A = sc.set_expr(cmd["set"], m.carrier)
    return Outcome([render(conditioning.conditional_given_value(m, d, z, A))])


def _posterior(sc: Scenario, cmd: dict, window: int) -> Outcome:
    model = sc.get("models", cmd["model"])
    return Outcome([render_table(bayes.posterior(model, parse_index(cmd["x"])))])


def _equivalence(sc: Scenario, cmd: dict, window: int) -> Outcome:
    if "families" in cmd:
        a, b = (sc.get("families", n) for n in cmd["families"])
        return Outcome([f"same C-measure: {_bool(renyi.same_cmeasure(a, b, window))}"])
    a, b = (as_cmeasure(sc.lookup_any(n)) for n in cmd["cmeasures"])
    return Outcome([f"equivalent: {_bool(equivalent(a, b, window))}"])


HANDLERS = {
    "validate": _validate,
    "extend": _extend,
    "condprob": _condprob,
    "condition": _condition,
    "posterior": _posterior,
    "equivalence": _equivalence,
}


def _echo_args(cmd: dict) -> str:
    parts = [cmd["op"]]
    for k, v in cmd.items():
        if k == "op":
            continue
        if isinstance(v, list):
            v = ",".join(str(x) for x in v)
        parts.append(f"{k}={v}")
    return " ".join(parts)


def execute(sc: Scenario, commands, window: int = 64):
    """Run commands in order; return (report text, exit status)."""
    blocks, status = [], EXIT_OK
    for i, cmd in enumerate(commands, 1):
        lines = [f"COMMAND {i}: {_echo_args(cmd)}"]
        handler = HANDLERS.get(cmd.get("op"))
        try:
            if handler is None:
                raise ScenarioError(f"unknown command {cmd.get('op')!r}")
            out = handler(sc, cmd, window)
            lines.append(f"RESULT: {out.lines[0]}")
            lines.extend(out.lines[1:])
            status = max(status, out.status)
        except KeyError as exc:
            lines.append(f"ERROR: ParseError: command is missing argument {exc}")
            status = max(status, EXIT_PARSE)
        except ScenarioError as exc:
            lines.append(f"ERROR: {type(exc).__name__}: {exc}")
            status = max(status, EXIT_PARSE)
        except (ValueError, TypeError) as exc:
            lines.append(f"ERROR: ParseError: bad argument: {exc}")
            status = max(status, EXIT_PARSE)
        except ModelError as exc:
            lines.append(f"ERROR: {type(exc).__name__}: {exc}")
            status = max(status, EXIT_MODEL)
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n", status


def run(scenario_path, output_path=None, window: int = 64) -> int:
    """Execute every command of a scenario file; write the report; return the exit status."""
    try:
        sc = load(scenario_path)
    except ScenarioError as exc:
        report, status = f"ERROR: {type(exc).__name__}: {exc}\n", EXIT_PARSE
    except OSError as exc:
        report, status = f"ERROR: ParseError: cannot read scenario: {exc}\n", EXIT_PARSE
    else:
        report, status = execute(sc, sc.commands, window)
    _emit(report, output_path)
    return status


def _emit(report: str, output_path) -> None:
    if output_path:
        with open(output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report)
    else:
        sys.stdout.write(report)


# -- click front end ---------------------------------------------------------------------------


@click.group(invoke_without_command=True)
@click.option("--scenario", "scenario_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", "output_path", type=click.Path(dir_okay=False), default=None)
@click.option("--probe-window", "window", type=click.IntRange(min=1), default=64, show_default=True)
@click.pass_context
def main(ctx, scenario_path, output_path, window):
    """Exact conditioning, Renyi extension and Bayes posteriors from scenario files."""
    ctx.obj = {"path": scenario_path, "out": output_path, "window": window}
    if ctx.invoked_subcommand is None:
        ctx.exit(run(scenario_path, output_path, window))


def _single(ctx, cmd: dict):
    opts = ctx.obj
    try:
        sc = load(opts["path"])
    except (ScenarioError, OSError) as exc:
        _emit(f"ERROR: {type(exc).__name__}: {exc}\n", opts["out"])
        ctx.exit(EXIT_PARSE)
    report, status = execute(sc, [cmd], opts["window"])
    _emit(report, opts["out"])
    ctx.exit(status)


@main.command("run")
@click.pass_context
def run_cmd(ctx):
    """Run every command listed in the scenario."""
    opts = ctx.obj
    ctx.exit(run(opts["path"], opts["out"], opts["window"]))


@main.command("validate")
@click.option("--family")
@click.option("--bunch")
@click.option("--pair-budget", type=int, default=200, show_default=True)
@click.pass_context
def validate_cmd(ctx, family, bunch, pair_budget):
    """Check bunch axioms, or Renyi-family axioms and consistency."""
    cmd = {"op": "validate"}
    if bunch:
        cmd["bunch"] = bunch
    else:
        cmd.update(family=family, pair_budget=pair_budget)
    _single(ctx, cmd)


@main.command("extend")
@click.option("--family", required=True)
@click.option("--base", default=None, help="B0: a set name or set expression")
@click.option("--hypothesis", type=click.Choice(["constant", "geometric", "table"]), default=None)
@click.pass_context
def extend_cmd(ctx, family, base, hypothesis):
    """Extend a Renyi family to the conditional measure it generates."""
    cmd = {"op": "extend", "family": family}
    if base is not None:
        cmd["base"] = base
    if hypothesis:
        cmd["hypothesis"] = hypothesis
    _single(ctx, cmd)


@main.command("condprob")
@click.option("--cmeasure", required=True)
@click.option("--given", required=True)
@click.option("--of", "of_", required=True)
@click.pass_context
def condprob_cmd(ctx, cmeasure, given, of_):
    """Elementary conditional probability g(OF | GIVEN)."""
    _single(ctx, {"op": "condprob", "cmeasure": cmeasure, "given": given, "of": of_})


@main.command("condition")
@click.option("--measure")
@click.option("--statistic")
@click.option("--value")
@click.option("--phi")
@click.option("--cmeasure")
@click.option("--partition")
@click.option("--x")
@click.option("--set", "set_", required=True)
@click.pass_context
def condition_cmd(ctx, measure, statistic, value, phi, cmeasure, partition, x, set_):
    """Condition on a statistic's value, or on the fiber partition of a statistic."""
    if partition:
        cmd = {"op": "condition", "cmeasure": cmeasure, "partition": partition, "x": x, "set": set_}
    else:
        cmd = {"op": "condition", "measure": measure, "statistic": statistic, "value": value, "set": set_}
        if phi:
            cmd["phi"] = phi
    _single(ctx, cmd)


@main.command("posterior")
@click.option("--model", required=True)
@click.option("--x", required=True)
@click.pass_context
def posterior_cmd(ctx, model, x):
    """Exact posterior table of a Bayesian model at observation X."""
    _single(ctx, {"op": "posterior", "model": model, "x": x})


@main.command("equivalence")
@click.option("--family", "families", multiple=True)
@click.option("--cmeasure", "cmeasures", multiple=True)
@click.pass_context
def equivalence_cmd(ctx, families, cmeasures):
    """Compare two families (same generated class?) or two C-measures."""
    if families:
        if len(families) != 2:
            raise click.UsageError("give --family exactly twice")
        cmd = {"op": "equivalence", "families": list(families)}
    else:
        if len(cmeasures) != 2:
            raise click.UsageError("give --cmeasure exactly twice")
        cmd = {"op": "equivalence", "cmeasures": list(cmeasures)}
    _single(ctx, cmd)


if __name__ == "__main__":
    main()
