"""Rewrite scenarios/*.expected and scenarios/exit_codes.json from the current CLI.

Run only after checking that a behaviour change is intended; the golden-file
test compares against whatever this writes.
"""

import json
import pathlib
import sys

from condmeasure.cli import execute, EXIT_PARSE
from condmeasure.errors import ScenarioError
from condmeasure.scenario import load

ROOT = pathlib.Path(__file__).resolve().parent.parent / "scenarios"


def render(path):
    try:
        sc = load(path)
    except ScenarioError as exc:
        return f"ERROR: {type(exc).__name__}: {exc}\n", EXIT_PARSE
    return execute(sc, sc.commands)


def main():
    codes = {}
    for path in sorted(ROOT.glob("*.json")):
        if path.name == "exit_codes.json":
            continue
        report, status = render(path)
        path.with_suffix(".expected").write_text(report, encoding="utf-8")
        codes[path.name] = status
        print(f"{path.name}: exit {status}")
    (ROOT / "exit_codes.json").write_text(json.dumps(codes, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    sys.exit(main())
