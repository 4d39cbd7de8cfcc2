"""Regenerate the golden JSON reports for the bundled documents.

Run after an intentional change to report contents, then review the diff.
"""

import contextlib
import io
import json
import tempfile
from pathlib import Path

from supersite.cli import main

ROOT = Path(__file__).resolve().parents[1] / "tests" / "fixtures"

# (document, command, extra arguments, expected exit code)
CASES = [
    ("sierpinski", "check-topology", [], 0),
    ("axiom_mutant", "check-topology", [], 1),
    ("axiom_mutant", "slice", ["--topology", "J"], 0),
    ("separated", "check-sheaf", [], 1),
    ("p11", "check-superspace", [], 0),
    ("p11", "glue", [], 0),
    ("p11", "sections", [], 0),
    ("twisted", "sections", [], 0),
    ("twisted", "sections", ["--degree-cap", "2", "--gluing", "XPi"], 2),
    ("functor", "represent", [], 0),
]


def golden_name(doc, command, extra):
    tag = "-".join(a.lstrip("-") for a in extra)
    return f"{doc}.{command}{'.' + tag if tag else ''}.json"


def run_case(doc, command, extra):
    with tempfile.TemporaryDirectory() as tmp:
        target = Path(tmp) / "report.json"
        with contextlib.redirect_stdout(io.StringIO()):
            code = main([command, str(ROOT / f"{doc}.ss"), "--json", str(target), *extra])
        return code, json.loads(target.read_text())


def main_():
    out = ROOT / "golden"
    out.mkdir(exist_ok=True)
    for doc, command, extra, expected in CASES:
        code, payload = run_case(doc, command, extra)
        assert code == expected, (doc, command, code)
        path = out / golden_name(doc, command, extra)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"{path.name}: exit {code}")


if __name__ == "__main__":
    main_()
