"""Rewrite tests/golden/<case>.json from the current CLI output."""

import contextlib
import io
import json
import sys
from pathlib import Path

from billiard_lab.cli import main

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


def capture(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return buf.getvalue(), code


def regenerate(names=None):
    cases = json.loads((GOLDEN / "cases.json").read_text())
    for name, case in cases.items():
        if names and name not in names:
            continue
        text, code = capture(case["argv"])
        if code != case["exit"]:
            print(f"{name}: exit {code}, expected {case['exit']}", file=sys.stderr)
        (GOLDEN / f"{name}.json").write_text(text)
        print(f"wrote {name}.json")


if __name__ == "__main__":
    regenerate(set(sys.argv[1:]))
