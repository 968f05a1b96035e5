#!/usr/bin/env python3
"""Regenerate the golden reports under tests/golden/.

Runs every catalogue scenario at default parameters and writes the
canonical json rendering.  The test suite compares future runs against
these files structurally (exact labels and verdicts, tolerant residuals),
so regenerate only after an intentional change to the report contents and
review the diff before committing.
"""

from __future__ import annotations

import sys
from pathlib import Path

from fockpartners.report import RunConfig, render
from fockpartners.runner import catalogue_names, run_scenario

GOLDEN_DIR = Path(__file__).resolve().parent.parent / "tests" / "golden"


def main() -> int:
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    failed = []
    for name in catalogue_names():
        report = run_scenario(RunConfig(scenario=name))
        path = GOLDEN_DIR / f"{name}.json"
        path.write_text(render(report, "json"))
        status = "pass" if report.overall_pass else "FAIL"
        print(f"wrote {path} ({len(report.checks)} checks, {status})")
        if not report.overall_pass:
            failed.append(name)
    if failed:
        print(f"refusing to bless failing scenarios: {failed}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
