#!/usr/bin/env python3
"""Run the full scenario catalogue and write per-scenario reports.

Usage:
    python3 scripts/run_all_scenarios.py [out_dir] [--format json|markdown|csv]

Writes one report per catalogue scenario into out_dir (default
``reports/``) and prints a verdict table.  Exit code 0 only if every
scenario passes.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from fockpartners.report import FORMATS, RunConfig, render
from fockpartners.runner import catalogue_names, run_scenario

EXTENSIONS = {"json": "json", "markdown": "md", "csv": "csv"}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", nargs="?", default="reports", help="directory for the report files")
    parser.add_argument("--format", choices=FORMATS, default="json")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    all_ok = True
    for name in catalogue_names():
        report = run_scenario(RunConfig(scenario=name))
        path = out_dir / f"{name}.{EXTENSIONS[args.format]}"
        path.write_text(render(report, args.format))
        worst = max((c.residual / c.tolerance for c in report.checks if c.tolerance > 0), default=0.0)
        verdict = "PASS" if report.overall_pass else "FAIL"
        print(f"[{verdict}] {name:14s} checks={len(report.checks):3d} worst_margin={worst:.3e} -> {path}")
        all_ok = all_ok and report.overall_pass
    return 0 if all_ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
