"""Command-line interface.

Subcommands: ``run`` executes one scenario and emits a report, ``list``
prints the scenario catalogue, ``verify --all`` runs every scenario at
default parameters.  Exit codes: 0 all checks passed, 1 a check failed,
2 usage error.  When ``--out`` is a relative path it is placed under
``FOCKPARTNERS_OUT_DIR`` if that variable is set.
"""

from __future__ import annotations

import argparse
import os
import sys

from .report import FORMATS, RunConfig, render
from .runner import CATALOGUE, run_scenario, verify_all

__all__ = ["main", "build_parser"]

OUT_DIR_ENV = "FOCKPARTNERS_OUT_DIR"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fockpartners",
        description="Construct and verify partner hamiltonians on truncated Fock spaces.",
    )
    sub = parser.add_subparsers(dest="command", metavar="{run,list,verify}")

    run_p = sub.add_parser("run", help="run one scenario and emit a report")
    run_p.add_argument("scenario", help="scenario name (see `list`)")
    run_p.add_argument("--dim", type=int, default=None, help="per-mode truncation size (scenario default if omitted)")
    run_p.add_argument("--k", type=int, default=1, help="ladder step count (boson, quon)")
    run_p.add_argument("--q", type=float, default=0.5, help="deformation parameter in [0, 1] (quon)")
    run_p.add_argument("--epsilon", type=float, default=0.2, help="metric deformation strength (crypto scenarios)")
    run_p.add_argument("--seed", type=int, default=1, help="metric generator seed (crypto scenarios)")
    run_p.add_argument("--hbar-omega", type=float, default=1.0, dest="hbar_omega", help="level spacing (landau scenarios)")
    run_p.add_argument("--tol", type=float, default=None, help="override the base residual tolerance")
    run_p.add_argument("--format", choices=FORMATS, default="json", help="output format")
    run_p.add_argument("--out", default=None, help="write to a file instead of standard output")

    sub.add_parser("list", help="print the scenario catalogue")

    verify_p = sub.add_parser("verify", help="run every scenario at default parameters")
    verify_p.add_argument("--all", action="store_true", help="required: verify the full catalogue")

    return parser


def _resolve_out_path(out: str) -> str:
    base = os.environ.get(OUT_DIR_ENV)
    if base and not os.path.isabs(out):
        return os.path.join(base, out)
    return out


def _cmd_run(args) -> int:
    kwargs = {}
    if args.tol is not None:
        kwargs["residual_tol"] = args.tol
    cfg = RunConfig(
        scenario=args.scenario,
        dim=args.dim,
        k=args.k,
        q=args.q,
        epsilon=args.epsilon,
        seed=args.seed,
        hbar_omega=args.hbar_omega,
        **kwargs,
    )
    try:
        report = run_scenario(cfg)
        text = render(report, args.format)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    if args.out:
        path = _resolve_out_path(args.out)
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.overall_pass else 1


def _cmd_list() -> int:
    for spec in CATALOGUE:
        schema = ", ".join(f"{name}={_default_of(spec, name)}" for name in spec.params)
        print(f"{spec.name:<14} [{spec.kind}]  {schema}")
        print(f"{'':<14} {spec.summary}")
    return 0


def _default_of(spec, name: str):
    if name == "dim":
        return spec.default_dim
    defaults = {"k": 1, "q": 0.5, "epsilon": 0.2, "seed": 1, "hbar_omega": 1.0}
    return defaults[name]


def _cmd_verify(args) -> int:
    if not args.all:
        print("error: verify requires --all", file=sys.stderr)
        return 2
    results = verify_all()
    failed = 0
    for name, report in results:
        status = "PASS" if report.overall_pass else "FAIL"
        if not report.overall_pass:
            failed += 1
        worst = max(
            (entry.residual / entry.tolerance for entry in report.checks if entry.tolerance > 0),
            default=0.0,
        )
        print(f"[{status}] {name:<14} checks={len(report.checks)} worst_margin={worst:.3e}")
    return 0 if failed == 0 else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "list":
        return _cmd_list()
    if args.command == "verify":
        return _cmd_verify(args)
    parser.print_usage(sys.stderr)
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
