"""Report data model and renderers.

A CheckReport is the single exchange format between the engines, the
command line, and the golden files: a scenario name, the parameters that
produced it, a list of residual checks, a labeled eigenvalue table, and
any errata notes.  JSON rendering is canonical (stable key order, full
round-trip float precision); markdown and csv are projections for humans
and spreadsheets.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

__all__ = [
    "SCHEMA_VERSION",
    "CheckEntry",
    "EigenRow",
    "ErratumNote",
    "CheckReport",
    "RunConfig",
    "render",
]

SCHEMA_VERSION = 1

FORMATS = ("json", "markdown", "csv")


@dataclass(frozen=True)
class CheckEntry:
    """One verified identity: a relative residual against its bound."""

    name: str
    residual: float
    tolerance: float
    passed: bool
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "passed": bool(self.passed),
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CheckEntry":
        return cls(
            name=d["name"],
            residual=float(d["residual"]),
            tolerance=float(d["tolerance"]),
            passed=bool(d["passed"]),
            note=d.get("note", ""),
        )


@dataclass(frozen=True)
class EigenRow:
    """One retained label of the joint eigensystem.

    ``n`` indexes the level-1 eigenvalue cluster, ``kappa`` the member
    within it, ``state`` is the dominant basis label.  ``eps2_oracle`` is
    None outside the safe truncation margin, where no closed form is
    claimed.
    """

    n: int
    kappa: int
    state: tuple[int, ...]
    eps1: float
    nu: float
    eps2: float
    eps2_oracle: float | None
    in_safe_margin: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "kappa": self.kappa,
            "state": list(self.state),
            "eps1": float(self.eps1),
            "nu": float(self.nu),
            "eps2": float(self.eps2),
            "eps2_oracle": None if self.eps2_oracle is None else float(self.eps2_oracle),
            "in_safe_margin": bool(self.in_safe_margin),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EigenRow":
        oracle = d.get("eps2_oracle")
        return cls(
            n=int(d["n"]),
            kappa=int(d["kappa"]),
            state=tuple(int(s) for s in d["state"]),
            eps1=float(d["eps1"]),
            nu=float(d["nu"]),
            eps2=float(d["eps2"]),
            eps2_oracle=None if oracle is None else float(oracle),
            in_safe_margin=bool(d["in_safe_margin"]),
        )

    def label_text(self) -> str:
        state = ",".join(str(s) for s in self.state)
        return f"({self.n},{self.kappa})->({state})"


@dataclass(frozen=True)
class ErratumNote:
    """A verified discrepancy between the published derivation and the
    matrix oracles, reported with evidence on both sides."""

    name: str
    note: str
    published_residual: float
    adopted_residual: float

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "note": self.note,
            "published_residual": float(self.published_residual),
            "adopted_residual": float(self.adopted_residual),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ErratumNote":
        return cls(
            name=d["name"],
            note=d["note"],
            published_residual=float(d["published_residual"]),
            adopted_residual=float(d["adopted_residual"]),
        )


@dataclass(frozen=True)
class CheckReport:
    """Full outcome of one scenario run."""

    scenario: str
    params: dict
    checks: tuple[CheckEntry, ...]
    eigen_table: tuple[EigenRow, ...]
    errata: tuple[ErratumNote, ...] = ()

    @property
    def overall_pass(self) -> bool:
        return all(entry.passed for entry in self.checks)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario,
            "params": dict(self.params),
            "overall_pass": self.overall_pass,
            "checks": [entry.to_dict() for entry in self.checks],
            "eigen_table": [row.to_dict() for row in self.eigen_table],
            "errata": [note.to_dict() for note in self.errata],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        version = d.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {version!r}, expected {SCHEMA_VERSION}")
        return cls(
            scenario=d["scenario"],
            params=dict(d["params"]),
            checks=tuple(CheckEntry.from_dict(c) for c in d["checks"]),
            eigen_table=tuple(EigenRow.from_dict(r) for r in d["eigen_table"]),
            errata=tuple(ErratumNote.from_dict(e) for e in d.get("errata", [])),
        )

    @classmethod
    def from_json(cls, text: str) -> "CheckReport":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one scenario run.

    ``dim`` is the per-mode truncation size; None picks the scenario
    default.  ``k`` applies to ladder-power scenarios, ``q`` to the quon
    scenario, ``epsilon`` and ``seed`` to the metric-dressed scenarios.
    """

    scenario: str
    dim: int | None = None
    k: int = 1
    q: float = 0.5
    epsilon: float = 0.2
    seed: int = 1
    hbar_omega: float = 1.0
    residual_tol: float = 1e-10
    rank_tol: float = 1e-10
    cluster_tol: float = 1e-8


def _float_cell(value) -> str:
    if value is None:
        return ""
    return repr(float(value))


def render_json(report: CheckReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def render_csv(report: CheckReport) -> str:
    """Eigenvalue table as csv, one row per retained label."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["labels", "eps1", "nu", "eps2", "eps2_oracle", "in_safe_margin"])
    for row in report.eigen_table:
        writer.writerow(
            [
                row.label_text(),
                _float_cell(row.eps1),
                _float_cell(row.nu),
                _float_cell(row.eps2),
                _float_cell(row.eps2_oracle),
                "true" if row.in_safe_margin else "false",
            ]
        )
    return buf.getvalue()


def render_markdown(report: CheckReport) -> str:
    lines: list[str] = []
    lines.append(f"# Scenario report: {report.scenario}")
    lines.append("")
    lines.append(f"Overall: {'PASS' if report.overall_pass else 'FAIL'}")
    lines.append("")
    lines.append("## Parameters")
    lines.append("")
    for key, value in report.params.items():
        lines.append(f"- `{key}`: {value!r}")
    lines.append("")
    lines.append("## Checks")
    lines.append("")
    lines.append("| check | residual | tolerance | pass | note |")
    lines.append("| --- | --- | --- | --- | --- |")
    for entry in report.checks:
        mark = "yes" if entry.passed else "NO"
        lines.append(
            f"| {entry.name} | {_float_cell(entry.residual)} | {_float_cell(entry.tolerance)} "
            f"| {mark} | {entry.note} |"
        )
    lines.append("")
    lines.append("## Eigenvalue table")
    lines.append("")
    lines.append("| label | eps1 | nu | eps2 | eps2_oracle | in_safe_margin |")
    lines.append("| --- | --- | --- | --- | --- | --- |")
    for row in report.eigen_table:
        oracle = _float_cell(row.eps2_oracle) if row.eps2_oracle is not None else "-"
        lines.append(
            f"| {row.label_text()} | {_float_cell(row.eps1)} | {_float_cell(row.nu)} "
            f"| {_float_cell(row.eps2)} | {oracle} | {'yes' if row.in_safe_margin else 'no'} |"
        )
    lines.append("")
    if report.errata:
        lines.append("## Errata")
        lines.append("")
        for note in report.errata:
            lines.append(
                f"- **{note.name}**: {note.note} "
                f"(published residual {_float_cell(note.published_residual)}, "
                f"adopted residual {_float_cell(note.adopted_residual)})"
            )
        lines.append("")
    return "\n".join(lines)


def render(report: CheckReport, fmt: str = "json") -> str:
    """Render a report in one of the supported formats."""
    if fmt == "json":
        return render_json(report)
    if fmt == "markdown":
        return render_markdown(report)
    if fmt == "csv":
        return render_csv(report)
    raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
