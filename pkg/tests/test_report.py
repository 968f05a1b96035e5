import json
from pathlib import Path

import pytest

from fockpartners.report import (
    SCHEMA_VERSION,
    CheckEntry,
    CheckReport,
    EigenRow,
    ErratumNote,
    RunConfig,
    render,
)
from fockpartners.runner import catalogue_names, run_scenario

from conftest import assert_reports_close

GOLDEN_DIR = Path(__file__).parent / "golden"


def sample_report() -> CheckReport:
    return CheckReport(
        scenario="boson",
        params={"dim": 4, "k": 1, "residual_tol": 1e-10},
        checks=(
            CheckEntry(name="alpha", residual=1e-14, tolerance=1e-10, passed=True, note="fine"),
            CheckEntry(name="beta", residual=2e-9, tolerance=1e-10, passed=False),
        ),
        eigen_table=(
            EigenRow(n=0, kappa=0, state=(0,), eps1=0.0, nu=1.0, eps2=0.0, eps2_oracle=0.0, in_safe_margin=True),
            EigenRow(n=3, kappa=0, state=(3,), eps1=3.0, nu=0.0, eps2=0.0, eps2_oracle=None, in_safe_margin=False),
        ),
        errata=(
            ErratumNote(name="example", note="demo", published_residual=0.5, adopted_residual=1e-15),
        ),
    )


# ---------------------------------------------------------------------------
# serialization


def test_round_trip_through_dict():
    report = sample_report()
    rebuilt = CheckReport.from_dict(report.to_dict())
    assert rebuilt == report


def test_round_trip_through_json():
    report = sample_report()
    rebuilt = CheckReport.from_json(render(report, "json"))
    assert rebuilt == report


def test_schema_version_is_first_and_checked():
    payload = sample_report().to_dict()
    assert list(payload)[0] == "schema_version"
    assert payload["schema_version"] == SCHEMA_VERSION
    payload["schema_version"] = 99
    with pytest.raises(ValueError):
        CheckReport.from_dict(payload)


def test_overall_pass_is_conjunction():
    report = sample_report()
    assert report.overall_pass is False
    all_good = CheckReport(
        scenario="x",
        params={},
        checks=(CheckEntry(name="a", residual=0.0, tolerance=1.0, passed=True),),
        eigen_table=(),
    )
    assert all_good.overall_pass is True


def test_none_oracle_survives_round_trip():
    report = sample_report()
    rebuilt = CheckReport.from_json(render(report, "json"))
    assert rebuilt.eigen_table[1].eps2_oracle is None
    assert rebuilt.eigen_table[0].eps2_oracle == 0.0


def test_label_text_format():
    row = EigenRow(n=1, kappa=2, state=(3, 4), eps1=0.0, nu=0.0, eps2=0.0, eps2_oracle=None, in_safe_margin=False)
    assert row.label_text() == "(1,2)->(3,4)"


# ---------------------------------------------------------------------------
# renderers


def test_json_rendering_is_pretty_and_terminated():
    text = render(sample_report(), "json")
    assert text.endswith("\n")
    parsed = json.loads(text)
    assert parsed["scenario"] == "boson"
    assert parsed["overall_pass"] is False
    assert len(parsed["checks"]) == 2
    assert len(parsed["eigen_table"]) == 2
    assert parsed["eigen_table"][1]["eps2_oracle"] is None


def test_markdown_rendering_structure():
    text = render(sample_report(), "markdown")
    assert text.startswith("# Scenario report: boson")
    assert "Overall: FAIL" in text
    # one table row per check and per eigen label
    assert text.count("| alpha |") == 1
    assert text.count("| beta |") == 1
    assert "| (0,0)->(0) |" in text
    assert "| (3,0)->(3) |" in text
    assert "## Errata" in text
    assert "**example**" in text


def test_csv_rendering_structure():
    text = render(sample_report(), "csv")
    lines = text.strip().split("\n")
    assert lines[0] == "labels,eps1,nu,eps2,eps2_oracle,in_safe_margin"
    assert len(lines) == 3
    assert lines[1].endswith("true")
    assert lines[2].endswith("false")
    # a missing oracle renders as an empty cell
    assert ",," in lines[2]


def test_render_rejects_unknown_format():
    with pytest.raises(ValueError):
        render(sample_report(), "yaml")


def test_float_cells_are_full_precision():
    report = CheckReport(
        scenario="x",
        params={},
        checks=(),
        eigen_table=(
            EigenRow(
                n=0,
                kappa=0,
                state=(0,),
                eps1=1.0 / 3.0,
                nu=1.0,
                eps2=1.0 / 3.0,
                eps2_oracle=None,
                in_safe_margin=False,
            ),
        ),
    )
    assert repr(1.0 / 3.0) in render(report, "csv")


# ---------------------------------------------------------------------------
# determinism and goldens


@pytest.mark.parametrize("name", ["boson", "crypto-landau"])
def test_rendering_is_deterministic_across_runs(name):
    first = render(run_scenario(RunConfig(scenario=name)), "json")
    second = render(run_scenario(RunConfig(scenario=name)), "json")
    assert first == second


@pytest.mark.parametrize("name", catalogue_names())
def test_reports_match_committed_goldens(name):
    golden_path = GOLDEN_DIR / f"{name}.json"
    golden = CheckReport.from_json(golden_path.read_text())
    actual = run_scenario(RunConfig(scenario=name))
    assert actual.overall_pass
    assert_reports_close(actual, golden)
