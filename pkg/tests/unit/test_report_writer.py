"""Tests for the report file writer."""
import json

from consistent_histories.models.config import OutputFormat
from consistent_histories.models.reports import RunReport, ScenarioResult
from consistent_histories.services.report_writer import ReportWriter, csv_documents


def _report() -> RunReport:
    result = ScenarioResult(
        scenario="gambling",
        probabilities={"brain": {"B=0": 0.36, "B=1": 0.64}},
        sampled={"brain": {"B=0": 0.4, "B=1": 0.6}},
        seed=0,
    )
    return RunReport(success=True, exit_status=0, scenario="gambling", result=result)


def test_csv_headers():
    documents = csv_documents(_report(), {"trajectory": [{"t": 0.0, "top_count": 3}]})
    assert documents["probabilities_brain.csv"].splitlines() == ["history,probability", "B=0,0.36", "B=1,0.64"]
    assert documents["sampled_brain.csv"].splitlines()[0] == "outcome,frequency"
    assert documents["trajectory.csv"].splitlines() == ["t,top_count", "0.0,3"]


def test_table_names_are_slugged():
    result = ScenarioResult(scenario="x", probabilities={"pure/z basis": {"a": 1.0}}, seed=0)
    report = RunReport(success=True, exit_status=0, scenario="x", result=result)
    assert list(csv_documents(report, {})) == ["probabilities_pure_z_basis.csv"]


async def test_writes_json_and_csv(tmp_path):
    files = await ReportWriter(tmp_path / "run").write(_report())
    assert sorted(path.name for path in files) == ["probabilities_brain.csv", "report.json", "sampled_brain.csv"]
    assert json.loads((tmp_path / "run" / "report.json").read_text())["success"] is True


async def test_csv_only(tmp_path):
    files = await ReportWriter(tmp_path, [OutputFormat.CSV]).write(_report())
    assert "report.json" not in {path.name for path in files}


async def test_failure_always_writes_json(tmp_path):
    report = RunReport(success=False, exit_status=1, scenario="gambling", error="boom", error_code="ValueError")
    files = await ReportWriter(tmp_path, ["csv"]).write(report)
    assert [path.name for path in files] == ["report.json"]
    assert json.loads(files[0].read_text())["error_code"] == "ValueError"
