"""Tests for scenario execution, report files and batch runs."""
import json
import math
import re

import pytest

from consistent_histories.models.config import RunConfig
from consistent_histories.services.runner import execute, execute_async, run_batch, run_scenario

TIMESTAMP = re.compile(r'"timestamp": "[^"]*"')
IDENTITY = [[1, 0], [0, 1]]


def z_then_x_history_set(**overrides):
    root = math.sqrt(0.5)
    history_set = {
        "layout": [["S", 2]],
        "psi0": [root, root],
        "times": [1.0, 2.0],
        "families": [
            {"registers": ["S"], "labels": ["z+", "z-"]},
            {"projectors": [[[0.5, 0.5], [0.5, 0.5]], [[0.5, -0.5], [-0.5, 0.5]]], "labels": ["x+", "x-"]},
        ],
        "unitaries": [IDENTITY, IDENTITY],
    }
    history_set.update(overrides)
    return history_set


def gambling_config(**overrides):
    data = {"scenario": "gambling", "alpha_sq": 0.36, "odds": 2, "seed": 42}
    data.update(overrides)
    return RunConfig.model_validate(data)


def z_then_z_history_set(**overrides):
    return z_then_x_history_set(
        families=[
            {"registers": ["S"], "labels": ["z+", "z-"]},
            {"registers": ["S"], "labels": ["z+", "z-"]},
        ],
        **overrides,
    )


class TestExecute:
    def test_gambling_report(self, tmp_path):
        outcome = execute(gambling_config(), tmp_path)
        assert outcome.exit_status == 0
        derived = outcome.report.result.derived
        assert derived["expected_winnings"] == pytest.approx(0.08)
        assert derived["decision"] == "accept"

        names = {path.name for path in outcome.files}
        assert {"report.json", "probabilities_brain.csv", "sampled_brain.csv"} <= names
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["schema_version"] == 1
        assert report["result"]["scenario"] == "gambling"

    def test_probability_csv_columns(self, tmp_path):
        execute(gambling_config(), tmp_path)
        lines = (tmp_path / "probabilities_brain.csv").read_text().splitlines()
        assert lines[0] == "history,probability"
        assert lines[1].startswith("B=0,0.36")

    def test_inconsistent_set_exits_with_two(self, tmp_path):
        config = RunConfig(scenario="history-set", history_set=z_then_x_history_set())
        outcome = execute(config, tmp_path)
        assert outcome.exit_status == 2
        assert not outcome.report.success
        assert outcome.report.error_code == "InconsistentHistoriesError"
        assert outcome.report.consistency.max_normalized_offdiag == pytest.approx(1.0, abs=1e-10)
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["exit_status"] == 2

    def test_inconsistent_set_without_probabilities(self, tmp_path):
        config = RunConfig(
            scenario="history-set", history_set=z_then_x_history_set(request_probabilities=False)
        )
        outcome = execute(config, tmp_path)
        assert outcome.exit_status == 0
        assert outcome.report.result.derived["consistent"] is False
        assert outcome.report.result.probabilities == {}

    def test_history_set_marginal(self, tmp_path):
        config = RunConfig(scenario="history-set", history_set=z_then_z_history_set(coarse_time=0))
        outcome = execute(config, tmp_path)
        assert outcome.exit_status == 0
        tables = outcome.report.result.probabilities
        assert tables["histories"]["z+,z+"] == pytest.approx(0.5)
        assert tables["marginal_t0"] == pytest.approx({"z+": 0.5, "z-": 0.5})

    def test_hourglass_writes_trajectory(self, tmp_path):
        config = RunConfig(scenario="hourglass", grains=100, trials=10)
        outcome = execute(config, tmp_path)
        assert outcome.report.result.derived["f_switches"] == 1
        assert outcome.report.result.derived["g_switches"] == 100
        header = (tmp_path / "trajectory.csv").read_text().splitlines()[0]
        assert header == "t,top_count,f,g"

    def test_other_errors_exit_with_one(self, tmp_path):
        config = RunConfig(scenario="state-estimation", alpha_sq=0.36, copies=6)
        outcome = execute(config, tmp_path)
        assert outcome.exit_status == 1
        assert outcome.report.error_code == "CapacityError"
        assert (tmp_path / "report.json").exists()

    def test_json_only_output(self, tmp_path):
        config = gambling_config(output={"formats": ["json"]})
        outcome = execute(config, tmp_path)
        assert [path.name for path in outcome.files] == ["report.json"]

    def test_reports_identical_modulo_timestamp(self, tmp_path):
        config = gambling_config()
        execute(config, tmp_path / "first")
        execute(config, tmp_path / "second")
        first = TIMESTAMP.sub("", (tmp_path / "first" / "report.json").read_text())
        second = TIMESTAMP.sub("", (tmp_path / "second" / "report.json").read_text())
        assert first == second

    def test_canonical_observer_with_custom_set(self):
        config = RunConfig(scenario="canonical-observer", history_set=z_then_z_history_set())
        result, extra = run_scenario(config)
        assert result.probabilities["recorder"]["z-,z-"] == pytest.approx(0.5)
        assert extra == {}


async def test_execute_async(tmp_path):
    outcome = await execute_async(gambling_config(), tmp_path)
    assert outcome.exit_status == 0


async def test_batch_isolates_directories(tmp_path):
    entries = [
        ("gambling", gambling_config()),
        ("hourglass", RunConfig(scenario="hourglass", grains=20, trials=5)),
        ("inconsistent", RunConfig(scenario="history-set", history_set=z_then_x_history_set())),
    ]
    outcomes = await run_batch(entries, jobs=2, out_dir=tmp_path)
    assert [o.exit_status for o in outcomes] == [0, 0, 2]
    for name, _ in entries:
        assert (tmp_path / name / "report.json").exists()


async def test_batch_rejects_duplicate_names(tmp_path):
    config = gambling_config()
    with pytest.raises(ValueError):
        await run_batch([("a", config), ("a", config)], jobs=1, out_dir=tmp_path)
