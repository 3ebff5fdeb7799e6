"""Test the command line."""

import argparse
import json
from dataclasses import replace
from pathlib import Path

import pandas as pd
import pytest

from sewsim.calibration_utils.calibration_builder import parse_calibration
from sewsim.calibration_utils.scenario import load_scenario
from sewsim.reference import REFERENCE_CALIBRATION, REFERENCE_SCENARIOS
from sewsim.reporting import load_trajectory, save_trajectory
from sewsim.reporting.cli import EXIT_INPUT, EXIT_OK, EXIT_SIMULATION, main, parse_years, simulate_all

dir_path = Path(__file__).parent.absolute()

BAU = str(REFERENCE_SCENARIOS / "bau.json")
WTR = str(REFERENCE_SCENARIOS / "wtr.json")
CARBON_TAX = str(REFERENCE_SCENARIOS / "carbon_tax.json")


def test_parse_years():
    """Test the horizon argument."""
    assert parse_years("2020:2050") == (2020, 2050)
    for text in ("2020", "2020:x", "a:b"):
        with pytest.raises(argparse.ArgumentTypeError, match="expected <start>:<end>"):
            parse_years(text)


def test_run_and_compare(tmp_path):
    """Test run writes every table and compare reads the trajectories back."""
    out = tmp_path / "out"
    assert main(["run", "--scenario", BAU, "--scenario", WTR, "--out", str(out), "--years", "2020:2036"]) == EXIT_OK
    assert sorted(path.name for path in out.iterdir()) == [
        "bau.traj",
        "bau_doughnut.csv",
        "bau_isew_components.csv",
        "bau_timeseries.csv",
        "bau_timeseries_indexed.csv",
        "comparison.csv",
        "comparison_indexed.csv",
        "comparison_ranking.csv",
        "wtr.traj",
        "wtr_doughnut.csv",
        "wtr_isew_components.csv",
        "wtr_timeseries.csv",
        "wtr_timeseries_indexed.csv",
    ]
    assert load_trajectory(out / "wtr.traj").years == list(range(2020, 2037))

    again = tmp_path / "again"
    assert main(["compare", "--out", str(again), "--format", "json", str(out / "bau.traj"), str(out / "wtr.traj")]) == EXIT_OK
    written = json.loads((again / "comparison.json").read_text(encoding="utf-8"))
    expected = pd.read_csv(out / "comparison.csv")
    assert len(written) == len(expected)


def test_run_single_scenario(tmp_path):
    """Test a single scenario writes no comparison."""
    assert main(["run", "--scenario", BAU, "--out", str(tmp_path), "--years", "2020:2035", "--format", "json"]) == EXIT_OK
    assert (tmp_path / "bau_timeseries.json").exists()
    assert not (tmp_path / "comparison.json").exists()


def test_validate():
    """Test validation of the reference inputs."""
    assert main(["validate", "--scenario", BAU, "--scenario", CARBON_TAX]) == EXIT_OK
    assert main(["validate", "--calibration", str(dir_path / "missing_bundle")]) == EXIT_INPUT


def test_input_errors(tmp_path, caplog):
    """Test invalid inputs exit with code 2."""
    assert main(["run", "--scenario", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == EXIT_INPUT
    assert main(["run", "--scenario", BAU, "--scenario", BAU, "--out", str(tmp_path)]) == EXIT_INPUT
    assert "must be unique" in caplog.text
    assert main(["run", "--scenario", BAU, "--out", str(tmp_path), "--years", "2010:2040"]) == EXIT_INPUT
    assert "before the calibration base year" in caplog.text
    with pytest.raises(SystemExit) as excinfo:
        main(["run", "--scenario", BAU, "--out", str(tmp_path), "--years", "soon"])
    assert excinfo.value.code == 2


def test_compare_errors(tmp_path):
    """Test trajectories from another calibration or a single file are rejected."""
    calibration = parse_calibration(REFERENCE_CALIBRATION)
    assert main(["run", "--scenario", BAU, "--out", str(tmp_path), "--years", "2020:2035"]) == EXIT_OK
    bau = load_trajectory(tmp_path / "bau.traj")
    assert bau.fingerprint == calibration.fingerprint

    foreign = save_trajectory(replace(bau, scenario="foreign", fingerprint="f" * 64), tmp_path / "foreign")
    assert main(["compare", "--out", str(tmp_path), str(tmp_path / "bau.traj"), str(foreign)]) == EXIT_INPUT
    assert main(["compare", "--out", str(tmp_path), str(tmp_path / "bau.traj")]) == EXIT_INPUT


def test_simulation_error(tmp_path, caplog):
    """Test a failing simulation exits with code 3 and names the year."""
    args = ["run", "--calibration", str(dir_path / "zero_target_bundle"), "--scenario", CARBON_TAX]
    assert main([*args, "--out", str(tmp_path), "--years", "2020:2045"]) == EXIT_SIMULATION
    assert "[scenario carbon_tax, year 2040]" in caplog.text


def test_parallel_runs():
    """Test scenarios simulated in worker processes match serial runs."""
    calibration = parse_calibration(REFERENCE_CALIBRATION)
    scenarios = [load_scenario(Path(path)).with_horizon(2020, 2035) for path in (BAU, WTR)]
    serial = simulate_all(scenarios, calibration)
    parallel = simulate_all(scenarios, calibration, jobs=2)
    assert [t.scenario for t in parallel] == ["bau", "wtr"]
    for left, right in zip(serial, parallel, strict=True):
        pd.testing.assert_frame_equal(left.frame(), right.frame())
