#!/usr/bin/env python3

"""Run the five reference scenarios and print how they rank at the end of the horizon."""

import logging
import sys
from pathlib import Path

from sewsim.calibration_utils.calibration_builder import CalibrationBuilder
from sewsim.calibration_utils.scenario import load_scenario
from sewsim.model.engine import compare, run_scenario
from sewsim.reference import REFERENCE_CALIBRATION, REFERENCE_SCENARIOS, SCENARIO_NAMES
from sewsim.reporting import emit_comparison, emit_doughnut, emit_timeseries

dir_path = Path(__file__).parent.absolute()
out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else dir_path / "reference_outputs"

logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

calibration = CalibrationBuilder(REFERENCE_CALIBRATION).load_all().to_calibration()
print(f"Calibration {calibration.fingerprint[:12]}: {len(calibration.sectors)} sectors, base year {calibration.base_year}")

trajectories = []
for name in SCENARIO_NAMES:
    trajectory = run_scenario(load_scenario(REFERENCE_SCENARIOS / f"{name}.json"), calibration)
    emit_timeseries(trajectory, out_dir)
    emit_doughnut(trajectory, out_dir)
    trajectories.append(trajectory)

comparison = compare(trajectories)
emit_comparison(comparison, out_dir)

print(comparison.ranking.to_string(index=False))
last = {trajectory.scenario: trajectory.frame().iloc[-1] for trajectory in trajectories}
for name, values in last.items():
    overshot = [column.removesuffix("_overshoot_ratio") for column in values.index if column.endswith("_overshoot_ratio") and values[column] > 1.0]
    print(f"{name:>15}: ISEW(BCE) {values['isew_bce_per_capita']:9.1f}  ISEW(BCPA) {values['isew_bcpa_per_capita']:9.1f}  overshot: {', '.join(overshot) or '-'}")
