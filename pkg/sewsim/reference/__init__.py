"""Reference calibration bundle and the five reference scenarios."""

from pathlib import Path

REFERENCE_CALIBRATION = Path(__file__).parent.absolute() / "calibration"
REFERENCE_SCENARIOS = Path(__file__).parent.absolute() / "scenarios"
SCENARIO_NAMES = ("bau", "carbon_tax", "redistribution", "wtr", "all_three")
