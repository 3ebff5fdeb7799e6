"""Output tables of simulated trajectories.

Every table is written as headered CSV (12 significant digits, rows sorted by year and variable)
or as a list of JSON records with the same columns.
"""

import json
import logging
from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import pandas as pd

from sewsim.calibration_utils.components import Component
from sewsim.calibration_utils.file_loaders import parse_json, raise_if_file_not_found
from sewsim.errors import SchemaError
from sewsim.model.doughnut import SIMULATED_OUTCOMES, SOCIAL_OUTCOMES
from sewsim.model.engine import Comparison, Trajectory, indexed_frame
from sewsim.model.environment import PRESSURES
from sewsim.model.isew import MEMBERSHIP, Variant

LOGGER = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"
TRAJECTORY_SUFFIX = ".traj"
ROW_COLUMNS = ["scenario", "year", "variable", "value", "unit"]

PRESSURE_UNITS = {
    "co2": "t",
    "nitrogen": "t",
    "air_pollutants": "t",
    "primary_energy": "GJ",
    "land_system": "ha",
}
UNITS = {
    "population": "persons",
    "labour_force": "persons",
    "employed": "persons",
    "unemployed": "persons",
    "unemployment_rate": "ratio",
    "hourly_wage": "EUR/h",
    "net_hourly_wage": "EUR/h",
    "paid_hours": "h/yr",
    "unpaid_hours": "h/yr",
    "hours_factor": "ratio",
    "atkinson_index": "index",
    "lowest_decile_disposable_income": "EUR/person/yr",
    "carbon_tax_rate": "EUR/t",
    "emission_reduction": "ratio",
}


class OutputFormat(str, Enum):
    """Supported table formats."""

    CSV = "csv"
    JSON = "json"


@dataclass(frozen=True, slots=True)
class OutputRow:
    """One reported value."""

    scenario: str
    year: int
    variable: str
    value: float
    unit: str


def unit_of(variable: str) -> str:
    """Unit of a reported variable."""
    if (unit := UNITS.get(variable)) is not None:
        return unit
    if variable.endswith("_per_capita"):
        return "EUR/person/yr"
    if variable.endswith("_overshoot_ratio") or variable in SOCIAL_OUTCOMES:
        return "ratio"
    for pressure, unit in PRESSURE_UNITS.items():
        if variable in (f"{pressure}_territorial", f"{pressure}_footprint"):
            return f"{unit}/yr"
    return "EUR/yr"


def output_rows(trajectory: Trajectory) -> list[OutputRow]:
    """Rows of a trajectory's values, sorted by (year, variable)."""
    rows = [
        OutputRow(trajectory.scenario, summary.year, variable, float(value), unit_of(variable))
        for summary in trajectory.summaries
        for variable, value in summary.values.items()
    ]
    return sorted(rows, key=lambda row: (row.year, row.variable))


def rows_frame(rows: Iterable[OutputRow]) -> pd.DataFrame:
    """Table with one row per OutputRow."""
    return pd.DataFrame.from_records(
        [(row.scenario, row.year, row.variable, row.value, row.unit) for row in rows],
        columns=ROW_COLUMNS,
    )


def _sorted(frame: pd.DataFrame, keys: list[str]) -> pd.DataFrame:
    return frame.sort_values(keys, kind="stable").reset_index(drop=True)


def timeseries_frame(trajectory: Trajectory) -> pd.DataFrame:
    """Level values in long format."""
    return rows_frame(output_rows(trajectory))


def indexed_timeseries_frame(trajectory: Trajectory) -> pd.DataFrame:
    """Values relative to the first recorded year (= 100); variables starting at zero are left out."""
    indexed = indexed_frame(trajectory.frame()).dropna(axis=1, how="any")
    long = indexed.rename_axis(index="year", columns="variable").stack().rename("value").reset_index()
    long.insert(0, "scenario", trajectory.scenario)
    long["unit"] = "index"
    return _sorted(long[ROW_COLUMNS], ["year", "variable"])


def doughnut_frame(trajectory: Trajectory) -> pd.DataFrame:
    """Boundary overshoot ratios and normalised social outcomes per year.

    A boundary is transgressed above 1, a social threshold is missed below 1.
    """
    records = []
    for summary in trajectory.summaries:
        for pressure in PRESSURES:
            if (ratio := summary.values.get(f"{pressure.value}_overshoot_ratio")) is None:
                continue
            records.append(
                (trajectory.scenario, summary.year, "boundary", pressure.value, ratio, ratio > 1.0, True),
            )
        for outcome in SOCIAL_OUTCOMES:
            if (value := summary.values.get(outcome)) is None:
                continue
            records.append(
                (trajectory.scenario, summary.year, "social", outcome, value, value < 1.0, outcome in SIMULATED_OUTCOMES),
            )
    frame = pd.DataFrame.from_records(
        records,
        columns=["scenario", "year", "dimension", "indicator", "value", "breached", "simulated"],
    )
    return _sorted(frame, ["year", "dimension", "indicator"])


def components_frame(trajectory: Trajectory) -> pd.DataFrame:
    """Every ledger component by year, variant and sign."""
    records = []
    for summary in trajectory.summaries:
        for key, value in summary.components.items():
            variant_id, component_id = key.split(":", maxsplit=1)
            variant, component = Variant(variant_id), Component(component_id)
            records.append(
                (
                    trajectory.scenario,
                    summary.year,
                    variant.value,
                    f"component:{component.value}",
                    MEMBERSHIP[variant][component].value,
                    float(value),
                    "EUR/yr",
                ),
            )
    frame = pd.DataFrame.from_records(
        records,
        columns=["scenario", "year", "variant", "variable", "sign", "value", "unit"],
    )
    return _sorted(frame, ["year", "variant", "variable"])


def write_table(frame: pd.DataFrame, path: Path, output_format: OutputFormat = OutputFormat.CSV) -> Path:
    """Write a table; the suffix of ``path`` is replaced by the format's.

    Returns:
        The written file.
    """
    path = path.with_suffix(f".{output_format.value}")
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        match output_format:
            case OutputFormat.CSV:
                frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
            case OutputFormat.JSON:
                path.write_text(
                    json.dumps(json.loads(frame.to_json(orient="records", double_precision=15)), indent=2) + "\n",
                    encoding="utf-8",
                )
    except OSError as e:
        msg = f"Can't write {path}: {e}"
        raise OSError(msg) from e
    LOGGER.debug(f"Wrote {path}")
    return path


def emit_timeseries(trajectory: Trajectory, out_dir: Path, output_format: OutputFormat = OutputFormat.CSV) -> list[Path]:
    """Write ``<scenario>_timeseries`` and ``<scenario>_timeseries_indexed`` into ``out_dir``."""
    return [
        write_table(timeseries_frame(trajectory), out_dir / f"{trajectory.scenario}_timeseries", output_format),
        write_table(indexed_timeseries_frame(trajectory), out_dir / f"{trajectory.scenario}_timeseries_indexed", output_format),
    ]


def emit_doughnut(trajectory: Trajectory, out_dir: Path, output_format: OutputFormat = OutputFormat.CSV) -> Path:
    """Write ``<scenario>_doughnut`` into ``out_dir``."""
    return write_table(doughnut_frame(trajectory), out_dir / f"{trajectory.scenario}_doughnut", output_format)


def emit_components(trajectory: Trajectory, out_dir: Path, output_format: OutputFormat = OutputFormat.CSV) -> Path:
    """Write ``<scenario>_isew_components`` into ``out_dir``."""
    return write_table(components_frame(trajectory), out_dir / f"{trajectory.scenario}_isew_components", output_format)


def emit_comparison(comparison: Comparison, out_dir: Path, output_format: OutputFormat = OutputFormat.CSV) -> list[Path]:
    """Write the comparison deltas, the end-of-horizon ranking and the indexed series."""
    return [
        write_table(_sorted(comparison.deltas, ["year", "variable"]), out_dir / "comparison", output_format),
        write_table(comparison.ranking, out_dir / "comparison_ranking", output_format),
        write_table(_sorted(comparison.indexed, ["year", "variable"]), out_dir / "comparison_indexed", output_format),
    ]


def save_trajectory(trajectory: Trajectory, path: Path) -> Path:
    """Save a trajectory as JSON next to the tables; the suffix becomes .traj."""
    path = path.with_suffix(TRAJECTORY_SUFFIX)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(trajectory.to_dict(), indent=2) + "\n", encoding="utf-8")
    return path


def load_trajectory(path: Path) -> Trajectory:
    """Load a trajectory written by save_trajectory."""
    raise_if_file_not_found(path)
    data = parse_json(path.read_text(encoding="utf-8"), str(path))
    try:
        return Trajectory.from_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        msg = f"{path}: not a trajectory file ({e})"
        raise SchemaError(msg, field=f"{path.name}:summaries") from e
