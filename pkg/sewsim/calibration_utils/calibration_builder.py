"""Load a calibration bundle.

A bundle is a directory with the following files:

    io_matrix.csv      technical coefficients, rows are supplying sectors
    final_demand.csv   base-year levels and sector shares of each final demand component
    labour.csv         paid hours per EUR of output by sector
    cohorts.csv        population, participation and base employment share per (gender, age group, skill)
    time_use.csv       weekly hours per (employment status, gender)
    intensities.csv    environmental pressure per EUR by sector
    unit_costs.csv     unit cost of each environmental ISEW component
    params.json        scalar parameters and year series

An optional calibration.toml remaps file names, extends another bundle and overrides parameters:

```toml
[bundle]
extend = "../reference"
io_matrix = "io_2030.csv"

# Rendered into params.json, which may be a jinja2 template
[mappings]
growth = 0.01

# Deep-merged into params.json
[overrides.economy]
productivity_growth = 0.0
```

Files missing from a bundle are taken from the bundle it extends.

Example:
    calibration = CalibrationBuilder("my_bundle").load_all().to_calibration()
    # Or with an explicit file
    calibration = (
        CalibrationBuilder("my_bundle")
        .load_all()
        .io_matrix("alternative/io_matrix.csv")
        .to_calibration()
    )
"""

import copy
import hashlib
import json
import logging
from dataclasses import InitVar, dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import ValidationError

from sewsim.calibration_utils.components import (
    Component,
    ComponentMode,
    build_component_modes,
    component_mode,
    parse_component,
)
from sewsim.calibration_utils.file_loaders import load_csv, load_json, load_toml, raise_if_file_not_found
from sewsim.calibration_utils.parameters import CalibrationParameters, config_error_from_validation
from sewsim.calibration_utils.series import Series
from sewsim.errors import ConfigError, RangeError, SchemaError, SingularEconomyError
from sewsim.model.demographics import (
    TIME_USE_CATEGORIES,
    CohortGrid,
    CohortSchedule,
    EmploymentStatus,
    TimeUseProfile,
)
from sewsim.model.doughnut import SIMULATED_OUTCOMES, SOCIAL_OUTCOMES
from sewsim.model.economy import Bracket, FiscalSchedule, spectral_radius
from sewsim.model.environment import PRESSURES, Basis, Boundary, IntensityTable, Pressure
from sewsim.model.isew import UnitCost

LOGGER = logging.getLogger(__name__)

MANIFEST = "calibration.toml"
FINAL_DEMAND_COMPONENTS = ("consumption", "government", "investment", "exports")
HOURS_PER_WEEK = 168.0


class ConfigSections(str, Enum):
    """Sections and bundle files of calibration.toml."""

    BUNDLE = "bundle"
    EXTEND = "extend"
    MAPPINGS = "mappings"
    OVERRIDES = "overrides"
    IO_MATRIX = "io_matrix"
    FINAL_DEMAND = "final_demand"
    LABOUR = "labour"
    COHORTS = "cohorts"
    TIME_USE = "time_use"
    INTENSITIES = "intensities"
    UNIT_COSTS = "unit_costs"
    PARAMS = "params"


BUNDLE_FILES = {
    ConfigSections.IO_MATRIX: "io_matrix.csv",
    ConfigSections.FINAL_DEMAND: "final_demand.csv",
    ConfigSections.LABOUR: "labour.csv",
    ConfigSections.COHORTS: "cohorts.csv",
    ConfigSections.TIME_USE: "time_use.csv",
    ConfigSections.INTENSITIES: "intensities.csv",
    ConfigSections.UNIT_COSTS: "unit_costs.csv",
    ConfigSections.PARAMS: "params.json",
}


def load_calibration_toml(bundle_path: Path) -> dict:
    """Load calibration.toml from a bundle directory.

    Args:
        bundle_path: The bundle directory or the manifest itself.

    Returns:
        Loaded manifest or an empty dict if the bundle has none.
    """
    if bundle_path.is_file() or (bundle_path := bundle_path / MANIFEST).exists():
        return load_toml(bundle_path)
    return {}


def get_missing_files(files: dict) -> list[ConfigSections]:
    """Bundle files not resolved yet."""
    return [section for section in BUNDLE_FILES if files.get(section) is None]


def merge_overrides(base: dict, overrides: dict) -> dict:
    """Recursively merge ``overrides`` into a copy of ``base``."""
    merged = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_overrides(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def extend_configs(bundle_path: Path, configs: dict, _visited: frozenset[Path] = frozenset()) -> dict:
    """Resolve the bundle files of a manifest, following ``extend`` recursively.

    Args:
        bundle_path: Directory of the bundle the manifest belongs to.
        configs: The manifest loaded from calibration.toml.

    Returns:
        The manifest with absolute file paths for every file found in the bundle or one of its bases,
        and with the overrides and mappings of the bases merged under the local ones.
    """
    bundle_section = configs.get(ConfigSections.BUNDLE, {})
    files = {}
    for key, value in bundle_section.items():
        if key == ConfigSections.EXTEND:
            continue
        if key not in {section.value for section in BUNDLE_FILES}:
            msg = f"{bundle_path / MANIFEST}: unknown bundle file '{key}'"
            raise SchemaError(msg, field=f"{MANIFEST}:bundle.{key}")
        files[ConfigSections(key)] = bundle_path / value
    for section, file_name in BUNDLE_FILES.items():
        if section not in files and (bundle_path / file_name).exists():
            files[section] = bundle_path / file_name
    extended = {
        ConfigSections.BUNDLE: files,
        ConfigSections.MAPPINGS: configs.get(ConfigSections.MAPPINGS, {}),
        ConfigSections.OVERRIDES: configs.get(ConfigSections.OVERRIDES, {}),
    }
    if (base := bundle_section.get(ConfigSections.EXTEND)) is None:
        return extended
    base_path = (bundle_path / base).resolve()
    if base_path in (visited := _visited | {bundle_path.resolve()}):
        msg = f"{bundle_path / MANIFEST}: bundle extends itself through {base_path}"
        raise ConfigError(msg)
    if not base_path.is_dir():
        msg = f"Bundle {base_path} extended by {bundle_path} doesn't exist"
        raise FileNotFoundError(msg)
    base_configs = extend_configs(base_path, load_calibration_toml(base_path), visited)
    for section in get_missing_files(files):
        if (base_file := base_configs[ConfigSections.BUNDLE].get(section)) is not None:
            files[section] = base_file
    for section in (ConfigSections.MAPPINGS, ConfigSections.OVERRIDES):
        extended[section] = merge_overrides(base_configs[section], extended[section])
    return extended


@dataclass(frozen=True, slots=True)
class Calibration:
    """A validated calibration bundle; arrays are read-only."""

    bundle_path: Path
    sectors: tuple[str, ...]
    technical_coefficients: np.ndarray
    base_final_demand: dict[str, float]
    final_demand_shares: dict[str, np.ndarray]
    labour_coefficients: np.ndarray
    cohorts: CohortGrid
    schedule: CohortSchedule
    time_use: dict[tuple[EmploymentStatus, str], TimeUseProfile]
    intensities: IntensityTable
    unit_costs: dict[Component, UnitCost]
    boundaries: dict[Pressure, Boundary]
    fiscal: FiscalSchedule
    params: CalibrationParameters
    series: dict[str, Series]
    component_modes: dict[Component, ComponentMode]
    fingerprint: str

    @property
    def base_year(self) -> int:
        """First year of every simulation."""
        return self.params.base_year

    def productivity(self, year: int) -> float:
        """Labour productivity index, 1 in the base year."""
        return (1.0 + self.params.economy.productivity_growth) ** (year - self.base_year)

    def component_mode(self, component_id: str | Component) -> ComponentMode:
        """Integration mode of an ISEW component."""
        return component_mode(component_id, self.component_modes)


def _read_only(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


def _numeric(table: pd.DataFrame, column: str, file_name: str) -> np.ndarray:
    """A column as floats, rejecting text and empty cells."""
    try:
        values = pd.to_numeric(table[column], errors="raise").to_numpy(dtype=float)
    except (ValueError, TypeError) as e:
        msg = f"{file_name}: column '{column}' must be numeric"
        raise SchemaError(msg, field=f"{file_name}:{column}") from e
    if np.isnan(values).any():
        msg = f"{file_name}: column '{column}' has empty cells"
        raise SchemaError(msg, field=f"{file_name}:{column}")
    return values


def _check_range(values: np.ndarray, field: str, low: float, high: float, *, high_inclusive: bool = True) -> None:
    above = values > high if high_inclusive else values >= high
    if np.any(values < low) or np.any(above):
        bound = f"[{low}, {high}{']' if high_inclusive else ')'}"
        msg = f"{field}: values must lie in {bound}"
        raise RangeError(msg, field=field, bound=bound)


def _labels(table: pd.DataFrame, column: str) -> list[str]:
    return [str(label).strip() for label in table[column]]


def parse_io_matrix(table: pd.DataFrame, file_name: str = "io_matrix.csv") -> tuple[tuple[str, ...], np.ndarray]:
    """Sectors and technical coefficients.

    Raises:
        SingularEconomyError: The matrix has spectral radius >= 1.
    """
    sectors = tuple(_labels(table, "sector"))
    if len(set(sectors)) != len(sectors) or sorted(sectors) != sorted(c for c in table.columns if c != "sector"):
        msg = f"{file_name}: row and column sectors differ"
        raise SchemaError(msg, field=f"{file_name}:sector")
    coefficients = np.column_stack([_numeric(table, sector, file_name) for sector in sectors])
    _check_range(coefficients, f"{file_name}:coefficients", 0.0, 1.0)
    if (radius := spectral_radius(coefficients)) >= 1.0:
        msg = f"{file_name}: technical-coefficient matrix has spectral radius {radius:.6g} >= 1"
        raise SingularEconomyError(msg)
    return sectors, coefficients


def parse_final_demand(
    table: pd.DataFrame,
    sectors: tuple[str, ...],
    file_name: str = "final_demand.csv",
) -> tuple[dict[str, float], dict[str, np.ndarray]]:
    """Base-year levels and sector shares of consumption, government, investment and exports."""
    components = _labels(table, "component")
    if sorted(components) != sorted(FINAL_DEMAND_COMPONENTS):
        msg = f"{file_name}: expected one row per {', '.join(FINAL_DEMAND_COMPONENTS)}"
        raise SchemaError(msg, field=f"{file_name}:component")
    levels = _numeric(table, "base_level", file_name)
    _check_range(levels, f"{file_name}:base_level", 0.0, np.inf)
    shares = np.column_stack([_numeric(table, sector, file_name) for sector in sectors])
    for component, row in zip(components, shares, strict=True):
        if np.any(row < 0) or abs(row.sum() - 1.0) > 1e-6:
            msg = f"{file_name}: shares of {component} must be nonnegative and sum to 1"
            raise RangeError(msg, field=f"{file_name}:{component}", bound="sum 1")
    return (
        {component: float(level) for component, level in zip(components, levels, strict=True)},
        {component: _read_only(row) for component, row in zip(components, shares, strict=True)},
    )


def parse_labour(table: pd.DataFrame, sectors: tuple[str, ...], file_name: str = "labour.csv") -> np.ndarray:
    """Paid hours per EUR in sector order."""
    coefficients = dict(zip(_labels(table, "sector"), _numeric(table, "hours_per_eur", file_name), strict=True))
    if missing := [sector for sector in sectors if sector not in coefficients]:
        msg = f"{file_name}: no labour coefficient for {', '.join(missing)}"
        raise SchemaError(msg, field=f"{file_name}:{missing[0]}")
    values = np.array([coefficients[sector] for sector in sectors])
    _check_range(values, f"{file_name}:hours_per_eur", 0.0, np.inf)
    return values


def parse_cohorts(table: pd.DataFrame, file_name: str = "cohorts.csv") -> CohortGrid:
    """Population grid in first-appearance order of genders, age groups and skills."""
    keys = list(zip(_labels(table, "gender"), _labels(table, "age_group"), _labels(table, "skill"), strict=True))
    genders, age_groups, skills = (tuple(dict.fromkeys(key[i] for key in keys)) for i in range(3))
    shape = (len(genders), len(age_groups), len(skills))
    if len(set(keys)) != len(keys) or len(keys) != np.prod(shape):
        msg = f"{file_name}: expected exactly one row per (gender, age_group, skill)"
        raise SchemaError(msg, field=f"{file_name}:gender")
    grids = {}
    for column, high in (("population", np.inf), ("participation_rate", 1.0), ("employment_share", 1.0)):
        values = _numeric(table, column, file_name)
        _check_range(values, f"{file_name}:{column}", 0.0, high)
        grid = np.zeros(shape)
        for (gender, age_group, skill), value in zip(keys, values, strict=True):
            grid[genders.index(gender), age_groups.index(age_group), skills.index(skill)] = value
        grids[column] = grid
    return CohortGrid(
        genders=genders,
        age_groups=age_groups,
        skills=skills,
        population=grids["population"],
        participation_rate=grids["participation_rate"],
        employment_share=grids["employment_share"],
    )


def parse_time_use(
    table: pd.DataFrame,
    genders: tuple[str, ...],
    file_name: str = "time_use.csv",
) -> dict[tuple[EmploymentStatus, str], TimeUseProfile]:
    """Weekly time-use profiles; every row must add up to 168 hours."""
    hours = {category: _numeric(table, category, file_name) for category in TIME_USE_CATEGORIES}
    profiles = {}
    for index, (status_id, gender) in enumerate(zip(_labels(table, "status"), _labels(table, "gender"), strict=True)):
        try:
            status = EmploymentStatus(status_id)
        except ValueError as e:
            msg = f"{file_name}: unknown employment status '{status_id}'"
            raise SchemaError(msg, field=f"{file_name}:status") from e
        row = {category: float(values[index]) for category, values in hours.items()}
        field_name = f"{file_name}:{status_id}/{gender}"
        if any(value < 0 for value in row.values()) or abs(sum(row.values()) - HOURS_PER_WEEK) > 1e-9:
            msg = f"{field_name}: hours must be nonnegative and sum to {HOURS_PER_WEEK:g}"
            raise RangeError(msg, field=field_name, bound=f"sum {HOURS_PER_WEEK:g}")
        profiles[status, gender] = TimeUseProfile(status=status, gender=gender, **row)
    if missing := [f"{status.value}/{gender}" for status in EmploymentStatus for gender in genders if (status, gender) not in profiles]:
        msg = f"{file_name}: no profile for {', '.join(missing)}"
        raise SchemaError(msg, field=f"{file_name}:{missing[0]}")
    return profiles


def parse_intensities(
    table: pd.DataFrame,
    sectors: tuple[str, ...],
    base_year: int,
    file_name: str = "intensities.csv",
) -> IntensityTable:
    """Intensity table with one row per pressure, in Pressure order."""
    rows = _labels(table, "pressure")
    if sorted(rows) != sorted(pressure.value for pressure in PRESSURES):
        msg = f"{file_name}: expected one row per pressure ({', '.join(p.value for p in PRESSURES)})"
        raise SchemaError(msg, field=f"{file_name}:pressure")
    order = [rows.index(pressure.value) for pressure in PRESSURES]
    intensities = np.column_stack([_numeric(table, sector, file_name) for sector in sectors])[order]
    decline_rates = _numeric(table, "decline_rate", file_name)[order]
    import_intensities = _numeric(table, "import_intensity", file_name)[order]
    _check_range(intensities, f"{file_name}:intensity", 0.0, np.inf)
    _check_range(import_intensities, f"{file_name}:import_intensity", 0.0, np.inf)
    _check_range(decline_rates, f"{file_name}:decline_rate", 0.0, 1.0, high_inclusive=False)
    return IntensityTable(
        intensities=_read_only(intensities),
        decline_rates=_read_only(decline_rates),
        import_intensities=_read_only(import_intensities),
        units=tuple(_labels(table, "unit")[i] for i in order),
        base_year=base_year,
    )


def parse_unit_costs(
    table: pd.DataFrame,
    series: dict[str, Series],
    file_name: str = "unit_costs.csv",
) -> dict[Component, UnitCost]:
    """Unit cost per environmental component."""
    eur_per_unit = _numeric(table, "eur_per_unit", file_name)
    growth = _numeric(table, "annual_growth", file_name)
    _check_range(eur_per_unit, f"{file_name}:eur_per_unit", 0.0, np.inf)
    _check_range(growth, f"{file_name}:annual_growth", -1.0, 1.0)
    unit_costs = {}
    for index, row in enumerate(table.itertuples(index=False)):
        component = parse_component(str(row.component).strip())
        try:
            pressure = Pressure(str(row.pressure).strip())
        except ValueError as e:
            msg = f"{file_name}: unknown pressure '{row.pressure}'"
            raise SchemaError(msg, field=f"{file_name}:pressure") from e
        share = None
        if not pd.isna(share_id := row.share_series) and (share_id := str(share_id).strip()):
            if share_id not in series:
                msg = f"{file_name}: unknown series '{share_id}' for {component.value}"
                raise RangeError(msg, field=f"{file_name}:{component.value}.share_series", bound="key of params.json series")
            share = series[share_id]
        unit_costs[component] = UnitCost(component, pressure, float(eur_per_unit[index]), float(growth[index]), share)
    return unit_costs


def parse_params(data: dict, source: str = "params.json") -> CalibrationParameters:
    """Validate the decoded params.json."""
    try:
        return CalibrationParameters.model_validate(data)
    except ValidationError as e:
        raise config_error_from_validation(e, source) from e


def _check_keys(keys: object, expected: tuple[str, ...], field: str) -> None:
    if sorted(keys) != sorted(expected):
        msg = f"params.json:{field}: expected keys {', '.join(expected)}"
        raise SchemaError(msg, field=f"params.json:{field}")


def cohort_schedule(params: CalibrationParameters, grid: CohortGrid) -> CohortSchedule:
    """Ageing schedule of the population grid."""
    demography = params.demography
    _check_keys(demography.survival, grid.age_groups, "demography.survival")
    _check_keys(demography.promotion, grid.age_groups, "demography.promotion")
    _check_keys(demography.birth_gender_shares, grid.genders, "demography.birth_gender_shares")
    _check_keys(demography.birth_skill_shares, grid.skills, "demography.birth_skill_shares")
    return CohortSchedule(
        survival=_read_only([demography.survival[band] for band in grid.age_groups]),
        promotion=_read_only([demography.promotion[band] for band in grid.age_groups]),
        births=Series.from_mapping(demography.births) if demography.births else Series.constant(0.0),
        birth_shares=_read_only(
            np.outer(
                [demography.birth_gender_shares[gender] for gender in grid.genders],
                [demography.birth_skill_shares[skill] for skill in grid.skills],
            ),
        ),
    )


def _check_positive_incomes(params: CalibrationParameters) -> None:
    """At an inequality aversion of 1 or more every income group must consume something."""
    if (epsilon := params.isew.atkinson_epsilon) < 1.0:
        return
    fiscal = params.fiscal
    shares = {"fiscal.benefit_share_unemployed": fiscal.benefit_share_unemployed, "fiscal.benefit_share_olf": fiscal.benefit_share_olf}
    shares |= {f"households.propensities.{i}": value for i, value in enumerate(params.households.propensities)}
    for name, value in shares.items():
        if value <= 0.0:
            msg = f"params.json:{name} must be > 0 when isew.atkinson_epsilon is {epsilon:g} >= 1"
            raise RangeError(msg, field=f"params.json:{name}", bound="> 0")


def check_consistency(params: CalibrationParameters, grid: CohortGrid) -> None:
    """Cross-file checks between params.json and the tables."""
    _check_keys(params.wages.skill_factors, grid.skills, "wages.skill_factors")
    if unknown := [band for band in params.fiscal.pension_age_groups if band not in grid.age_groups]:
        msg = f"params.json:fiscal.pension_age_groups: unknown age group {unknown[0]}"
        raise SchemaError(msg, field="params.json:fiscal.pension_age_groups")
    if unknown := [name for name in params.boundaries if name not in {p.value for p in PRESSURES}]:
        msg = f"params.json:boundaries: unknown pressure {unknown[0]}"
        raise SchemaError(msg, field=f"params.json:boundaries.{unknown[0]}")
    if missing := [p.value for p in PRESSURES if p.value not in params.boundaries]:
        msg = f"params.json:boundaries: no boundary for {missing[0]}"
        raise SchemaError(msg, field=f"params.json:boundaries.{missing[0]}")
    _check_positive_incomes(params)
    constants = [outcome for outcome in SOCIAL_OUTCOMES if outcome not in SIMULATED_OUTCOMES]
    if unknown := [name for name in params.thresholds.constant_outcomes if name not in constants]:
        msg = f"params.json:thresholds.constant_outcomes: {unknown[0]} isn't a constant social outcome"
        raise SchemaError(msg, field=f"params.json:thresholds.constant_outcomes.{unknown[0]}")
    if missing := [name for name in constants if name not in params.thresholds.constant_outcomes]:
        msg = f"params.json:thresholds.constant_outcomes: no value for {missing[0]}"
        raise SchemaError(msg, field=f"params.json:thresholds.constant_outcomes.{missing[0]}")


def calibration_fingerprint(tables: dict[ConfigSections, pd.DataFrame], params: CalibrationParameters) -> str:
    """SHA-256 over the canonical JSON form of every loaded input."""
    payload = {section.value: table.to_json(orient="split", double_precision=15) for section, table in tables.items()}
    payload[ConfigSections.PARAMS.value] = params.model_dump(mode="json")
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()


@dataclass(slots=True)
class ConfigEntry:
    """A bundle file and the mappings it is rendered with."""

    path: Path
    mappings: dict = field(default_factory=dict)


@dataclass(slots=True)
class CalibrationBuilder:
    """A class that implements the builder pattern to create a Calibration from a bundle directory."""

    bundle: InitVar[Path | str] = None
    bundle_path: Path | None = None
    _entries: dict[ConfigSections, ConfigEntry] = field(default_factory=dict)
    _default_configs: dict = field(default_factory=dict)

    def __post_init__(self, bundle: Path | str) -> None:
        """Constructor.

        Args:
            bundle: Path to the bundle directory.
        """
        self.bundle_path = Path(bundle)
        if not self.bundle_path.is_dir():
            msg = f"Calibration bundle {self.bundle_path} doesn't exist"
            raise FileNotFoundError(msg)
        self._default_configs = extend_configs(self.bundle_path, load_calibration_toml(self.bundle_path))

    def _entry(self, section: ConfigSections, file_path: str | Path | None, mappings: dict | None = None) -> ConfigEntry:
        """Resolve a bundle file from an explicit path or the manifest."""
        if file_path is not None:
            path = self.bundle_path / file_path
        else:
            path = self._default_configs[ConfigSections.BUNDLE].get(section, self.bundle_path / BUNDLE_FILES[section])
        raise_if_file_not_found(path)
        return ConfigEntry(path=path, mappings=mappings or {})

    def io_matrix(self, file_path: str | Path | None = None) -> "CalibrationBuilder":
        """Load the technical coefficients.

        Args:
            file_path: Absolute or relative path to the file (w.r.t. the bundle directory).

        Returns:
            Instance of CalibrationBuilder with io_matrix loaded.
        """
        self._entries[ConfigSections.IO_MATRIX] = self._entry(ConfigSections.IO_MATRIX, file_path)
        return self

    def final_demand(self, file_path: str | Path | None = None) -> "CalibrationBuilder":
        """Load the base-year final demand."""
        self._entries[ConfigSections.FINAL_DEMAND] = self._entry(ConfigSections.FINAL_DEMAND, file_path)
        return self

    def labour(self, file_path: str | Path | None = None) -> "CalibrationBuilder":
        """Load the labour coefficients."""
        self._entries[ConfigSections.LABOUR] = self._entry(ConfigSections.LABOUR, file_path)
        return self

    def cohorts(self, file_path: str | Path | None = None) -> "CalibrationBuilder":
        """Load the base-year population grid."""
        self._entries[ConfigSections.COHORTS] = self._entry(ConfigSections.COHORTS, file_path)
        return self

    def time_use(self, file_path: str | Path | None = None) -> "CalibrationBuilder":
        """Load the time-use profiles."""
        self._entries[ConfigSections.TIME_USE] = self._entry(ConfigSections.TIME_USE, file_path)
        return self

    def intensities(self, file_path: str | Path | None = None) -> "CalibrationBuilder":
        """Load the environmental intensities."""
        self._entries[ConfigSections.INTENSITIES] = self._entry(ConfigSections.INTENSITIES, file_path)
        return self

    def unit_costs(self, file_path: str | Path | None = None) -> "CalibrationBuilder":
        """Load the environmental unit costs."""
        self._entries[ConfigSections.UNIT_COSTS] = self._entry(ConfigSections.UNIT_COSTS, file_path)
        return self

    def params(self, file_path: str | Path | None = None, *, mappings: dict | None = None) -> "CalibrationBuilder":
        """Load params.json.

        Args:
            file_path: Absolute or relative path to the file (w.r.t. the bundle directory).
            mappings: Mappings params.json is rendered with, defaults to the manifest's [mappings].

        Returns:
            Instance of CalibrationBuilder with params loaded.
        """
        self._entries[ConfigSections.PARAMS] = self._entry(
            ConfigSections.PARAMS,
            file_path,
            mappings or self._default_configs[ConfigSections.MAPPINGS],
        )
        return self

    def load_all(self) -> "CalibrationBuilder":
        """Load every bundle file."""
        for section in BUNDLE_FILES:
            match section:
                case ConfigSections.IO_MATRIX:
                    self.io_matrix()
                case ConfigSections.FINAL_DEMAND:
                    self.final_demand()
                case ConfigSections.LABOUR:
                    self.labour()
                case ConfigSections.COHORTS:
                    self.cohorts()
                case ConfigSections.TIME_USE:
                    self.time_use()
                case ConfigSections.INTENSITIES:
                    self.intensities()
                case ConfigSections.UNIT_COSTS:
                    self.unit_costs()
                case ConfigSections.PARAMS:
                    self.params()
        return self

    def to_calibration(self) -> Calibration:
        """Parse and validate the loaded files.

        Returns:
            A frozen Calibration.
        """
        if missing := get_missing_files(self._entries):
            msg = f"Bundle files not loaded: {', '.join(section.value for section in missing)}. Call load_all() or load them explicitly."
            raise RuntimeError(msg)
        columns = {
            ConfigSections.IO_MATRIX: ["sector"],
            ConfigSections.FINAL_DEMAND: ["component", "base_level"],
            ConfigSections.LABOUR: ["sector", "hours_per_eur"],
            ConfigSections.COHORTS: ["gender", "age_group", "skill", "population", "participation_rate", "employment_share"],
            ConfigSections.TIME_USE: ["status", "gender", *TIME_USE_CATEGORIES],
            ConfigSections.INTENSITIES: ["pressure", "unit", "decline_rate", "import_intensity"],
            ConfigSections.UNIT_COSTS: ["component", "pressure", "eur_per_unit", "annual_growth", "share_series"],
        }
        tables = {section: load_csv(self._entries[section].path, required) for section, required in columns.items()}
        params_entry = self._entries[ConfigSections.PARAMS]
        params = parse_params(
            merge_overrides(
                load_json(params_entry.path, params_entry.mappings),
                self._default_configs[ConfigSections.OVERRIDES],
            ),
            params_entry.path.name,
        )
        series = {name: Series.from_mapping(knots) for name, knots in params.series.items()}

        def name(section: ConfigSections) -> str:
            return self._entries[section].path.name

        sectors, coefficients = parse_io_matrix(tables[ConfigSections.IO_MATRIX], name(ConfigSections.IO_MATRIX))
        if missing := [sector for sector in sectors if sector not in tables[ConfigSections.FINAL_DEMAND].columns]:
            msg = f"{name(ConfigSections.FINAL_DEMAND)}: missing column(s) {', '.join(missing)}"
            raise SchemaError(msg, field=f"{name(ConfigSections.FINAL_DEMAND)}:{missing[0]}")
        levels, shares = parse_final_demand(tables[ConfigSections.FINAL_DEMAND], sectors, name(ConfigSections.FINAL_DEMAND))
        grid = parse_cohorts(tables[ConfigSections.COHORTS], name(ConfigSections.COHORTS))
        check_consistency(params, grid)
        isew = params.isew
        overrides = {parse_component(component): series[ref] for component, ref in params.component_overrides.items()}
        return Calibration(
            bundle_path=self.bundle_path,
            sectors=sectors,
            technical_coefficients=_read_only(coefficients),
            base_final_demand=levels,
            final_demand_shares=shares,
            labour_coefficients=_read_only(parse_labour(tables[ConfigSections.LABOUR], sectors, name(ConfigSections.LABOUR))),
            cohorts=grid,
            schedule=cohort_schedule(params, grid),
            time_use=parse_time_use(tables[ConfigSections.TIME_USE], grid.genders, name(ConfigSections.TIME_USE)),
            intensities=parse_intensities(
                tables[ConfigSections.INTENSITIES],
                sectors,
                params.base_year,
                name(ConfigSections.INTENSITIES),
            ),
            unit_costs=parse_unit_costs(tables[ConfigSections.UNIT_COSTS], series, name(ConfigSections.UNIT_COSTS)),
            boundaries={
                Pressure(pressure): Boundary(boundary.per_capita_limit, Basis(boundary.basis))
                for pressure, boundary in params.boundaries.items()
            },
            fiscal=FiscalSchedule(
                brackets=tuple(Bracket(b.lower_bound, b.marginal_rate) for b in params.fiscal.brackets),
                benefit_rate_unemployed=params.fiscal.benefit_share_unemployed,
                benefit_rate_olf=params.fiscal.benefit_share_olf,
                pension_rate=params.fiscal.pension_share,
            ),
            params=params,
            series=series,
            component_modes=build_component_modes(
                {
                    Component.DEFENSIVE_EXPENDITURE: (
                        isew.defensive_share_of_consumption.share,
                        isew.defensive_share_of_consumption.drift,
                    ),
                    Component.SHADOW_ECONOMY: (isew.shadow_share_of_gdp.share, isew.shadow_share_of_gdp.drift),
                },
                overrides,
            ),
            fingerprint=calibration_fingerprint(tables, params),
        )


def parse_calibration(bundle_path: Path | str) -> Calibration:
    """Load and validate every file of a calibration bundle."""
    calibration = CalibrationBuilder(bundle_path).load_all().to_calibration()
    LOGGER.debug(f"Loaded calibration {bundle_path} ({calibration.fingerprint[:12]})")
    return calibration
