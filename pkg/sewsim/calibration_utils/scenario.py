"""Scenario documents: policy switches, schedules and controller parameters of one run.

A scenario without policy blocks is business-as-usual:

```json
{"name": "bau", "horizon": {"start_year": 2020, "end_year": 2070}}
```

Optional blocks switch on the policies:

```json
{
  "name": "all_three",
  "horizon": {"start_year": 2020, "end_year": 2070},
  "carbon_tax": {"tau_max_eur_per_tonne": 200, "adjustment_speed": 0.2, "target_series_ref": "co2_target", "r_max": 0.6},
  "redistribution": {"final_low_rate": 0.13, "final_high_rate": 0.75, "benefit_multiplier_olf": 2.0, "benefit_multiplier_unemployed": 1.3},
  "wtr": {"hours_reduction": 0.15},
  "phase_window": {"start": 2030, "end": 2035}
}
```

Scenario files are rendered with jinja2 before parsing, so a single template can describe a family of runs.
"""

import json
from pathlib import Path

from pydantic import Field, ValidationError, model_validator
from pydantic_core import PydanticCustomError

from sewsim.calibration_utils.file_loaders import parse_json, raise_if_file_not_found, render_template
from sewsim.calibration_utils.parameters import FrozenModel, config_error_from_validation


class Horizon(FrozenModel):
    """First and last simulated year (inclusive)."""

    start_year: int = Field(ge=1900, le=2200)
    end_year: int = Field(ge=1900, le=2200)

    @model_validator(mode="after")
    def ordered(self) -> "Horizon":
        """start_year < end_year."""
        if self.start_year >= self.end_year:
            raise PydanticCustomError(
                "range",
                "start_year must be before end_year",
                {"field": "start_year", "bound": "< end_year"},
            )
        return self

    @property
    def years(self) -> range:
        """Simulated years."""
        return range(self.start_year, self.end_year + 1)


class PhaseWindow(FrozenModel):
    """Years over which the policies are phased in."""

    start: int = 2030
    end: int = 2035

    @model_validator(mode="after")
    def ordered(self) -> "PhaseWindow":
        """start < end."""
        if self.start >= self.end:
            raise PydanticCustomError("range", "start must be before end", {"field": "start", "bound": "< end"})
        return self


class CarbonTaxParams(FrozenModel):
    """Carbon tax feedback controller.

    A zero maximum rate leaves the controller inert.
    """

    tau_max_eur_per_tonne: float = Field(200.0, ge=0.0)
    adjustment_speed: float = Field(0.2, gt=0.0, le=1.0)
    target_series_ref: str = "co2_target"
    r_max: float = Field(0.6, gt=0.0, le=1.0)


class RedistributionParams(FrozenModel):
    """Final tax rates and benefit multipliers reached at the end of the phase-in."""

    final_low_rate: float = Field(0.13, ge=0.0, lt=1.0)
    final_high_rate: float = Field(0.75, ge=0.0, lt=1.0)
    benefit_multiplier_olf: float = Field(2.0, ge=0.0)
    benefit_multiplier_unemployed: float = Field(1.3, ge=0.0)

    @model_validator(mode="after")
    def monotone(self) -> "RedistributionParams":
        """The final schedule must stay progressive."""
        if self.final_low_rate > self.final_high_rate:
            raise PydanticCustomError(
                "range",
                "final_low_rate must not exceed final_high_rate",
                {"field": "final_low_rate", "bound": "<= final_high_rate"},
            )
        return self


class WtrParams(FrozenModel):
    """Working-time reduction."""

    hours_reduction: float = Field(0.15, ge=0.0, lt=1.0)
    # Keep annual pay constant by raising the hourly wage with productivity
    wage_compensation: bool = False


class ScenarioSpec(FrozenModel):
    """A validated scenario."""

    name: str = Field(pattern=r"^[A-Za-z_][A-Za-z0-9_\-]*$", max_length=64)
    horizon: Horizon
    carbon_tax: CarbonTaxParams | None = None
    redistribution: RedistributionParams | None = None
    wtr: WtrParams | None = None
    phase_window: PhaseWindow = PhaseWindow()

    @model_validator(mode="after")
    def window_inside_horizon(self) -> "ScenarioSpec":
        """The phase window lies inside the horizon."""
        if not self.horizon.start_year <= self.phase_window.start < self.phase_window.end <= self.horizon.end_year:
            raise PydanticCustomError(
                "range",
                "phase window must lie inside the horizon",
                {"field": "phase_window", "bound": f"[{self.horizon.start_year}, {self.horizon.end_year}]"},
            )
        return self

    @property
    def is_business_as_usual(self) -> bool:
        """True when no policy block is present."""
        return self.carbon_tax is None and self.redistribution is None and self.wtr is None

    def with_horizon(self, start_year: int, end_year: int) -> "ScenarioSpec":
        """Copy of the scenario over another horizon, validated again."""
        data = self.model_dump()
        data["horizon"] = {"start_year": start_year, "end_year": end_year}
        return scenario_from_dict(data, source=self.name)


def scenario_from_dict(data: dict, source: str = "<scenario>") -> ScenarioSpec:
    """Validate a decoded scenario document."""
    try:
        return ScenarioSpec.model_validate(data)
    except ValidationError as e:
        raise config_error_from_validation(e, source) from e


def parse_scenario(text: str, source: str = "<scenario>") -> ScenarioSpec:
    """Parse and validate a scenario document.

    Args:
        text: UTF-8 JSON scenario document.
        source: Name used in error messages.

    Returns:
        The validated scenario.
    """
    return scenario_from_dict(parse_json(text, source), source)


def serialize_scenario(scenario: ScenarioSpec) -> str:
    """Serialize a scenario to a JSON document accepted by parse_scenario."""
    return json.dumps(scenario.model_dump(mode="json", exclude_none=True), indent=2, sort_keys=True) + "\n"


def load_scenario(file_path: Path, mappings: dict | None = None) -> ScenarioSpec:
    """Load a scenario file and render it with the given mappings."""
    raise_if_file_not_found(file_path)
    return parse_scenario(render_template(file_path, mappings or {}), str(file_path))
