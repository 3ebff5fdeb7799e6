"""Schema of the scalar calibration parameters stored in params.json."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_core import PydanticCustomError

from sewsim.errors import ConfigError, RangeError, SchemaError

SCHEMA_ERROR_TYPES = {"missing", "extra_forbidden", "model_type", "dict_type", "list_type"}
BASELINE_RATES = (0.19, 0.47)


def config_error_from_validation(error: ValidationError, source: str) -> ConfigError:
    """Convert the first pydantic validation error into a SchemaError or RangeError.

    Args:
        error: The pydantic error.
        source: Name of the validated document, used as prefix of the field name.

    Returns:
        The converted error naming the offending field.
    """
    details = error.errors()[0]
    context = details.get("ctx") or {}
    location = ".".join(str(part) for part in details["loc"])
    if "field" in context:
        location = ".".join(filter(None, (location, str(context["field"]))))
    field = f"{source}:{location}" if location else source
    error_type = details["type"]
    msg = f"{field}: {details['msg']}"
    if (
        error_type in SCHEMA_ERROR_TYPES
        or error_type.endswith(("_type", "_parsing"))
        or error_type == "literal_error"
    ):
        return SchemaError(msg, field=field)
    bound = next(
        (f"{key} {context[key]}" for key in ("gt", "ge", "lt", "le", "min_length", "max_length", "bound") if key in context),
        None,
    )
    return RangeError(msg, field=field, bound=bound)


class FrozenModel(BaseModel):
    """Immutable model rejecting unknown keys."""

    model_config = ConfigDict(extra="forbid", frozen=True, validate_default=True)


class EconomyParameters(FrozenModel):
    """Macro closure parameters."""

    productivity_growth: float = Field(0.01, ge=-0.1, le=0.2)
    import_share: float = Field(0.25, ge=0.0, lt=1.0)
    exogenous_demand_growth: float = Field(0.003, ge=-0.1, le=0.2)
    base_weekly_hours: float = Field(38.0, gt=0.0, le=168.0)
    base_hourly_wage: float = Field(16.7, gt=0.0)
    social_contribution_rate: float = Field(0.22, ge=0.0, le=1.0)
    depreciation_rate: float = Field(0.02, ge=0.0, le=1.0)
    interest_rate: float = Field(0.01, ge=0.0, le=1.0)
    payout_ratio: float = Field(0.6, ge=0.0, le=1.0)
    investment_share: float = Field(0.25, ge=0.0, le=1.0)
    accelerator: float = Field(0.5, ge=0.0)
    solver_tolerance: float = Field(1e-10, gt=0.0, lt=1.0)
    solver_max_iterations: int = Field(10_000, gt=0)


class InitialStocks(FrozenModel):
    """Opening balance sheet of the base year (EUR)."""

    capital: float = Field(ge=0.0)
    firm_loans: float
    government_debt: float
    household_deposits: float
    foreign_position: float = 0.0


class WageParameters(FrozenModel):
    """Wage structure by skill and within-skill dispersion."""

    skill_factors: dict[str, float]
    dispersion_weights: tuple[float, ...]
    dispersion_multipliers: tuple[float, ...]

    @field_validator("skill_factors")
    @classmethod
    def positive_factors(cls, factors: dict[str, float]) -> dict[str, float]:
        """Skill factors must be positive."""
        if any(factor <= 0 for factor in factors.values()):
            msg = "skill factors must be > 0"
            raise ValueError(msg)
        return factors

    @model_validator(mode="after")
    def consistent_dispersion(self) -> "WageParameters":
        """Dispersion weights are a distribution over positive multipliers averaging 1."""
        if len(self.dispersion_weights) != len(self.dispersion_multipliers):
            raise PydanticCustomError(
                "range",
                "dispersion_weights and dispersion_multipliers differ in length",
                {"field": "dispersion_weights", "bound": "len(dispersion_multipliers)"},
            )
        if any(weight < 0 for weight in self.dispersion_weights) or abs(sum(self.dispersion_weights) - 1.0) > 1e-9:
            raise PydanticCustomError(
                "range",
                "dispersion_weights must be nonnegative and sum to 1",
                {"field": "dispersion_weights", "bound": "sum 1"},
            )
        mean = sum(w * m for w, m in zip(self.dispersion_weights, self.dispersion_multipliers, strict=True))
        # The wage bill paid by firms is the wage income households receive
        if any(multiplier <= 0 for multiplier in self.dispersion_multipliers) or abs(mean - 1.0) > 1e-9:
            raise PydanticCustomError(
                "range",
                "dispersion_multipliers must be > 0 with a weighted mean of 1",
                {"field": "dispersion_multipliers", "bound": "> 0, mean 1"},
            )
        return self


class BracketParameters(FrozenModel):
    """One marginal tax bracket."""

    lower_bound: float = Field(ge=0.0)
    marginal_rate: float = Field(ge=0.0, lt=1.0)


class FiscalParameters(FrozenModel):
    """Baseline tax brackets and benefit shares of the full-time equivalent wage."""

    brackets: tuple[BracketParameters, ...] = Field(min_length=1)
    benefit_share_unemployed: float = Field(0.30, ge=0.0)
    benefit_share_olf: float = Field(0.025, ge=0.0)
    pension_share: float = Field(0.5, ge=0.0)
    pension_age_groups: tuple[str, ...] = ()

    @model_validator(mode="after")
    def increasing_bounds(self) -> "FiscalParameters":
        """Lower bounds start at zero and strictly increase; the outer rates are the baseline 19% and 47%."""
        bounds = [bracket.lower_bound for bracket in self.brackets]
        if bounds[0] != 0.0 or any(b <= a for a, b in zip(bounds, bounds[1:], strict=False)):
            raise PydanticCustomError(
                "range",
                "bracket lower bounds must start at 0 and strictly increase",
                {"field": "brackets", "bound": "strictly increasing"},
            )
        lowest, highest = self.brackets[0].marginal_rate, self.brackets[-1].marginal_rate
        if abs(lowest - BASELINE_RATES[0]) > 1e-12 or abs(highest - BASELINE_RATES[1]) > 1e-12:
            raise PydanticCustomError(
                "range",
                "baseline lowest and highest marginal rates must be 0.19 and 0.47, got {lowest} and {highest}",
                {"field": "brackets", "bound": "0.19 and 0.47", "lowest": lowest, "highest": highest},
            )
        return self


class HouseholdParameters(FrozenModel):
    """Decile consumption propensities and property-income shares."""

    propensities: tuple[float, ...] = Field(min_length=1)
    property_income_shares: tuple[float, ...] = Field(min_length=1)

    @model_validator(mode="after")
    def decile_vectors(self) -> "HouseholdParameters":
        """Both vectors cover the same income groups; propensities and shares are fractions."""
        if len(self.propensities) != len(self.property_income_shares):
            raise PydanticCustomError(
                "range",
                "propensities and property_income_shares differ in length",
                {"field": "property_income_shares", "bound": "len(propensities)"},
            )
        if any(not 0.0 <= value <= 1.0 for value in self.propensities):
            raise PydanticCustomError("range", "propensities must lie in [0, 1]", {"field": "propensities", "bound": "[0, 1]"})
        shares = self.property_income_shares
        if any(share < 0 for share in shares) or abs(sum(shares) - 1.0) > 1e-9:
            raise PydanticCustomError(
                "range",
                "property_income_shares must be nonnegative and sum to 1",
                {"field": "property_income_shares", "bound": "sum 1"},
            )
        return self


class DemographyParameters(FrozenModel):
    """Cohort transition schedule."""

    survival: dict[str, float]
    promotion: dict[str, float]
    births: dict[int, float]
    birth_gender_shares: dict[str, float]
    birth_skill_shares: dict[str, float]

    @model_validator(mode="after")
    def fractions(self) -> "DemographyParameters":
        """Rates are fractions, births nonnegative, birth shares distributions."""
        for name in ("survival", "promotion"):
            for band, rate in getattr(self, name).items():
                if not 0.0 <= rate <= 1.0:
                    raise PydanticCustomError("range", "rate must lie in [0, 1]", {"field": f"{name}.{band}", "bound": "[0, 1]"})
        if any(births < 0 for births in self.births.values()):
            raise PydanticCustomError("range", "births must be >= 0", {"field": "births", "bound": ">= 0"})
        for name in ("birth_gender_shares", "birth_skill_shares"):
            shares = getattr(self, name)
            if any(share < 0 for share in shares.values()) or abs(sum(shares.values()) - 1.0) > 1e-9:
                raise PydanticCustomError("range", "shares must be nonnegative and sum to 1", {"field": name, "bound": "sum 1"})
        return self


class ShareParameters(FrozenModel):
    """A share of an endogenous variable with an annual drift."""

    share: float = Field(ge=0.0, le=1.0)
    drift: float = Field(0.0, ge=-1.0, le=1.0)


class DamageParameters(FrozenModel):
    """An exogenous damage series growing at a constant rate."""

    eur_per_year: float = Field(ge=0.0)
    annual_growth: float = Field(0.0, ge=-1.0, le=1.0)


class IsewParameters(FrozenModel):
    """Valuation and share parameters of the welfare ledgers."""

    unpaid_wage: float = Field(9.04, ge=0.0)
    unpaid_wage_growth: float = Field(0.0, ge=-1.0, le=1.0)
    atkinson_epsilon: float = Field(0.8, gt=0.0)
    inequality_floor: float = Field(0.0, ge=0.0, lt=1.0)
    defensive_share_of_consumption: ShareParameters
    shadow_share_of_gdp: ShareParameters
    nondefensive_gov_share: ShareParameters
    extreme_weather: DamageParameters


class BoundaryParameters(FrozenModel):
    """Per-capita biophysical limit of one pressure."""

    per_capita_limit: float = Field(gt=0.0)
    basis: Literal["territorial", "footprint"]


class ThresholdParameters(FrozenModel):
    """Targets of the simulated social outcomes and values of the constant ones."""

    unemployment_target: float = Field(0.01, ge=0.0, lt=1.0)
    atkinson_threshold: float = Field(0.10, ge=0.0, lt=1.0)
    adequacy_line: float = Field(gt=0.0)
    constant_outcomes: dict[str, float] = Field(default_factory=dict)

    @field_validator("constant_outcomes")
    @classmethod
    def nonnegative(cls, outcomes: dict[str, float]) -> dict[str, float]:
        """Normalised outcome values are nonnegative."""
        if any(value < 0 for value in outcomes.values()):
            msg = "constant outcome values must be >= 0"
            raise ValueError(msg)
        return outcomes


class CalibrationParameters(FrozenModel):
    """Everything in params.json."""

    base_year: int = Field(2020, ge=1900, le=2200)
    economy: EconomyParameters = EconomyParameters()
    initial_stocks: InitialStocks
    wages: WageParameters
    fiscal: FiscalParameters
    households: HouseholdParameters
    demography: DemographyParameters
    isew: IsewParameters
    boundaries: dict[str, BoundaryParameters]
    thresholds: ThresholdParameters
    series: dict[str, dict[int, float]] = Field(default_factory=dict)
    component_overrides: dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def known_series(self) -> "CalibrationParameters":
        """Component overrides refer to existing series."""
        for component, series in self.component_overrides.items():
            if series not in self.series:
                raise PydanticCustomError(
                    "range",
                    "override refers to an unknown series",
                    {"field": f"component_overrides.{component}", "bound": "key of series"},
                )
        return self
