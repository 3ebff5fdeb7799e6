"""Social thresholds and biophysical boundaries of one simulated year."""

from collections.abc import Mapping
from dataclasses import dataclass, field

from sewsim.calibration_utils.parameters import ThresholdParameters
from sewsim.errors import SchemaError
from sewsim.model.environment import Pressure

SOCIAL_OUTCOMES = (
    "life_satisfaction",
    "life_expectancy",
    "nutrition",
    "sanitation",
    "energy_access",
    "education",
    "social_support",
    "democratic_quality",
    "job_availability",
    "gender_equality",
    "income_fairness",
    "income_adequacy",
)
SIMULATED_OUTCOMES = ("job_availability", "income_fairness", "income_adequacy")


@dataclass(frozen=True, slots=True)
class SocialOutcome:
    """An outcome normalised so that the threshold is 1."""

    id: str
    value: float
    simulated: bool
    threshold: float = 1.0

    @property
    def shortfall(self) -> bool:
        """The threshold isn't met."""
        return self.value < self.threshold


@dataclass(frozen=True, slots=True)
class SocialDrivers:
    """Model variables the simulated outcomes depend on."""

    unemployment_rate: float
    atkinson_index: float
    lowest_decile_income: float


@dataclass(frozen=True, slots=True)
class DoughnutReport:
    """Boundary overshoot ratios and social outcomes of one year."""

    year: int
    scenario: str
    overshoot: dict[Pressure, float] = field(default_factory=dict)
    outcomes: tuple[SocialOutcome, ...] = ()

    @property
    def overshot(self) -> list[Pressure]:
        """Transgressed boundaries."""
        return [pressure for pressure, ratio in self.overshoot.items() if ratio > 1.0]

    @property
    def shortfalls(self) -> list[str]:
        """Unmet social thresholds."""
        return [outcome.id for outcome in self.outcomes if outcome.shortfall]

    def outcome(self, outcome_id: str) -> SocialOutcome:
        """Look up an outcome by id."""
        for outcome in self.outcomes:
            if outcome.id == outcome_id:
                return outcome
        msg = f"Unknown social outcome '{outcome_id}'"
        raise KeyError(msg)


def social_outcomes(drivers: SocialDrivers, thresholds: ThresholdParameters) -> list[SocialOutcome]:
    """Normalised social outcomes.

    Job availability and income fairness compare the employment rate and one minus the Atkinson
    index with their targets, income adequacy compares the lowest-decile disposable income with the
    adequacy line. Outcomes without a model driver keep their calibrated constant values.

    Raises:
        SchemaError: An outcome without a model driver has no calibrated value.
    """
    simulated = {
        "job_availability": (1.0 - drivers.unemployment_rate) / (1.0 - thresholds.unemployment_target),
        "income_fairness": (1.0 - drivers.atkinson_index) / (1.0 - thresholds.atkinson_threshold),
        "income_adequacy": max(drivers.lowest_decile_income, 0.0) / thresholds.adequacy_line,
    }
    outcomes = []
    for outcome_id in SOCIAL_OUTCOMES:
        if outcome_id in simulated:
            outcomes.append(SocialOutcome(outcome_id, simulated[outcome_id], simulated=True))
        elif outcome_id in thresholds.constant_outcomes:
            outcomes.append(SocialOutcome(outcome_id, thresholds.constant_outcomes[outcome_id], simulated=False))
        else:
            msg = f"No calibrated value for the social outcome '{outcome_id}'"
            raise SchemaError(msg, field=f"params.json:thresholds.constant_outcomes.{outcome_id}")
    return outcomes


def doughnut_report(
    year: int,
    scenario: str,
    overshoot: Mapping[Pressure, float],
    drivers: SocialDrivers,
    thresholds: ThresholdParameters,
) -> DoughnutReport:
    """Combine the boundary status and the social outcomes of a year."""
    return DoughnutReport(
        year=year,
        scenario=scenario,
        overshoot=dict(overshoot),
        outcomes=tuple(social_outcomes(drivers, thresholds)),
    )
