"""Policy schedules: carbon tax controller, tax-benefit redistribution and working-time reduction."""

import logging
from dataclasses import dataclass

import numpy as np

from sewsim.calibration_utils.scenario import CarbonTaxParams, PhaseWindow, RedistributionParams, WtrParams
from sewsim.calibration_utils.series import Series
from sewsim.errors import ZeroTargetError
from sewsim.model.economy import BenefitMultipliers, FiscalSchedule

LOGGER = logging.getLogger(__name__)
COLOR_YELLOW = "\x1b[33;20m"
COLOR_RESET = "\x1b[0m"


@dataclass(frozen=True, slots=True)
class PhaseRamp:
    """Linear transition from ``initial`` to ``final`` between the ``start`` and ``end`` years."""

    initial: float
    final: float
    start: int = 2030
    end: int = 2035

    def __post_init__(self) -> None:
        """start < end."""
        if self.start >= self.end:
            msg = f"Ramp start {self.start} must be before its end {self.end}"
            raise ValueError(msg)


def ramp(phase: PhaseRamp, year: float) -> float:
    """Value of the ramp in ``year``."""
    if year <= phase.start:
        return phase.initial
    if year >= phase.end:
        return phase.final
    return phase.initial + (phase.final - phase.initial) * (year - phase.start) / (phase.end - phase.start)


@dataclass(frozen=True, slots=True)
class CarbonTaxState:
    """Carbon tax rate (EUR per tonne) and the emission reduction it buys."""

    rate: float = 0.0
    reduction: float = 0.0


@dataclass(frozen=True, slots=True)
class CarbonTaxController:
    """Carbon tax parameters with the resolved emission target."""

    tau_max: float
    adjustment_speed: float
    r_max: float
    target: Series
    start_year: int = 2030

    @classmethod
    def from_params(cls, params: CarbonTaxParams, target: Series, window: PhaseWindow) -> "CarbonTaxController":
        """Controller of a scenario's carbon tax block."""
        return cls(
            tau_max=params.tau_max_eur_per_tonne,
            adjustment_speed=params.adjustment_speed,
            r_max=params.r_max,
            target=target,
            start_year=window.start,
        )


def carbon_tax_step(
    state: CarbonTaxState,
    controller: CarbonTaxController,
    actual_emissions: float,
    year: int,
) -> CarbonTaxState:
    """Advance the carbon tax by one year.

    The rate moves by ``adjustment_speed * tau_max`` times the relative gap between actual and target
    emissions and is clamped to [0, tau_max]; the emission reduction is proportional to the rate.

    Args:
        state: Tax state of the previous year.
        controller: Controller parameters.
        actual_emissions: Territorial CO2 emissions observed in the previous year.
        year: The year the new rate applies to.

    Returns:
        The tax state of ``year``.
    """
    if actual_emissions < 0:
        msg = f"Emissions must be >= 0, got {actual_emissions}"
        raise ValueError(msg)
    if year < controller.start_year or controller.tau_max == 0.0:
        return CarbonTaxState()
    if (target := controller.target(year)) == 0.0:
        msg = f"CO2 target of {year} is zero"
        raise ZeroTargetError(msg, year=year)
    gap_ratio = (actual_emissions - target) / target
    rate = float(np.clip(state.rate + controller.adjustment_speed * controller.tau_max * gap_ratio, 0.0, controller.tau_max))
    if rate == controller.tau_max and state.rate < controller.tau_max:
        LOGGER.info(f"{COLOR_YELLOW}Carbon tax reached its maximum of {rate:g} EUR/t in {year}{COLOR_RESET}")
    return CarbonTaxState(rate=rate, reduction=controller.r_max * rate / controller.tau_max)


def redistribution_schedule(
    baseline: FiscalSchedule,
    params: RedistributionParams | None,
    window: PhaseWindow,
    year: int,
) -> tuple[FiscalSchedule, BenefitMultipliers]:
    """Tax schedule and benefit multipliers of ``year``.

    The lowest and highest marginal rates ramp to their final values; interior brackets keep
    their relative position between the two.

    Args:
        baseline: Schedule before the reform.
        params: Reform parameters; None leaves the baseline unchanged.
        window: Phase-in years.
        year: The year of the schedule.

    Returns:
        The schedule and the benefit multipliers.
    """
    if params is None:
        return baseline, BenefitMultipliers()
    rates = baseline.rates
    low, high = rates[0], rates[-1]
    position = (rates - low) / (high - low) if high > low else np.linspace(0.0, 1.0, len(rates))
    # Shift of each final rate from its baseline, zero for every bracket when the endpoints don't move
    shift = (params.final_low_rate - low) * (1.0 - position) + (params.final_high_rate - high) * position
    new_rates = [
        ramp(PhaseRamp(rate, rate + delta, window.start, window.end), year)
        for rate, delta in zip(rates.tolist(), shift.tolist(), strict=True)
    ]
    new_rates[0] = ramp(PhaseRamp(low, params.final_low_rate, window.start, window.end), year)
    new_rates[-1] = ramp(PhaseRamp(high, params.final_high_rate, window.start, window.end), year)
    multipliers = BenefitMultipliers(
        olf=ramp(PhaseRamp(1.0, params.benefit_multiplier_olf, window.start, window.end), year),
        unemployed=ramp(PhaseRamp(1.0, params.benefit_multiplier_unemployed, window.start, window.end), year),
    )
    return baseline.with_rates(new_rates), multipliers


def wtr_schedule(params: WtrParams | None, window: PhaseWindow, year: int) -> float:
    """Fraction of the base weekly hours worked in ``year``."""
    if params is None:
        return 1.0
    return ramp(PhaseRamp(1.0, 1.0 - params.hours_reduction, window.start, window.end), year)


@dataclass(frozen=True, slots=True)
class PolicyModifiers:
    """Everything the policies change in one year."""

    fiscal: FiscalSchedule
    benefit_multipliers: BenefitMultipliers
    hours_factor: float
    wage_compensation: bool
    carbon_tax: CarbonTaxState

    @property
    def hourly_wage_boost(self) -> float:
        """Hourly wage relative to the uncompensated path."""
        return 1.0 / self.hours_factor if self.wage_compensation else 1.0
