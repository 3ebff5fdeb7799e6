"""ISEW components and the strategy used to integrate each of them into the model."""

from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum

from sewsim.calibration_utils.series import Series
from sewsim.errors import UnknownComponentError


class Component(str, Enum):
    """Registered ISEW/IAEW components."""

    UNPAID_WORK = "unpaid_work"
    INDIVIDUAL_CONSUMPTION = "individual_consumption"
    SHADOW_ECONOMY = "shadow_economy"
    GOVERNMENT_CONSUMPTION = "nondefensive_government_consumption"
    DEFENSIVE_EXPENDITURE = "defensive_expenditure"
    INEQUALITY_LOSSES = "inequality_losses"
    CAPITAL_STOCK_CHANGE = "capital_stock_change"
    AIR_POLLUTION = "air_pollution"
    NITROGEN_POLLUTION = "nitrogen_pollution"
    EXTREME_WEATHER = "extreme_weather"
    CLIMATE_BREAKDOWN = "climate_breakdown"
    ENERGY_DEPLETION = "energy_depletion"
    NUCLEAR_POWER = "nuclear_power"


# Components computed as a share of these model variables
SHARE_BASES = {
    Component.DEFENSIVE_EXPENDITURE: Component.INDIVIDUAL_CONSUMPTION.value,
    Component.SHADOW_ECONOMY: "gdp",
}


@dataclass(frozen=True, slots=True)
class Endogenous:
    """Computed directly from model variables."""


@dataclass(frozen=True, slots=True)
class ShareOfEndogenous:
    """A drifting share of an endogenous model variable."""

    base_variable: str
    share_0: float
    drift: float = 0.0


@dataclass(frozen=True, slots=True)
class Exogenous:
    """Read from a calibration series."""

    series: Series


ComponentMode = Endogenous | ShareOfEndogenous | Exogenous


def parse_component(component_id: str | Component) -> Component:
    """Convert a component id to a Component, raising UnknownComponentError if it isn't registered."""
    try:
        return Component(component_id)
    except ValueError as e:
        msg = f"Unknown ISEW component '{component_id}', expected one of {', '.join(c.value for c in Component)}"
        raise UnknownComponentError(msg) from e


def build_component_modes(
    shares: Mapping[Component, tuple[float, float]],
    overrides: Mapping[Component, Series] | None = None,
) -> dict[Component, ComponentMode]:
    """Assign an integration mode to every registered component.

    Args:
        shares: (share_0, drift) for the components integrated as a share of another variable.
        overrides: Components replaced by an exogenous series.

    Returns:
        A mode for each Component.
    """
    overrides = overrides or {}
    modes: dict[Component, ComponentMode] = {}
    for component in Component:
        if component in overrides:
            modes[component] = Exogenous(overrides[component])
        elif component in SHARE_BASES:
            share_0, drift = shares[component]
            modes[component] = ShareOfEndogenous(
                base_variable=SHARE_BASES[component],
                share_0=share_0,
                drift=drift,
            )
        else:
            modes[component] = Endogenous()
    return modes


def component_mode(
    component_id: str | Component,
    modes: Mapping[Component, ComponentMode],
) -> ComponentMode:
    """Get the integration mode of a component.

    Args:
        component_id: Component id, e.g. "defensive_expenditure".
        modes: Mode table, usually Calibration.component_modes.

    Returns:
        The mode assigned to the component.
    """
    component = parse_component(component_id)
    if (mode := modes.get(component)) is None:
        msg = f"Component '{component.value}' has no assigned mode"
        raise UnknownComponentError(msg)
    return mode
