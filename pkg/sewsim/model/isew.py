"""Welfare ledgers: ISEW experienced (BCE), ISEW of present activities (BCPA) and IAEW."""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from enum import Enum

import numpy as np

from sewsim.calibration_utils.components import Component, ShareOfEndogenous
from sewsim.calibration_utils.series import Series
from sewsim.errors import DuplicateComponentError, EpsilonDomainError, MissingComponentError, MissingUnitCostError
from sewsim.model.environment import Basis, Pressure, PressureAccount

UNPAID_WAGE = 9.04


class Variant(str, Enum):
    """Welfare index variants."""

    BCE = "bce"
    BCPA = "bcpa"
    IAEW = "iaew"


class Sign(int, Enum):
    """Whether a component adds to or subtracts from welfare."""

    BENEFIT = 1
    COST = -1


_BENEFITS = (
    Component.UNPAID_WORK,
    Component.INDIVIDUAL_CONSUMPTION,
    Component.SHADOW_ECONOMY,
    Component.GOVERNMENT_CONSUMPTION,
)
_SOCIAL_COSTS = (Component.DEFENSIVE_EXPENDITURE, Component.INEQUALITY_LOSSES)

MEMBERSHIP: dict[Variant, dict[Component, Sign]] = {
    Variant.BCE: {
        **dict.fromkeys(_BENEFITS, Sign.BENEFIT),
        **dict.fromkeys(
            (*_SOCIAL_COSTS, Component.AIR_POLLUTION, Component.NITROGEN_POLLUTION, Component.EXTREME_WEATHER),
            Sign.COST,
        ),
    },
    Variant.BCPA: {
        **dict.fromkeys((*_BENEFITS, Component.CAPITAL_STOCK_CHANGE), Sign.BENEFIT),
        **dict.fromkeys(
            (
                *_SOCIAL_COSTS,
                Component.AIR_POLLUTION,
                Component.NITROGEN_POLLUTION,
                Component.CLIMATE_BREAKDOWN,
                Component.ENERGY_DEPLETION,
                Component.NUCLEAR_POWER,
            ),
            Sign.COST,
        ),
    },
    # Market activity only: defensive spending counts as consumption
    Variant.IAEW: dict.fromkeys(
        (*_BENEFITS, Component.DEFENSIVE_EXPENDITURE, Component.CAPITAL_STOCK_CHANGE),
        Sign.BENEFIT,
    ),
}

ENVIRONMENTAL_BASIS = {Variant.BCE: Basis.TERRITORIAL, Variant.BCPA: Basis.FOOTPRINT}


@dataclass(frozen=True, slots=True)
class UnitCost:
    """Cost of one unit of a pressure.

    The cost grows at ``annual_growth`` from the base year and applies to the ``share`` of the flow,
    e.g. the non-renewable part of primary energy.
    """

    component: Component
    pressure: Pressure
    eur_per_unit: float
    annual_growth: float = 0.0
    share: Series | None = None

    def at(self, year: int, base_year: int) -> float:
        """EUR per unit of the whole flow in ``year``."""
        share = self.share(year) if self.share is not None else 1.0
        return self.eur_per_unit * (1.0 + self.annual_growth) ** (year - base_year) * share


@dataclass(frozen=True, slots=True)
class LedgerEntry:
    """One component of a ledger; ``value`` is a magnitude, ``sign`` says how it enters the total."""

    component: Component
    sign: Sign
    value: float

    @property
    def signed_value(self) -> float:
        """Contribution to the ledger total."""
        return self.sign * self.value


@dataclass(frozen=True, slots=True)
class IsewLedger:
    """Decomposed welfare ledger of one variant and year."""

    variant: Variant
    entries: tuple[LedgerEntry, ...]
    population: float

    @property
    def total(self) -> float:
        """Signed sum of the components (EUR/yr)."""
        return float(sum(entry.signed_value for entry in self.entries))

    @property
    def per_capita(self) -> float:
        """Total per person (EUR/person/yr)."""
        return self.total / self.population

    @property
    def benefits(self) -> float:
        """Sum of the benefit components."""
        return float(sum(entry.value for entry in self.entries if entry.sign is Sign.BENEFIT))

    def value(self, component: Component) -> float:
        """Magnitude of one component."""
        for entry in self.entries:
            if entry.component is component:
                return entry.value
        msg = f"Component '{component.value}' isn't part of the {self.variant.value} ledger"
        raise MissingComponentError(msg)

    def share_of_benefits(self, component: Component) -> float:
        """Magnitude of a component relative to the sum of the benefits."""
        return self.value(component) / self.benefits


def unpaid_work_value(hours: float, rate: float = UNPAID_WAGE) -> float:
    """Replacement value of unpaid work (EUR/yr)."""
    if hours < 0:
        msg = f"Unpaid hours must be >= 0, got {hours}"
        raise ValueError(msg)
    return hours * rate


def atkinson_index(values: Iterable[float], epsilon: float, weights: Iterable[float] | None = None) -> float:
    """Atkinson inequality index.

    Args:
        values: Incomes or consumption levels per group.
        epsilon: Inequality aversion, > 0.
        weights: Population weights per group, equal by default.

    Returns:
        One minus the ratio of the equally-distributed-equivalent level to the mean.

    Raises:
        EpsilonDomainError: epsilon isn't positive, or it is at least 1 and a weighted value is zero.
    """
    if epsilon <= 0:
        msg = f"Inequality aversion must be > 0, got {epsilon}"
        raise EpsilonDomainError(msg)
    values = np.asarray(values, dtype=float)
    weights = np.ones_like(values) if weights is None else np.asarray(weights, dtype=float)
    if np.any(values < 0) or np.any(weights < 0):
        msg = "Values and weights must be >= 0"
        raise ValueError(msg)
    weights = weights / weights.sum()
    mean = float(weights @ values)
    if mean == 0.0 or np.all(values == values[0]):
        return 0.0
    if epsilon >= 1.0 and np.any(values[weights > 0] == 0):
        msg = f"Atkinson index is undefined for a zero value at inequality aversion {epsilon:g} >= 1"
        raise EpsilonDomainError(msg)
    if epsilon == 1.0:
        equivalent = float(np.exp(weights @ np.log(np.where(weights > 0, values, 1.0))))
    else:
        with np.errstate(divide="ignore"):
            powered = np.where(weights > 0, values ** (1.0 - epsilon), 0.0)
        equivalent = float(weights @ powered) ** (1.0 / (1.0 - epsilon))
    return 1.0 - equivalent / mean


def inequality_loss(consumption: float, index: float, floor: float = 0.0) -> float:
    """Welfare lost to inequality: consumption times the Atkinson index above ``floor``."""
    if not (0.0 <= index < 1.0 and 0.0 <= floor < 1.0):
        msg = f"Atkinson index and floor must lie in [0, 1), got {index} and {floor}"
        raise ValueError(msg)
    return consumption * max(0.0, index - floor)


def share_component(base_value: float, mode: ShareOfEndogenous, year: int, base_year: int = 2020) -> float:
    """Component computed as a drifting share of another model variable."""
    return base_value * mode.share_0 * (1.0 + mode.drift) ** (year - base_year)


def environmental_costs(
    account: PressureAccount,
    unit_costs: Mapping[Component, UnitCost],
    variant: Variant,
    year: int,
    base_year: int = 2020,
    extreme_weather: float = 0.0,
) -> list[LedgerEntry]:
    """Environmental cost components of a variant.

    BCE values the territorial flows and adds the extreme-weather damages; BCPA values the
    footprint flows, including climate breakdown, energy depletion and nuclear power.

    Args:
        account: Pressures of the year.
        unit_costs: Unit cost per environmental component.
        variant: Ledger variant.
        year: Year of the unit costs.
        base_year: Year the cost growth starts from.
        extreme_weather: Damage of the year (EUR), BCE only.

    Returns:
        The cost entries of the variant, empty for IAEW.
    """
    if (basis := ENVIRONMENTAL_BASIS.get(variant)) is None:
        return []
    entries = []
    for component, sign in MEMBERSHIP[variant].items():
        if component is Component.EXTREME_WEATHER:
            entries.append(LedgerEntry(component, sign, extreme_weather))
            continue
        if sign is Sign.BENEFIT or component in _SOCIAL_COSTS:
            continue
        if (unit_cost := unit_costs.get(component)) is None:
            msg = f"No unit cost for '{component.value}'"
            raise MissingUnitCostError(msg, year=year)
        flow = account.value(unit_cost.pressure, basis)
        entries.append(LedgerEntry(component, sign, flow * unit_cost.at(year, base_year)))
    return entries


def assemble(variant: Variant, components: Mapping[Component, float] | Iterable[tuple[Component, float]], population: float) -> IsewLedger:
    """Assemble a ledger from component values.

    Args:
        variant: Ledger variant.
        components: (component, magnitude) pairs; components outside the variant are ignored.
        population: Persons the per-capita value is computed over.

    Returns:
        The ledger with the variant's components in registry order.
    """
    if population <= 0:
        msg = f"Population must be > 0, got {population}"
        raise ValueError(msg)
    pairs = components.items() if isinstance(components, Mapping) else components
    membership = MEMBERSHIP[variant]
    values: dict[Component, float] = {}
    for component, value in pairs:
        if component not in membership:
            continue
        if component in values:
            msg = f"Component '{component.value}' given twice for the {variant.value} ledger"
            raise DuplicateComponentError(msg)
        values[component] = value
    if missing := [component.value for component in membership if component not in values]:
        msg = f"Missing components for the {variant.value} ledger: {', '.join(missing)}"
        raise MissingComponentError(msg)
    entries = tuple(LedgerEntry(component, membership[component], values[component]) for component in Component if component in membership)
    return IsewLedger(variant=variant, entries=entries, population=population)
