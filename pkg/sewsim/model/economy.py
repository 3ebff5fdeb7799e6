"""Demand-driven input-output economy with stock-flow consistent sector accounts."""

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
import pandas as pd

from sewsim.errors import InconsistencyError, NonConvergenceError, SingularEconomyError
from sewsim.model.demographics import WEEKS_PER_YEAR, EmploymentStatus

LOGGER = logging.getLogger(__name__)
COLOR_YELLOW = "\x1b[33;20m"
COLOR_RESET = "\x1b[0m"

AUDIT_TOLERANCE = 1e-9


class Agent(str, Enum):
    """Institutional sectors of the flow matrix."""

    HOUSEHOLDS = "households"
    FIRMS = "firms"
    GOVERNMENT = "government"
    BANKS = "banks"
    REST_OF_WORLD = "rest_of_world"


@dataclass(frozen=True, slots=True)
class Bracket:
    """Marginal rate applied to income above ``lower_bound``."""

    lower_bound: float
    marginal_rate: float


@dataclass(frozen=True, slots=True)
class FiscalSchedule:
    """Income tax brackets and benefit shares of the full-time equivalent wage."""

    brackets: tuple[Bracket, ...]
    benefit_rate_unemployed: float
    benefit_rate_olf: float
    pension_rate: float = 0.0

    def __post_init__(self) -> None:
        """Validate the brackets."""
        bounds = [bracket.lower_bound for bracket in self.brackets]
        if not bounds or any(b <= a for a, b in zip(bounds, bounds[1:], strict=False)):
            msg = f"Bracket lower bounds must strictly increase, got {bounds}"
            raise ValueError(msg)
        if any(not 0.0 <= bracket.marginal_rate < 1.0 for bracket in self.brackets):
            msg = "Marginal rates must lie in [0, 1)"
            raise ValueError(msg)

    @property
    def rates(self) -> np.ndarray:
        """Marginal rates by bracket."""
        return np.array([bracket.marginal_rate for bracket in self.brackets])

    @property
    def lower_bounds(self) -> np.ndarray:
        """Lower bounds by bracket."""
        return np.array([bracket.lower_bound for bracket in self.brackets])

    def with_rates(self, rates: Iterable[float]) -> "FiscalSchedule":
        """Same brackets with other marginal rates."""
        return replace(
            self,
            brackets=tuple(
                Bracket(bracket.lower_bound, float(rate)) for bracket, rate in zip(self.brackets, rates, strict=True)
            ),
        )

    def indexed(self, factor: float) -> "FiscalSchedule":
        """Same rates with bracket bounds scaled by ``factor``."""
        return replace(
            self,
            brackets=tuple(Bracket(bracket.lower_bound * factor, bracket.marginal_rate) for bracket in self.brackets),
        )


@dataclass(frozen=True, slots=True)
class BenefitMultipliers:
    """Multipliers applied to the baseline benefits."""

    olf: float = 1.0
    unemployed: float = 1.0


@dataclass(frozen=True, slots=True)
class SectorSystem:
    """One solved year of the input-output system."""

    A: np.ndarray
    f: np.ndarray
    x: np.ndarray
    labour_coeff: np.ndarray
    # Output induced by exports alone
    export_output: np.ndarray

    @property
    def value_added(self) -> np.ndarray:
        """Value added per sector."""
        return self.x - self.A.sum(axis=0) * self.x

    @property
    def gdp(self) -> float:
        """Sum of final demand."""
        return float(self.f.sum())

    @property
    def residual(self) -> float:
        """Relative residual of x = A x + f."""
        scale = np.linalg.norm(self.x)
        return float(np.linalg.norm(self.A @ self.x + self.f - self.x) / scale) if scale > 0 else 0.0


@dataclass(frozen=True, slots=True)
class HouseholdAccounts:
    """Per-person household accounts of each income group."""

    gross_income: np.ndarray
    income_tax: np.ndarray
    disposable_income: np.ndarray
    consumption: np.ndarray
    saving: np.ndarray


@dataclass(frozen=True, slots=True)
class DepletionEvent:
    """The capital stock would have become negative and was floored at zero."""

    year: int | None
    shortfall: float


@dataclass(frozen=True, slots=True)
class CapitalAccount:
    """Capital stock and its yearly change."""

    capital_stock: float
    investment: float = 0.0
    depreciation: float = 0.0
    net_change: float = 0.0


@dataclass(frozen=True, slots=True)
class BalanceSheet:
    """Financial stocks carried between years (EUR)."""

    household_deposits: float
    firm_loans: float
    government_debt: float
    foreign_position: float = 0.0

    def after(self, net_lending: Mapping[str, float]) -> "BalanceSheet":
        """Stocks after a year with the given net lending per agent."""
        return BalanceSheet(
            household_deposits=self.household_deposits + net_lending[Agent.HOUSEHOLDS.value],
            firm_loans=self.firm_loans - net_lending[Agent.FIRMS.value],
            government_debt=self.government_debt - net_lending[Agent.GOVERNMENT.value],
            foreign_position=self.foreign_position + net_lending[Agent.REST_OF_WORLD.value],
        )


@dataclass(frozen=True, slots=True)
class FlowMatrix:
    """Transactions flow matrix.

    One row per flow, one column per agent; receipts are positive and payments negative. Each agent
    books its own side of a flow, so a row sums to zero only when payer and payee agree, and the
    column sums are the agents' net lending.
    """

    table: pd.DataFrame = field(
        default_factory=lambda: pd.DataFrame(columns=[agent.value for agent in Agent], dtype=float),
    )

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[str, Agent, float]]) -> "FlowMatrix":
        """Build the matrix from (flow, agent, signed amount) bookings; repeated bookings add up."""
        rows = {}
        for flow, agent, amount in entries:
            row = rows.setdefault(flow, dict.fromkeys((agent.value for agent in Agent), 0.0))
            row[agent.value] += amount
        table = pd.DataFrame.from_dict(rows, orient="index", columns=[agent.value for agent in Agent], dtype=float)
        return cls(table=table)

    def net_lending(self) -> pd.Series:
        """Net lending per agent."""
        return self.table.sum(axis=0).reindex([agent.value for agent in Agent], fill_value=0.0)

    def row_residuals(self) -> pd.Series:
        """Payments and receipts left unmatched per flow."""
        return self.table.sum(axis=1)


@dataclass(frozen=True, slots=True)
class AuditReport:
    """Result of a stock-flow consistency check."""

    net_lending: dict[str, float]
    residual: float
    threshold: float
    row_residuals: dict[str, float] = field(default_factory=dict)
    stock_gaps: dict[str, float] = field(default_factory=dict)


def spectral_radius(A: np.ndarray, tolerance: float = 1e-10, max_iterations: int = 10_000) -> float:
    """Spectral radius of a nonnegative matrix by power iteration.

    Falls back to a dense eigenvalue computation when the iteration doesn't settle.
    """
    if not A.any():
        return 0.0
    vector = np.ones(A.shape[0]) / np.sqrt(A.shape[0])
    estimate = 0.0
    for _ in range(max_iterations):
        image = A @ vector
        if (norm := float(np.linalg.norm(image))) == 0.0:
            return 0.0
        if abs(norm - estimate) <= tolerance * norm:
            return norm
        vector, estimate = image / norm, norm
    LOGGER.debug("Power iteration didn't converge, using the eigenvalues")
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def solve_output(A: np.ndarray, f: np.ndarray, tolerance: float = 1e-10, max_iterations: int = 10_000) -> np.ndarray:
    """Gross output x solving x = A x + f by fixed-point iteration.

    Args:
        A: Technical coefficients, rows are supplying sectors.
        f: Final demand per sector.
        tolerance: Relative change between iterates at which the solve stops.
        max_iterations: Iteration cap.

    Returns:
        Gross output per sector.
    """
    if np.any(f < 0):
        msg = f"Final demand must be nonnegative, got {f}"
        raise ValueError(msg)
    if (radius := spectral_radius(A)) >= 1.0:
        msg = f"Technical-coefficient matrix has spectral radius {radius:.6g} >= 1"
        raise SingularEconomyError(msg)
    x = f.copy()
    for _ in range(max_iterations):
        updated = A @ x + f
        converged = np.linalg.norm(updated - x) <= tolerance * np.linalg.norm(updated)
        x = updated
        if converged:
            return x
    msg = f"Output solve didn't converge within {max_iterations} iterations"
    raise NonConvergenceError(msg)


def final_demand(levels: dict[str, float], shares: dict[str, np.ndarray], import_share: float) -> tuple[np.ndarray, float]:
    """Domestic final demand per sector and competitive imports.

    Imports are a fixed share of domestic absorption (consumption, government, investment);
    exports are fully domestic.

    Returns:
        Final demand per sector and total imports.
    """
    absorption = sum(levels[name] * shares[name] for name in ("consumption", "government", "investment"))
    f = (1.0 - import_share) * absorption + levels["exports"] * shares["exports"]
    imports = import_share * (levels["consumption"] + levels["government"] + levels["investment"])
    return f, imports


def paid_hours(x: np.ndarray, labour_coeff: np.ndarray, productivity: float) -> float:
    """Economy-wide paid hours needed to produce x."""
    return float(x @ labour_coeff) / productivity


def labour_demand(x: np.ndarray, labour_coeff: np.ndarray, productivity: float, standard_hours: float) -> float:
    """Persons needed to produce x when everyone works the standard weekly hours."""
    if standard_hours <= 0 or productivity <= 0:
        msg = f"standard_hours and productivity must be > 0, got {standard_hours} and {productivity}"
        raise ValueError(msg)
    return paid_hours(x, labour_coeff, productivity) / (standard_hours * WEEKS_PER_YEAR)


def income_tax(income: float | np.ndarray, schedule: FiscalSchedule) -> float | np.ndarray:
    """Tax due on income under marginal brackets.

    Only the part of the income falling into a bracket is taxed at that bracket's rate.
    """
    values = np.asarray(income, dtype=float)
    lower = schedule.lower_bounds
    upper = np.append(lower[1:], np.inf)
    taxable = np.clip(values[..., None] - lower, 0.0, upper - lower)
    tax = taxable @ schedule.rates
    return float(tax) if tax.ndim == 0 else tax


def benefits(
    avg_wage: float,
    status: EmploymentStatus,
    schedule: FiscalSchedule,
    multipliers: BenefitMultipliers | None = None,
) -> float:
    """Yearly benefit of one person.

    Args:
        avg_wage: Full-time equivalent annual wage the benefits are indexed to.
        status: Employment status of the recipient.
        schedule: Baseline benefit shares.
        multipliers: Policy multipliers of the year.

    Returns:
        The benefit in EUR per year.
    """
    multipliers = multipliers or BenefitMultipliers()
    match status:
        case EmploymentStatus.UNEMPLOYED:
            return schedule.benefit_rate_unemployed * avg_wage * multipliers.unemployed
        case EmploymentStatus.OUT_OF_LABOUR_FORCE:
            return schedule.benefit_rate_olf * avg_wage * multipliers.olf
    return 0.0


def pension(avg_wage: float, schedule: FiscalSchedule) -> float:
    """Yearly pension of an inactive person in a pensionable age group."""
    return schedule.pension_rate * avg_wage


def household_accounts(
    income: np.ndarray,
    property_income: np.ndarray | float,
    schedule: FiscalSchedule,
    propensities: np.ndarray,
    scale: float = 1.0,
) -> HouseholdAccounts:
    """Taxes, disposable income, consumption and saving per household group.

    Args:
        income: Wages and benefits per person of each group.
        property_income: Property income per person of each group.
        schedule: Income tax schedule of the year.
        propensities: Propensity to consume out of disposable income per group.
        scale: Economy-wide factor applied to all propensities.

    Returns:
        The household accounts.
    """
    gross = np.asarray(income, dtype=float) + property_income
    tax = np.asarray(income_tax(gross, schedule))
    disposable = gross - tax
    consumption = scale * np.asarray(propensities, dtype=float) * disposable
    return HouseholdAccounts(
        gross_income=gross,
        income_tax=tax,
        disposable_income=disposable,
        consumption=consumption,
        saving=disposable - consumption,
    )


def group_means(incomes: np.ndarray, counts: np.ndarray, groups: int = 10) -> np.ndarray:
    """Mean income of equal-population groups after ranking persons by income.

    Args:
        incomes: Income per person of each population group.
        counts: Persons per population group.
        groups: Number of quantile groups, 10 for deciles.

    Returns:
        Mean income of each quantile group, poorest first.
    """
    keep = counts > 0
    order = np.argsort(incomes[keep], kind="stable")
    incomes, counts = incomes[keep][order], counts[keep][order]
    cumulative_persons = np.concatenate(([0.0], np.cumsum(counts)))
    cumulative_income = np.concatenate(([0.0], np.cumsum(counts * incomes)))
    bounds = np.linspace(0.0, cumulative_persons[-1], groups + 1)
    income_at_bounds = np.interp(bounds, cumulative_persons, cumulative_income)
    return np.diff(income_at_bounds) / (cumulative_persons[-1] / groups)


def capital_step(
    account: CapitalAccount,
    investment: float,
    depreciation_rate: float,
    year: int | None = None,
) -> tuple[CapitalAccount, DepletionEvent | None]:
    """Advance the capital stock by one year.

    Returns:
        The updated account and a DepletionEvent when the stock was floored at zero.
    """
    if not 0.0 <= depreciation_rate <= 1.0:
        msg = f"Depreciation rate must lie in [0, 1], got {depreciation_rate}"
        raise ValueError(msg)
    depreciation = depreciation_rate * account.capital_stock
    net_change = investment - depreciation
    stock = account.capital_stock + net_change
    event = None
    if stock <= 0.0 and account.capital_stock > 0.0:
        event = DepletionEvent(year=year, shortfall=-stock)
        LOGGER.warning(f"{COLOR_YELLOW}Capital stock depleted in {year}, shortfall {-stock:.6g} EUR{COLOR_RESET}")
        stock = 0.0
    return (
        CapitalAccount(
            capital_stock=max(stock, 0.0),
            investment=investment,
            depreciation=depreciation,
            net_change=net_change,
        ),
        event,
    )


def stock_flow_audit(
    flows: FlowMatrix,
    gdp: float = 0.0,
    year: int | None = None,
    sector_balances: Mapping[str, float] | None = None,
) -> AuditReport:
    """Check that the flow matrix is closed and agrees with the agents' own balances.

    Every flow row must sum to zero, net lending must sum to zero across agents, and each agent's
    net lending must equal the balance implied by its behavioural accounts, which is the change of
    its net financial position.

    Args:
        flows: The year's flow matrix.
        gdp: GDP of the year; the tolerance is 1e-9 of it.
        year: Year reported in the error.
        sector_balances: Net lending per agent from the behavioural accounts, if reconciled.

    Returns:
        Net lending per agent, the economy-wide residual, the row residuals and the gaps to the balances.
    """
    threshold = AUDIT_TOLERANCE * abs(gdp)
    rows = {flow: float(value) for flow, value in flows.row_residuals().items()}
    if unbalanced := {flow: value for flow, value in rows.items() if abs(value) > threshold}:
        flow, residual = max(unbalanced.items(), key=lambda item: abs(item[1]))
        msg = f"Flow '{flow}' is off by {residual:.6g} EUR (tolerance {threshold:.3g}): {unbalanced}"
        raise InconsistencyError(msg, residual=residual, decomposition=unbalanced, year=year)
    net_lending = flows.net_lending()
    residual = float(net_lending.sum())
    decomposition = {agent: float(value) for agent, value in net_lending.items()}
    if abs(residual) > threshold:
        msg = f"Net lending sums to {residual:.6g} EUR (tolerance {threshold:.3g}): {decomposition}"
        raise InconsistencyError(msg, residual=residual, decomposition=decomposition, year=year)
    gaps = {}
    if sector_balances is not None:
        gaps = {agent: value - float(sector_balances.get(agent, 0.0)) for agent, value in decomposition.items()}
        if mismatched := {agent: gap for agent, gap in gaps.items() if abs(gap) > threshold}:
            agent, gap = max(mismatched.items(), key=lambda item: abs(item[1]))
            msg = f"Net lending of {agent} differs from its stock change by {gap:.6g} EUR (tolerance {threshold:.3g})"
            raise InconsistencyError(msg, residual=gap, decomposition=mismatched, year=year)
    return AuditReport(net_lending=decomposition, residual=residual, threshold=threshold, row_residuals=rows, stock_gaps=gaps)
