"""Annual simulation loop, scenario runs and scenario comparison.

Every year is solved in a fixed order:

1. policy schedules and the carbon tax controller
2. population ageing
3. final demand (consumption out of last year's disposable income), output, labour market,
   incomes, taxes and sector accounts
4. environmental pressures after the carbon tax reduction
5. ISEW/IAEW ledgers
6. Doughnut report
7. stock-flow audit, which aborts the run on failure
"""

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np
import pandas as pd

from sewsim.calibration_utils.calibration_builder import Calibration
from sewsim.calibration_utils.components import Component, Exogenous, ShareOfEndogenous
from sewsim.calibration_utils.scenario import ScenarioSpec
from sewsim.errors import FingerprintMismatchError, RangeError, SchemaError, SimulationError
from sewsim.model.demographics import (
    WEEKS_PER_YEAR,
    CohortGrid,
    EmploymentStatus,
    LabourMarketState,
    TimeUseProfile,
    aggregate_unpaid_hours,
    apply_wtr_to_timeuse,
    employment_partition,
    step_cohorts,
)
from sewsim.model.doughnut import DoughnutReport, SocialDrivers, doughnut_report
from sewsim.model.economy import (
    Agent,
    BalanceSheet,
    CapitalAccount,
    DepletionEvent,
    FlowMatrix,
    SectorSystem,
    benefits,
    capital_step,
    final_demand,
    group_means,
    household_accounts,
    income_tax,
    labour_demand,
    paid_hours,
    pension,
    solve_output,
    stock_flow_audit,
)
from sewsim.model.environment import PRESSURES, Pressure, PressureAccount, apply_emission_reduction, boundary_status, compute_pressures
from sewsim.model.isew import (
    IsewLedger,
    Variant,
    assemble,
    atkinson_index,
    environmental_costs,
    inequality_loss,
    share_component,
    unpaid_work_value,
)
from sewsim.model.policy import (
    CarbonTaxController,
    CarbonTaxState,
    PolicyModifiers,
    carbon_tax_step,
    redistribution_schedule,
    wtr_schedule,
)

LOGGER = logging.getLogger(__name__)
COLOR_YELLOW = "\x1b[33;20m"
COLOR_RESET = "\x1b[0m"

LEDGER_NAMES = {Variant.BCE: "isew_bce", Variant.BCPA: "isew_bcpa", Variant.IAEW: "iaew"}
RANKED_VARIABLES = ("isew_bce_per_capita", "isew_bcpa_per_capita", "iaew_per_capita", "gdp_per_capita")


@dataclass(frozen=True, slots=True)
class DemandLags:
    """Previous-year values the demand closure depends on."""

    previous_gdp: float
    gdp_before: float
    disposable_income: np.ndarray
    consumption_scale: float
    planned_consumption: float


@dataclass(frozen=True, slots=True)
class MacroAccounts:
    """Aggregate flows of one year (EUR unless stated otherwise)."""

    gdp: float
    consumption: float
    government_consumption: float
    investment: float
    exports: float
    imports: float
    wages: float
    social_contributions: float
    benefits: float
    income_tax: float
    distributed_profits: float
    depreciation: float
    carbon_tax_revenue: float
    # Hours per year
    paid_hours: float
    unpaid_hours: float
    hourly_wage: float
    net_hourly_wage: float
    atkinson_index: float
    decile_disposable_income: np.ndarray


@dataclass(frozen=True, slots=True)
class YearSummary:
    """Reported values of one year."""

    year: int
    values: dict[str, float]
    # "<variant>:<component>" -> magnitude
    components: dict[str, float]


@dataclass(frozen=True, slots=True)
class WorldState:
    """Everything known about one simulated year.

    Stocks (capital, balance sheet) are end-of-year values.
    """

    year: int
    scenario: str
    cohorts: CohortGrid
    labour: LabourMarketState
    time_use: dict[tuple[EmploymentStatus, str], TimeUseProfile]
    sectors: SectorSystem
    macro: MacroAccounts
    flows: FlowMatrix
    capital: CapitalAccount
    balance: BalanceSheet
    pressures: PressureAccount
    modifiers: PolicyModifiers
    ledgers: dict[Variant, IsewLedger]
    doughnut: DoughnutReport
    lags: DemandLags
    depletion: DepletionEvent | None = None

    @property
    def population(self) -> float:
        """Total population."""
        return self.cohorts.total_population

    @property
    def carbon_tax(self) -> CarbonTaxState:
        """Carbon tax of the year."""
        return self.modifiers.carbon_tax

    def summary(self) -> YearSummary:
        """Flatten the state into named values."""
        macro = self.macro
        population = self.population
        values = {
            "population": population,
            "labour_force": self.labour.labour_force,
            "employed": self.labour.employed,
            "unemployed": self.labour.unemployed,
            "unemployment_rate": self.labour.unemployment_rate,
            "gdp": macro.gdp,
            "gdp_per_capita": macro.gdp / population,
            "consumption": macro.consumption,
            "government_consumption": macro.government_consumption,
            "investment": macro.investment,
            "exports": macro.exports,
            "imports": macro.imports,
            "wages": macro.wages,
            "social_contributions": macro.social_contributions,
            "benefits": macro.benefits,
            "income_tax": macro.income_tax,
            "distributed_profits": macro.distributed_profits,
            "depreciation": macro.depreciation,
            "hourly_wage": macro.hourly_wage,
            "net_hourly_wage": macro.net_hourly_wage,
            "paid_hours": macro.paid_hours,
            "unpaid_hours": macro.unpaid_hours,
            "hours_factor": self.modifiers.hours_factor,
            "atkinson_index": macro.atkinson_index,
            "lowest_decile_disposable_income": float(macro.decile_disposable_income[0]),
            "capital_stock": self.capital.capital_stock,
            "household_deposits": self.balance.household_deposits,
            "firm_loans": self.balance.firm_loans,
            "government_debt": self.balance.government_debt,
            "foreign_position": self.balance.foreign_position,
            "carbon_tax_rate": self.carbon_tax.rate,
            "emission_reduction": self.carbon_tax.reduction,
            "carbon_tax_revenue": macro.carbon_tax_revenue,
        }
        for pressure, territorial, footprint in zip(PRESSURES, self.pressures.territorial, self.pressures.footprint, strict=True):
            values[f"{pressure.value}_territorial"] = float(territorial)
            values[f"{pressure.value}_footprint"] = float(footprint)
        for variant, ledger in self.ledgers.items():
            values[LEDGER_NAMES[variant]] = ledger.total
            values[f"{LEDGER_NAMES[variant]}_per_capita"] = ledger.per_capita
        for pressure, ratio in self.doughnut.overshoot.items():
            values[f"{pressure.value}_overshoot_ratio"] = ratio
        for outcome in self.doughnut.outcomes:
            values[outcome.id] = outcome.value
        for agent, lending in self.flows.net_lending().items():
            values[f"net_lending_{agent}"] = float(lending)
        components = {
            f"{variant.value}:{entry.component.value}": entry.value
            for variant, ledger in self.ledgers.items()
            for entry in ledger.entries
        }
        return YearSummary(year=self.year, values=values, components=components)


@dataclass(frozen=True, slots=True)
class Trajectory:
    """Yearly summaries of one scenario run."""

    scenario: str
    fingerprint: str
    summaries: tuple[YearSummary, ...]

    @property
    def years(self) -> list[int]:
        """Recorded years."""
        return [summary.year for summary in self.summaries]

    def frame(self) -> pd.DataFrame:
        """Values as a table with one row per year."""
        return pd.DataFrame.from_records(
            [summary.values for summary in self.summaries],
            index=pd.Index(self.years, name="year"),
        )

    def components_frame(self) -> pd.DataFrame:
        """Ledger components as a table with one row per year."""
        return pd.DataFrame.from_records(
            [summary.components for summary in self.summaries],
            index=pd.Index(self.years, name="year"),
        )

    def to_dict(self) -> dict:
        """JSON-compatible form."""
        return {
            "scenario": self.scenario,
            "fingerprint": self.fingerprint,
            "summaries": [
                {"year": summary.year, "values": summary.values, "components": summary.components}
                for summary in self.summaries
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Trajectory":
        """Inverse of to_dict."""
        return cls(
            scenario=data["scenario"],
            fingerprint=data["fingerprint"],
            summaries=tuple(
                YearSummary(year=int(summary["year"]), values=summary["values"], components=summary["components"])
                for summary in data["summaries"]
            ),
        )


@dataclass(frozen=True, slots=True)
class Comparison:
    """Deltas to the first trajectory, end-of-horizon ranking and base-year indexed series."""

    deltas: pd.DataFrame
    ranking: pd.DataFrame
    indexed: pd.DataFrame


def carbon_tax_controller(scenario: ScenarioSpec, calibration: Calibration) -> CarbonTaxController | None:
    """Controller of the scenario's carbon tax, None without one."""
    if (params := scenario.carbon_tax) is None:
        return None
    if (target := calibration.series.get(params.target_series_ref)) is None:
        msg = f"{scenario.name}: carbon_tax.target_series_ref '{params.target_series_ref}' isn't a calibration series"
        raise SchemaError(msg, field=f"{scenario.name}:carbon_tax.target_series_ref")
    return CarbonTaxController.from_params(params, target, scenario.phase_window)


def check_scenario(scenario: ScenarioSpec, calibration: Calibration) -> None:
    """Reject scenarios that can't run on the calibration.

    Raises:
        RangeError: The horizon starts before the base year, or a benefit multiplier is zero while
            the inequality aversion is at least 1.
        SchemaError: The carbon tax follows an unknown series.
    """
    if scenario.horizon.start_year < calibration.base_year:
        msg = f"{scenario.name}: horizon starts in {scenario.horizon.start_year}, before the calibration base year {calibration.base_year}"
        raise RangeError(msg, field=f"{scenario.name}:horizon.start_year", bound=f">= {calibration.base_year}")
    redistribution = scenario.redistribution
    if redistribution is not None and calibration.params.isew.atkinson_epsilon >= 1.0:
        for name in ("benefit_multiplier_olf", "benefit_multiplier_unemployed"):
            if getattr(redistribution, name) <= 0.0:
                msg = f"{scenario.name}: redistribution.{name} must be > 0 when the inequality aversion is >= 1"
                raise RangeError(msg, field=f"{scenario.name}:redistribution.{name}", bound="> 0")
    carbon_tax_controller(scenario, calibration)


def _demand_levels(year: int, calibration: Calibration, lags: DemandLags | None) -> dict[str, float]:
    base = calibration.base_final_demand
    if lags is None:
        return dict(base)
    economy = calibration.params.economy
    growth = (1.0 + economy.exogenous_demand_growth) ** (year - calibration.base_year)
    accelerated = economy.investment_share * lags.previous_gdp + economy.accelerator * (lags.previous_gdp - lags.gdp_before)
    return {
        "consumption": lags.planned_consumption,
        "government": base["government"] * growth,
        "investment": max(0.0, accelerated),
        "exports": base["exports"] * growth,
    }


def _income_groups(
    calibration: Calibration,
    cohorts: CohortGrid,
    labour: LabourMarketState,
    hours: float,
    hourly_wage: float,
    modifiers: PolicyModifiers,
    fte_wage: float,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Per-person income and persons of every income group; the employed groups come first.

    Returns:
        Incomes, counts and the number of employed groups.
    """
    wages = calibration.params.wages
    skill_factors = np.array([wages.skill_factors[skill] for skill in cohorts.skills])
    employed_by_skill = labour.employed_cells.sum(axis=(0, 1))
    if labour.employed > 0:
        mean_factor = float(employed_by_skill @ skill_factors) / labour.employed
        skill_incomes = hourly_wage * hours / labour.employed * skill_factors / mean_factor
    else:
        skill_incomes = np.zeros(len(cohorts.skills))
    employed_incomes = np.outer(skill_incomes, wages.dispersion_multipliers).ravel()
    employed_counts = np.outer(employed_by_skill, wages.dispersion_weights).ravel()

    fiscal = modifiers.fiscal
    pensionable = cohorts.age_group_mask(calibration.params.fiscal.pension_age_groups)
    pensioners = float(labour.inactive_cells[pensionable].sum())
    olf_benefit = benefits(fte_wage, EmploymentStatus.OUT_OF_LABOUR_FORCE, fiscal, modifiers.benefit_multipliers)
    incomes = np.concatenate(
        [
            employed_incomes,
            [
                benefits(fte_wage, EmploymentStatus.UNEMPLOYED, fiscal, modifiers.benefit_multipliers),
                olf_benefit,
                olf_benefit + pension(fte_wage, fiscal),
            ],
        ],
    )
    counts = np.concatenate([employed_counts, [labour.unemployed, labour.out_of_labour_force - pensioners, pensioners]])
    return incomes, counts, len(employed_incomes)


def _solve_year(  # noqa: PLR0913, PLR0915
    year: int,
    scenario: ScenarioSpec,
    calibration: Calibration,
    cohorts: CohortGrid,
    capital: CapitalAccount,
    balance: BalanceSheet,
    lags: DemandLags | None,
    carbon_tax: CarbonTaxState,
) -> WorldState:
    """Solve one year from its opening stocks, population and lagged demand."""
    params = calibration.params
    economy = params.economy
    base_year = calibration.base_year

    # Policies
    window = scenario.phase_window
    fiscal, multipliers = redistribution_schedule(calibration.fiscal, scenario.redistribution, window, year)
    modifiers = PolicyModifiers(
        fiscal=fiscal,
        benefit_multipliers=multipliers,
        hours_factor=wtr_schedule(scenario.wtr, window, year),
        wage_compensation=scenario.wtr is not None and scenario.wtr.wage_compensation,
        carbon_tax=carbon_tax,
    )

    # Output and labour market
    productivity = calibration.productivity(year)
    levels = _demand_levels(year, calibration, lags)
    shares = calibration.final_demand_shares
    f, imports = final_demand(levels, shares, economy.import_share)
    A = calibration.technical_coefficients
    output = solve_output(A, f, economy.solver_tolerance, economy.solver_max_iterations)
    export_output = solve_output(A, levels["exports"] * shares["exports"], economy.solver_tolerance, economy.solver_max_iterations)
    sectors = SectorSystem(A=A, f=f, x=output, labour_coeff=calibration.labour_coefficients, export_output=export_output)
    gdp = sectors.gdp
    hours = paid_hours(output, calibration.labour_coefficients, productivity)
    standard_hours = economy.base_weekly_hours * modifiers.hours_factor
    labour = employment_partition(cohorts, labour_demand(output, calibration.labour_coefficients, productivity, standard_hours))

    # Incomes
    hourly_wage = economy.base_hourly_wage * productivity * modifiers.hourly_wage_boost
    wages = hours * hourly_wage
    fte_wage = economy.base_hourly_wage * productivity * economy.base_weekly_hours * WEEKS_PER_YEAR
    incomes, counts, employed_groups = _income_groups(calibration, cohorts, labour, hours, hourly_wage, modifiers, fte_wage)
    transfers = float(incomes[employed_groups:] @ counts[employed_groups:])
    social_contributions = economy.social_contribution_rate * wages
    depreciation = economy.depreciation_rate * capital.capital_stock
    loan_interest = economy.interest_rate * balance.firm_loans
    government_interest = economy.interest_rate * balance.government_debt
    operating_surplus = gdp - wages - social_contributions - depreciation - loan_interest
    distributed_profits = economy.payout_ratio * max(operating_surplus, 0.0)
    property_income = distributed_profits + loan_interest + government_interest

    households = params.households
    propensities = np.array(households.propensities)
    groups = len(propensities)
    group_size = float(counts.sum()) / groups
    indexed_fiscal = fiscal.indexed(productivity)
    accounts = household_accounts(
        group_means(incomes, counts, groups),
        property_income * np.array(households.property_income_shares) / group_size,
        indexed_fiscal,
        propensities,
    )
    taxes = group_size * float(accounts.income_tax.sum())
    planned_consumption = group_size * float(accounts.consumption.sum())
    if lags is None:
        consumption_scale = levels["consumption"] * (1.0 + economy.productivity_growth) / planned_consumption
        reference_income = accounts.disposable_income
    else:
        consumption_scale = lags.consumption_scale
        reference_income = lags.disposable_income
    inequality = atkinson_index(propensities * reference_income, params.isew.atkinson_epsilon)
    employed_incomes = incomes[:employed_groups]
    net_wages = float(counts[:employed_groups] @ (employed_incomes - income_tax(employed_incomes, indexed_fiscal)))

    # Environment
    pressures = apply_emission_reduction(
        compute_pressures(output, export_output, imports, calibration.intensities, year),
        carbon_tax.reduction,
    )
    carbon_revenue = carbon_tax.rate * pressures.value(Pressure.CO2)

    # Sector accounts, each agent booking its own side of every flow
    H, F, G, B, R = Agent.HOUSEHOLDS, Agent.FIRMS, Agent.GOVERNMENT, Agent.BANKS, Agent.REST_OF_WORLD
    household_wages = float(counts[:employed_groups] @ employed_incomes)
    property_shares = float(np.sum(households.property_income_shares))
    deposit_interest = loan_interest + government_interest
    flows = FlowMatrix.from_entries(
        [
            ("consumption", H, -levels["consumption"]),
            ("consumption", F, levels["consumption"]),
            ("government_consumption", G, -levels["government"]),
            ("government_consumption", F, levels["government"]),
            ("investment", F, levels["investment"]),
            ("investment", F, -levels["investment"]),
            ("exports", R, -levels["exports"]),
            ("exports", F, levels["exports"]),
            ("imports", F, -imports),
            ("imports", R, imports),
            ("wages", F, -wages),
            ("wages", H, household_wages),
            ("social_contributions", F, -social_contributions),
            ("social_contributions", G, social_contributions),
            ("income_tax", H, -taxes),
            ("income_tax", G, taxes),
            ("benefits", G, -transfers),
            ("benefits", H, float(counts[employed_groups:] @ incomes[employed_groups:])),
            ("distributed_profits", F, -distributed_profits),
            ("distributed_profits", H, distributed_profits * property_shares),
            ("loan_interest", F, -loan_interest),
            ("loan_interest", B, loan_interest),
            ("government_interest", G, -government_interest),
            ("government_interest", B, government_interest),
            ("deposit_interest", B, -deposit_interest),
            ("deposit_interest", H, deposit_interest * property_shares),
            ("carbon_tax", F, -carbon_revenue),
            ("carbon_tax", G, carbon_revenue),
            ("carbon_rebate", G, -carbon_revenue),
            ("carbon_rebate", F, carbon_revenue),
        ],
    )
    # Net lending implied by the behavioural accounts of each agent
    sector_balances = {
        H.value: group_size * float(accounts.disposable_income.sum()) - levels["consumption"],
        F.value: operating_surplus + depreciation - distributed_profits - levels["investment"],
        G.value: social_contributions + taxes - levels["government"] - transfers - government_interest,
        B.value: loan_interest + government_interest - deposit_interest,
        R.value: imports - levels["exports"],
    }
    capital_next, depletion = capital_step(capital, levels["investment"], economy.depreciation_rate, year)

    # Welfare ledgers
    reduction = 1.0 - modifiers.hours_factor
    profiles = {
        key: apply_wtr_to_timeuse(profile, reduction) if key[0] is EmploymentStatus.EMPLOYED else profile
        for key, profile in calibration.time_use.items()
    }
    unpaid_hours = aggregate_unpaid_hours(cohorts, labour, profiles)
    isew = params.isew
    elapsed = year - base_year
    base_variables = {
        "individual_consumption": levels["consumption"],
        "gdp": gdp,
    }
    nondefensive = isew.nondefensive_gov_share
    values = {
        Component.UNPAID_WORK: unpaid_work_value(unpaid_hours, isew.unpaid_wage * (1.0 + isew.unpaid_wage_growth) ** elapsed),
        Component.INDIVIDUAL_CONSUMPTION: levels["consumption"],
        Component.GOVERNMENT_CONSUMPTION: levels["government"] * nondefensive.share * (1.0 + nondefensive.drift) ** elapsed,
        Component.INEQUALITY_LOSSES: inequality_loss(levels["consumption"], inequality, isew.inequality_floor),
        Component.CAPITAL_STOCK_CHANGE: capital_next.net_change,
    }
    for component, mode in calibration.component_modes.items():
        if isinstance(mode, ShareOfEndogenous):
            values[component] = share_component(base_variables[mode.base_variable], mode, year, base_year)
    extreme_weather = isew.extreme_weather.eur_per_year * (1.0 + isew.extreme_weather.annual_growth) ** elapsed
    population = cohorts.total_population
    ledgers = {}
    for variant in Variant:
        variant_values = values | {
            entry.component: entry.value
            for entry in environmental_costs(pressures, calibration.unit_costs, variant, year, base_year, extreme_weather)
        }
        for component, mode in calibration.component_modes.items():
            match mode:
                case Exogenous(series=series):
                    variant_values[component] = series(year)
        ledgers[variant] = assemble(variant, variant_values, population)

    report = doughnut_report(
        year,
        scenario.name,
        boundary_status(pressures, calibration.boundaries, population),
        SocialDrivers(labour.unemployment_rate, inequality, float(accounts.disposable_income[0])),
        params.thresholds,
    )
    stock_flow_audit(flows, gdp, year, sector_balances)

    return WorldState(
        year=year,
        scenario=scenario.name,
        cohorts=cohorts,
        labour=labour,
        time_use=profiles,
        sectors=sectors,
        macro=MacroAccounts(
            gdp=gdp,
            consumption=levels["consumption"],
            government_consumption=levels["government"],
            investment=levels["investment"],
            exports=levels["exports"],
            imports=imports,
            wages=wages,
            social_contributions=social_contributions,
            benefits=transfers,
            income_tax=taxes,
            distributed_profits=distributed_profits,
            depreciation=depreciation,
            carbon_tax_revenue=carbon_revenue,
            paid_hours=hours,
            unpaid_hours=unpaid_hours,
            hourly_wage=hourly_wage,
            net_hourly_wage=net_wages / hours if hours > 0 else 0.0,
            atkinson_index=inequality,
            decile_disposable_income=accounts.disposable_income,
        ),
        flows=flows,
        capital=capital_next,
        balance=balance.after(sector_balances),
        pressures=pressures,
        modifiers=modifiers,
        ledgers=ledgers,
        doughnut=report,
        lags=DemandLags(
            previous_gdp=gdp,
            gdp_before=lags.previous_gdp if lags is not None else gdp / (1.0 + economy.productivity_growth),
            disposable_income=accounts.disposable_income,
            consumption_scale=consumption_scale,
            planned_consumption=consumption_scale * planned_consumption,
        ),
        depletion=depletion,
    )


def initial_state(scenario: ScenarioSpec, calibration: Calibration) -> WorldState:
    """State of the calibration base year."""
    stocks = calibration.params.initial_stocks
    year = calibration.base_year
    try:
        return _solve_year(
            year,
            scenario,
            calibration,
            cohorts=calibration.cohorts,
            capital=CapitalAccount(capital_stock=stocks.capital),
            balance=BalanceSheet(
                household_deposits=stocks.household_deposits,
                firm_loans=stocks.firm_loans,
                government_debt=stocks.government_debt,
                foreign_position=stocks.foreign_position,
            ),
            lags=None,
            carbon_tax=CarbonTaxState(),
        )
    except SimulationError as e:
        e.annotate(scenario.name, year)
        raise


def step_year(
    state: WorldState,
    scenario: ScenarioSpec,
    calibration: Calibration,
    controller: CarbonTaxController | None = None,
) -> WorldState:
    """State of the year after ``state``.

    Args:
        state: State of the previous year.
        scenario: The scenario being simulated.
        calibration: The calibration.
        controller: Carbon tax controller, built from the scenario when not given.

    Returns:
        The next year's state.
    """
    year = state.year + 1
    if controller is None:
        controller = carbon_tax_controller(scenario, calibration)
    try:
        carbon_tax = (
            carbon_tax_step(state.carbon_tax, controller, state.pressures.value(Pressure.CO2), year)
            if controller is not None
            else CarbonTaxState()
        )
        return _solve_year(
            year,
            scenario,
            calibration,
            cohorts=step_cohorts(state.cohorts, calibration.schedule, year),
            capital=state.capital,
            balance=state.balance,
            lags=state.lags,
            carbon_tax=carbon_tax,
        )
    except SimulationError as e:
        e.annotate(scenario.name, year)
        raise


def simulate(scenario: ScenarioSpec, calibration: Calibration) -> Iterator[WorldState]:
    """Yield the state of every year from the calibration base year to the end of the horizon."""
    controller = carbon_tax_controller(scenario, calibration)
    state = initial_state(scenario, calibration)
    yield state
    while state.year < scenario.horizon.end_year:
        state = step_year(state, scenario, calibration, controller)
        yield state


def run_scenario(scenario: ScenarioSpec, calibration: Calibration) -> Trajectory:
    """Simulate a scenario and keep the summaries of the horizon years.

    Years between the calibration base year and the start of the horizon are simulated but not recorded.
    """
    check_scenario(scenario, calibration)
    start = scenario.horizon.start_year
    if start > calibration.base_year:
        LOGGER.warning(f"{COLOR_YELLOW}{scenario.name}: spinning up from {calibration.base_year} to {start}{COLOR_RESET}")
    summaries = tuple(state.summary() for state in simulate(scenario, calibration) if state.year >= start)
    LOGGER.info(f"Simulated {scenario.name} over {start}-{scenario.horizon.end_year}")
    return Trajectory(scenario=scenario.name, fingerprint=calibration.fingerprint, summaries=summaries)


def indexed_frame(frame: pd.DataFrame) -> pd.DataFrame:
    """Values relative to the first year, which is set to 100; columns starting at 0 become NaN."""
    base = frame.iloc[0].where(frame.iloc[0] != 0.0)
    return frame.div(base, axis=1).mul(100.0)


def _long(frame: pd.DataFrame, scenario: str, name: str) -> pd.DataFrame:
    long = frame.rename_axis(index="year", columns="variable").stack().rename(name).reset_index()
    long.insert(0, "scenario", scenario)
    return long


def compare(trajectories: Sequence[Trajectory]) -> Comparison:
    """Compare trajectories against the first one.

    Args:
        trajectories: At least two trajectories over the same years, built from the same calibration.

    Returns:
        Per-year deltas to the first trajectory, the ranking of the last year and the indexed series.
    """
    if len(trajectories) < 2:  # noqa: PLR2004
        msg = f"Need at least two trajectories to compare, got {len(trajectories)}"
        raise ValueError(msg)
    baseline = trajectories[0]
    if mismatched := [t.scenario for t in trajectories if t.fingerprint != baseline.fingerprint]:
        msg = f"Trajectories {', '.join(mismatched)} use another calibration than {baseline.scenario}"
        raise FingerprintMismatchError(msg)
    if mismatched := [t.scenario for t in trajectories if t.years != baseline.years]:
        msg = f"Trajectories {', '.join(mismatched)} cover other years than {baseline.scenario}"
        raise ValueError(msg)

    base_frame = baseline.frame()
    deltas = []
    indexed = []
    records = []
    for trajectory in trajectories:
        frame = trajectory.frame()
        long = _long(frame, trajectory.scenario, "value")
        long["delta"] = _long(frame - base_frame[frame.columns], trajectory.scenario, "delta")["delta"]
        deltas.append(long)
        indexed.append(_long(indexed_frame(frame[list(RANKED_VARIABLES)]), trajectory.scenario, "value"))
        records.extend(
            {"scenario": trajectory.scenario, "variable": variable, "value": float(frame[variable].iloc[-1])}
            for variable in RANKED_VARIABLES
        )
    ranking = pd.DataFrame.from_records(records)
    ranking["rank"] = ranking.groupby("variable")["value"].rank(ascending=False, method="min").astype(int)
    ranking = ranking.sort_values(["variable", "rank", "scenario"], kind="stable").reset_index(drop=True)
    return Comparison(
        deltas=pd.concat(deltas, ignore_index=True),
        ranking=ranking[["variable", "rank", "scenario", "value"]],
        indexed=pd.concat(indexed, ignore_index=True),
    )
