"""Population cohorts, labour supply, employment status and time use."""

from collections.abc import Mapping
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from sewsim.calibration_utils.series import Series
from sewsim.errors import DegenerateProfileError

HOURS_PER_WEEK = 168.0
WEEKS_PER_YEAR = 52
NON_PAID_CATEGORIES = ("unpaid_work", "sleep", "physical_care", "leisure", "residual")
TIME_USE_CATEGORIES = ("paid_work", *NON_PAID_CATEGORIES)


class EmploymentStatus(str, Enum):
    """Employment status of an adult."""

    EMPLOYED = "employed"
    UNEMPLOYED = "unemployed"
    OUT_OF_LABOUR_FORCE = "out_of_labour_force"


@dataclass(frozen=True, slots=True)
class CohortGrid:
    """Population by (gender, age group, skill).

    Arrays are indexed [gender, age_group, skill]. Age groups before ``adult_from`` are children:
    they never participate in the labour market.
    """

    genders: tuple[str, ...]
    age_groups: tuple[str, ...]
    skills: tuple[str, ...]
    population: np.ndarray
    participation_rate: np.ndarray
    employment_share: np.ndarray
    adult_from: int = 1

    @property
    def shape(self) -> tuple[int, int, int]:
        """Grid dimensions."""
        return (len(self.genders), len(self.age_groups), len(self.skills))

    @property
    def adult_mask(self) -> np.ndarray:
        """Boolean mask of the adult cells."""
        mask = np.zeros(self.shape, dtype=bool)
        mask[:, self.adult_from :, :] = True
        return mask

    @property
    def total_population(self) -> float:
        """Persons in all cells."""
        return float(self.population.sum())

    @property
    def adult_population(self) -> float:
        """Persons in the adult cells."""
        return float(self.population[:, self.adult_from :, :].sum())

    @property
    def labour_force_cells(self) -> np.ndarray:
        """Labour force per cell."""
        return self.population * self.participation_rate * self.adult_mask

    @property
    def labour_force(self) -> float:
        """Persons participating in the labour market."""
        return float(self.labour_force_cells.sum())

    def age_group_mask(self, age_groups: tuple[str, ...]) -> np.ndarray:
        """Boolean mask of the cells in the given age groups."""
        mask = np.zeros(self.shape, dtype=bool)
        for age_group in age_groups:
            mask[:, self.age_groups.index(age_group), :] = True
        return mask


@dataclass(frozen=True, slots=True)
class CohortSchedule:
    """Ageing schedule: per-band survival and promotion rates plus births."""

    survival: np.ndarray
    promotion: np.ndarray
    births: Series
    birth_shares: np.ndarray

    @classmethod
    def identity(cls, grid: CohortGrid) -> "CohortSchedule":
        """No births, no deaths, no promotion."""
        bands = len(grid.age_groups)
        return cls(
            survival=np.ones(bands),
            promotion=np.zeros(bands),
            births=Series.constant(0.0),
            birth_shares=np.zeros((len(grid.genders), len(grid.skills))),
        )


@dataclass(frozen=True, slots=True)
class LabourMarketState:
    """Partition of the adult population by employment status."""

    employed: float
    unemployed: float
    out_of_labour_force: float
    labour_force: float
    employed_cells: np.ndarray
    unemployed_cells: np.ndarray
    inactive_cells: np.ndarray

    @property
    def unemployment_rate(self) -> float:
        """Unemployed share of the labour force."""
        return self.unemployed / self.labour_force if self.labour_force > 0 else 0.0

    def status_cells(self, status: EmploymentStatus) -> np.ndarray:
        """Persons per cell with the given status."""
        match status:
            case EmploymentStatus.EMPLOYED:
                return self.employed_cells
            case EmploymentStatus.UNEMPLOYED:
                return self.unemployed_cells
            case EmploymentStatus.OUT_OF_LABOUR_FORCE:
                return self.inactive_cells
        msg = f"Unknown employment status {status}"
        raise ValueError(msg)

    def group_counts(self, genders: tuple[str, ...]) -> dict[tuple[EmploymentStatus, str], float]:
        """Persons per (status, gender) group."""
        return {
            (status, gender): float(self.status_cells(status)[index].sum())
            for status in EmploymentStatus
            for index, gender in enumerate(genders)
        }


@dataclass(frozen=True, slots=True)
class TimeUseProfile:
    """Average weekly hours of one (employment status, gender) group."""

    status: EmploymentStatus
    gender: str
    paid_work: float
    unpaid_work: float
    sleep: float
    physical_care: float
    leisure: float
    residual: float

    @property
    def total(self) -> float:
        """Hours over all categories, 168 for a valid profile."""
        return float(sum(getattr(self, category) for category in TIME_USE_CATEGORIES))

    @property
    def non_paid(self) -> np.ndarray:
        """Hours in the categories other than paid work."""
        return np.array([getattr(self, category) for category in NON_PAID_CATEGORIES])


def step_cohorts(grid: CohortGrid, schedule: CohortSchedule, year: int) -> CohortGrid:
    """Age the population by one year.

    Survivors of each band either stay or are promoted to the next band; promotions out of
    the last band leave the population. Births of ``year`` enter the first band.

    Args:
        grid: Population at the end of the previous year.
        schedule: Survival, promotion and birth schedule.
        year: The year being entered.

    Returns:
        The population of ``year``.
    """
    survival = schedule.survival[None, :, None]
    promotion = schedule.promotion[None, :, None]
    population = grid.population * survival * (1.0 - promotion)
    promoted = grid.population * survival * promotion
    population[:, 1:, :] += promoted[:, :-1, :]
    population[:, 0, :] += schedule.births(year) * schedule.birth_shares
    return replace(grid, population=population)


def employment_partition(grid: CohortGrid, labour_demand: float) -> LabourMarketState:
    """Split the adult population into employed, unemployed and inactive persons.

    Unemployment is allocated to cells in proportion to their base-year unemployment
    (labour force times one minus the base employment share); once that pool is exhausted
    the remaining unemployment is spread over the rest of each cell's labour force.

    Args:
        grid: Population of the year.
        labour_demand: Persons demanded at standard hours.

    Returns:
        The labour market partition.
    """
    if labour_demand < 0:
        msg = f"Labour demand must be >= 0, got {labour_demand}"
        raise ValueError(msg)
    labour_force_cells = grid.labour_force_cells
    labour_force = float(labour_force_cells.sum())
    employed = min(labour_demand, labour_force)
    unemployed = labour_force - employed

    base_unemployed = labour_force_cells * (1.0 - grid.employment_share)
    base_total = float(base_unemployed.sum())
    if unemployed <= base_total:
        unemployed_cells = base_unemployed * unemployed / base_total if base_total > 0 else np.zeros(grid.shape)
    else:
        unemployed_cells = base_unemployed + (labour_force_cells - base_unemployed) * (unemployed - base_total) / (
            labour_force - base_total
        )
    return LabourMarketState(
        employed=employed,
        unemployed=unemployed,
        out_of_labour_force=grid.adult_population - labour_force,
        labour_force=labour_force,
        employed_cells=labour_force_cells - unemployed_cells,
        unemployed_cells=unemployed_cells,
        inactive_cells=(grid.population - labour_force_cells) * grid.adult_mask,
    )


def apply_wtr_to_timeuse(profile: TimeUseProfile, reduction: float) -> TimeUseProfile:
    """Cut paid work by ``reduction`` and spread the freed hours over the other categories.

    Freed hours go to each non-paid category in proportion to its hours before the cut.

    Args:
        profile: An employed profile.
        reduction: Fraction of paid hours removed.

    Returns:
        The profile after the cut.
    """
    if not 0.0 <= reduction <= 1.0:
        msg = f"Working-time reduction must lie in [0, 1], got {reduction}"
        raise ValueError(msg)
    freed = profile.paid_work * reduction
    if freed == 0.0:
        return profile
    non_paid = profile.non_paid
    if (total := non_paid.sum()) <= 0.0:
        msg = f"Can't allocate {freed} freed hours: all non-paid categories of the {profile.status.value}/{profile.gender} profile are empty"
        raise DegenerateProfileError(msg)
    non_paid = non_paid + freed * non_paid / total
    return replace(
        profile,
        paid_work=profile.paid_work - freed,
        **dict(zip(NON_PAID_CATEGORIES, non_paid.tolist(), strict=True)),
    )


def aggregate_unpaid_hours(
    grid: CohortGrid,
    labour_state: LabourMarketState,
    profiles: Mapping[tuple[EmploymentStatus, str], TimeUseProfile],
) -> float:
    """Yearly unpaid working hours summed across the adult population.

    Args:
        grid: Population of the year.
        labour_state: Employment partition of the year.
        profiles: Time-use profile per (status, gender).

    Returns:
        Unpaid hours per year.
    """
    return WEEKS_PER_YEAR * sum(
        persons * profiles[group].unpaid_work for group, persons in labour_state.group_counts(grid.genders).items()
    )
