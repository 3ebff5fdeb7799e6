"""Test cohorts, labour supply and time use."""

import numpy as np
import pytest

from sewsim.calibration_utils.series import Series
from sewsim.errors import DegenerateProfileError
from sewsim.model.demographics import (
    CohortGrid,
    CohortSchedule,
    EmploymentStatus,
    TimeUseProfile,
    aggregate_unpaid_hours,
    apply_wtr_to_timeuse,
    employment_partition,
    step_cohorts,
)

GENDERS = ("female", "male")
AGE_GROUPS = ("0-14", "15-64", "65+")
SKILLS = ("low", "high")


def make_grid() -> CohortGrid:
    """1000 persons per cell; 80% of working-age and 10% of older adults participate."""
    shape = (len(GENDERS), len(AGE_GROUPS), len(SKILLS))
    participation = np.zeros(shape)
    participation[:, 1, :] = 0.8
    participation[:, 2, :] = 0.1
    employment = np.zeros(shape)
    employment[:, 1, :] = 0.9
    employment[:, 2, :] = 0.95
    return CohortGrid(
        genders=GENDERS,
        age_groups=AGE_GROUPS,
        skills=SKILLS,
        population=np.full(shape, 1000.0),
        participation_rate=participation,
        employment_share=employment,
    )


def make_profile(status: EmploymentStatus, gender: str, paid: float, unpaid: float) -> TimeUseProfile:
    """A week with 56 h sleep, 10 h care and 30 h leisure."""
    return TimeUseProfile(
        status=status,
        gender=gender,
        paid_work=paid,
        unpaid_work=unpaid,
        sleep=56.0,
        physical_care=10.0,
        leisure=30.0,
        residual=168.0 - paid - unpaid - 96.0,
    )


def test_grid():
    """Test population aggregates."""
    grid = make_grid()
    assert grid.total_population == 12000.0
    assert grid.adult_population == 8000.0
    assert grid.labour_force == pytest.approx(3600.0)
    mask = grid.age_group_mask(("65+",))
    assert mask.sum() == 4
    assert mask[:, 2, :].all()


def test_step_cohorts():
    """Test survival, promotion and births."""
    grid = make_grid()
    schedule = CohortSchedule(
        survival=np.array([0.99, 0.98, 0.9]),
        promotion=np.array([0.1, 0.05, 0.0]),
        births=Series.constant(200.0),
        birth_shares=np.outer([0.5, 0.5], [0.6, 0.4]),
    )
    aged = step_cohorts(grid, schedule, 2021)
    assert aged.population[0, 0, 0] == pytest.approx(891.0 + 60.0)
    assert aged.population[1, 0, 1] == pytest.approx(891.0 + 40.0)
    assert aged.population[0, 1, 0] == pytest.approx(931.0 + 99.0)
    assert aged.population[0, 2, 0] == pytest.approx(900.0 + 49.0)
    assert grid.population[0, 0, 0] == 1000.0


def test_identity_schedule():
    """Test the identity schedule leaves the population unchanged."""
    grid = make_grid()
    aged = step_cohorts(grid, CohortSchedule.identity(grid), 2021)
    assert np.array_equal(aged.population, grid.population)


def test_employment_partition():
    """Test the partition identity and the allocation of unemployment."""
    grid = make_grid()
    base = employment_partition(grid, 3260.0)
    assert base.employed + base.unemployed == pytest.approx(base.labour_force)
    assert base.unemployed == pytest.approx(340.0)
    assert base.unemployment_rate == pytest.approx(340.0 / 3600.0)
    assert base.unemployed_cells[0, 1, 0] == pytest.approx(80.0)
    assert base.unemployed_cells[0, 2, 0] == pytest.approx(5.0)
    assert base.out_of_labour_force == pytest.approx(4400.0)
    assert base.inactive_cells.sum() == pytest.approx(4400.0)
    assert np.allclose(base.employed_cells + base.unemployed_cells + base.inactive_cells, grid.population * grid.adult_mask)

    full = employment_partition(grid, 5000.0)
    assert full.employed == pytest.approx(3600.0)
    assert full.unemployed == 0.0

    none = employment_partition(grid, 0.0)
    assert np.allclose(none.unemployed_cells, grid.labour_force_cells)
    assert none.unemployment_rate == pytest.approx(1.0)

    with pytest.raises(ValueError, match="must be >= 0"):
        employment_partition(grid, -1.0)


def test_apply_wtr_to_timeuse():
    """Test freed hours are spread over the non-paid categories."""
    profile = make_profile(EmploymentStatus.EMPLOYED, "female", 36.0, 23.408)
    reduced = apply_wtr_to_timeuse(profile, 0.15)
    assert reduced.paid_work == pytest.approx(30.6)
    assert reduced.unpaid_work == pytest.approx(23.408 + 5.4 * 23.408 / 132.0)
    assert reduced.sleep == pytest.approx(56.0 + 5.4 * 56.0 / 132.0)
    assert reduced.total == pytest.approx(168.0)
    assert apply_wtr_to_timeuse(profile, 0.0) is profile

    with pytest.raises(ValueError, match="must lie in"):
        apply_wtr_to_timeuse(profile, 1.5)
    workaholic = TimeUseProfile(EmploymentStatus.EMPLOYED, "male", 168.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    with pytest.raises(DegenerateProfileError):
        apply_wtr_to_timeuse(workaholic, 0.1)


def test_aggregate_unpaid_hours():
    """Test unpaid hours summed over status and gender groups."""
    grid = make_grid()
    labour_state = employment_partition(grid, 3260.0)
    profiles = {
        (EmploymentStatus.EMPLOYED, "female"): make_profile(EmploymentStatus.EMPLOYED, "female", 36.0, 20.0),
        (EmploymentStatus.EMPLOYED, "male"): make_profile(EmploymentStatus.EMPLOYED, "male", 41.0, 10.0),
        (EmploymentStatus.UNEMPLOYED, "female"): make_profile(EmploymentStatus.UNEMPLOYED, "female", 0.0, 30.0),
        (EmploymentStatus.UNEMPLOYED, "male"): make_profile(EmploymentStatus.UNEMPLOYED, "male", 0.0, 25.0),
        (EmploymentStatus.OUT_OF_LABOUR_FORCE, "female"): make_profile(EmploymentStatus.OUT_OF_LABOUR_FORCE, "female", 0.0, 35.0),
        (EmploymentStatus.OUT_OF_LABOUR_FORCE, "male"): make_profile(EmploymentStatus.OUT_OF_LABOUR_FORCE, "male", 0.0, 20.0),
    }
    weekly = 1630.0 * (20.0 + 10.0) + 170.0 * (30.0 + 25.0) + 2200.0 * (35.0 + 20.0)
    assert aggregate_unpaid_hours(grid, labour_state, profiles) == pytest.approx(52.0 * weekly)
