"""Test pressure accounting and boundary status."""

import numpy as np
import pytest

from sewsim.model.environment import (
    PRESSURES,
    Basis,
    Boundary,
    IntensityTable,
    Pressure,
    apply_emission_reduction,
    boundary_status,
    compute_pressures,
)


@pytest.fixture
def table() -> IntensityTable:
    """Two sectors, pressure rows 1..5 times the first column."""
    intensities = np.array([[float(row + 1), 1.0] for row in range(len(PRESSURES))])
    return IntensityTable(
        intensities=intensities,
        decline_rates=np.array([0.1, 0.0, 0.0, 0.0, 0.0]),
        import_intensities=np.full(len(PRESSURES), 2.0),
        units=("t", "t", "t", "GJ", "ha"),
        base_year=2020,
    )


def test_intensity_decline(table):
    """Test the yearly decline of intensities."""
    assert np.allclose(table.decline_factors(2022), [0.81, 1.0, 1.0, 1.0, 1.0])
    assert np.allclose(table.at(2022)[0], [0.81, 0.81])
    assert table.imports_at(2022)[0] == pytest.approx(1.62)
    assert np.array_equal(table.at(2020), table.intensities)


def test_intensity_validation():
    """Test invalid tables are rejected."""
    rows = len(PRESSURES)
    with pytest.raises(ValueError, match="intensity rows"):
        IntensityTable(np.ones((2, 2)), np.zeros(rows), np.zeros(rows), ("t",) * rows, 2020)
    with pytest.raises(ValueError, match="Decline rates"):
        IntensityTable(np.ones((rows, 2)), np.ones(rows), np.zeros(rows), ("t",) * rows, 2020)
    with pytest.raises(ValueError, match=">= 0"):
        IntensityTable(-np.ones((rows, 2)), np.zeros(rows), np.zeros(rows), ("t",) * rows, 2020)


def test_compute_pressures(table):
    """Test territorial and footprint accounting."""
    account = compute_pressures(np.array([10.0, 20.0]), np.array([2.0, 4.0]), 5.0, table, 2020)
    assert account.value(Pressure.CO2) == pytest.approx(30.0)
    assert account.value(Pressure.NITROGEN) == pytest.approx(40.0)
    # 30 territorial - 6 exported + 10 imported
    assert account.value(Pressure.CO2, Basis.FOOTPRINT) == pytest.approx(34.0)
    assert np.allclose(account.footprint, account.territorial - account.exported + account.imported)
    assert account.value("land_system", "footprint") == account.value(Pressure.LAND_SYSTEM, Basis.FOOTPRINT)


def test_apply_emission_reduction(table):
    """Test only CO2 is reduced, on every accounting basis."""
    account = compute_pressures(np.array([10.0, 20.0]), np.array([2.0, 4.0]), 5.0, table, 2020)
    reduced = apply_emission_reduction(account, 0.25)
    assert reduced.value(Pressure.CO2) == pytest.approx(22.5)
    assert reduced.value(Pressure.CO2, Basis.FOOTPRINT) == pytest.approx(25.5)
    assert np.array_equal(reduced.territorial[1:], account.territorial[1:])
    assert apply_emission_reduction(account, 0.0).value(Pressure.CO2) == account.value(Pressure.CO2)
    with pytest.raises(ValueError, match="must lie in"):
        apply_emission_reduction(account, 1.2)


def test_boundary_status(table):
    """Test overshoot ratios on each boundary's basis."""
    account = compute_pressures(np.array([10.0, 20.0]), np.array([2.0, 4.0]), 5.0, table, 2020)
    boundaries = {
        Pressure.CO2: Boundary(2.0, Basis.FOOTPRINT),
        Pressure.NITROGEN: Boundary(5.0, Basis.TERRITORIAL),
    }
    status = boundary_status(account, boundaries, population=10.0)
    assert status[Pressure.CO2] == pytest.approx(34.0 / 20.0)
    assert status[Pressure.NITROGEN] == pytest.approx(40.0 / 50.0)
    with pytest.raises(ValueError, match="Population"):
        boundary_status(account, boundaries, population=0.0)
    with pytest.raises(ValueError, match="limits"):
        Boundary(0.0, Basis.TERRITORIAL)
