"""Environmental pressures of production and consumption and their biophysical boundaries."""

from collections.abc import Mapping
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np


class Pressure(str, Enum):
    """Simulated environmental pressures, in the row order of the intensity table."""

    CO2 = "co2"
    NITROGEN = "nitrogen"
    AIR_POLLUTANTS = "air_pollutants"
    PRIMARY_ENERGY = "primary_energy"
    LAND_SYSTEM = "land_system"


PRESSURES = tuple(Pressure)


class Basis(str, Enum):
    """Accounting basis of a pressure."""

    TERRITORIAL = "territorial"
    FOOTPRINT = "footprint"


@dataclass(frozen=True, slots=True)
class IntensityTable:
    """Pressure per EUR of output by sector, declining at a constant yearly rate.

    ``intensities`` and ``import_intensities`` hold base-year values with one row per Pressure.
    """

    intensities: np.ndarray
    decline_rates: np.ndarray
    import_intensities: np.ndarray
    units: tuple[str, ...]
    base_year: int

    def __post_init__(self) -> None:
        """Validate the shapes and the decline rates."""
        if self.intensities.shape[0] != len(PRESSURES):
            msg = f"Expected {len(PRESSURES)} intensity rows, got {self.intensities.shape[0]}"
            raise ValueError(msg)
        if np.any(self.intensities < 0) or np.any(self.import_intensities < 0):
            msg = "Intensities must be >= 0"
            raise ValueError(msg)
        if np.any(self.decline_rates < 0) or np.any(self.decline_rates >= 1):
            msg = f"Decline rates must lie in [0, 1), got {self.decline_rates}"
            raise ValueError(msg)

    def decline_factors(self, year: int) -> np.ndarray:
        """Intensity of ``year`` relative to the base year, per pressure."""
        return (1.0 - self.decline_rates) ** (year - self.base_year)

    def at(self, year: int) -> np.ndarray:
        """Sector intensities of ``year``."""
        return self.intensities * self.decline_factors(year)[:, None]

    def imports_at(self, year: int) -> np.ndarray:
        """Pressure per EUR of imports in ``year``."""
        return self.import_intensities * self.decline_factors(year)


@dataclass(frozen=True, slots=True)
class PressureAccount:
    """Pressures of one year, one entry per Pressure.

    The footprint is territorial pressure minus the pressure embodied in exports plus the
    pressure embodied in imports.
    """

    territorial: np.ndarray
    exported: np.ndarray
    imported: np.ndarray

    @property
    def footprint(self) -> np.ndarray:
        """Consumption-based pressures."""
        return self.territorial - self.exported + self.imported

    def value(self, pressure: Pressure, basis: Basis = Basis.TERRITORIAL) -> float:
        """One pressure on the given accounting basis."""
        index = PRESSURES.index(Pressure(pressure))
        match Basis(basis):
            case Basis.TERRITORIAL:
                return float(self.territorial[index])
            case Basis.FOOTPRINT:
                return float(self.footprint[index])
        msg = f"Unknown accounting basis {basis}"
        raise ValueError(msg)


@dataclass(frozen=True, slots=True)
class Boundary:
    """Per-capita limit of one pressure."""

    per_capita_limit: float
    basis: Basis

    def __post_init__(self) -> None:
        """Limits are positive."""
        if self.per_capita_limit <= 0:
            msg = f"Boundary limits must be > 0, got {self.per_capita_limit}"
            raise ValueError(msg)


BoundarySet = Mapping[Pressure, Boundary]


def compute_pressures(
    output: np.ndarray,
    export_output: np.ndarray,
    imports: float,
    table: IntensityTable,
    year: int,
) -> PressureAccount:
    """Territorial and footprint pressures of one year.

    Args:
        output: Gross output per sector.
        export_output: Gross output per sector induced by exports.
        imports: Total imports.
        table: Intensity table.
        year: Year of the intensities.

    Returns:
        The pressure account.
    """
    intensities = table.at(year)
    return PressureAccount(
        territorial=intensities @ output,
        exported=intensities @ export_output,
        imported=table.imports_at(year) * imports,
    )


def apply_emission_reduction(account: PressureAccount, reduction: float) -> PressureAccount:
    """Scale every CO2 flow by (1 - reduction), leaving the other pressures untouched."""
    if not 0.0 <= reduction <= 1.0:
        msg = f"Emission reduction must lie in [0, 1], got {reduction}"
        raise ValueError(msg)
    factor = np.ones(len(PRESSURES))
    factor[PRESSURES.index(Pressure.CO2)] = 1.0 - reduction
    return replace(
        account,
        territorial=account.territorial * factor,
        exported=account.exported * factor,
        imported=account.imported * factor,
    )


def boundary_status(account: PressureAccount, boundaries: BoundarySet, population: float) -> dict[Pressure, float]:
    """Overshoot ratio of each bounded pressure; above 1 the boundary is transgressed."""
    if population <= 0:
        msg = f"Population must be > 0, got {population}"
        raise ValueError(msg)
    return {
        pressure: account.value(pressure, boundary.basis) / (boundary.per_capita_limit * population)
        for pressure, boundary in boundaries.items()
    }
