"""Year-indexed piecewise-linear series."""

from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, slots=True)
class Series:
    """A series given by (year, value) knots.

    Values between knots are interpolated linearly; values outside the knots are held flat.
    """

    years: tuple[int, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        """Validate the knots."""
        if len(self.years) == 0 or len(self.years) != len(self.values):
            msg = "A series needs at least one knot and one value per knot"
            raise ValueError(msg)
        if any(b <= a for a, b in zip(self.years, self.years[1:], strict=False)):
            msg = f"Series knots must be strictly increasing, got {self.years}"
            raise ValueError(msg)

    @classmethod
    def from_mapping(cls, knots: Mapping[int | str, float]) -> "Series":
        """Build a series from a {year: value} mapping (keys may be strings as in JSON)."""
        items = sorted((int(year), float(value)) for year, value in knots.items())
        return cls(
            years=tuple(year for year, _ in items),
            values=tuple(value for _, value in items),
        )

    @classmethod
    def constant(cls, value: float) -> "Series":
        """A series with the same value every year."""
        return cls(years=(0,), values=(float(value),))

    def __call__(self, year: float) -> float:
        """Value at the given year."""
        return float(np.interp(year, self.years, self.values))

    def to_dict(self) -> dict[str, float]:
        """JSON-compatible {year: value} mapping."""
        return {str(year): value for year, value in zip(self.years, self.values, strict=True)}
