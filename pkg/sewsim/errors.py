"""Exceptions raised while loading inputs or running a simulation."""


class ConfigError(ValueError):
    """Raised when a scenario document or calibration bundle is invalid."""


class ConfigSyntaxError(ConfigError):
    """Raised when a document can't be parsed at all."""

    def __init__(
        self,
        msg: str,
        path: str | None = None,
        line: int | None = None,
        column: int | None = None,
    ) -> None:
        """Constructor.

        Args:
            msg: Error message.
            path: File the document was read from, if any.
            line: 1-based line of the offending token.
            column: 1-based column of the offending token.
        """
        super().__init__(msg)
        self.path = path
        self.line = line
        self.column = column


class SchemaError(ConfigError):
    """Raised when a field is missing, unexpected, or of the wrong type."""

    def __init__(self, msg: str, field: str) -> None:
        """Constructor."""
        super().__init__(msg)
        self.field = field


class RangeError(ConfigError):
    """Raised when a value lies outside its allowed range."""

    def __init__(self, msg: str, field: str, bound: str | None = None) -> None:
        """Constructor."""
        super().__init__(msg)
        self.field = field
        self.bound = bound


class UnknownComponentError(KeyError):
    """Raised when an ISEW component id isn't registered."""


class FingerprintMismatchError(ValueError):
    """Raised when trajectories built from different calibrations are compared."""


class SimulationError(RuntimeError):
    """Base class of errors raised while simulating a scenario."""

    def __init__(self, msg: str, scenario: str | None = None, year: int | None = None) -> None:
        """Constructor."""
        super().__init__(msg)
        self.scenario = scenario
        self.year = year

    def annotate(self, scenario: str | None = None, year: int | None = None) -> "SimulationError":
        """Attach scenario and year context unless already set."""
        if self.scenario is None:
            self.scenario = scenario
        if self.year is None:
            self.year = year
        return self

    def __str__(self) -> str:
        """Message prefixed with the scenario/year context."""
        context = []
        if self.scenario is not None:
            context.append(f"scenario {self.scenario}")
        if self.year is not None:
            context.append(f"year {self.year}")
        message = super().__str__()
        return f"[{', '.join(context)}] {message}" if context else message


class SingularEconomyError(SimulationError):
    """Raised when the technical-coefficient matrix has spectral radius >= 1."""


class NonConvergenceError(SimulationError):
    """Raised when an iterative solve exceeds its iteration cap."""


class InconsistencyError(SimulationError):
    """Raised when the economy-wide net lending doesn't sum to zero."""

    def __init__(
        self,
        msg: str,
        residual: float,
        decomposition: dict[str, float],
        year: int | None = None,
    ) -> None:
        """Constructor.

        Args:
            msg: Error message.
            residual: Signed sum of net lending across agents.
            decomposition: Net lending per agent.
            year: Simulation year of the violation.
        """
        super().__init__(msg, year=year)
        self.residual = residual
        self.decomposition = decomposition


class ZeroTargetError(SimulationError):
    """Raised when the emission target of a year is zero."""


class DegenerateProfileError(SimulationError):
    """Raised when freed time can't be allocated to any time-use category."""


class EpsilonDomainError(SimulationError):
    """Raised when the inequality aversion is outside the domain of the Atkinson index."""


class MissingUnitCostError(SimulationError):
    """Raised when an environmental cost has no unit cost."""


class MissingComponentError(SimulationError):
    """Raised when a ledger is assembled without one of its member components."""


class DuplicateComponentError(SimulationError):
    """Raised when a ledger is assembled with a component given twice."""
