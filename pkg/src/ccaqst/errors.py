"""Exception hierarchy. Every error raised on purpose derives from CcaError."""


class CcaError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 3


class InvalidConfigurationError(CcaError, ValueError):
    exit_code = 2


class ScenarioError(InvalidConfigurationError):
    """Scenario file failed schema validation."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class NumericalError(CcaError, ArithmeticError):
    exit_code = 3


class DegenerateSpectrumError(NumericalError):
    pass


class CapacityError(NumericalError):
    """A Hilbert-space block would exceed the configured memory budget."""

    def __init__(self, dimension, budget, what="sector"):
        self.dimension = dimension
        self.budget = budget
        super().__init__(f"{what} dimension {dimension} exceeds budget {budget}")


class TruncationError(NumericalError):
    pass


class AnalysisError(NumericalError):
    pass
