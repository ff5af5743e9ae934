"""Exception hierarchy shared across the package."""


class AbcmuError(Exception):
    """Base class for all abcmu-specific errors."""


class ConfigurationError(AbcmuError):
    """A model, kernel or run configuration is invalid."""


class InputError(AbcmuError):
    """A function received data violating its preconditions."""


class BudgetExhaustedError(AbcmuError):
    """A simulation budget ran out before the sampler could proceed.

    Carries the number of attempts made so callers can report it.
    """

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


class DegenerateWeightsError(AbcmuError):
    """All importance weights are zero (kernel scale too stringent)."""


class InvariantBreachError(AbcmuError):
    """An internal precondition that callers must maintain was violated."""


class NumericalFaultError(AbcmuError):
    """A non-finite quantity appeared where a finite one was required."""


class InsufficientSampleError(AbcmuError):
    """Too few draws to compute the requested diagnostic."""


class TailMassError(AbcmuError):
    """An enumeration bound leaves too much probability mass uncovered."""
