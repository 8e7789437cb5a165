"""Exception hierarchy shared by all modules.

The CLI maps these onto process exit codes, so every failure mode that a
caller may want to distinguish gets its own class.
"""


class StrongHinfError(Exception):
    """Base class for all library errors."""


class CausalityError(StrongHinfError):
    """The algebraic part is ill-posed: U^T A0 V is singular.

    Raised by validation and by the interconnection builder when the
    assembled closed loop contains an algebraic loop.
    """


class StrongStabilityViolation(StrongHinfError):
    """The system is not strongly exponentially stable.

    Norm computations require stability; synthesis treats this as an
    infinite objective value instead of propagating the exception.
    """


class NumericalFailure(StrongHinfError):
    """An eigenvalue/linear solve failed or hit an iteration cap."""


class NoStabilizingStart(StrongHinfError):
    """Every synthesis start point gave an unstable closed loop."""
