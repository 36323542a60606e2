"""Exception hierarchy shared across the library.

Two broad families matter to callers: problems with the data handed in
(``DataError``) and problems arising during computation (``NumericalError``).
The CLI maps them to distinct exit codes.
"""


class InformetError(Exception):
    """Base class for all library-specific errors."""


class DataError(InformetError):
    """Input data violates a precondition (shape, content, or identifiers)."""


class InsufficientSamplesError(DataError):
    """Too few samples for the requested estimate."""


class DegenerateInputError(DataError):
    """Input has no usable variation (identical points, zero distances)."""


class IdMismatchError(DataError):
    """Sample identifiers of two input files do not match."""

    def __init__(self, message, unmatched=()):
        super().__init__(message)
        self.unmatched = list(unmatched)


class NoEventsError(DataError):
    """Survival data contains no observed events, the test is undefined."""


class NumericalError(InformetError):
    """Computation failed or cannot deliver the requested output."""


class RankDeficiencyError(NumericalError):
    """Requested rank exceeds the numerical rank of a matrix."""

    def __init__(self, message, attainable_rank=None):
        super().__init__(message)
        self.attainable_rank = attainable_rank


class DivergenceError(NumericalError):
    """Iteration produced non-finite values; a smaller step may help."""
