"""Exception hierarchy shared by every cusplab module."""


class CuspLabError(Exception):
    """Base class for all library errors."""


class DomainError(CuspLabError, ValueError):
    """An argument lies outside the domain of an operation."""


class DegenerateGeodesicError(DomainError):
    """Both endpoints of a geodesic coincide."""


class RationalInputError(DomainError):
    """A rational number was passed where a generic irrational is required."""


class SpecSyntaxError(DomainError):
    """A real-number specification string could not be parsed."""


class PrecisionExhausted(CuspLabError):
    """The available precision cannot certify the requested quantity.

    ``certified`` carries the largest count (of partial quotients, or of
    terms) that *could* be certified, when that is meaningful.
    """

    def __init__(self, message: str, certified: int | None = None):
        super().__init__(message)
        self.certified = certified


class TieError(CuspLabError):
    """Two approximants have the same depth parameter."""


class InsufficientEvents(CuspLabError):
    """Too few events are available for a statistic."""


class NodeBudgetExceeded(CuspLabError):
    """An enumeration hit its node budget before reaching the height floor."""

    def __init__(self, message: str, partial=None, height_floor: float | None = None):
        super().__init__(message)
        self.partial = partial
        self.height_floor = height_floor
