"""
Exception hierarchy for the Ball Mapper library.

Every error raised on purpose derives from ``BallMapperError``. The three branches map
one-to-one onto CLI exit codes.
"""

from typing import Optional

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INVARIANT = 3


class BallMapperError(Exception):
    """Base class for all library errors."""

    exit_code = EXIT_DATA


class ConfigError(BallMapperError, ValueError):
    """Invalid parameter: nonpositive radius, k > N, quantile outside [0, 1], unsorted radii."""

    exit_code = EXIT_USAGE


class DataError(BallMapperError, ValueError):
    """Malformed or inconsistent input data."""

    exit_code = EXIT_DATA


class DimensionMismatchError(DataError):
    """Coordinates of different dimension were combined."""


class MetricError(DataError):
    """Invalid precomputed matrix, or coordinates required but unavailable."""


class UncoveredPointError(DataError):
    """A point lies farther than the radius from every center."""

    def __init__(self, point: int, distance: float, epsilon: float):
        self.point = point
        self.distance = distance
        self.epsilon = epsilon
        super().__init__(
            f"point {point} is uncovered at epsilon={epsilon!r}: "
            f"nearest center is at distance {distance!r}"
        )


class CoverGuardError(DataError):
    """A point is covered by more centers than the nerve enumeration guard allows."""

    def __init__(self, point: int, count: int, limit: int):
        self.point = point
        self.count = count
        self.limit = limit
        super().__init__(
            f"point {point} is covered by {count} centers, above the guard of {limit}; "
            "lower the radius or raise max_covers_per_point"
        )


class FormatError(DataError):
    """A file could not be parsed; row and column are 1-based when known."""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[int] = None):
        self.row = row
        self.column = column
        where = f" at ({row},{column})" if row is not None and column is not None else ""
        super().__init__(f"{message}{where}")


class InvariantViolation(BallMapperError):
    """A post-condition of a construction does not hold."""

    exit_code = EXIT_INVARIANT
