"""Custom exception hierarchy for heptainv.

Provides specific exceptions for the different failure categories of the
numeric engine, the oracle and the command line.
"""

from typing import Optional


class HeptaInvError(Exception):
    """Base exception for all heptainv errors.

    Every custom exception in this package inherits from this class, so a
    single except clause catches all library-specific failures.

    Attributes:
        message: Human-readable error description.
        details: Optional dictionary with additional error context.
    """

    def __init__(self, message: str, details: Optional[dict] = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)

    def __str__(self) -> str:
        if self.details:
            return f"{self.message} (details: {self.details})"
        return self.message


class DimensionError(HeptaInvError):
    """Matrix or vector dimension errors.

    Raised when:
    - n is below the minimum dimension of the matrix family
    - a vector length does not match the matrix dimension
    - a dense guard (oracle size, dense output size) is exceeded

    Examples:
        >>> raise DimensionError("n must be at least 7", {"n": 5})
    """

    pass


class IndexRangeError(HeptaInvError):
    """Sequence or matrix index out of range.

    Examples:
        >>> raise IndexRangeError("gamma index out of range", {"k": 12, "max_index": 10})
    """

    pass


class SolverError(HeptaInvError):
    """Linear solver and fixed-point errors.

    Raised when:
    - a banded factorization meets a non-positive pivot
    - a right-hand side or forcing evaluation is not finite

    Attributes:
        stage: Name of the failing stage, if known.
    """

    def __init__(self, message: str, stage: Optional[str] = None, details: Optional[dict] = None):
        details = details or {}
        if stage:
            details["stage"] = stage
        super().__init__(message, details)
        self.stage = stage


class IdentityError(HeptaInvError, ArithmeticError):
    """An exact integer identity did not hold.

    Raised when a closed form leaves a remainder or disagrees with the
    directly accumulated value.

    Examples:
        >>> raise IdentityError("moment identity failed", {"p": 3, "m": 2})
    """

    pass


class OracleError(HeptaInvError):
    """Dense reference computation errors.

    Raised when the dense oracle meets a matrix that is singular to working
    precision.
    """

    pass


class ConfigurationError(HeptaInvError):
    """Invalid configuration values.

    Raised when there are issues with:
    - command-line values (n-lists, forcing specs, variants)
    - environment variables such as the worker count
    - parameters outside their documented domain

    Examples:
        >>> raise ConfigurationError("Invalid worker count", {"HEPTAINV_THREADS": "0"})
    """

    pass


class StorageError(HeptaInvError):
    """Artifact persistence errors.

    Raised when a CSV or JSON artifact cannot be read or written.

    Examples:
        >>> raise StorageError("Failed to write report", {"path": "/path/to/report.json"})
    """

    pass
