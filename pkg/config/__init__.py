"""Configuration module for heptainv.

Provides centralized constants, logging and the exception hierarchy.
"""

from config.constants import (
    BEAM,
    GUARDS,
    OUTPUT,
    RUNTIME,
    STORAGE,
    TOLERANCES,
    BeamDefaults,
    Guards,
    OutputConfig,
    RuntimeConfig,
    StorageConfig,
    Tolerances,
)
from config.exceptions import (
    ConfigurationError,
    DimensionError,
    HeptaInvError,
    IdentityError,
    IndexRangeError,
    OracleError,
    SolverError,
    StorageError,
)
from config.logging_config import LogContext, get_logger, setup_logging

__all__ = [
    # Constants
    "GUARDS",
    "TOLERANCES",
    "BEAM",
    "OUTPUT",
    "STORAGE",
    "RUNTIME",
    "Guards",
    "Tolerances",
    "BeamDefaults",
    "OutputConfig",
    "StorageConfig",
    "RuntimeConfig",
    # Exceptions
    "HeptaInvError",
    "DimensionError",
    "IndexRangeError",
    "IdentityError",
    "SolverError",
    "OracleError",
    "ConfigurationError",
    "StorageError",
    # Logging
    "setup_logging",
    "get_logger",
    "LogContext",
]
