"""Centralized constants and configuration for heptainv.

This module holds every guard, tolerance and default that the numeric
engine, the oracle battery and the command line share. Values are grouped
in frozen dataclasses with one module-level instance each.

Usage:
    from config.constants import GUARDS, TOLERANCES

    if n > GUARDS.DENSE_OUTPUT_MAX_N:
        ...
    assert rel_error <= TOLERANCES.ORACLE_REL
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Guards:
    """Size limits for the dense and exact-arithmetic code paths."""

    # The seven-diagonal family is only defined for n >= 7
    MIN_DIMENSION: int = 7

    # Dense n x n output (explicit inverse assembly, dense CSV)
    DENSE_OUTPUT_MAX_N: int = 10_000

    # Dense LU oracle, O(n^3) time and O(n^2) memory
    ORACLE_MAX_N: int = 2048

    # Exact-residual refinement of the dense oracle (one fsum per entry)
    ORACLE_REFINE_MAX_N: int = 1024

    # Exact leading minors via rational elimination
    MINORS_MAX_N: int = 512


@dataclass(frozen=True)
class Tolerances:
    """Acceptance tolerances used by tests and the verification suite."""

    ORACLE_REL: float = 1e-9  # explicit inverse vs dense oracle
    RESIDUAL_PER_N: float = 1e-10  # ||A X - I||_inf / n for the dense oracle
    SOLVE_REL: float = 1e-9  # O(n) solve vs dense solve
    LEMMA_C_REL: float = 1e-12  # C^-1 entries vs dense inverse
    STENCIL_ABS: float = 1e-12  # a, b, c, d system
    PI2_REL: float = 1e-12  # closed-form row-n sum vs direct sum
    NORM_EQUALITY_REL: float = 1e-12  # ||.||_1 vs ||.||_inf
    SCHUR_AGREEMENT_REL: float = 1e-10  # closed-form M vs I + sigma V^T D^-1 U

    # Denominator floor for relative errors
    REL_FLOOR: float = 1e-300

    # d^2 - (1 + cd)^2 / (12 + c^2 + d^2)
    STENCIL_MARGIN: float = 2.20
    STENCIL_MARGIN_TOL: float = 0.01

    # bound / exact norm for n >= RATIO_GUARD_MIN_N (harness guard, flagged not failed)
    RATIO_GUARD: float = 10.0
    RATIO_GUARD_MIN_N: int = 50


@dataclass(frozen=True)
class BeamDefaults:
    """Defaults for the clamped beam fixed-point iteration."""

    DEFAULT_C_EI: float = 6.0
    DEFAULT_TOL: float = 1e-12
    DEFAULT_MAX_ITER: int = 100


@dataclass(frozen=True)
class OutputConfig:
    """Rendering of CSV and JSON artifacts."""

    SIGNIFICANT_DIGITS: int = 17
    CSV_DELIMITER: str = ","
    LINE_TERMINATOR: str = "\n"
    JSON_INDENT: int = 2


@dataclass(frozen=True)
class StorageConfig:
    """Log file and data directory configuration."""

    DATA_DIR_NAME: str = ".heptainv"
    LOG_FILE: str = "heptainv.log"

    # Log rotation
    LOG_MAX_BYTES: int = 5_000_000  # 5MB
    LOG_BACKUP_COUNT: int = 3


@dataclass(frozen=True)
class RuntimeConfig:
    """Process-level runtime settings."""

    THREADS_ENV_VAR: str = "HEPTAINV_THREADS"


# Global instances - import these
GUARDS = Guards()
TOLERANCES = Tolerances()
BEAM = BeamDefaults()
OUTPUT = OutputConfig()
STORAGE = StorageConfig()
RUNTIME = RuntimeConfig()
