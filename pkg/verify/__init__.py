"""Dense-oracle verification of the structured formulas.

Modules:
    oracle: Dense LU inverses and solves, leading minors, stencil constants
    suite: The per-case check battery and the full verification run
"""

from .oracle import (
    DenseInverse,
    VerificationReport,
    dense_invert,
    dense_solve,
    determinant_lemma_check,
    leading_minors,
    oracle_inverse,
    stencil_constants,
    stencil_constants_check,
)
from .suite import CASE_CHECKS, case_reports, full_suite, sequence_report, suite_passed

__all__ = [
    # Oracle
    "DenseInverse",
    "VerificationReport",
    "dense_invert",
    "dense_solve",
    "determinant_lemma_check",
    "leading_minors",
    "oracle_inverse",
    "stencil_constants",
    "stencil_constants_check",
    # Suite
    "CASE_CHECKS",
    "case_reports",
    "full_suite",
    "sequence_report",
    "suite_passed",
]
