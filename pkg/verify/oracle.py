"""Dense reference computations for cross-checking the structured formulas.

Everything here is O(n^2) memory or worse and guarded by GUARDS limits:
dense LU inversion and solves, exact leading minors by rational
elimination, the stencil-constant identities behind positive definiteness
of the near variant, and the matrix determinant lemma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np
from scipy.linalg import LinAlgError, cholesky_banded, lu_factor, lu_solve

from banded.inverse import schur_m
from banded.matrices import (
    SystemSpec,
    Variant,
    build_a,
    build_b,
    build_c,
    lower_banded,
    to_dense,
)
from banded.utils import exact_dot_rows, relative_error, split_float
from config.constants import GUARDS, TOLERANCES
from config.exceptions import DimensionError, OracleError
from config.logging_config import LogContext, get_logger

logger = get_logger(__name__)

# Integer entries up to this size give exact products with 26-bit halves
_EXACT_ENTRY_MAX = 2**26


@dataclass
class VerificationReport:
    """Outcome of one check for one (variant, n) case."""

    variant: str
    n: Optional[int]
    check: str
    max_abs_error: float
    max_rel_error: float
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def case(self) -> str:
        return self.variant if self.n is None else f"{self.variant}/n={self.n}"

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "variant": self.variant,
            "n": self.n,
            "check": self.check,
            "max_abs_error": self.max_abs_error,
            "max_rel_error": self.max_rel_error,
            "pass": self.passed,
            "details": self.details,
        }


# =============================================================================
# Dense inversion
# =============================================================================


@dataclass(frozen=True, eq=False)
class DenseInverse:
    """Dense inverse with its residual ||M X - I||_inf."""

    inverse: np.ndarray
    residual: float


def _square(matrix) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
        raise DimensionError(
            "Oracle input must be a non-empty square matrix", {"shape": list(matrix.shape)}
        )
    n = matrix.shape[0]
    if n > GUARDS.ORACLE_MAX_N:
        raise DimensionError(
            "Matrix exceeds the dense oracle guard", {"n": n, "max": GUARDS.ORACLE_MAX_N}
        )
    if not np.all(np.isfinite(matrix)):
        raise OracleError("Oracle input has non-finite entries")
    return matrix


def _factor(matrix: np.ndarray):
    try:
        lu, piv = lu_factor(matrix, check_finite=False)
    except (LinAlgError, ValueError) as e:
        raise OracleError("LU factorization failed", {"reason": str(e)}) from e
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= np.finfo(float).eps * matrix.shape[0] * pivots.max():
        raise OracleError(
            "Matrix is singular to working precision",
            {"min_pivot": float(pivots.min()), "max_pivot": float(pivots.max())},
        )
    return lu, piv


def _is_small_integer(matrix: np.ndarray) -> bool:
    return bool(np.all(matrix == np.round(matrix)) and np.abs(matrix).max() < _EXACT_ENTRY_MAX)


def _exact_residual_block(matrix: np.ndarray, x: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """rhs - matrix @ x for an integer matrix, each entry rounded once."""
    hi, lo = split_float(x)
    out = np.empty_like(x)
    for i, row in enumerate(matrix):
        cols = np.flatnonzero(row)
        coeffs = row[cols][:, None]
        terms = np.vstack([rhs[i][None, :], -coeffs * hi[cols], -coeffs * lo[cols]])
        out[i] = exact_dot_rows(terms.T)
    return out


def _residual_norm(matrix: np.ndarray, x: np.ndarray, rhs: np.ndarray, exact: bool) -> float:
    if exact:
        residual = _exact_residual_block(matrix, x, rhs)
    else:
        residual = rhs - matrix @ x
    return float(np.abs(residual).sum(axis=1).max())


def _refined_solve(matrix: np.ndarray, rhs: np.ndarray, refine: int):
    lu_piv = _factor(matrix)
    n = matrix.shape[0]
    exact = _is_small_integer(matrix) and n <= GUARDS.ORACLE_REFINE_MAX_N
    x = lu_solve(lu_piv, rhs, check_finite=False)
    if exact:
        for _ in range(refine):
            x = x + lu_solve(lu_piv, _exact_residual_block(matrix, x, rhs), check_finite=False)
    return x, _residual_norm(matrix, x, rhs, exact)


def dense_invert(matrix, refine: int = 2) -> DenseInverse:
    """Dense inverse by LU with partial pivoting.

    Integer matrices with n <= ORACLE_REFINE_MAX_N get `refine` steps of
    iterative refinement with exactly computed residuals.

    Raises:
        DimensionError: If the matrix is not square or exceeds ORACLE_MAX_N.
        OracleError: If the matrix is singular to working precision.
    """
    matrix = _square(matrix)
    n = matrix.shape[0]
    with LogContext(logger, f"Dense inverse n={n}"):
        inverse, residual = _refined_solve(matrix, np.eye(n), refine)
    return DenseInverse(inverse=inverse, residual=residual)


def dense_solve(matrix, rhs, refine: int = 2) -> np.ndarray:
    """Dense solve of matrix @ x = rhs, refined like dense_invert."""
    matrix = _square(matrix)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != matrix.shape[0]:
        raise DimensionError(
            "Right-hand side does not match matrix dimension",
            {"n": matrix.shape[0], "shape": list(rhs.shape)},
        )
    block = rhs.reshape(matrix.shape[0], -1)
    x, _ = _refined_solve(matrix, block, refine)
    return x.reshape(rhs.shape)


# =============================================================================
# Positivity and identity checks
# =============================================================================


def leading_minors(spec: SystemSpec) -> List[int]:
    """Exact determinants of the k x k leading submatrices of A, k = 1..n.

    Gaussian elimination without pivoting in rational arithmetic; the k-th
    pivot is det_k / det_{k-1}, and elimination stays inside the band.

    Raises:
        DimensionError: If n exceeds MINORS_MAX_N.
        OracleError: If a pivot vanishes.
    """
    n = spec.n
    if n > GUARDS.MINORS_MAX_N:
        raise DimensionError("Minors exceed the guard", {"n": n, "max": GUARDS.MINORS_MAX_N})

    matrix = build_a(spec)
    w = matrix.half_bandwidth
    band: Dict[tuple, Fraction] = {}
    for i in range(1, n + 1):
        for j in range(max(1, i - w), min(n, i + w) + 1):
            band[i, j] = Fraction(matrix.entry(i, j))

    minors: List[int] = []
    det = Fraction(1)
    for k in range(1, n + 1):
        pivot = band[k, k]
        if pivot == 0:
            raise OracleError("Zero pivot in leading minor elimination", {"k": k})
        det *= pivot
        minors.append(int(det))
        for i in range(k + 1, min(n, k + w) + 1):
            factor = band[i, k] / pivot
            if factor:
                for j in range(k, min(n, k + w) + 1):
                    band[i, j] -= factor * band[k, j]
    return minors


def stencil_constants() -> Dict[str, float]:
    """a = sqrt(4 - sqrt 15), b = (6 + sqrt 15) a, c = (9 + 2 sqrt 15) a, d = (4 + sqrt 15) a."""
    s = math.sqrt(15.0)
    a = math.sqrt(4.0 - s)
    return {"a": a, "b": (6.0 + s) * a, "c": (9.0 + 2.0 * s) * a, "d": (4.0 + s) * a}


def stencil_constants_check() -> VerificationReport:
    """Check the sum-of-squares system behind positive definiteness of the near variant.

        a^2 + b^2 + c^2 + d^2 = 56,  ab + bc + cd = 39,  ac + bd = 12,  ad = 1
        d^2 - (1 + cd)^2 / (12 + c^2 + d^2) ~ 2.20 > 0
    """
    k = stencil_constants()
    a, b, c, d = k["a"], k["b"], k["c"], k["d"]
    identities = {
        "sum_squares": (a * a + b * b + c * c + d * d, 56.0),
        "first_products": (a * b + b * c + c * d, 39.0),
        "second_products": (a * c + b * d, 12.0),
        "ad": (a * d, 1.0),
    }
    errors = {name: abs(value - target) for name, (value, target) in identities.items()}
    margin = d * d - (1.0 + c * d) ** 2 / (12.0 + c * c + d * d)

    max_abs = max(errors.values())
    max_rel = max(relative_error(value, target) for value, target in identities.values())
    passed = (
        max_abs <= TOLERANCES.STENCIL_ABS
        and margin > 0
        and abs(margin - TOLERANCES.STENCIL_MARGIN) <= TOLERANCES.STENCIL_MARGIN_TOL
    )
    return VerificationReport(
        variant=Variant.NEAR.value,
        n=None,
        check="stencil_constants",
        max_abs_error=max_abs,
        max_rel_error=max_rel,
        passed=passed,
        details={**k, "margin": margin, "errors": errors},
    )


def _log_det_banded(ab: np.ndarray) -> float:
    factor = cholesky_banded(ab, lower=True)
    return 2.0 * math.fsum(np.log(factor[0]))


def determinant_lemma_check(spec: SystemSpec) -> VerificationReport:
    """log det A = log det M + log det B + log det C, each from its own factorization."""
    try:
        log_a = _log_det_banded(lower_banded(build_a(spec)))
        log_b = _log_det_banded(lower_banded(build_b(spec)))
        log_c = _log_det_banded(lower_banded(build_c(spec.n)))
    except LinAlgError as e:
        raise OracleError("Cholesky failed in determinant check", {"case": spec.label}) from e

    log_m = math.log(schur_m(spec).det)
    composed = log_m + log_b + log_c
    abs_err = abs(log_a - composed)
    rel_err = relative_error(composed, log_a)
    return VerificationReport(
        variant=spec.variant.value,
        n=spec.n,
        check="determinant_lemma",
        max_abs_error=abs_err,
        max_rel_error=rel_err,
        passed=rel_err <= TOLERANCES.ORACLE_REL,
        details={"log_det_a": log_a, "log_det_m": log_m, "log_det_b": log_b, "log_det_c": log_c},
    )


@lru_cache(maxsize=8)
def oracle_inverse(spec: SystemSpec) -> DenseInverse:
    """Cached dense inverse of A for one SystemSpec."""
    return dense_invert(to_dense(build_a(spec)))
