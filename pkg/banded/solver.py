"""O(n) linear solves with A = B C + sigma U V^T.

    D^-1 v = C^-1 (B^-1 v)
    Z      = D^-1 U                        n x 2, computed once
    M      = I + sigma V^T Z               2 x 2
    x      = D^-1 b - sigma Z M^-1 V^T D^-1 b

B is not factored directly: its smallest eigenvalue falls below
eps * ||B|| for n beyond about 10^5, and a floating-point Cholesky of B
then breaks down. Instead

    B = T^2 + tau E E^T,    T = tridiag(-1, 2, -1),  E = [e_1, e_n],

with tau = 1 (Toeplitz) or 2 (near), and B^-1 is applied as two solves with
T plus a 2 x 2 correction. T has the exact Cholesky factor

    L[k, k] = sqrt((k + 1) / k),    L[k + 1, k] = -sqrt(k / (k + 1)),

from its leading minors det T_k = k + 1. C is factored with LAPACK; a
non-positive pivot raises SolverError. Iterative refinement uses residuals
that are exact up to one final rounding.

Example:
    >>> spec = SystemSpec(64, Variant.NEAR)
    >>> x = solve(spec, multiply(build_a(spec), np.ones(64)))
    >>> bool(np.allclose(x, 1.0))
    True
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import LinAlgError, cho_solve_banded, cholesky_banded
from scipy.linalg import solve as dense_solve

from banded.matrices import (
    BandedMatrix,
    SystemSpec,
    build_a,
    build_b,
    build_c,
    exact_residual,
    lower_banded,
    rank_two_factors,
)
from config.exceptions import DimensionError, SolverError
from config.logging_config import get_logger

logger = get_logger(__name__)

# Refinement steps used by solve() unless the caller asks otherwise
DEFAULT_REFINE = 1

# (T^2)[1, 1] = (T^2)[n, n]; B differs from T^2 only in these two corners
_T_SQUARED_CORNER = 5


def second_difference_factor(n: int) -> np.ndarray:
    """Exact lower banded Cholesky factor of T = tridiag(-1, 2, -1), shape (2, n)."""
    k = np.arange(1, n + 1, dtype=float)
    factor = np.zeros((2, n))
    factor[0] = np.sqrt((k + 1) / k)
    factor[1, : n - 1] = -np.sqrt(k[:-1] / (k[:-1] + 1))
    return factor


def _cholesky(matrix: BandedMatrix) -> np.ndarray:
    try:
        factor = cholesky_banded(lower_banded(matrix), lower=True)
    except LinAlgError as e:
        raise SolverError(
            f"{matrix.name} is not positive definite", stage=f"cholesky {matrix.name}"
        ) from e
    if not np.all(factor[0] > 0):
        raise SolverError(f"Non-positive pivot in {matrix.name}", stage=f"cholesky {matrix.name}")
    return factor


def _check_rhs(n: int, rhs) -> np.ndarray:
    rhs = np.asarray(rhs, dtype=float)
    if rhs.ndim not in (1, 2) or rhs.shape[0] != n:
        raise DimensionError(
            "Right-hand side does not match matrix dimension", {"n": n, "shape": list(rhs.shape)}
        )
    if not np.all(np.isfinite(rhs)):
        raise SolverError("Right-hand side has non-finite entries", stage="rhs")
    return rhs


def _refined(
    matrix: BandedMatrix, apply: Callable[[np.ndarray], np.ndarray], v: np.ndarray, refine: int
) -> np.ndarray:
    x = apply(v)
    if v.ndim == 1:
        for _ in range(refine):
            x = x + apply(exact_residual(matrix, x, v))
    return x


@dataclass(frozen=True, eq=False)
class BandedFactorization:
    """Factors of B and C, reused across right-hand sides.

    Attributes:
        t_factor: Exact Cholesky factor of T, with B = T^2 + tau E E^T.
        b_z: T^-2 E, n x 2.
        b_capacitance: I + tau E^T T^-2 E, 2 x 2.
        c_factor: LAPACK banded Cholesky factor of C.
    """

    spec: SystemSpec
    b_matrix: BandedMatrix
    c_matrix: BandedMatrix
    tau: int
    t_factor: np.ndarray
    b_z: np.ndarray
    b_capacitance: np.ndarray
    c_factor: np.ndarray

    @classmethod
    def from_spec(cls, spec: SystemSpec) -> "BandedFactorization":
        n = spec.n
        t_factor = second_difference_factor(n)
        tau = spec.b_corner - _T_SQUARED_CORNER
        corners = np.zeros((n, 2))
        corners[0, 0] = corners[-1, 1] = 1.0
        b_z = cho_solve_banded((t_factor, True), cho_solve_banded((t_factor, True), corners))
        capacitance = np.eye(2) + tau * b_z[[0, -1], :]
        if not np.linalg.det(capacitance) > 0:
            raise SolverError(f"Singular B correction for {spec.label}", stage="factor B")
        c_matrix = build_c(n)
        return cls(
            spec=spec,
            b_matrix=build_b(spec),
            c_matrix=c_matrix,
            tau=tau,
            t_factor=t_factor,
            b_z=b_z,
            b_capacitance=capacitance,
            c_factor=_cholesky(c_matrix),
        )

    def _b_solve(self, v: np.ndarray) -> np.ndarray:
        factor = (self.t_factor, True)
        y = cho_solve_banded(factor, cho_solve_banded(factor, v))
        w = dense_solve(self.b_capacitance, y[[0, -1]], assume_a="sym")
        return y - self.tau * (self.b_z @ w)

    def _c_solve(self, v: np.ndarray) -> np.ndarray:
        return cho_solve_banded((self.c_factor, True), v)

    def apply_b_inverse(self, v, refine: int = 0) -> np.ndarray:
        """B^-1 v."""
        return _refined(self.b_matrix, self._b_solve, _check_rhs(self.spec.n, v), refine)

    def apply_c_inverse(self, v, refine: int = 0) -> np.ndarray:
        """C^-1 v."""
        return _refined(self.c_matrix, self._c_solve, _check_rhs(self.spec.n, v), refine)

    def apply_d_inverse(self, v, refine: int = 0) -> np.ndarray:
        """D^-1 v = C^-1 (B^-1 v), for a vector or an n x k block."""
        return self.apply_c_inverse(self.apply_b_inverse(v, refine), refine)


class LinearSolver:
    """Reusable O(n) solver for one SystemSpec.

    Setup builds the B and C factors and forms Z = D^-1 U and M once; each
    solve is then three banded triangular sweep pairs plus two 2 x 2 solves.
    """

    def __init__(self, spec: SystemSpec):
        self.spec = spec
        self.matrix = build_a(spec)
        self.factorization = BandedFactorization.from_spec(spec)
        self.sigma = spec.sigma

        u = rank_two_factors(spec).u.astype(float)
        self.z = self.factorization.apply_d_inverse(u)
        # V^T Z picks rows 1 and n of Z
        self.m = np.eye(2) + self.sigma * self.z[[0, -1], :]
        logger.debug("Solver ready for %s, M = %s", spec.label, self.m.tolist())

    def _apply(self, rhs: np.ndarray) -> np.ndarray:
        y = self.factorization.apply_d_inverse(rhs)
        w = dense_solve(self.m, y[[0, -1]], assume_a="sym")
        return y - self.sigma * (self.z @ w)

    def solve(self, rhs, refine: int = DEFAULT_REFINE) -> np.ndarray:
        """Solve A x = rhs.

        Args:
            rhs: Vector of length n, or an n x k block.
            refine: Number of iterative refinement steps with exact residuals.

        Returns:
            x with the shape of rhs.

        Raises:
            DimensionError: If rhs does not have n rows.
            SolverError: If rhs has non-finite entries.
        """
        rhs = _check_rhs(self.spec.n, rhs)
        if rhs.ndim == 2:
            return np.column_stack([self.solve(col, refine) for col in rhs.T])

        x = self._apply(rhs)
        for _ in range(refine):
            x = x + self._apply(exact_residual(self.matrix, x, rhs))
        return x

    def residual(self, x, rhs) -> float:
        """max |rhs - A x|, each entry exact up to one rounding."""
        return float(np.abs(exact_residual(self.matrix, x, rhs)).max())


@lru_cache(maxsize=32)
def get_solver(spec: SystemSpec) -> LinearSolver:
    """Shared LinearSolver per SystemSpec."""
    return LinearSolver(spec)


def solve(spec: SystemSpec, rhs, refine: int = DEFAULT_REFINE) -> np.ndarray:
    """Solve A x = rhs in O(n) through the rank-two decomposition."""
    return get_solver(spec).solve(rhs, refine=refine)
