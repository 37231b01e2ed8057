"""Construction and banded storage of the seven-diagonal family.

    A = B C + sigma U V^T

A is the seven-diagonal matrix with interior stencil (-1, 12, -39, 56, -39,
12, -1) and corner values (a0, a1); B is pentadiagonal (1, -4, 6, -4, 1)
with corner value 6 or 7; C is tridiagonal (-1, 8, -1). U and V are n x 2
and carry the corner correction.

Matrices are symmetric and stored by diagonal offset: diagonals[k][i] is
the (i + k, i) entry in 0-based indexing. All entries are integers.

Example:
    >>> spec = SystemSpec(7, Variant.NEAR)
    >>> build_a(spec).entry(1, 2)
    -40
    >>> multiply(build_c(3), [1, 1, 1]).tolist()
    [7, 6, 7]
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Sequence, Tuple, Union

import numpy as np

from banded.utils import check_entry_index, exact_dot_rows, split_float
from config.constants import GUARDS
from config.exceptions import ConfigurationError, DimensionError
from config.logging_config import get_logger

logger = get_logger(__name__)

INTERIOR_STENCIL = (56, -39, 12, -1)


class Variant(str, Enum):
    """Matrix family variant."""

    TOEPLITZ = "toeplitz"
    NEAR = "near"

    @classmethod
    def parse(cls, value: Union["Variant", str]) -> "Variant":
        """Accept a Variant or one of 'toeplitz', 'near', 'near-toeplitz'."""
        if isinstance(value, Variant):
            return value
        key = str(value).strip().lower().replace("_", "-")
        if key in ("near-toeplitz", "neartoeplitz"):
            key = "near"
        try:
            return cls(key)
        except ValueError:
            raise ConfigurationError(
                f"Unknown variant '{value}'", {"allowed": ["toeplitz", "near"]}
            ) from None

    @property
    def a0(self) -> int:
        return _PARAMETERS[self.value][0]

    @property
    def a1(self) -> int:
        return _PARAMETERS[self.value][1]

    @property
    def sigma(self) -> int:
        return _PARAMETERS[self.value][2]

    @property
    def b_corner(self) -> int:
        return _PARAMETERS[self.value][3]


# (a0, a1, sigma, B corner)
_PARAMETERS: Dict[str, Tuple[int, int, int, int]] = {
    "toeplitz": (56, -39, 1, 6),
    "near": (68, -40, 2, 7),
}


@dataclass(frozen=True)
class SystemSpec:
    """Dimension and variant of one member of the family.

    Raises:
        DimensionError: If n is not an integer >= 7.
    """

    n: int
    variant: Variant = Variant.TOEPLITZ

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise DimensionError("n must be an integer", {"n": self.n})
        object.__setattr__(self, "n", int(self.n))
        if self.n < GUARDS.MIN_DIMENSION:
            raise DimensionError(
                f"n must be at least {GUARDS.MIN_DIMENSION}",
                {"n": self.n, "variant": self.variant.value},
            )

    @property
    def a0(self) -> int:
        return self.variant.a0

    @property
    def a1(self) -> int:
        return self.variant.a1

    @property
    def sigma(self) -> int:
        return self.variant.sigma

    @property
    def b_corner(self) -> int:
        return self.variant.b_corner

    @property
    def h(self) -> float:
        """Mesh size 1 / (n + 1)."""
        return 1.0 / (self.n + 1)

    @property
    def label(self) -> str:
        return f"{self.variant.value}/n={self.n}"


@dataclass(frozen=True, eq=False)
class BandedMatrix:
    """Symmetric banded integer matrix stored by diagonal offset."""

    n: int
    half_bandwidth: int
    diagonals: Tuple[np.ndarray, ...]
    name: str = ""

    @property
    def offsets(self) -> Tuple[int, ...]:
        return tuple(range(self.half_bandwidth + 1))

    def entry(self, i: int, j: int) -> int:
        """Entry (i, j), 1-based."""
        check_entry_index(self.n, i, j)
        k = abs(i - j)
        if k > self.half_bandwidth:
            return 0
        return int(self.diagonals[k][min(i, j) - 1])


def _banded(n: int, diagonals: Sequence[np.ndarray], name: str) -> BandedMatrix:
    frozen = []
    for diag in diagonals:
        diag = np.asarray(diag, dtype=np.int64)
        diag.setflags(write=False)
        frozen.append(diag)
    return BandedMatrix(n=n, half_bandwidth=len(frozen) - 1, diagonals=tuple(frozen), name=name)


def build_a(spec: SystemSpec) -> BandedMatrix:
    """Seven-diagonal A (Toeplitz) or A-tilde (near variant)."""
    n = spec.n
    diagonals = [
        np.full(n - k, value, dtype=np.int64) for k, value in enumerate(INTERIOR_STENCIL)
    ]
    diagonals[0][[0, -1]] = spec.a0
    diagonals[1][[0, -1]] = spec.a1
    return _banded(n, diagonals, f"A[{spec.label}]")


def build_b(spec: SystemSpec) -> BandedMatrix:
    """Pentadiagonal B with corner value 6 (Toeplitz) or 7 (near)."""
    n = spec.n
    diag0 = np.full(n, 6, dtype=np.int64)
    diag0[[0, -1]] = spec.b_corner
    return _banded(n, [diag0, np.full(n - 1, -4), np.full(n - 2, 1)], f"B[{spec.label}]")


def build_c(n: int) -> BandedMatrix:
    """Tridiagonal C = tridiag(-1, 8, -1); any n >= 1."""
    if n < 1:
        raise DimensionError("n must be at least 1", {"n": n})
    return _banded(n, [np.full(n, 8), np.full(n - 1, -1)], f"C[n={n}]")


@dataclass(frozen=True, eq=False)
class RankTwoFactors:
    """sigma, U and V of the corner correction sigma U V^T."""

    sigma: int
    u: np.ndarray
    v: np.ndarray

    def dense_update(self) -> np.ndarray:
        """sigma U V^T as a dense integer matrix."""
        return self.sigma * (self.u @ self.v.T)


def rank_two_factors(spec: SystemSpec) -> RankTwoFactors:
    """Factors with build_a(spec) = build_b(spec) build_c(n) + sigma U V^T."""
    n = spec.n
    u = np.zeros((n, 2), dtype=np.int64)
    v = np.zeros((n, 2), dtype=np.int64)
    u[0, 0], u[1, 0] = 4, -1
    u[n - 2, 1], u[n - 1, 1] = -1, 4
    v[0, 0] = 1
    v[n - 1, 1] = 1
    for array in (u, v):
        array.setflags(write=False)
    return RankTwoFactors(sigma=spec.sigma, u=u, v=v)


def multiply(matrix: BandedMatrix, x) -> np.ndarray:
    """Banded product matrix @ x in O(n * bandwidth).

    Integer input gives an exact integer result; x may be a vector or an
    n x k block.

    Raises:
        DimensionError: If x does not have n rows.
    """
    x = np.asarray(x)
    if x.ndim == 0 or x.shape[0] != matrix.n:
        raise DimensionError(
            "Vector length does not match matrix dimension",
            {"n": matrix.n, "shape": list(x.shape)},
        )
    expand = (slice(None),) + (None,) * (x.ndim - 1)
    y = matrix.diagonals[0][expand] * x
    for k in range(1, matrix.half_bandwidth + 1):
        diag = matrix.diagonals[k][expand]
        if diag.shape[0] == 0:
            continue
        y[:-k] += diag * x[k:]
        y[k:] += diag * x[:-k]
    return y


def to_dense(matrix: BandedMatrix, dtype=float) -> np.ndarray:
    """Full n x n array."""
    dense = np.zeros((matrix.n, matrix.n), dtype=dtype)
    for k, diag in enumerate(matrix.diagonals):
        idx = np.arange(diag.shape[0])
        dense[idx + k, idx] = diag
        dense[idx, idx + k] = diag
    return dense


def to_banded_json(matrix: BandedMatrix) -> dict:
    """{n, offsets, diagonals} payload for the banded JSON artifact."""
    return {
        "n": matrix.n,
        "offsets": list(matrix.offsets),
        "diagonals": [[int(v) for v in diag] for diag in matrix.diagonals],
    }


def lower_banded(matrix: BandedMatrix) -> np.ndarray:
    """LAPACK lower band layout: ab[k, j] = A[j + k, j], shape (bandwidth + 1, n)."""
    ab = np.zeros((matrix.half_bandwidth + 1, matrix.n), dtype=float)
    for k, diag in enumerate(matrix.diagonals):
        ab[k, : diag.shape[0]] = diag
    return ab


def decomposition_residual(spec: SystemSpec) -> int:
    """max |A - (B C + sigma U V^T)| in integer arithmetic."""
    a = to_dense(build_a(spec), dtype=np.int64)
    b = to_dense(build_b(spec), dtype=np.int64)
    c = to_dense(build_c(spec.n), dtype=np.int64)
    residual = a - (b @ c + rank_two_factors(spec).dense_update())
    return int(np.abs(residual).max())


def quadratic_form_sos(spec: SystemSpec, x) -> float:
    """x^T B x through its sum-of-squares expansion.

        x_1^2 + (2x_1 - x_2)^2 + sum_{k=3}^{n} (x_{k-2} - 2x_{k-1} + x_k)^2
              + (2x_n - x_{n-1})^2 + x_n^2

    plus x_1^2 + x_n^2 for the near variant. Every term is a square, so B is
    positive definite.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.n,):
        raise DimensionError("Vector length does not match matrix dimension", {"n": spec.n})
    second = x[:-2] - 2.0 * x[1:-1] + x[2:]
    total = (
        x[0] ** 2
        + (2.0 * x[0] - x[1]) ** 2
        + float(second @ second)
        + (2.0 * x[-1] - x[-2]) ** 2
        + x[-1] ** 2
    )
    if spec.variant is Variant.NEAR:
        total += x[0] ** 2 + x[-1] ** 2
    return float(total)


def exact_residual(matrix: BandedMatrix, x, rhs) -> np.ndarray:
    """rhs - matrix @ x, computed exactly and rounded once per entry.

    Each float of x is split into two halves whose products with the small
    integer entries are exact; math.fsum then rounds each row sum correctly.
    """
    x = np.asarray(x, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    n = matrix.n
    if x.shape != (n,) or rhs.shape != (n,):
        raise DimensionError(
            "Residual operands must be vectors of length n",
            {"n": n, "x": list(x.shape), "rhs": list(rhs.shape)},
        )

    hi, lo = split_float(x)
    terms = np.zeros((n, 4 * matrix.half_bandwidth + 3), dtype=float)
    terms[:, 0] = rhs
    diag = matrix.diagonals[0].astype(float)
    terms[:, 1] = -diag * hi
    terms[:, 2] = -diag * lo
    col = 3
    for k in range(1, matrix.half_bandwidth + 1):
        diag = matrix.diagonals[k].astype(float)
        if diag.shape[0] > 0:
            terms[k:, col] = -diag * hi[:-k]
            terms[k:, col + 1] = -diag * lo[:-k]
            terms[:-k, col + 2] = -diag * hi[k:]
            terms[:-k, col + 3] = -diag * lo[k:]
        col += 4
    return exact_dot_rows(terms)
