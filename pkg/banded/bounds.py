"""Exact inverse norms and their closed-form upper bounds.

Row i of A^-1 sums to

    rowsum_D(i) - sigma pi2 g(i) / (m11 + m12)

where pi2 is the last-row sum of D^-1 and g(i) = 4(d^-1(i,1) + d^-1(i,n))
- (d^-1(i,2) + d^-1(i,n-1)). Bounding the pieces gives

    pi1 <= (n+1)^2 (n+3)^2 / 2304                 Toeplitz
           (n+1)^2 ((n+1)^2 + 8) / 2304           near
    ||A^-1||_inf <= (n+1)^2 (n+3)^2 / 2304 + (n+1)^2 / 432 + (n+4) / 24   Toeplitz
                    (n+1)^2 ((n+1)^2 + 14) / 2304                         near

All inverse entries are positive, so exact infinity norms are maximal
entries of A^-1 1, obtained with one O(n) solve.

Example:
    >>> spec = SystemSpec(7, Variant.NEAR)
    >>> round(bound_value(spec), 5)
    2.16667
    >>> exact_inverse_norm(spec) <= bound_value(spec)
    True
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, List, Union

import numpy as np

from banded.gamma import SQRT15, gamma_pair_ratio, gamma_ratio, gamma_real_ratio, shared_table
from banded.inverse import (
    NearKernelCoefficients,
    d_inv_entry,
    inverse_tables,
    last_row_fraction,
    schur_m,
)
from banded.matrices import SystemSpec, Variant
from banded.solver import get_solver
from config.exceptions import ConfigurationError, DimensionError
from config.logging_config import get_logger

logger = get_logger(__name__)

NormOrder = Union[int, float, str]

# Refinement steps for the norm solves
_NORM_REFINE = 2


def _norm_order(p: NormOrder) -> float:
    key = str(p).strip().lower()
    if key in ("1", "1.0"):
        return 1.0
    if key in ("2", "2.0"):
        return 2.0
    if key in ("inf", "infinity", "∞"):
        return math.inf
    raise ConfigurationError(f"Unsupported norm order '{p}'", {"allowed": ["1", "2", "inf"]})


# =============================================================================
# Exact norms
# =============================================================================


def row_sums(spec: SystemSpec) -> np.ndarray:
    """A^-1 1, i.e. the row sums of the inverse, from refined O(n) solves."""
    return get_solver(spec).solve(np.ones(spec.n), refine=_NORM_REFINE)


def exact_inverse_norm(spec: SystemSpec, p: NormOrder = math.inf, method: str = "solve") -> float:
    """||A^-1||_p for p in {1, 2, inf}.

    The 1- and inf-norms coincide by symmetry. For p = 2 the inf-norm is
    returned as a certified upper bound.

    Args:
        spec: Matrix family member.
        p: Norm order.
        method: "solve" (A^-1 1 via the O(n) solver) or "explicit" (row sums of
            explicit entries, rows 1..ceil(n/2) only).

    Raises:
        ConfigurationError: For an unsupported p or method.
    """
    order = _norm_order(p)
    if order == 2.0:
        logger.debug("2-norm of %s reported as its inf-norm upper bound", spec.label)

    if method == "solve":
        return float(row_sums(spec).max())
    if method == "explicit":
        tables = inverse_tables(spec)
        half = (spec.n + 1) // 2
        return max(math.fsum(tables.row(i)) for i in range(1, half + 1))
    raise ConfigurationError(f"Unknown norm method '{method}'", {"allowed": ["solve", "explicit"]})


def c_inverse_row_sum(n: int, i: int) -> float:
    """Row i sum of C_n^-1: (1 - (gamma_i + gamma_{n+1-i}) / gamma_{n+1}) / 6."""
    return (1.0 - gamma_ratio(i, n + 1) - gamma_ratio(n + 1 - i, n + 1)) / 6.0


def c_inverse_norm(n: int) -> float:
    """||C_n^-1||_inf from exact row sums; never exceeds 1/6."""
    if n < 1:
        raise DimensionError("n must be at least 1", {"n": n})
    return max(c_inverse_row_sum(n, i) for i in range(1, (n + 1) // 2 + 1))


def d_inverse_norm(spec: SystemSpec) -> float:
    """||D^-1||_inf = max of D^-1 1 (D^-1 is entrywise positive)."""
    factorization = get_solver(spec).factorization
    return float(factorization.apply_d_inverse(np.ones(spec.n), refine=_NORM_REFINE).max())


def b_inverse_norm(spec: SystemSpec) -> float:
    """||B^-1||_inf = max of B^-1 1 (B^-1 is entrywise positive)."""
    factorization = get_solver(spec).factorization
    return float(factorization.apply_b_inverse(np.ones(spec.n), refine=_NORM_REFINE).max())


# =============================================================================
# Closed forms
# =============================================================================


def bound_value(spec: SystemSpec) -> float:
    """The closed-form upper bound on ||A^-1||_inf."""
    n1 = spec.n + 1
    if spec.variant is Variant.TOEPLITZ:
        value = (
            Fraction(n1 * n1 * (n1 + 2) ** 2, 2304)
            + Fraction(n1 * n1, 432)
            + Fraction(spec.n + 4, 24)
        )
    else:
        value = Fraction(n1 * n1 * (n1 * n1 + 14), 2304)
    return value.numerator / value.denominator


def pi1_bound(spec: SystemSpec) -> float:
    """||C^-1|| ||B^-1|| <= (1/6) ||B^-1||, with the known ||B^-1|| closed forms."""
    n1 = spec.n + 1
    if spec.variant is Variant.TOEPLITZ:
        return n1 * n1 * (n1 + 2) ** 2 / 2304
    return n1 * n1 * (n1 * n1 + 8) / 2304


def b_inverse_norm_bound(spec: SystemSpec) -> float:
    """Closed-form ||B^-1||_inf: (n+1)^2 (n+3)^2 / 384 or (n+1)^2 ((n+1)^2 + 8) / 384."""
    return 6.0 * pi1_bound(spec)


def pi2_closed(spec: SystemSpec) -> float:
    """Last-row sum of D^-1 in closed form.

    Toeplitz:
        1/216 + n(7n+1)/432 - (n^2+n+2)(gamma_n + 1) / (432 gamma_{n+1})
    Near: the last-row closed form summed over j with power sums of j and
    the gamma prefix sum, evaluated exactly.
    """
    n = spec.n
    if spec.variant is Variant.TOEPLITZ:
        tail = gamma_ratio(n, n + 1) + gamma_ratio(1, n + 1)
        return 1 / 216 + n * (7 * n + 1) / 432 - (n * n + n + 2) * tail / 432

    # sum_j (nu3 j^3 + nu2 j^2 + nu1 j + nu0 gamma_j) over the last-row denominator
    s1 = n * (n + 1) // 2
    s2 = n * (n + 1) * (2 * n + 1) // 6
    s3 = s1 * s1
    k = NearKernelCoefficients.for_entry(n, n, 1)
    num = k.nu3 * s3 + k.nu2 * s2 + k.nu1 * s1 + k.nu0 * shared_table(n + 1).prefix(n, 0)
    return num / last_row_fraction(spec, 1)[1]


def pi2_exact(spec: SystemSpec) -> float:
    """Last-row sum of D^-1 from individually rounded entries."""
    n = spec.n
    return math.fsum(d_inv_entry(spec, n, j, method="segment") for j in range(1, n + 1))


def pi2_bound(spec: SystemSpec) -> float:
    """Polynomial upper bound on pi2, using gamma_n / gamma_{n+1} >= 1/8.

    Toeplitz: (55n^2 + 7n + 14) / 3456; near: (31n^2 + 14n + 15) / 3456.
    """
    n = spec.n
    if spec.variant is Variant.TOEPLITZ:
        return (55 * n * n + 7 * n + 14) / 3456
    return (31 * n * n + 14 * n + 15) / 3456


def g_value(spec: SystemSpec, i: Union[int, float]) -> float:
    """Rank-two correction weight g(i) for real 1 <= i <= n.

    Toeplitz:
        (6n+10)(gamma_{n+1} - gamma_i - gamma_{n+1-i}) / (36(n+2) gamma_{n+1})
            + i(n+1-i) / (6(n+2))
    Near:
        [gamma_i S(n-i) + 6 gamma_i gamma_{n+1-i} + gamma_{n+1-i} S(i-1)] / (6 gamma_{n+1})
    with S(p) = 6 sum_{k<=p} gamma_k = gamma_{p+1} - gamma_p - 1. Gammas at
    real arguments use the analytic extension.
    """
    n = spec.n
    if not 1 <= i <= n:
        raise DimensionError("g argument outside [1, n]", {"i": i, "n": n})
    j = n + 1 - i
    ratio_i = gamma_real_ratio(i, n + 1)
    ratio_j = gamma_real_ratio(j, n + 1)

    if spec.variant is Variant.TOEPLITZ:
        return (6 * n + 10) * (1.0 - ratio_i - ratio_j) / (36 * (n + 2)) + i * j / (6 * (n + 2))

    return (
        8.0 * gamma_pair_ratio(i, j, n + 1)
        - gamma_pair_ratio(i, j - 1, n + 1)
        - gamma_pair_ratio(i - 1, j, n + 1)
        - ratio_i
        - ratio_j
    ) / 6.0


def g_direct(spec: SystemSpec, i: int) -> float:
    """g(i) from explicit d^-1 entries."""
    n = spec.n
    return 4.0 * (d_inv_entry(spec, i, 1) + d_inv_entry(spec, i, n)) - (
        d_inv_entry(spec, i, 2) + d_inv_entry(spec, i, n - 1)
    )


def pi3_bound(spec: SystemSpec) -> float:
    """Closed-form bound on max g: (n+4)/24 (Toeplitz) or 31/(48 sqrt 15) (near)."""
    if spec.variant is Variant.TOEPLITZ:
        return (spec.n + 4) / 24
    return 31 / (48 * SQRT15)


# =============================================================================
# Breakdown and sweeps
# =============================================================================


@dataclass(frozen=True)
class BoundBreakdown:
    """Pieces of the norm bound next to their exactly computed counterparts.

    Attributes:
        pi1: Bound on ||D^-1||_inf.
        pi1_exact: ||D^-1||_inf.
        pi2: Closed-form last-row sum of D^-1.
        pi2_exact: Last-row sum from individual entries.
        pi2_bound: Polynomial bound on pi2.
        pi3: max of g over the real interval, attained at (n+1)/2.
        pi3_discrete: max of g over integer rows.
        pi3_bound: Closed-form bound on pi3.
        schur_sum: m11 + m12.
        composed: pi1 + sigma pi2 pi3 / schur_sum.
        bound: The closed-form bound.
        exact_norm: ||A^-1||_inf.
        argmax_row: Row where A^-1 1 is largest.
    """

    variant: str
    n: int
    pi1: float
    pi1_exact: float
    pi2: float
    pi2_exact: float
    pi2_bound: float
    pi3: float
    pi3_discrete: float
    pi3_bound: float
    schur_sum: float
    composed: float
    bound: float
    exact_norm: float
    argmax_row: int

    @property
    def dominates(self) -> bool:
        """Every bound is at least its exact counterpart."""
        return (
            self.exact_norm <= self.bound
            and self.exact_norm <= self.composed
            and self.pi1_exact <= self.pi1
            and self.pi2 <= self.pi2_bound
            and self.pi3_discrete <= self.pi3 <= self.pi3_bound
        )

    @property
    def ratio(self) -> float:
        """bound / exact_norm."""
        return self.bound / self.exact_norm

    def to_dict(self) -> dict:
        payload = asdict(self)
        payload["dominates"] = self.dominates
        return payload


def bound_breakdown(spec: SystemSpec) -> BoundBreakdown:
    """Evaluate every term of the bound for one SystemSpec."""
    n = spec.n
    sums = row_sums(spec)
    schur = schur_m(spec)
    pi1 = pi1_bound(spec)
    pi2 = pi2_closed(spec)
    pi3 = g_value(spec, (n + 1) / 2)
    pi3_discrete = max(g_value(spec, i) for i in range(1, n + 1))

    breakdown = BoundBreakdown(
        variant=spec.variant.value,
        n=n,
        pi1=pi1,
        pi1_exact=d_inverse_norm(spec),
        pi2=pi2,
        pi2_exact=pi2_exact(spec),
        pi2_bound=pi2_bound(spec),
        pi3=pi3,
        pi3_discrete=pi3_discrete,
        pi3_bound=pi3_bound(spec),
        schur_sum=schur.total,
        composed=pi1 + spec.sigma * pi2 * pi3 / schur.total,
        bound=bound_value(spec),
        exact_norm=float(sums.max()),
        argmax_row=int(np.argmax(sums)) + 1,
    )
    if not breakdown.dominates:
        logger.warning("Bound breakdown for %s does not dominate: %s", spec.label, breakdown)
    return breakdown


@dataclass(frozen=True)
class SweepRow:
    """One row of the norm sweep table."""

    n: int
    exact_norm: float
    bound: float

    def as_row(self) -> list:
        return [self.n, self.exact_norm, self.bound]


def norm_sweep_row(variant: Union[Variant, str], n: int) -> SweepRow:
    """(n, ||A^-1||_inf, bound) for one dimension."""
    spec = SystemSpec(n, Variant.parse(variant))
    row = SweepRow(n=n, exact_norm=exact_inverse_norm(spec), bound=bound_value(spec))
    if row.exact_norm > row.bound:
        logger.warning("Bound violated for %s: %r > %r", spec.label, row.exact_norm, row.bound)
    return row


def norm_sweep(variant: Union[Variant, str], n_values: Iterable[int]) -> List[SweepRow]:
    """Sweep rows ordered by n."""
    return [norm_sweep_row(variant, n) for n in sorted(set(n_values))]
