"""Integer sequences gamma_k, alpha_k and their moment sums.

The sequences come from (4 + sqrt(15))**k = alpha_k + gamma_k * sqrt(15):

    gamma_0 = 0, gamma_1 = 1, gamma_k = 8 gamma_{k-1} - gamma_{k-2}
    alpha_0 = 1, alpha_k = 4 gamma_k - gamma_{k-1}

gamma_k grows like 7.873**k and leaves double precision near k = 350, so
exact values live in Python integers and every floating-point consumer
asks for ratios, which are evaluated in overflow-free form:

    gamma_a / gamma_b = r1**(a-b) (1 - q**a) / (1 - q**b),   q = r2**2

Example:
    >>> table = shared_table(10)
    >>> table.gamma(5)
    3905
    >>> table.gamma_moment_sum(3, 1)
    206
    >>> round(gamma_ratio(7, 8), 7)
    0.1270164
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from functools import lru_cache
from typing import Tuple, Union

from config.exceptions import IdentityError, IndexRangeError
from config.logging_config import get_logger

logger = get_logger(__name__)

Real = Union[int, float]

MOMENTS = (0, 1, 2, 3)

with localcontext() as _ctx:
    _ctx.prec = 60
    _R1_DECIMAL = Decimal(4) + Decimal(15).sqrt()
    _R1_TAIL = float(_R1_DECIMAL - Decimal(float(_R1_DECIMAL)))

R1: float = float(_R1_DECIMAL)
R2: float = 1.0 / R1
SQRT15: float = math.sqrt(15.0)

# pow(R1, x) carries x times the rounding error of R1; this restores it
_R1_LOG_TAIL = math.log1p(_R1_TAIL / R1)


def r1_power(x: Real) -> float:
    """(4 + sqrt(15))**x for real x, accurate to a few ulps.

    Underflows to 0.0 for large negative x; raises OverflowError above x ~ 340.
    """
    return math.pow(R1, x) * math.exp(x * _R1_LOG_TAIL)


def gamma_real(x: Real) -> float:
    """gamma extended to real arguments, (r1**x - r2**x) / (2 sqrt(15))."""
    return (r1_power(x) - r1_power(-x)) / (2.0 * SQRT15)


def gamma_real_ratio(x: Real, y: Real) -> float:
    """gamma(x) / gamma(y) for real x >= 0, y > 0 without forming either factor."""
    if y <= 0:
        raise IndexRangeError("gamma ratio denominator index must be positive", {"y": y})
    if x == 0:
        return 0.0
    return r1_power(x - y) * (1.0 - r1_power(-2 * x)) / (1.0 - r1_power(-2 * y))


def gamma_ratio(a: int, b: int) -> float:
    """gamma_a / gamma_b for integers a >= 0, b >= 1.

    Args:
        a: Numerator index.
        b: Denominator index.

    Returns:
        The ratio, 0.0 when a = 0.

    Raises:
        IndexRangeError: If a < 0 or b < 1.
    """
    if a < 0 or b < 1:
        raise IndexRangeError("gamma ratio indices out of range", {"a": a, "b": b})
    return gamma_real_ratio(a, b)


def gamma_pair_ratio(a: Real, b: Real, c: Real) -> float:
    """gamma_a * gamma_b / gamma_c without overflow.

    Used for every product of two gammas over a third, e.g. the C^-1 entries
    gamma_j gamma_{n+1-i} / gamma_{n+1}. Real arguments are allowed.
    """
    if a < 0 or b < 0 or c <= 0:
        raise IndexRangeError("gamma pair ratio indices out of range", {"a": a, "b": b, "c": c})
    if a == 0 or b == 0:
        return 0.0
    return (
        r1_power(a + b - c)
        * (1.0 - r1_power(-2 * a))
        * (1.0 - r1_power(-2 * b))
        / (2.0 * SQRT15 * (1.0 - r1_power(-2 * c)))
    )


@dataclass(frozen=True)
class GammaTable:
    """Exact gamma, alpha and moment prefix tables up to max_index.

    moment_prefix[m][p] holds sum_{k=1}^{p} k**m gamma_k for m in 0..3,
    with moment_prefix[m][0] = 0.

    Build tables with GammaTable.build() or, for shared read-only use,
    shared_table().
    """

    max_index: int
    gammas: Tuple[int, ...]
    alphas: Tuple[int, ...]
    moment_prefix: Tuple[Tuple[int, ...], ...]

    @classmethod
    def build(cls, max_index: int) -> "GammaTable":
        """Build exact tables by the integer recurrences."""
        if max_index < 1:
            raise IndexRangeError("max_index must be at least 1", {"max_index": max_index})

        gammas = [0, 1]
        for _ in range(2, max_index + 1):
            gammas.append(8 * gammas[-1] - gammas[-2])

        alphas = [1] + [4 * gammas[k] - gammas[k - 1] for k in range(1, max_index + 1)]

        prefix = []
        for m in MOMENTS:
            acc = 0
            column = [0]
            for k in range(1, max_index + 1):
                acc += k**m * gammas[k]
                column.append(acc)
            prefix.append(tuple(column))

        logger.debug("Built gamma table up to index %d", max_index)
        return cls(
            max_index=max_index,
            gammas=tuple(gammas),
            alphas=tuple(alphas),
            moment_prefix=tuple(prefix),
        )

    def _check(self, k: int, low: int = 0, high: int = -1) -> None:
        high = self.max_index if high < 0 else high
        if not low <= k <= high:
            raise IndexRangeError(
                f"Index {k} outside [{low}, {high}]", {"k": k, "max_index": self.max_index}
            )

    def gamma(self, k: int) -> int:
        """Exact gamma_k."""
        self._check(k)
        return self.gammas[k]

    def alpha(self, k: int) -> int:
        """Exact alpha_k."""
        self._check(k)
        return self.alphas[k]

    def prefix(self, p: int, m: int) -> int:
        """sum_{k=1}^{p} k**m gamma_k for 0 <= p <= max_index (0 for p = 0)."""
        if m not in MOMENTS:
            raise IndexRangeError("moment order must be 0, 1, 2 or 3", {"m": m})
        self._check(p)
        return self.moment_prefix[m][p]

    def moment_closed_form(self, p: int, m: int) -> int:
        """The summation identities for sum_{k=1}^{p} k**m gamma_k.

        Evaluated from gamma_p and gamma_{p+1} only, with exact division.
        """
        if m not in MOMENTS:
            raise IndexRangeError("moment order must be 0, 1, 2 or 3", {"m": m})
        self._check(p, 1, self.max_index - 1)
        g0, g1 = self.gammas[p], self.gammas[p + 1]

        if m == 0:
            num, den = g1 - g0 - 1, 6
        elif m == 1:
            num, den = p * g1 - (p + 1) * g0, 6
        elif m == 2:
            num, den = (3 * p * p + 1) * g1 - (3 * p * p + 6 * p + 4) * g0 - 1, 18
        else:
            num, den = (p**3 + p) * g1 - (p**3 + 3 * p * p + 4 * p + 2) * g0, 6

        quotient, remainder = divmod(num, den)
        if remainder:
            raise IdentityError("Inexact closed form", {"p": p, "m": m, "remainder": remainder})
        return quotient

    def gamma_moment_sum(self, p: int, m: int) -> int:
        """Exact sum_{k=1}^{p} k**m gamma_k for 1 <= p <= max_index - 1.

        The stored prefix sum is checked against the closed form.
        """
        value = self.moment_closed_form(p, m)
        direct = self.moment_prefix[m][p]
        if value != direct:
            raise IdentityError("Moment identity failed", {"p": p, "m": m})
        return value

    def moment_range(self, lo: int, hi: int, m: int) -> int:
        """sum_{k=lo}^{hi} k**m gamma_k, 0 when hi < lo."""
        if hi < lo:
            return 0
        return self.prefix(hi, m) - self.prefix(lo - 1, m)

    def normalized_moment(self, p: int, m: int) -> float:
        """sum_{k=1}^{p} k**m gamma_k / gamma_p as a float (bounded by p**m * r1 / (r1 - 1))."""
        self._check(p, 1)
        return self.prefix(p, m) / self.gammas[p]

    def ratio(self, a: int, b: int) -> float:
        """Correctly rounded gamma_a / gamma_b from the exact table."""
        self._check(a)
        self._check(b, 1)
        return self.gammas[a] / self.gammas[b]


@lru_cache(maxsize=8)
def _table_of_size(size: int) -> GammaTable:
    return GammaTable.build(size)


def shared_table(max_index: int) -> GammaTable:
    """Cached table covering at least max_index.

    Sizes are rounded up to a power of two so nearby requests share a table.
    """
    if max_index < 1:
        raise IndexRangeError("max_index must be at least 1", {"max_index": max_index})
    size = 16
    while size < max_index:
        size *= 2
    return _table_of_size(size)
