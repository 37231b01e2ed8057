"""Shared numeric helpers for the banded engine.

Index validation, relative errors and the error-free float splitting used
by the exactly rounded residuals.
"""

from __future__ import annotations

import math
from typing import Tuple

import numpy as np

from config.constants import TOLERANCES
from config.exceptions import IndexRangeError

# 2**27 + 1, splits a double into two halves of at most 26 significant bits
_SPLITTER = 134217729.0


def check_entry_index(n: int, i: int, j: int) -> None:
    """Raise IndexRangeError unless 1 <= i, j <= n."""
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexRangeError(
            f"Matrix index ({i}, {j}) out of range for n={n}", {"n": n, "i": i, "j": j}
        )


def mirror(n: int, i: int) -> int:
    """Index reflected through the centre: i -> n + 1 - i."""
    return n + 1 - i


def relative_error(value: float, reference: float) -> float:
    """|value - reference| / max(|reference|, REL_FLOOR)."""
    return abs(value - reference) / max(abs(reference), TOLERANCES.REL_FLOOR)


def max_errors(values: np.ndarray, reference: np.ndarray) -> Tuple[float, float]:
    """Maximum absolute and relative entrywise errors of two arrays."""
    values = np.asarray(values, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if values.size == 0:
        return 0.0, 0.0
    diff = np.abs(values - reference)
    denom = np.maximum(np.abs(reference), TOLERANCES.REL_FLOOR)
    return float(diff.max()), float((diff / denom).max())


def split_float(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Veltkamp split: x = hi + lo exactly, each half with at most 26 bits.

    Products of the halves with small integers are exact in double precision.
    """
    x = np.asarray(x, dtype=float)
    scaled = _SPLITTER * x
    hi = scaled - (scaled - x)
    return hi, x - hi


def exact_dot_rows(terms: np.ndarray) -> np.ndarray:
    """Correctly rounded sum along the last axis of an array of exact terms."""
    terms = np.asarray(terms, dtype=float)
    flat = terms.reshape(-1, terms.shape[-1])
    out = np.fromiter((math.fsum(row) for row in flat), dtype=float, count=flat.shape[0])
    return out.reshape(terms.shape[:-1])
