"""Fixed-point iteration for the clamped beam EI u'''' = f(x, u) on (0, 1).

With n interior grid points x_i = i h, h = 1/(n+1), the discrete problem is

    A u = h^4 c_ei f(x, u)

and the iteration u^l = A^-1 (h^4 c_ei f(x, u^{l-1})) contracts in the
inf-norm when rho = h^4 c_ei L ||A^-1||_inf < 1, L being the Lipschitz
constant of f in u.

Example:
    >>> problem = BeamProblem.clamped(31, parse_forcing("sin-plus-x"))
    >>> trace = beam_fixed_point(problem)
    >>> trace.converged
    True
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from banded.bounds import bound_value, exact_inverse_norm
from banded.matrices import SystemSpec, Variant, build_a, multiply
from banded.solver import get_solver
from config.constants import BEAM
from config.exceptions import ConfigurationError, DimensionError, SolverError
from config.logging_config import get_logger

logger = get_logger(__name__)

ForcingFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


def grid(n: int) -> np.ndarray:
    """Interior grid x_i = i / (n + 1), i = 1..n."""
    return np.arange(1, n + 1) / (n + 1)


# =============================================================================
# Forcing registry
# =============================================================================


@dataclass(frozen=True)
class Forcing:
    """Named right-hand side f(x, u) with its Lipschitz constant in u."""

    name: str
    fn: ForcingFn
    lipschitz: float

    def __call__(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        return self.fn(x, u)


def _zero(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.zeros_like(x)


def _sin_plus_x(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.sin(u) + x


def constant_forcing(value: float) -> Forcing:
    """f(x, u) = value."""
    return Forcing(
        name=f"const:{value!r}",
        fn=lambda x, u: np.full_like(x, value, dtype=float),
        lipschitz=0.0,
    )


FORCINGS = {
    "zero": Forcing(name="zero", fn=_zero, lipschitz=0.0),
    "sin-plus-x": Forcing(name="sin-plus-x", fn=_sin_plus_x, lipschitz=1.0),
}


def parse_forcing(text: str) -> Forcing:
    """Forcing from 'zero', 'sin-plus-x' or 'const:<value>'.

    Raises:
        ConfigurationError: For an unknown name or a malformed constant.
    """
    key = text.strip().lower()
    if key in FORCINGS:
        return FORCINGS[key]
    if key.startswith("const:"):
        try:
            value = float(key.split(":", 1)[1])
        except ValueError:
            raise ConfigurationError(f"Invalid constant forcing '{text}'") from None
        if not math.isfinite(value):
            raise ConfigurationError(f"Constant forcing must be finite: '{text}'")
        return constant_forcing(value)
    raise ConfigurationError(
        f"Unknown forcing '{text}'", {"allowed": ["zero", "const:<c>", "sin-plus-x"]}
    )


# =============================================================================
# Problem and trace
# =============================================================================


@dataclass(frozen=True)
class BeamProblem:
    """Discretized beam problem A u = h^4 c_ei f(x, u).

    Raises:
        ConfigurationError: If c_ei is not positive or lipschitz is negative.
    """

    spec: SystemSpec
    forcing: ForcingFn
    c_ei: float = BEAM.DEFAULT_C_EI
    lipschitz: Optional[float] = None

    def __post_init__(self) -> None:
        if not (self.c_ei > 0 and math.isfinite(self.c_ei)):
            raise ConfigurationError("c_ei must be positive", {"c_ei": self.c_ei})
        if self.lipschitz is not None and self.lipschitz < 0:
            raise ConfigurationError("lipschitz must be non-negative", {"L": self.lipschitz})

    @classmethod
    def clamped(
        cls, n: int, forcing: Forcing, c_ei: float = BEAM.DEFAULT_C_EI
    ) -> "BeamProblem":
        """Clamped-clamped beam (near variant) with a registered forcing."""
        return cls(
            spec=SystemSpec(n, Variant.NEAR),
            forcing=forcing,
            c_ei=c_ei,
            lipschitz=forcing.lipschitz,
        )

    @property
    def h(self) -> float:
        return self.spec.h

    @property
    def scale(self) -> float:
        """h^4 c_ei."""
        return self.h**4 * self.c_ei

    @property
    def grid(self) -> np.ndarray:
        return grid(self.spec.n)


@dataclass
class FixedPointTrace:
    """Iterates u^0, u^1, ... and residuals ||u^l - u^{l-1}||_inf.

    Convergence of u^l only shows one solve later, when u^{l+1} is within tol
    of it. `iterations` counts the solves up to that accepted iterate: the
    confirming solve is not counted, except when it is the only solve (u^0
    was already a fixed point). Unconverged traces count every solve; `solves`
    is always the total, and `final` is the last iterate computed.
    """

    iterates: List[np.ndarray] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)
    converged: bool = False
    predicted_rate: Optional[float] = None
    exact_rate: Optional[float] = None

    @property
    def solves(self) -> int:
        return len(self.residuals)

    @property
    def iterations(self) -> int:
        if self.converged and self.solves > 1:
            return self.solves - 1
        return self.solves

    @property
    def final(self) -> np.ndarray:
        return self.iterates[-1]

    def observed_rates(self) -> List[float]:
        """Quotients residual[l+1] / residual[l] where residual[l] > 0."""
        return [
            later / earlier
            for earlier, later in zip(self.residuals, self.residuals[1:])
            if earlier > 0
        ]


@dataclass(frozen=True)
class ContractionEstimate:
    """Contraction factors from the closed-form bound and from the exact norm."""

    rate: float
    exact_rate: float

    @property
    def predicts_convergence(self) -> bool:
        return self.rate < 1.0


def contraction_predictor(problem: BeamProblem) -> ContractionEstimate:
    """rho = h^4 c_ei L bound_value, next to h^4 c_ei L ||A^-1||_inf.

    Raises:
        ConfigurationError: If the problem has no Lipschitz constant.
    """
    if problem.lipschitz is None:
        raise ConfigurationError("A Lipschitz constant is required to predict contraction")
    factor = problem.scale * problem.lipschitz
    if factor == 0:
        return ContractionEstimate(rate=0.0, exact_rate=0.0)
    return ContractionEstimate(
        rate=factor * bound_value(problem.spec),
        exact_rate=factor * exact_inverse_norm(problem.spec),
    )


def _evaluate(problem: BeamProblem, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    values = np.asarray(problem.forcing(x, u), dtype=float)
    if values.shape != x.shape:
        raise SolverError(
            "Forcing returned the wrong shape", stage="forcing", details={"shape": values.shape}
        )
    if not np.all(np.isfinite(values)):
        raise SolverError("Forcing returned non-finite values", stage="forcing")
    return values


def beam_fixed_point(
    problem: BeamProblem,
    u0=None,
    tol: float = BEAM.DEFAULT_TOL,
    max_iter: int = BEAM.DEFAULT_MAX_ITER,
) -> FixedPointTrace:
    """Run u^l = A^-1 (h^4 c_ei f(x, u^{l-1})) until ||u^l - u^{l-1}||_inf <= tol.

    Non-convergence within max_iter is reported on the trace, not raised.

    Args:
        problem: The beam problem.
        u0: Starting vector, zeros by default.
        tol: Stopping tolerance on successive iterates.
        max_iter: Maximum number of solves.

    Returns:
        The full trace, including u^0.

    Raises:
        ConfigurationError: If tol <= 0 or max_iter < 1.
        DimensionError: If u0 has the wrong length.
        SolverError: If the forcing produces non-finite values.
    """
    if not tol > 0:
        raise ConfigurationError("tol must be positive", {"tol": tol})
    if max_iter < 1:
        raise ConfigurationError("max_iter must be at least 1", {"max_iter": max_iter})

    n = problem.spec.n
    u = np.zeros(n) if u0 is None else np.asarray(u0, dtype=float).copy()
    if u.shape != (n,):
        raise DimensionError("u0 does not match the grid", {"n": n, "shape": list(u.shape)})

    trace = FixedPointTrace(iterates=[u])
    if problem.lipschitz is not None:
        estimate = contraction_predictor(problem)
        trace.predicted_rate, trace.exact_rate = estimate.rate, estimate.exact_rate

    solver = get_solver(problem.spec)
    x = problem.grid
    for _ in range(max_iter):
        u_next = solver.solve(problem.scale * _evaluate(problem, x, u))
        residual = float(np.abs(u_next - u).max())
        trace.iterates.append(u_next)
        trace.residuals.append(residual)
        u = u_next
        if residual <= tol:
            trace.converged = True
            break

    if trace.converged:
        logger.debug(
            "Fixed point for %s converged in %d iterations", problem.spec.label, trace.iterations
        )
    else:
        logger.warning(
            "Fixed point for %s did not converge in %d iterations (last residual %.3e)",
            problem.spec.label,
            max_iter,
            trace.residuals[-1],
        )
    return trace


def nonlinear_residual(problem: BeamProblem, u) -> float:
    """||A u - h^4 c_ei f(x, u)||_inf."""
    u = np.asarray(u, dtype=float)
    rhs = problem.scale * _evaluate(problem, problem.grid, u)
    return float(np.abs(multiply(build_a(problem.spec), u) - rhs).max())
