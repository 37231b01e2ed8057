"""Tests for banded/beam.py"""

import numpy as np
import pytest

from banded.beam import (
    FORCINGS,
    BeamProblem,
    FixedPointTrace,
    Forcing,
    beam_fixed_point,
    constant_forcing,
    contraction_predictor,
    grid,
    nonlinear_residual,
    parse_forcing,
)
from banded.bounds import bound_value, exact_inverse_norm
from banded.matrices import SystemSpec, Variant
from banded.solver import solve
from config.exceptions import ConfigurationError, DimensionError, SolverError


@pytest.fixture
def sin_problem() -> BeamProblem:
    """sin(u) + x on the n = 31 clamped beam."""
    return BeamProblem.clamped(31, parse_forcing("sin-plus-x"))


class TestForcing:
    """Tests for the forcing registry."""

    def test_grid(self):
        """Interior points are i / (n + 1)."""
        np.testing.assert_allclose(grid(7), np.arange(1, 8) / 8)

    def test_registered_names(self):
        """Names are looked up case- and space-insensitively."""
        assert parse_forcing("zero") is FORCINGS["zero"]
        assert parse_forcing(" Sin-Plus-X ").lipschitz == 1.0

    def test_sin_plus_x(self):
        """sin(u) + x evaluates pointwise."""
        x = np.array([0.25, 0.5])
        u = np.array([0.0, np.pi / 2])
        np.testing.assert_allclose(FORCINGS["sin-plus-x"](x, u), [0.25, 1.5])

    def test_constant(self):
        """const:c gives a constant with Lipschitz constant 0."""
        forcing = parse_forcing("const:2.5")
        assert forcing.lipschitz == 0.0
        np.testing.assert_array_equal(forcing(grid(7), np.zeros(7)), np.full(7, 2.5))

    @pytest.mark.parametrize("text", ["cubic", "const:", "const:abc", "const:nan", "const:inf"])
    def test_invalid(self, text):
        """Unknown or malformed forcing specs are rejected."""
        with pytest.raises(ConfigurationError):
            parse_forcing(text)


class TestBeamProblem:
    """Tests for problem construction."""

    def test_clamped_uses_near_variant(self, sin_problem):
        """Clamped problems use the near matrix and h^4 c_ei scaling."""
        assert sin_problem.spec.variant is Variant.NEAR
        assert sin_problem.lipschitz == 1.0
        assert sin_problem.h == pytest.approx(1 / 32)
        assert sin_problem.scale == pytest.approx(6.0 / 32**4)

    @pytest.mark.parametrize("c_ei", [0.0, -1.0, float("nan"), float("inf")])
    def test_rejects_bad_stiffness(self, c_ei):
        """c_ei must be positive and finite."""
        with pytest.raises(ConfigurationError):
            BeamProblem.clamped(15, FORCINGS["zero"], c_ei=c_ei)

    def test_rejects_negative_lipschitz(self):
        """A negative Lipschitz constant is rejected."""
        with pytest.raises(ConfigurationError):
            BeamProblem(SystemSpec(15, Variant.NEAR), FORCINGS["zero"], lipschitz=-1.0)


class TestContraction:
    """Tests for the contraction predictor."""

    def test_rates(self, sin_problem):
        """The bound rate dominates the exact rate and stays below 1."""
        estimate = contraction_predictor(sin_problem)
        spec = sin_problem.spec
        assert estimate.rate == pytest.approx(sin_problem.scale * bound_value(spec))
        assert estimate.exact_rate == pytest.approx(sin_problem.scale * exact_inverse_norm(spec))
        assert 0 < estimate.exact_rate <= estimate.rate < 1
        assert estimate.predicts_convergence

    def test_zero_lipschitz(self):
        """A constant forcing has rate 0."""
        estimate = contraction_predictor(BeamProblem.clamped(15, FORCINGS["zero"]))
        assert estimate.rate == 0.0
        assert estimate.exact_rate == 0.0

    def test_large_stiffness_breaks_prediction(self):
        """A huge c_ei pushes the predicted rate past 1."""
        problem = BeamProblem.clamped(31, FORCINGS["sin-plus-x"], c_ei=1e6)
        assert not contraction_predictor(problem).predicts_convergence

    def test_requires_lipschitz(self):
        """Prediction needs a Lipschitz constant."""
        problem = BeamProblem(SystemSpec(15, Variant.NEAR), lambda x, u: x)
        with pytest.raises(ConfigurationError):
            contraction_predictor(problem)


class TestFixedPoint:
    """Tests for the fixed-point iteration."""

    def test_zero_forcing_from_zero(self):
        """Zero forcing from zero converges in one iteration."""
        trace = beam_fixed_point(BeamProblem.clamped(15, FORCINGS["zero"]))
        assert trace.converged
        assert trace.iterations == 1
        np.testing.assert_array_equal(trace.final, np.zeros(15))

    def test_zero_forcing_from_nonzero_start(self):
        """Zero forcing reaches u = 0 in one iteration from any start."""
        trace = beam_fixed_point(BeamProblem.clamped(15, FORCINGS["zero"]), u0=np.ones(15))
        assert trace.converged
        assert trace.iterations == 1
        assert trace.solves == 2
        assert trace.residuals == [1.0, 0.0]

    def test_constant_forcing_is_one_solve(self):
        """A constant forcing is reached by a single solve."""
        problem = BeamProblem.clamped(15, constant_forcing(3.0))
        trace = beam_fixed_point(problem)
        assert trace.converged
        assert trace.iterations == 1
        expected = solve(problem.spec, np.full(15, problem.scale * 3.0))
        np.testing.assert_allclose(trace.final, expected, rtol=1e-12)

    def test_sin_plus_x_converges(self, sin_problem):
        """sin(u) + x converges to a positive solution."""
        trace = beam_fixed_point(sin_problem)
        assert trace.converged
        assert trace.residuals[-1] <= 1e-12
        assert len(trace.iterates) == trace.solves + 1
        assert trace.iterations == trace.solves - 1
        assert nonlinear_residual(sin_problem, trace.final) <= 1e-10
        assert np.all(trace.final > 0)

    def test_observed_rate_within_prediction(self, sin_problem):
        """The first observed quotient is within the exact rate."""
        trace = beam_fixed_point(sin_problem)
        assert trace.predicted_rate is not None
        assert trace.observed_rates()[0] <= trace.exact_rate * 1.01

    def test_solution_leans_right(self, sin_problem):
        """The forcing grows with x, so mirrored points differ."""
        final = beam_fixed_point(sin_problem).final
        assert final[-5] > final[4]

    def test_max_iter_reached(self, sin_problem, mocker):
        """Hitting max_iter is reported on the trace and logged."""
        warning = mocker.patch("banded.beam.logger.warning")
        trace = beam_fixed_point(sin_problem, max_iter=1)
        assert not trace.converged
        assert trace.iterations == 1
        assert trace.solves == 1
        warning.assert_called_once()

    def test_without_lipschitz(self):
        """Iteration runs without a predicted rate."""
        problem = BeamProblem(SystemSpec(15, Variant.NEAR), lambda x, u: np.cos(u))
        trace = beam_fixed_point(problem)
        assert trace.converged
        assert trace.predicted_rate is None

    def test_invalid_arguments(self, sin_problem):
        """Bad tol, max_iter or u0 are rejected."""
        with pytest.raises(ConfigurationError):
            beam_fixed_point(sin_problem, tol=0.0)
        with pytest.raises(ConfigurationError):
            beam_fixed_point(sin_problem, max_iter=0)
        with pytest.raises(DimensionError):
            beam_fixed_point(sin_problem, u0=np.zeros(30))

    def test_non_finite_forcing(self):
        """A non-finite forcing fails at the forcing stage."""
        problem = BeamProblem(SystemSpec(15, Variant.NEAR), lambda x, u: x / 0.0)
        with pytest.raises(SolverError) as exc_info:
            beam_fixed_point(problem)
        assert exc_info.value.stage == "forcing"

    def test_wrong_shape_forcing(self):
        """A forcing of the wrong length raises SolverError."""
        problem = BeamProblem(SystemSpec(15, Variant.NEAR), lambda x, u: np.ones(3))
        with pytest.raises(SolverError):
            beam_fixed_point(problem)


class TestTrace:
    """Tests for FixedPointTrace helpers."""

    def test_observed_rates_skip_zero(self):
        """Quotients after a zero residual are skipped."""
        trace = FixedPointTrace(residuals=[1.0, 0.5, 0.0, 0.0])
        assert trace.observed_rates() == [0.5, 0.0]

    def test_converged_count_excludes_confirming_solve(self):
        """The confirming solve is not counted as an iteration."""
        trace = FixedPointTrace(residuals=[1.0, 0.1, 1e-13], converged=True)
        assert trace.solves == 3
        assert trace.iterations == 2

    def test_single_confirming_solve_counts(self):
        """A lone confirming solve counts as one iteration."""
        trace = FixedPointTrace(residuals=[0.0], converged=True)
        assert trace.iterations == 1

    def test_unconverged_counts_every_solve(self):
        """Without convergence every solve counts."""
        trace = FixedPointTrace(residuals=[1.0, 0.5])
        assert trace.iterations == trace.solves == 2

    def test_forcing_is_callable(self):
        """Forcing objects are callable."""
        forcing = Forcing(name="id", fn=lambda x, u: u, lipschitz=1.0)
        np.testing.assert_array_equal(forcing(grid(7), np.ones(7)), np.ones(7))
