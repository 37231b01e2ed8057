"""Tests for verify/oracle.py"""

import math

import numpy as np
import pytest

from banded.matrices import SystemSpec, Variant, build_a, to_dense
from config.constants import Guards
from config.exceptions import DimensionError, OracleError
from verify.oracle import (
    VerificationReport,
    dense_invert,
    dense_solve,
    determinant_lemma_check,
    leading_minors,
    oracle_inverse,
    stencil_constants,
    stencil_constants_check,
)


class TestDenseInvert:
    """Tests for the dense LU oracle."""

    def test_inverse_of_a(self, small_spec):
        """The dense inverse satisfies X A = I."""
        a = to_dense(build_a(small_spec))
        result = dense_invert(a)
        np.testing.assert_allclose(result.inverse @ a, np.eye(small_spec.n), atol=1e-10)
        assert result.residual <= 1e-10 * small_spec.n

    def test_refined_residual(self, near7):
        """Refinement brings the residual near rounding level."""
        a = to_dense(build_a(near7))
        assert dense_invert(a, refine=2).residual <= 1e-12
        assert dense_invert(a, refine=0).inverse.shape == (7, 7)

    def test_non_integer_matrix(self, rng):
        """Real matrices are inverted too."""
        matrix = rng.standard_normal((6, 6)) + 6 * np.eye(6)
        np.testing.assert_allclose(
            dense_invert(matrix).inverse, np.linalg.inv(matrix), rtol=1e-10, atol=1e-12
        )

    def test_rejects_non_square(self):
        """Non-square input raises DimensionError."""
        with pytest.raises(DimensionError):
            dense_invert(np.ones((3, 4)))

    def test_rejects_singular(self):
        """A singular matrix raises OracleError."""
        with pytest.raises(OracleError):
            dense_invert(np.ones((3, 3)))

    def test_rejects_non_finite(self):
        """Non-finite entries raise OracleError."""
        matrix = np.eye(3)
        matrix[1, 1] = np.inf
        with pytest.raises(OracleError):
            dense_invert(matrix)

    def test_size_guard(self, mocker):
        """Matrices above the oracle guard are refused."""
        mocker.patch("verify.oracle.GUARDS", Guards(ORACLE_MAX_N=8))
        with pytest.raises(DimensionError):
            dense_invert(np.eye(9))


class TestDenseSolve:
    """Tests for dense solves."""

    def test_vector(self, small_spec, rng):
        """A vector rhs is solved with a small residual."""
        a = to_dense(build_a(small_spec))
        rhs = rng.uniform(0.5, 1.5, small_spec.n)
        x = dense_solve(a, rhs)
        assert x.shape == rhs.shape
        np.testing.assert_allclose(a @ x, rhs, atol=1e-10)

    def test_block(self, toeplitz7, rng):
        """A block rhs matches numpy."""
        a = to_dense(build_a(toeplitz7))
        rhs = rng.uniform(0.5, 1.5, (7, 2))
        np.testing.assert_allclose(dense_solve(a, rhs), np.linalg.solve(a, rhs), rtol=1e-10)

    def test_rejects_wrong_length(self, toeplitz7):
        """A rhs of the wrong length is rejected."""
        with pytest.raises(DimensionError):
            dense_solve(to_dense(build_a(toeplitz7)), np.ones(5))


class TestLeadingMinors:
    """Tests for the exact leading minors."""

    def test_first_minors(self, toeplitz7, near7):
        """The first two minors match hand values."""
        assert leading_minors(toeplitz7)[:2] == [56, 56 * 56 - 39 * 39]
        assert leading_minors(near7)[:2] == [68, 68 * 56 - 40 * 40]

    def test_all_positive(self, small_spec):
        """Every leading minor is a positive integer."""
        minors = leading_minors(small_spec)
        assert len(minors) == small_spec.n
        assert all(isinstance(m, int) and m > 0 for m in minors)

    def test_last_minor_is_determinant(self, near7):
        """The last minor is det A."""
        det = np.linalg.det(to_dense(build_a(near7)))
        assert leading_minors(near7)[-1] == pytest.approx(det, rel=1e-9)

    def test_guard(self, mocker):
        """n above the minors guard is refused."""
        mocker.patch("verify.oracle.GUARDS", Guards(MINORS_MAX_N=7))
        with pytest.raises(DimensionError):
            leading_minors(SystemSpec(8))

    @pytest.mark.slow
    def test_positive_up_to_128(self, variant):
        """Minors stay positive for every n up to 128."""
        for n in range(7, 129):
            assert all(m > 0 for m in leading_minors(SystemSpec(n, variant)))


class TestIdentityChecks:
    """Tests for the stencil constants and the determinant lemma."""

    def test_stencil_constants(self):
        """a d = 1 and a^2 = 4 - sqrt 15."""
        k = stencil_constants()
        assert k["a"] * k["d"] == pytest.approx(1.0, abs=1e-14)
        assert k["a"] ** 2 == pytest.approx(4 - math.sqrt(15))

    def test_stencil_report(self):
        """The stencil report passes with margin about 2.20."""
        report = stencil_constants_check()
        assert report.passed
        assert report.check == "stencil_constants"
        assert report.case == "near"
        assert report.details["margin"] == pytest.approx(2.20, abs=0.01)

    def test_determinant_lemma(self, small_spec):
        """The determinant lemma holds on small cases."""
        report = determinant_lemma_check(small_spec)
        assert report.passed, report.details

    @pytest.mark.parametrize("n", [100, 1000])
    def test_determinant_lemma_large(self, variant, n):
        """The determinant lemma holds at n = 100 and 1000."""
        assert determinant_lemma_check(SystemSpec(n, variant)).passed


class TestOracleInverse:
    """Tests for the cached oracle and reports."""

    def test_cached(self, near7):
        """Oracle inverses are cached per spec."""
        assert oracle_inverse(near7) is oracle_inverse(SystemSpec(7, Variant.NEAR))

    def test_positive_entries(self, small_spec):
        """Oracle inverse entries are positive."""
        assert oracle_inverse(small_spec).inverse.min() > 0

    def test_report_dict(self):
        """to_dict has the report schema."""
        report = VerificationReport(
            variant="near",
            n=16,
            check="solve",
            max_abs_error=1e-14,
            max_rel_error=1e-13,
            passed=True,
        )
        payload = report.to_dict()
        assert payload["case"] == "near/n=16"
        assert payload["pass"] is True
        assert payload["details"] == {}
        assert set(payload) == {
            "case",
            "variant",
            "n",
            "check",
            "max_abs_error",
            "max_rel_error",
            "pass",
            "details",
        }
