"""Tests for verify/suite.py"""

from dataclasses import replace

import pytest

from banded.gamma import GammaTable
from banded.matrices import SystemSpec, Variant
from config.constants import Guards, Tolerances
from config.exceptions import DimensionError
from verify.oracle import VerificationReport
from verify.suite import (
    CASE_CHECKS,
    SEQUENCE_CHECKS,
    case_reports,
    check_bound_dominance,
    full_suite,
    sequence_report,
    suite_passed,
)


def _report(passed: bool) -> VerificationReport:
    return VerificationReport("near", 7, "solve", 0.0, 0.0, passed)


class TestCaseChecks:
    """Every per-case check passes on the small dimensions."""

    @pytest.mark.parametrize("check", CASE_CHECKS, ids=lambda fn: fn.__name__)
    def test_check_passes(self, check, small_spec):
        """Each per-case check passes and reports its case."""
        report = check(small_spec)
        assert report.passed, f"{report.case} {report.check}: {report.details}"
        assert report.n == small_spec.n
        assert report.variant == small_spec.variant.value

    def test_case_reports_cover_every_check(self, near7):
        """case_reports runs every check in a fixed order."""
        reports = case_reports(near7)
        assert [r.check for r in reports] == [
            "decomposition",
            "inverse_equivalence",
            "residual",
            "positivity",
            "schur",
            "solve",
            "bound_dominance",
            "norm_equality",
            "lemma_identities",
            "determinant_lemma",
        ]

    def test_positivity_details(self, toeplitz7):
        """Positivity details carry the first leading minor."""
        report = next(r for r in case_reports(toeplitz7) if r.check == "positivity")
        assert report.details["first_minor"] == 56
        assert report.details["minors_positive"] is True

    def test_bound_ratio_not_flagged(self, variant):
        """At n = 64 the bound ratio stays under the guard."""
        report = check_bound_dominance(SystemSpec(64, variant))
        assert report.passed
        assert "ratio_flagged" not in report.details

    def test_bound_ratio_flagged_above_guard(self, mocker, variant):
        """A ratio above the guard is flagged and logged without failing."""
        mocker.patch("verify.suite.TOLERANCES", Tolerances(RATIO_GUARD=1.0))
        warning = mocker.patch("verify.suite.logger.warning")
        report = check_bound_dominance(SystemSpec(64, variant))
        assert report.details["ratio_flagged"] is True
        assert report.passed
        warning.assert_called_once()

    def test_bound_ratio_ignored_for_small_n(self, mocker, variant):
        """The ratio guard starts at n = 50."""
        mocker.patch("verify.suite.TOLERANCES", Tolerances(RATIO_GUARD=1.0))
        report = check_bound_dominance(SystemSpec(49, variant))
        assert "ratio_flagged" not in report.details

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [31, 64, 100, 128])
    def test_larger_cases(self, variant, n):
        """The battery passes on larger dimensions."""
        assert suite_passed(case_reports(SystemSpec(n, variant)))


class TestSequenceReport:
    """Tests for the sequence-level report."""

    def test_passes(self):
        """The exact identities hold and ratios are accurate."""
        report = sequence_report(max_index=60)
        assert report.passed, report.details["failures"]
        assert report.case == "sequence"
        assert report.max_rel_error <= 1e-13

    def test_default_range(self):
        """Identities are checked up to index 200 by default."""
        assert sequence_report().details["max_index"] == 200

    def test_lists_ratio_checks(self):
        """The report names every identity it checks."""
        checks = sequence_report(max_index=20).details["checks"]
        assert checks == list(SEQUENCE_CHECKS)
        assert "ratio monotone" in checks
        assert "ratio above limit" in checks

    def test_broken_ratio_is_reported(self, mocker):
        """A corrupted gamma shows up as ratio and moment failures."""
        table = GammaTable.build(300)
        gammas = list(table.gammas)
        gammas[11] += 1
        broken = replace(table, gammas=tuple(gammas))
        mocker.patch("verify.suite.shared_table", return_value=broken)
        report = sequence_report(max_index=10)
        assert not report.passed
        failures = report.details["failures"]
        assert "ratio monotone k=9" in failures
        assert "ratio monotone k=10" in failures
        assert "ratio above limit k=10" in failures
        assert any(f.startswith("moment p=10") for f in failures)


@pytest.mark.integration
class TestFullSuite:
    """Tests for the full verification run."""

    def test_empty_list(self):
        """No dimensions give no reports."""
        assert full_suite([]) == []

    def test_single_case(self):
        """One case yields the sequence, stencil and per-case reports."""
        reports = full_suite([7], [Variant.NEAR])
        assert len(reports) == 2 + len(CASE_CHECKS)
        assert reports[0].check == "sequence_identities"
        assert reports[1].check == "stencil_constants"
        assert suite_passed(reports)

    def test_order_is_variant_then_n(self):
        """Reports are ordered by variant, then by n."""
        reports = full_suite([8, 7], [Variant.TOEPLITZ, Variant.NEAR])
        cases = []
        for r in reports[2:]:
            if r.case not in cases:
                cases.append(r.case)
        assert cases == ["toeplitz/n=7", "toeplitz/n=8", "near/n=7", "near/n=8"]

    def test_uses_mapper(self, mocker):
        """The supplied mapper runs the cases."""
        mapper = mocker.Mock(side_effect=lambda fn, items: [fn(i) for i in items])
        full_suite([7], [Variant.TOEPLITZ], mapper=mapper)
        mapper.assert_called_once()

    def test_rejects_small_n(self):
        """n below 7 is rejected before any work."""
        with pytest.raises(DimensionError):
            full_suite([6])

    def test_rejects_oracle_overflow(self, mocker):
        """n above the oracle guard is rejected."""
        mocker.patch("verify.suite.GUARDS", Guards(ORACLE_MAX_N=10))
        with pytest.raises(DimensionError):
            full_suite([11])

    def test_failures_are_logged(self, mocker):
        """A failed check is logged as a warning."""
        mocker.patch("verify.suite.case_reports", return_value=[_report(False)])
        warning = mocker.patch("verify.suite.logger.warning")
        reports = full_suite([7], [Variant.NEAR])
        assert not suite_passed(reports)
        warning.assert_called_once()


class TestSuitePassed:
    """Tests for suite_passed."""

    def test_all_pass(self):
        """All passing reports pass."""
        assert suite_passed([_report(True), _report(True)])

    def test_one_fails(self):
        """One failure fails the suite."""
        assert not suite_passed([_report(True), _report(False)])

    def test_empty(self):
        """An empty report list passes."""
        assert suite_passed([])
