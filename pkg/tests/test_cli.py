"""Tests for app/cli.py"""

import argparse
import json
from pathlib import Path

import numpy as np
import pytest

from app.cli import CommandConfig, build_parser, main, parse_n_list, run
from banded.beam import BeamProblem, beam_fixed_point, parse_forcing
from banded.bounds import bound_value
from banded.matrices import SystemSpec, Variant
from config.exceptions import ConfigurationError, StorageError
from verify.oracle import VerificationReport


def _csv_rows(text: str):
    return [line.split(",") for line in text.strip().splitlines()]


class TestParseNList:
    """Tests for the --n-list grammar."""

    @pytest.mark.parametrize(
        "text,expected",
        [
            ("7", (7,)),
            ("9,7,8,7", (7, 8, 9)),
            ("7:10", (7, 8, 9, 10)),
            ("7:20:5", (7, 12, 17)),
            ("7:9, 16", (7, 8, 9, 16)),
            ("7,", (7,)),
        ],
    )
    def test_valid(self, text, expected):
        """Lists, ranges and steps expand to sorted unique values."""
        assert parse_n_list(text) == expected

    @pytest.mark.parametrize("text", ["", ",", "a", "7:", "10:7", "7:9:0", "1:2:3:4"])
    def test_invalid(self, text):
        """Malformed n-lists raise ArgumentTypeError."""
        with pytest.raises(argparse.ArgumentTypeError):
            parse_n_list(text)


class TestParser:
    """Tests for argument parsing."""

    def test_verify_defaults_to_both_variants(self):
        """verify covers both variants unless told otherwise."""
        args = build_parser().parse_args(["verify", "--n-list", "7"])
        assert args.variant == (Variant.TOEPLITZ, Variant.NEAR)

    def test_matrix_rejects_both(self):
        """matrix needs a single variant."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["matrix", "--variant", "both", "--n", "7"])

    def test_unknown_subcommand_config(self):
        """CommandConfig rejects unknown subcommands."""
        with pytest.raises(ConfigurationError):
            CommandConfig(subcommand="plot")

    def test_solve_refines_once_by_default(self):
        """solve refines once unless --refine is given."""
        args = build_parser().parse_args(["solve", "--n", "7"])
        assert args.refine == 1


@pytest.mark.integration
class TestCommands:
    """End-to-end runs of each subcommand."""

    def test_gamma(self, capsys):
        """gamma prints the exact value."""
        assert main(["gamma", "--k", "5"]) == 0
        assert capsys.readouterr().out == "3905\n"

    def test_gamma_exact_json(self, capsys):
        """--exact JSON carries integers satisfying alpha^2 - 15 gamma^2 = 1."""
        assert main(["gamma", "--k", "40", "--exact", "--emit", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["k"] == 40
        assert isinstance(payload["gamma"], int)
        assert payload["alpha"] ** 2 - 15 * payload["gamma"] ** 2 == 1

    def test_matrix_dense(self, capsys):
        """Dense CSV starts with the first row of A."""
        assert main(["matrix", "--n", "7", "--emit", "dense-csv"]) == 0
        rows = _csv_rows(capsys.readouterr().out)
        assert len(rows) == 7
        assert rows[0] == ["56", "-39", "12", "-1", "0", "0", "0"]

    def test_matrix_banded_json(self, capsys):
        """Banded JSON records n."""
        assert main(["matrix", "--variant", "near", "--n", "9"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["n"] == 9

    def test_inverse_entry(self, capsys):
        """A single inverse entry is printed."""
        assert main(["inverse", "--variant", "near", "--n", "7", "--entry", "1,1"]) == 0
        value = float(capsys.readouterr().out)
        assert 0 < value < 1

    def test_inverse_dense(self, capsys):
        """The dense C^-1 is symmetric."""
        assert main(["inverse", "--n", "8", "--emit", "dense-csv", "--of", "c"]) == 0
        dense = np.array(_csv_rows(capsys.readouterr().out), dtype=float)
        assert dense.shape == (8, 8)
        np.testing.assert_allclose(dense, dense.T)

    def test_inverse_entry_out_of_range(self, capsys):
        """An entry outside the matrix is a usage error."""
        assert main(["inverse", "--n", "7", "--entry", "8,1"]) == 2
        assert "error" in capsys.readouterr().err

    def test_bound(self, capsys):
        """bound prints the exact norm next to the closed form."""
        assert main(["bound", "--variant", "near", "--n", "7"]) == 0
        rows = _csv_rows(capsys.readouterr().out)
        assert rows[0] == ["n", "exact_norm", "bound"]
        assert float(rows[1][1]) == pytest.approx(1.80645, rel=1e-4)
        assert float(rows[1][2]) == pytest.approx(bound_value(SystemSpec(7, Variant.NEAR)))

    def test_bound_breakdown(self, capsys):
        """--breakdown emits the per-term JSON."""
        assert main(["bound", "--n", "16", "--breakdown"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["dominates"] is True
        assert payload["variant"] == "toeplitz"

    def test_norm_sweep(self, capsys, single_worker):
        """Sweep rows are ordered and dominated by the bound."""
        assert main(["norm-sweep", "--variant", "near", "--n-list", "7:9"]) == 0
        rows = _csv_rows(capsys.readouterr().out)
        assert [r[0] for r in rows] == ["n", "7", "8", "9"]
        assert all(float(r[1]) <= float(r[2]) for r in rows[1:])

    def test_norm_sweep_json(self, capsys):
        """JSON sweep rows keep the requested order."""
        assert main(["norm-sweep", "--n-list", "7,8", "--emit", "json"]) == 0
        assert [row["n"] for row in json.loads(capsys.readouterr().out)] == [7, 8]

    def test_solve(self, capsys):
        """The default rhs gives a symmetric solution."""
        assert main(["solve", "--n", "7", "--refine", "1"]) == 0
        rows = _csv_rows(capsys.readouterr().out)
        assert rows[0] == ["i", "x"]
        x = [float(r[1]) for r in rows[1:]]
        assert len(x) == 7
        assert x == pytest.approx(x[::-1], rel=1e-12)

    def test_solve_rhs_file(self, capsys, temp_data_dir):
        """An rhs file of ones matches the default rhs."""
        rhs = Path(temp_data_dir) / "rhs.csv"
        rhs.write_text("\n".join(["1"] * 7) + "\n")
        assert main(["solve", "--n", "7", "--rhs", str(rhs)]) == 0
        from_file = capsys.readouterr().out
        assert main(["solve", "--n", "7"]) == 0
        assert capsys.readouterr().out == from_file

    def test_solve_missing_rhs_file(self, temp_data_dir):
        """A missing rhs file exits with status 2."""
        missing = str(Path(temp_data_dir) / "missing.csv")
        assert main(["solve", "--n", "7", "--rhs", missing]) == 2

    def test_solve_wrong_length_rhs(self, temp_data_dir):
        """An rhs of the wrong length exits with status 2."""
        rhs = Path(temp_data_dir) / "rhs.csv"
        rhs.write_text("1\n2\n")
        assert main(["solve", "--n", "7", "--rhs", str(rhs)]) == 2

    def test_beam_trace_file(self, temp_data_dir):
        """The beam trace CSV ends below the tolerance."""
        target = Path(temp_data_dir) / "trace.csv"
        assert main(["beam", "--n", "31", "--emit", str(target)]) == 0
        rows = _csv_rows(target.read_text())
        assert rows[0] == ["iteration", "residual", "observed_rate"]
        assert rows[1][2] == ""
        assert float(rows[-1][1]) <= 1e-12

    def test_beam_json(self, capsys):
        """Beam JSON reports convergence, the solution and both counts."""
        assert main(["beam", "--n", "15", "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["converged"] is True
        assert len(payload["u"]) == 15
        assert payload["solves"] == payload["iterations"] + 1

    def test_beam_not_converged(self, capsys):
        """Running out of iterations exits with status 1."""
        assert main(["beam", "--n", "15", "--max-iter", "1"]) == 1

    def test_beam_json_counts_iterations(self, capsys):
        """JSON counts match the trace of the same run."""
        assert main(["beam", "--n", "31", "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        trace = beam_fixed_point(BeamProblem.clamped(31, parse_forcing("sin-plus-x")))
        assert payload["iterations"] == trace.iterations
        assert payload["solves"] == len(payload["residuals"])

    def test_beam_too_small(self):
        """n below 7 exits with status 2."""
        assert main(["beam", "--n", "3"]) == 2

    def test_verify_report(self, temp_data_dir, single_worker):
        """verify writes one passing report per check."""
        target = Path(temp_data_dir) / "report.json"
        status = main(
            ["verify", "--variant", "near", "--n-list", "7", "--emit", str(target)]
        )
        assert status == 0
        reports = json.loads(target.read_text())
        assert len(reports) == 12
        assert all(r["pass"] for r in reports)

    def test_output_option(self, temp_data_dir):
        """--output redirects the artifact to a file."""
        target = Path(temp_data_dir) / "gamma.txt"
        assert main(["--output", str(target), "gamma", "--k", "1"]) == 0
        assert target.read_text() == "1\n"


class TestExitStatus:
    """Tests for error and failure exit codes."""

    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["plot"],
            ["matrix", "--variant", "circulant", "--n", "7"],
            ["gamma", "--k", "-1"],
            ["beam", "--n", "15", "--cei", "0"],
        ],
    )
    def test_usage_errors(self, argv):
        """Bad arguments exit with status 2."""
        assert main(argv) == 2

    def test_small_n(self, capsys):
        """Small n is reported on stderr with the subcommand."""
        assert main(["matrix", "--n", "6"]) == 2
        assert "heptainv matrix: error" in capsys.readouterr().err

    def test_failed_verification(self, mocker, single_worker):
        """A failed check exits with status 1."""
        failed = VerificationReport("near", 7, "solve", 1.0, 1.0, False)
        mocker.patch("app.cli.full_suite", return_value=[failed])
        assert main(["verify", "--n-list", "7"]) == 1

    def test_storage_failure(self, mocker):
        """A write failure exits with status 1."""
        writer = mocker.Mock()
        writer.write.side_effect = StorageError("disk full")
        config = CommandConfig(subcommand="gamma", options={"k": 2, "exact": False})
        assert run(config, writer=writer) == 1
