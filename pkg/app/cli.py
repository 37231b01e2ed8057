"""Command-line interface for heptainv.

Subcommands:
    gamma       gamma_k (and alpha_k) of the sequence
    matrix      A as dense CSV or banded JSON
    inverse     one explicit inverse entry or the dense inverse
    bound       exact ||A^-1||_inf next to its closed-form bound
    norm-sweep  (n, exact_norm, bound) table over a range of n
    solve       O(n) solve of A x = rhs
    beam        fixed-point iteration for the clamped beam
    verify      dense-oracle verification battery

Exit status: 0 on success, 1 on verification failure or runtime error,
2 on usage errors.

Usage:
    heptainv norm-sweep --variant toeplitz --n-list 7:512:5
    heptainv verify --variant both --n-list 7,8,16 --emit report.json
"""

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from app.sweep import resolve_workers, run_ordered
from banded.beam import BeamProblem, beam_fixed_point, nonlinear_residual, parse_forcing
from banded.bounds import bound_breakdown, bound_value, exact_inverse_norm, norm_sweep_row
from banded.gamma import shared_table
from banded.inverse import (
    METHODS,
    a_inv_entry,
    assemble_inverse,
    b_inv_entry,
    c_inv_entry,
    d_inv_entry,
)
from banded.matrices import SystemSpec, Variant, build_a, to_banded_json, to_dense
from banded.solver import DEFAULT_REFINE, get_solver
from config import BEAM, GUARDS, STORAGE, get_logger, setup_logging
from config.exceptions import (
    ConfigurationError,
    DimensionError,
    HeptaInvError,
    IndexRangeError,
    StorageError,
)
from config.logging_config import log_exception
from storage.artifacts import (
    ArtifactWriter,
    format_number,
    read_vector_csv,
    render_csv,
    render_json,
    render_matrix_csv,
)
from verify.suite import full_suite, suite_passed

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

SUBCOMMANDS = ("gamma", "matrix", "inverse", "bound", "norm-sweep", "solve", "beam", "verify")

# Errors caused by the invocation rather than by the computation
_USAGE_ERRORS = (ConfigurationError, DimensionError, IndexRangeError)


@dataclass
class CommandConfig:
    """One parsed invocation."""

    subcommand: str
    variants: Tuple[Variant, ...] = (Variant.TOEPLITZ,)
    n: Optional[int] = None
    n_list: Tuple[int, ...] = ()
    emit: Optional[str] = None
    output: Optional[str] = None
    options: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigurationError(
                f"Unknown subcommand '{self.subcommand}'", {"allowed": list(SUBCOMMANDS)}
            )

    @property
    def variant(self) -> Variant:
        return self.variants[0]

    @property
    def spec(self) -> SystemSpec:
        if self.n is None:
            raise ConfigurationError(f"--n is required for {self.subcommand}")
        return SystemSpec(self.n, self.variant)


# =============================================================================
# Argument types
# =============================================================================


def parse_n_list(text: str) -> Tuple[int, ...]:
    """Comma list of integers and inclusive start:stop[:step] ranges, sorted and unique."""
    values = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            fields = [int(f) for f in part.split(":")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid n-list item '{part}'") from None
        if len(fields) == 1:
            values.add(fields[0])
            continue
        if len(fields) > 3:
            raise argparse.ArgumentTypeError(f"invalid range '{part}'")
        start, stop = fields[0], fields[1]
        step = fields[2] if len(fields) == 3 else 1
        if step < 1 or start > stop:
            raise argparse.ArgumentTypeError(f"invalid range '{part}'")
        values.update(range(start, stop + 1, step))
    if not values:
        raise argparse.ArgumentTypeError("empty n-list")
    return tuple(sorted(values))


def _variant(text: str) -> Tuple[Variant, ...]:
    if text.strip().lower() == "both":
        return (Variant.TOEPLITZ, Variant.NEAR)
    try:
        return (Variant.parse(text),)
    except ConfigurationError:
        raise argparse.ArgumentTypeError(
            f"invalid variant '{text}' (choose toeplitz, near or both)"
        ) from None


def _single_variant(text: str) -> Tuple[Variant, ...]:
    variants = _variant(text)
    if len(variants) != 1:
        raise argparse.ArgumentTypeError("choose toeplitz or near")
    return variants


def _entry(text: str) -> Tuple[int, int]:
    try:
        i, j = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid entry '{text}' (expected i,j)") from None
    return i, j


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number '{text}'") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive: '{text}'")
    return value


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer '{text}'") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: '{text}'")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heptainv",
        description="Explicit inverses, norm bounds and O(n) solvers for "
        "seven-diagonal Toeplitz and near-Toeplitz matrices.",
    )
    parser.add_argument("--debug", action="store_true", help="verbose logging on stderr")
    parser.add_argument(
        "--log-file", action="store_true", help=f"also log to ~/{STORAGE.DATA_DIR_NAME}/"
    )
    parser.add_argument("--output", "-o", default=None, help="output path (default: stdout)")

    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="COMMAND")

    p = sub.add_parser("gamma", help="gamma_k of the sequence")
    p.add_argument("--k", type=_non_negative_int, required=True)
    p.add_argument("--exact", action="store_true", help="exact integer output")
    p.add_argument("--emit", choices=("text", "json"), default="text")

    p = sub.add_parser("matrix", help="build A")
    p.add_argument("--variant", type=_single_variant, default=(Variant.TOEPLITZ,))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--emit", choices=("dense-csv", "banded-json"), default="banded-json")

    p = sub.add_parser("inverse", help="explicit inverse entries")
    p.add_argument("--variant", type=_single_variant, default=(Variant.TOEPLITZ,))
    p.add_argument("--n", type=int, required=True)
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--entry", type=_entry, help="1-based i,j")
    target.add_argument("--emit", choices=("dense-csv",))
    p.add_argument("--of", choices=("a", "b", "c", "d"), default="a", help="which inverse")
    p.add_argument("--method", choices=METHODS, default="auto")

    p = sub.add_parser("bound", help="norm bound for one n")
    p.add_argument("--variant", type=_single_variant, default=(Variant.TOEPLITZ,))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--breakdown", action="store_true", help="every term of the bound")
    p.add_argument("--emit", choices=("csv", "json"), default=None)

    p = sub.add_parser("norm-sweep", help="(n, exact_norm, bound) table")
    p.add_argument("--variant", type=_single_variant, default=(Variant.TOEPLITZ,))
    p.add_argument("--n-list", type=parse_n_list, required=True)
    p.add_argument("--emit", choices=("csv", "json"), default="csv")

    p = sub.add_parser("solve", help="O(n) solve of A x = rhs")
    p.add_argument("--variant", type=_single_variant, default=(Variant.TOEPLITZ,))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rhs", default="ones", help="ones, e1 or a CSV file")
    p.add_argument("--refine", type=_non_negative_int, default=DEFAULT_REFINE)
    p.add_argument("--emit", choices=("csv", "json"), default="csv")

    p = sub.add_parser("beam", help="clamped beam fixed point")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--forcing", default="sin-plus-x", help="zero, const:<c> or sin-plus-x")
    p.add_argument("--cei", type=_positive_float, default=BEAM.DEFAULT_C_EI)
    p.add_argument("--tol", type=_positive_float, default=BEAM.DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=BEAM.DEFAULT_MAX_ITER)
    p.add_argument("--emit", default=None, metavar="PATH", help="trace CSV path")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("verify", help="dense-oracle verification battery")
    p.add_argument("--variant", type=_variant, default=(Variant.TOEPLITZ, Variant.NEAR))
    p.add_argument("--n-list", type=parse_n_list, required=True)
    p.add_argument("--emit", default=None, metavar="PATH", help="report JSON path")

    return parser


def config_from_args(args: argparse.Namespace) -> CommandConfig:
    """CommandConfig from parsed arguments."""
    common = {"debug", "log_file", "output", "subcommand", "variant", "n", "n_list", "emit"}
    return CommandConfig(
        subcommand=args.subcommand,
        variants=getattr(args, "variant", None) or (Variant.NEAR,),
        n=getattr(args, "n", None),
        n_list=getattr(args, "n_list", None) or (),
        emit=getattr(args, "emit", None),
        output=args.output,
        options={k: v for k, v in vars(args).items() if k not in common},
    )


# =============================================================================
# Commands
# =============================================================================


def _gamma(config: CommandConfig) -> Tuple[str, int]:
    k = config.options["k"]
    table = shared_table(k + 1)
    gamma, alpha = table.gamma(k), table.alpha(k)
    if not config.options["exact"]:
        gamma, alpha = _as_float(gamma), _as_float(alpha)
    if config.emit == "json":
        return render_json({"k": k, "gamma": gamma, "alpha": alpha}), EXIT_OK
    return format_number(gamma) + "\n", EXIT_OK


def _as_float(value: int) -> float:
    try:
        return float(value)
    except OverflowError:
        return float("inf")


def _matrix(config: CommandConfig) -> Tuple[str, int]:
    spec = config.spec
    matrix = build_a(spec)
    if config.emit == "dense-csv":
        _dense_guard(spec.n)
        return render_matrix_csv(to_dense(matrix, dtype=np.int64)), EXIT_OK
    return render_json(to_banded_json(matrix)), EXIT_OK


def _dense_guard(n: int) -> None:
    if n > GUARDS.DENSE_OUTPUT_MAX_N:
        raise DimensionError(
            "Dense output exceeds the guard", {"n": n, "max": GUARDS.DENSE_OUTPUT_MAX_N}
        )


_ENTRY_FUNCTIONS = {
    "a": lambda spec, i, j, method: a_inv_entry(spec, i, j, method),
    "b": lambda spec, i, j, method: b_inv_entry(spec, i, j),
    "c": lambda spec, i, j, method: c_inv_entry(spec.n, i, j),
    "d": lambda spec, i, j, method: d_inv_entry(spec, i, j, method),
}


def _inverse(config: CommandConfig) -> Tuple[str, int]:
    spec = config.spec
    which, method = config.options["of"], config.options["method"]
    entry = config.options.get("entry")
    if entry is not None:
        i, j = entry
        return format_number(_ENTRY_FUNCTIONS[which](spec, i, j, method)) + "\n", EXIT_OK

    _dense_guard(spec.n)
    if which == "a":
        dense = assemble_inverse(spec, method)
    else:
        fn = _ENTRY_FUNCTIONS[which]
        rows = range(1, spec.n + 1)
        dense = np.array([[fn(spec, i, j, method) for j in rows] for i in rows])
    return render_matrix_csv(dense), EXIT_OK


def _bound(config: CommandConfig) -> Tuple[str, int]:
    spec = config.spec
    if config.options["breakdown"]:
        breakdown = bound_breakdown(spec)
        if config.emit == "csv":
            payload = breakdown.to_dict()
            keys = sorted(payload)
            return render_csv(keys, [[payload[k] for k in keys]]), EXIT_OK
        return render_json(breakdown.to_dict()), EXIT_OK

    row = [spec.n, exact_inverse_norm(spec), bound_value(spec)]
    if config.emit == "json":
        return render_json(dict(zip(("n", "exact_norm", "bound"), row))), EXIT_OK
    return render_csv(["n", "exact_norm", "bound"], [row]), EXIT_OK


def _norm_sweep(config: CommandConfig) -> Tuple[str, int]:
    variant = config.variant
    rows = run_ordered(
        lambda n: norm_sweep_row(variant, n),
        config.n_list,
        workers=resolve_workers(len(config.n_list)),
    )
    if config.emit == "json":
        payload = [{"n": r.n, "exact_norm": r.exact_norm, "bound": r.bound} for r in rows]
        return render_json(payload), EXIT_OK
    return render_csv(["n", "exact_norm", "bound"], [r.as_row() for r in rows]), EXIT_OK


def _rhs(spec: SystemSpec, source: str) -> np.ndarray:
    key = source.strip().lower()
    if key == "ones":
        return np.ones(spec.n)
    if key == "e1":
        rhs = np.zeros(spec.n)
        rhs[0] = 1.0
        return rhs
    path = Path(source)
    if not path.exists():
        raise ConfigurationError(f"--rhs must be ones, e1 or an existing file: '{source}'")
    return read_vector_csv(path)


def _solve(config: CommandConfig) -> Tuple[str, int]:
    spec = config.spec
    rhs = _rhs(spec, config.options["rhs"])
    solver = get_solver(spec)
    x = solver.solve(rhs, refine=config.options["refine"])
    residual = solver.residual(x, rhs)
    logger.info(f"Solved {spec.label}, residual {residual:.3e}")
    if config.emit == "json":
        return render_json({"n": spec.n, "residual": residual, "x": x}), EXIT_OK
    return render_csv(["i", "x"], [[i, v] for i, v in enumerate(x, start=1)]), EXIT_OK


def _beam(config: CommandConfig) -> Tuple[str, int]:
    opts = config.options
    problem = BeamProblem.clamped(config.n, parse_forcing(opts["forcing"]), c_ei=opts["cei"])
    trace = beam_fixed_point(problem, tol=opts["tol"], max_iter=opts["max_iter"])
    residuals = trace.residuals

    if opts["format"] == "json":
        text = render_json(
            {
                "n": config.n,
                "converged": trace.converged,
                "iterations": trace.iterations,
                "solves": trace.solves,
                "residuals": residuals,
                "predicted_rate": trace.predicted_rate,
                "exact_rate": trace.exact_rate,
                "nonlinear_residual": nonlinear_residual(problem, trace.final),
                "x": problem.grid,
                "u": trace.final,
            }
        )
    else:
        rows = []
        for k, r in enumerate(residuals, start=1):
            previous = residuals[k - 2] if k > 1 else 0.0
            rows.append([k, r, r / previous if previous > 0 else ""])
        text = render_csv(["iteration", "residual", "observed_rate"], rows)
    return text, EXIT_OK if trace.converged else EXIT_FAILURE


def _verify(config: CommandConfig) -> Tuple[str, int]:
    specs_count = len(config.n_list) * len(config.variants)
    workers = resolve_workers(specs_count)
    reports = full_suite(
        config.n_list,
        config.variants,
        mapper=lambda fn, items: run_ordered(fn, items, workers=workers),
    )
    text = render_json([r.to_dict() for r in reports])
    return text, EXIT_OK if suite_passed(reports) else EXIT_FAILURE


_COMMANDS = {
    "gamma": _gamma,
    "matrix": _matrix,
    "inverse": _inverse,
    "bound": _bound,
    "norm-sweep": _norm_sweep,
    "solve": _solve,
    "beam": _beam,
    "verify": _verify,
}


def _target(config: CommandConfig) -> Optional[str]:
    if config.subcommand in ("beam", "verify") and config.emit:
        return config.emit
    return config.output


def run(config: CommandConfig, writer: Optional[ArtifactWriter] = None) -> int:
    """Execute one command and emit its artifact.

    Returns:
        0 on success, 1 on verification failure or runtime error, 2 on
        usage errors.
    """
    writer = writer or ArtifactWriter()
    try:
        text, status = _COMMANDS[config.subcommand](config)
        writer.write(text, _target(config))
    except _USAGE_ERRORS as e:
        logger.debug(f"Usage error: {e}")
        print(f"heptainv {config.subcommand}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except StorageError as e:
        log_exception(logger, "Could not write artifact", e)
        print(f"heptainv: error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except HeptaInvError as e:
        log_exception(logger, f"{config.subcommand} failed", e)
        print(f"heptainv {config.subcommand}: error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, configure logging and run."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    setup_logging(debug=args.debug, log_to_file=args.log_file)
    try:
        config = config_from_args(args)
    except ConfigurationError as e:
        print(f"heptainv: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return run(config)
