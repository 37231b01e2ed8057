"""Verification battery comparing the structured formulas with dense references.

full_suite() runs, for every (variant, n):

    decomposition        A - (B C + sigma U V^T) == 0 in integers
    inverse_equivalence  explicit A^-1 vs dense LU inverse, entrywise
    residual             ||A X - I||_inf of the dense inverse
    positivity           leading minors and all inverse entries positive
    schur                closed-form M vs I + sigma V^T D^-1 U, m11 > m12 > 0
    solve                O(n) solve vs dense solve
    bound_dominance      every closed-form bound above its exact value
    norm_equality        ||A^-1||_1 == ||A^-1||_inf
    lemma_identities     C^-1, B^-1 entries, corner sums, pi2 and g cross-checks
    determinant_lemma    log det A = log det M + log det B + log det C

plus one sequence-level report for the gamma/alpha identities and one for
the stencil constants.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np

from banded.bounds import (
    bound_breakdown,
    c_inverse_norm,
    c_inverse_row_sum,
    exact_inverse_norm,
    g_direct,
    g_value,
    pi2_closed,
    pi2_exact,
)
from banded.gamma import gamma_ratio, shared_table
from banded.inverse import (
    assemble_inverse,
    b_corner_sums,
    b_inv_entry,
    c_inv_entry,
    schur_m,
    schur_m_numeric,
)
from banded.matrices import (
    SystemSpec,
    Variant,
    build_a,
    build_c,
    decomposition_residual,
    to_dense,
)
from banded.solver import get_solver
from banded.utils import max_errors, relative_error
from config.constants import GUARDS, TOLERANCES
from config.exceptions import DimensionError, IdentityError
from config.logging_config import LogContext, get_logger, log_check_result
from verify.oracle import (
    VerificationReport,
    dense_invert,
    dense_solve,
    determinant_lemma_check,
    leading_minors,
    oracle_inverse,
    stencil_constants_check,
)

logger = get_logger(__name__)

# Exact sequence identities are checked up to this index
SEQUENCE_CHECK_MAX = 200
# gamma_ratio is compared with exact quotients for a <= b <= this index
RATIO_CHECK_MAX = 300
GAMMA_RATIO_REL = 1e-13
# Dense C^-1 entry checks run up to this n
LEMMA_C_MAX_N = 64
# Failure labels of sequence_report, in the order they are checked
SEQUENCE_CHECKS = (
    "recurrence",
    "alpha difference",
    "growth",
    "ratio bounds",
    "alpha relation",
    "ratio monotone",
    "ratio above limit",
    "moment",
    "derivative form",
    "cassini",
)

Mapper = Callable[[Callable, Iterable], Iterable]


def _report(
    spec: SystemSpec, check: str, abs_err: float, rel_err: float, passed: bool, **details
) -> VerificationReport:
    return VerificationReport(
        variant=spec.variant.value,
        n=spec.n,
        check=check,
        max_abs_error=float(abs_err),
        max_rel_error=float(rel_err),
        passed=bool(passed),
        details=details,
    )


# =============================================================================
# Per-case checks
# =============================================================================


@lru_cache(maxsize=4)
def _explicit_inverse(spec: SystemSpec) -> np.ndarray:
    return assemble_inverse(spec)


def check_decomposition(spec: SystemSpec) -> VerificationReport:
    residual = decomposition_residual(spec)
    return _report(spec, "decomposition", residual, 0.0, residual == 0)


def check_inverse_equivalence(spec: SystemSpec) -> VerificationReport:
    abs_err, rel_err = max_errors(_explicit_inverse(spec), oracle_inverse(spec).inverse)
    passed = rel_err <= TOLERANCES.ORACLE_REL
    return _report(spec, "inverse_equivalence", abs_err, rel_err, passed)


def check_residual(spec: SystemSpec) -> VerificationReport:
    residual = oracle_inverse(spec).residual
    tolerance = TOLERANCES.RESIDUAL_PER_N * spec.n
    return _report(spec, "residual", residual, 0.0, residual <= tolerance, tolerance=tolerance)


def check_positivity(spec: SystemSpec) -> VerificationReport:
    explicit = _explicit_inverse(spec)
    oracle = oracle_inverse(spec).inverse
    details = {
        "min_explicit_entry": float(explicit.min()),
        "min_oracle_entry": float(oracle.min()),
    }
    passed = bool(explicit.min() > 0 and oracle.min() > 0)
    if spec.n <= GUARDS.MINORS_MAX_N:
        minors = leading_minors(spec)
        details["minors_positive"] = all(m > 0 for m in minors)
        details["first_minor"] = minors[0]
        passed = passed and details["minors_positive"]
    return _report(spec, "positivity", 0.0, 0.0, passed, **details)


def check_schur(spec: SystemSpec) -> VerificationReport:
    closed = schur_m(spec)
    numeric = schur_m_numeric(spec, method="segment")
    abs_err, rel_err = max_errors(closed.as_array(), numeric.as_array())
    passed = (
        rel_err <= TOLERANCES.SCHUR_AGREEMENT_REL and closed.is_dominant and closed.det > 0
    )
    details = {"m11": closed.m11, "m12": closed.m12, "det": closed.det}
    if spec.variant is Variant.NEAR:
        details["total"] = closed.total
        passed = passed and closed.total >= 1.25
    return _report(spec, "schur", abs_err, rel_err, passed, **details)


def check_solve(spec: SystemSpec) -> VerificationReport:
    rng = np.random.default_rng(spec.n)
    rhs = rng.uniform(0.5, 1.5, spec.n)
    x = get_solver(spec).solve(rhs, refine=2)
    reference = dense_solve(to_dense(build_a(spec)), rhs)
    abs_err, rel_err = max_errors(x, reference)
    return _report(spec, "solve", abs_err, rel_err, rel_err <= TOLERANCES.SOLVE_REL)


def check_bound_dominance(spec: SystemSpec) -> VerificationReport:
    breakdown = bound_breakdown(spec)
    excess = max(0.0, breakdown.exact_norm - breakdown.bound)
    details = breakdown.to_dict()
    if spec.n >= TOLERANCES.RATIO_GUARD_MIN_N and breakdown.ratio > TOLERANCES.RATIO_GUARD:
        details["ratio_flagged"] = True
        logger.warning("Bound ratio %.3f above guard for %s", breakdown.ratio, spec.label)
    return _report(spec, "bound_dominance", excess, 0.0, breakdown.dominates, **details)


def check_norm_equality(spec: SystemSpec) -> VerificationReport:
    oracle = oracle_inverse(spec).inverse
    norm_1 = float(np.abs(oracle).sum(axis=0).max())
    norm_inf = float(np.abs(oracle).sum(axis=1).max())
    solved = exact_inverse_norm(spec, p=1)
    eq_rel = relative_error(norm_1, norm_inf)
    solve_rel = relative_error(solved, norm_inf)
    passed = eq_rel <= TOLERANCES.NORM_EQUALITY_REL and solve_rel <= TOLERANCES.ORACLE_REL
    return _report(
        spec,
        "norm_equality",
        abs(norm_1 - norm_inf),
        max(eq_rel, solve_rel),
        passed,
        norm_1=norm_1,
        norm_inf=norm_inf,
        solved=solved,
    )


def check_lemma_identities(spec: SystemSpec) -> VerificationReport:
    n = spec.n
    errors = {}

    b_dense = np.array(
        [[b_inv_entry(spec, i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]
    )
    b_oracle = dense_invert(to_dense(get_solver(spec).factorization.b_matrix)).inverse
    errors["b_inverse"] = max_errors(b_dense, b_oracle)[1]

    if n <= LEMMA_C_MAX_N:
        c_dense = np.array(
            [[c_inv_entry(n, i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]
        )
        c_oracle = dense_invert(to_dense(build_c(n))).inverse
        errors["c_inverse"] = max_errors(c_dense, c_oracle)[1]
    c_norm = c_inverse_norm(n)

    errors["pi2"] = relative_error(pi2_closed(spec), pi2_exact(spec))
    errors["g"] = max(
        relative_error(g_value(spec, i), g_direct(spec, i)) for i in range(1, n + 1)
    )

    corner_ok = True
    if spec.variant is Variant.NEAR:
        worst = 0.0
        for k in range(1, n + 1):
            s1, s2 = b_corner_sums(spec, k)
            corner_ok = corner_ok and 4 * s1 - s2 == 1
            direct1 = b_inv_entry(spec, k, 1) + b_inv_entry(spec, n + 1 - k, 1)
            direct2 = b_inv_entry(spec, k, 2) + b_inv_entry(spec, n + 1 - k, 2)
            worst = max(
                worst,
                relative_error(direct1, float(s1)),
                relative_error(direct2, float(s2)),
            )
        errors["corner_sums"] = worst
        errors["g_row_sum"] = max(
            relative_error(g_value(spec, i), c_inverse_row_sum(n, i)) for i in range(1, n + 1)
        )

    tolerances = {
        "b_inverse": TOLERANCES.ORACLE_REL,
        "c_inverse": TOLERANCES.LEMMA_C_REL,
        "pi2": TOLERANCES.PI2_REL,
        "g": TOLERANCES.SCHUR_AGREEMENT_REL,
        "g_row_sum": TOLERANCES.SCHUR_AGREEMENT_REL,
        "corner_sums": TOLERANCES.SCHUR_AGREEMENT_REL,
    }
    passed = (
        all(errors[key] <= tolerances[key] for key in errors)
        and c_norm <= 1.0 / 6.0
        and corner_ok
    )
    return _report(
        spec,
        "lemma_identities",
        0.0,
        max(errors.values()),
        passed,
        errors=errors,
        c_inverse_norm=c_norm,
        corner_sums=corner_ok,
    )


CASE_CHECKS = (
    check_decomposition,
    check_inverse_equivalence,
    check_residual,
    check_positivity,
    check_schur,
    check_solve,
    check_bound_dominance,
    check_norm_equality,
    check_lemma_identities,
    determinant_lemma_check,
)


def case_reports(spec: SystemSpec) -> List[VerificationReport]:
    """Run every per-case check for one SystemSpec."""
    reports = []
    with LogContext(logger, f"Verification {spec.label}"):
        for check in CASE_CHECKS:
            report = check(spec)
            log_check_result(logger, spec.label, report.check, report.passed, report.max_rel_error)
            reports.append(report)
    return reports


# =============================================================================
# Sequence-level checks
# =============================================================================


def sequence_report(max_index: int = SEQUENCE_CHECK_MAX) -> VerificationReport:
    """Recurrences, alpha relations, moment sums, Cassini and growth identities, exactly."""
    table = shared_table(max(max_index + 2, RATIO_CHECK_MAX))
    g, a = table.gammas, table.alphas
    failures: List[str] = []

    for k in range(2, max_index + 1):
        if g[k] + g[k - 2] != 8 * g[k - 1]:
            failures.append(f"recurrence k={k}")
        if a[k] - a[k - 2] != 30 * g[k - 1]:
            failures.append(f"alpha difference k={k}")
        if g[k] <= k * k + 1:
            failures.append(f"growth k={k}")
    for k in range(1, max_index + 1):
        if not 4 * g[k] <= g[k + 1] <= 8 * g[k]:
            failures.append(f"ratio bounds k={k}")
        if a[k] != 4 * g[k] - g[k - 1] or g[k] != a[k - 1] + 4 * g[k - 1]:
            failures.append(f"alpha relation k={k}")
        # gamma_{k+1}^2 - gamma_k gamma_{k+2} = 1: gamma_{k+1} / gamma_k strictly decreases
        if g[k + 1] * g[k + 1] - g[k] * g[k + 2] != 1:
            failures.append(f"ratio monotone k={k}")
        # gamma_{k+1} / gamma_k = 4 + alpha_k / gamma_k and alpha_k^2 = 15 gamma_k^2 + 1
        if g[k + 1] - 4 * g[k] != a[k] or a[k] * a[k] - 15 * g[k] * g[k] != 1:
            failures.append(f"ratio above limit k={k}")

    for p in range(1, max_index + 1):
        for m in range(4):
            try:
                table.gamma_moment_sum(p, m)
            except IdentityError:
                failures.append(f"moment p={p} m={m}")
        derivative = (
            p * g[p + 2] - (3 * p + 1) * g[p + 1] + (3 * p + 2) * g[p] - (p + 1) * g[p - 1]
        )
        if derivative != 36 * table.prefix(p, 1):
            failures.append(f"derivative form p={p}")

    for x in range(1, max_index // 2 + 1):
        for y in range(1, max_index // 2 + 1):
            if g[x] * g[y + 1] - g[x - 1] * g[y] != g[x + y]:
                failures.append(f"cassini a={x} b={y}")

    worst = 0.0
    for b in range(1, RATIO_CHECK_MAX + 1):
        for x in range(0, b + 1):
            worst = max(worst, relative_error(gamma_ratio(x, b), table.ratio(x, b)))

    return VerificationReport(
        variant="sequence",
        n=None,
        check="sequence_identities",
        max_abs_error=float(len(failures)),
        max_rel_error=worst,
        passed=not failures and worst <= GAMMA_RATIO_REL,
        details={
            "failures": failures[:20],
            "max_index": max_index,
            "checks": list(SEQUENCE_CHECKS),
        },
    )


# =============================================================================
# Suite
# =============================================================================


def _validate(n_list: Sequence[int], variants: Sequence[Variant]) -> List[SystemSpec]:
    specs = []
    for variant in variants:
        for n in sorted(set(n_list)):
            spec = SystemSpec(n, Variant.parse(variant))
            if n > GUARDS.ORACLE_MAX_N:
                raise DimensionError(
                    "n exceeds the dense oracle guard", {"n": n, "max": GUARDS.ORACLE_MAX_N}
                )
            specs.append(spec)
    return specs


def full_suite(
    n_list: Sequence[int],
    variants: Sequence[Variant] = (Variant.TOEPLITZ, Variant.NEAR),
    mapper: Optional[Mapper] = None,
) -> List[VerificationReport]:
    """Run the whole battery.

    Args:
        n_list: Dimensions to verify; an empty list yields no reports.
        variants: Variants to verify.
        mapper: map-like callable used to run cases, e.g. an ordered thread
            pool; defaults to the builtin map.

    Returns:
        Sequence and stencil reports followed by the per-case reports in
        (variant, n) order.

    Raises:
        DimensionError: If any n is below 7 or above the oracle guard.
    """
    specs = _validate(n_list, variants)
    if not specs:
        return []

    mapper = mapper or map
    reports = [sequence_report(), stencil_constants_check()]
    with LogContext(logger, f"Verification suite ({len(specs)} cases)"):
        for case in mapper(case_reports, specs):
            reports.extend(case)
    failed = [r for r in reports if not r.passed]
    if failed:
        logger.warning(
            "%d of %d checks failed: %s",
            len(failed),
            len(reports),
            ", ".join(f"{r.case}:{r.check}" for r in failed[:10]),
        )
    return reports


def suite_passed(reports: Iterable[VerificationReport]) -> bool:
    """True when every report passed."""
    return all(r.passed for r in reports)
