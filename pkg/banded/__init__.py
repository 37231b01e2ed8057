"""Seven-diagonal Toeplitz and near-Toeplitz matrix engine.

Modules:
    gamma: Exact gamma/alpha sequences, moment sums and stable ratios
    matrices: SystemSpec, banded storage and the A = B C + sigma U V^T factors
    inverse: Explicit entries of C^-1, B^-1, D^-1 and A^-1
    bounds: Exact inverse norms and closed-form bounds
    solver: O(n) linear solver through the rank-two decomposition
    beam: Fixed-point iteration for the clamped beam
    utils: Index checks, error measures and exact residual helpers

Example:
    >>> from banded import SystemSpec, Variant, a_inv_entry, bound_value
    >>> spec = SystemSpec(16, Variant.NEAR)
    >>> a_inv_entry(spec, 1, 1) > 0
    True
"""

from .beam import (
    BeamProblem,
    ContractionEstimate,
    FixedPointTrace,
    Forcing,
    beam_fixed_point,
    contraction_predictor,
    grid,
    nonlinear_residual,
    parse_forcing,
)
from .bounds import (
    BoundBreakdown,
    SweepRow,
    bound_breakdown,
    bound_value,
    exact_inverse_norm,
    norm_sweep,
    norm_sweep_row,
)
from .gamma import GammaTable, gamma_ratio, shared_table
from .inverse import (
    InverseTables,
    SchurMatrix,
    a_inv_entry,
    assemble_inverse,
    b_inv_entry,
    c_inv_entry,
    d_inv_entry,
    schur_m,
)
from .matrices import (
    BandedMatrix,
    RankTwoFactors,
    SystemSpec,
    Variant,
    build_a,
    build_b,
    build_c,
    multiply,
    rank_two_factors,
)
from .solver import BandedFactorization, LinearSolver, get_solver, solve

__all__ = [
    # Sequences
    "GammaTable",
    "gamma_ratio",
    "shared_table",
    # Matrices
    "SystemSpec",
    "Variant",
    "BandedMatrix",
    "RankTwoFactors",
    "build_a",
    "build_b",
    "build_c",
    "multiply",
    "rank_two_factors",
    # Explicit inverses
    "InverseTables",
    "SchurMatrix",
    "a_inv_entry",
    "assemble_inverse",
    "b_inv_entry",
    "c_inv_entry",
    "d_inv_entry",
    "schur_m",
    # Bounds
    "BoundBreakdown",
    "SweepRow",
    "bound_breakdown",
    "bound_value",
    "exact_inverse_norm",
    "norm_sweep",
    "norm_sweep_row",
    # Solvers
    "BandedFactorization",
    "LinearSolver",
    "get_solver",
    "solve",
    "BeamProblem",
    "ContractionEstimate",
    "FixedPointTrace",
    "Forcing",
    "beam_fixed_point",
    "contraction_predictor",
    "grid",
    "nonlinear_residual",
    "parse_forcing",
]
