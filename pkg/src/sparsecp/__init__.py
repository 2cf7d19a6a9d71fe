"""Numerical laboratory for the two-point correlation of characteristic
polynomials of sparse non-Hermitian random matrices: saddle-point phase
diagram, limit laws, a symbolic Berezin-integration engine and Monte
Carlo cross-checks.
"""

from .errors import DomainError, NumericalError, SparseCPError
from .limits import (
    Displacement,
    LimitParams,
    beta_solve,
    gamma_coeff,
    ginibre_kernel,
    ginibre_limit_ratio,
    limit_params,
    limit_ratio,
)
from .mc import MCEstimate, RatioEstimate, estimate_f2, estimate_ratio, sample_matrix
from .oracle import OracleConfig, OracleEstimate, f2_oracle, hciz_check
from .phase import (
    Region,
    classify_by_argmax,
    classify_by_curves,
    curve_gamma1,
    curve_gamma2,
    curve_gamma3,
    export_grid,
    z_minus,
)
from .saddle import (
    PhasePoint,
    SaddleSet,
    StarSaddle,
    VSaddle,
    ZeroSaddle,
    brute_force_max_f0,
    f0,
    saddle_values,
    solve_alpha_roots,
    star_saddle,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError", "NumericalError", "SparseCPError",
    "PhasePoint", "StarSaddle", "VSaddle", "ZeroSaddle", "SaddleSet",
    "f0", "solve_alpha_roots", "star_saddle", "saddle_values",
    "brute_force_max_f0",
    "Region", "classify_by_argmax", "classify_by_curves",
    "curve_gamma1", "curve_gamma2", "curve_gamma3", "z_minus", "export_grid",
    "Displacement", "LimitParams", "ginibre_kernel", "beta_solve",
    "gamma_coeff", "limit_params", "limit_ratio", "ginibre_limit_ratio",
    "OracleConfig", "OracleEstimate", "f2_oracle", "hciz_check",
    "MCEstimate", "RatioEstimate", "sample_matrix", "estimate_f2",
    "estimate_ratio",
    "__version__",
]
