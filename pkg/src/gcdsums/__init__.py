"""Numerical laboratory for GCD sums, their spectral norms, and extremal sets."""

from .arith import (
    AlphaParam,
    FactoredNat,
    SpfTable,
    divisor_count,
    divisors,
    euler_phi,
    f_fn,
    factorize,
    g_fn,
    h_fn,
    jordan_j,
    mobius,
    omega,
    primorial,
    spf_sieve,
    squarefree_smooth_enumerate,
    zeta_real,
)
from .closure import closure_transform, divideout_check, is_divisor_closed
from .errors import BudgetError, DomainError, ResourceError
from .extremal import ConstructionParams, build_construction, lower_bound_report
from .sets import IntegerSet
from .spectral import power_iteration, theorem2_scan
from .sums import (
    F_exact_check,
    SumReport,
    gamma_exhaustive,
    gamma_functional,
    gcd_sum_fast,
    gcd_sum_naive,
    gcd_sum_range,
    weighted_gcd_sum_2omega,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaParam",
    "BudgetError",
    "ConstructionParams",
    "DomainError",
    "F_exact_check",
    "FactoredNat",
    "IntegerSet",
    "ResourceError",
    "SpfTable",
    "SumReport",
    "build_construction",
    "closure_transform",
    "divideout_check",
    "divisor_count",
    "divisors",
    "euler_phi",
    "f_fn",
    "factorize",
    "g_fn",
    "gamma_exhaustive",
    "gamma_functional",
    "gcd_sum_fast",
    "gcd_sum_naive",
    "gcd_sum_range",
    "h_fn",
    "is_divisor_closed",
    "jordan_j",
    "lower_bound_report",
    "mobius",
    "omega",
    "power_iteration",
    "primorial",
    "spf_sieve",
    "squarefree_smooth_enumerate",
    "theorem2_scan",
    "weighted_gcd_sum_2omega",
    "zeta_real",
]
