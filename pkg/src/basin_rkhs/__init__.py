"""Polynomial basins of attraction, their infinite-product kernels, and the
fibre conditions behind the operator-word basis construction."""

__version__ = "0.1.0"

from .dagger import (
    ConditionWitness,
    DaggerReport,
    check_ddagger_coeffs,
    check_point_condition,
    classify,
    ddagger_family_sample,
    ddagger_product_check,
    real_solution_probe,
    scan_basin,
)
from .dynamics import (
    BasinRaster,
    FixedPointReport,
    PointClass,
    Verdict,
    analyze_fixed_point,
    classify_point,
    render_basin,
    sample_basin,
)
from .kernel import (
    GramMatrix,
    KernelEngine,
    empirical_inner_product,
    functional_equation_check,
    gram_matrix,
    kernel_eval,
)
from .onb import BasisFunction, Word, apply_operator, build_basis, cuntz_isometry_check, orthonormality_check
from .parsing import PolynomialSyntaxError, parse_polynomial
from .polynomial import ESCAPED, Polynomial, compose, derivative, evaluate, iterate_eval, multiply
from .roots import RootSet, find_roots
from .symmetric import SymmetricStats, symmetric_stats, vieta_from_coeffs
