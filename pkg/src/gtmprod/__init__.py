"""Generalized Thue-Morse sequences and sign-weighted infinite products.

The package builds strongly q-multiplicative +-1 sequences, decides
convergence of products prod R(n)^(delta_n) and prod R(n)^(theta_n) of
rational terms, evaluates convergent products to certified accuracy, and
batch-verifies a catalog of closed-form identities against Gamma-function
right-hand sides.
"""

from .catalog import (
    CatalogError,
    CatalogReport,
    IdentityRecord,
    RecordResult,
    load_catalog,
    parse_catalog_line,
    run_catalog,
)
from .dirichlet import (
    DirichletCache,
    EpsUnachievableError,
    dirichlet_direct,
    dirichlet_mp,
    dirichlet_value,
    power_moments,
    zeta_mp,
)
from .evaluator import (
    EvalResult,
    FunctionalEquationReport,
    IdentityReport,
    PositivityError,
    ProductCheck,
    ProductRejectedError,
    ProductSpec,
    build_gamma_ratio_term,
    build_scaling_term,
    check_product,
    evaluate_direct,
    evaluate_product,
    plain_product_log_closed,
    telescoping_limit,
    telescoping_partial_closed,
    verify_functional_equation,
    verify_identity,
)
from .expr import eval_expr, eval_expr_text, format_expr, parse_expr
from .gammafn import (
    GammaDomainError,
    check_gamma_identity,
    gamma,
    gamma_product_closed_form,
    log_gamma,
    log_gamma_product,
)
from .ratfun import (
    EvaluationError,
    Factor,
    FactorList,
    GaussRational,
    ParseError,
    Poly,
    Rational,
    RationalFunction,
    convergence_check,
    evaluate_at,
    evaluate_factorlist,
    evaluate_rational,
    evaluate_real,
    factor_list,
    format_product_term,
    integer_zeros_poles,
    log_expansion,
    parse_product_term,
    to_rational_function,
)
from .sequences import (
    MultiplicativeSequence,
    SequenceError,
    SignPattern,
    asymptotic_exponent,
    delta_prefix,
    delta_slice,
    digit_stats,
    extremal_partial_sums,
    geometric_bound,
    k0_threshold,
    make_sequence,
    morphism_prefix,
    parse_seq_spec,
    partial_sum,
    partial_sums_upto,
    sign_at,
    theta_at,
)

__version__ = "0.1.0"
