"""Finite-difference solver for a fourth-order problem whose second-order
coefficient is nonlocal: it reads both the solution pointwise and the
solution's global Dirichlet energy.

The solver never touches the fourth-order operator directly. It splits the
problem into two second-order solves with zero boundary data, freezes the
energy argument r, solves the frozen problem (directly, or by alternating
iteration when the load couples to the state), and then finds the energy
fixed point r* = S(r*) by bracketing bisection — turning the construction
behind the existence proof into a computable procedure with per-step
verified bounds.
"""

__version__ = "0.1.0"

from .errors import (
    AuditError,
    BracketError,
    ConfigError,
    ExprError,
    ExprEvalError,
    ExprSyntaxError,
    FixedPointError,
    GridError,
    InverseBracketError,
    KirchhoffError,
    LinearSolveError,
    OracleError,
    PicardError,
    PostconditionError,
    QuadratureError,
    SemilinearError,
)
from .expr import (
    COEFFICIENT_VARS,
    SOURCE_VARS,
    Expr,
    evaluate,
    parse,
    to_string,
    variables,
)
from .grid import (
    Domain,
    Grid,
    Norms,
    apply_laplacian,
    build_grid,
    conformal_field,
    h10_inner,
    lambda1,
    laplacian_matrix,
    norms,
)
from .coefficient import (
    DEFAULT_AUDIT_BOX,
    CheckResult,
    Coefficient,
    PropertyReport,
    TruncatedM,
    big_M,
    big_M_inverse,
    check_coefficient_properties,
    find_thresholds,
    truncated_M_eval,
)
from .elliptic import LinearSolveReport, estimate_gamma, grad_inf, solve_poisson
from .semilinear import SemilinearReport, solve_semilinear
from .source import SourceKind, SourceSpec
from .hypotheses import HypothesisReport, audit
from .coupled import (
    IterationStep,
    IterationTrace,
    SolutionBundle,
    assemble_bundle,
    cached_audit,
    fourth_order_field_residual,
    solve_aux_fixed_f,
    solve_aux_picard,
    solve_auxiliary,
)
from .fixedpoint import (
    FixedPointResult,
    SampleDigest,
    SamplePoint,
    SCurve,
    THREADS_ENV_VAR,
    damped_iteration,
    eval_S,
    find_fixed_point,
    sweep_S,
    upper_bracket,
)
from .verify import (
    RefinementRow,
    ResidualReport,
    dense_oracle,
    extrapolate_h2,
    fourth_order_residual,
    refinement_study,
    weak_form_defect,
)
from .config import RunConfig, load_config, parse_config_text

__all__ = [
    "__version__",
    # errors
    "KirchhoffError", "GridError", "ExprError", "ExprSyntaxError",
    "ExprEvalError", "QuadratureError", "InverseBracketError",
    "LinearSolveError", "SemilinearError", "PostconditionError",
    "PicardError", "BracketError", "FixedPointError", "OracleError",
    "ConfigError", "AuditError",
    # expression language
    "Expr", "parse", "evaluate", "to_string", "variables",
    "COEFFICIENT_VARS", "SOURCE_VARS",
    # grids and norms
    "Domain", "Grid", "Norms", "build_grid", "apply_laplacian",
    "laplacian_matrix", "lambda1", "norms", "h10_inner", "conformal_field",
    # coefficient and primitives
    "Coefficient", "TruncatedM", "CheckResult", "PropertyReport",
    "DEFAULT_AUDIT_BOX", "big_M", "big_M_inverse", "find_thresholds",
    "truncated_M_eval", "check_coefficient_properties",
    # linear and semilinear solves
    "LinearSolveReport", "solve_poisson", "estimate_gamma", "grad_inf",
    "SemilinearReport", "solve_semilinear",
    # sources and hypotheses
    "SourceKind", "SourceSpec", "HypothesisReport", "audit",
    # coupled solves
    "IterationStep", "IterationTrace", "SolutionBundle",
    "solve_aux_fixed_f", "solve_aux_picard", "solve_auxiliary",
    "fourth_order_field_residual", "assemble_bundle", "cached_audit",
    # fixed point layer
    "SCurve", "SamplePoint", "SampleDigest", "FixedPointResult",
    "eval_S", "upper_bracket", "find_fixed_point", "damped_iteration",
    "sweep_S", "THREADS_ENV_VAR",
    # verification
    "ResidualReport", "RefinementRow", "fourth_order_residual",
    "weak_form_defect", "dense_oracle", "refinement_study",
    "extrapolate_h2",
    # configuration
    "RunConfig", "load_config", "parse_config_text",
]
