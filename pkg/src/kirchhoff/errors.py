"""Exception hierarchy shared across the package."""

from __future__ import annotations


class KirchhoffError(Exception):
    """Base class for all errors raised by this package."""


class GridError(KirchhoffError):
    """Invalid domain or grid construction request."""


class ExprError(KirchhoffError):
    """Base class for expression-language errors."""


class ExprSyntaxError(ExprError):
    """Malformed expression source; carries the byte offset of the fault."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (offset {position})")
        self.position = position


class ExprEvalError(ExprError):
    """Evaluation produced NaN/Inf or referenced an unbound variable."""


class QuadratureError(KirchhoffError):
    """Quadrature failed to reach tolerance (pathological coefficient)."""


class InverseBracketError(KirchhoffError):
    """Could not bracket the inverse of the coefficient primitive.

    The primitive of a coefficient bounded below by m_floor > 0 grows at
    least linearly, so a failure here signals a positivity violation.
    """


class LinearSolveError(KirchhoffError):
    """Conjugate gradients or eigenvalue iteration failed to converge."""


class SemilinearError(KirchhoffError):
    """Newton iteration for the semilinear stage failed to converge."""


class PostconditionError(KirchhoffError):
    """A guaranteed bound (box bound, a-priori estimate) was violated."""


class PicardError(KirchhoffError):
    """Outer Picard iteration did not converge; carries the trace so far."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class BracketError(KirchhoffError):
    """The scalar fixed-point map has no sign change on [0, R]."""


class FixedPointError(KirchhoffError):
    """Fixed-point bisection could not reach the requested gap."""


class OracleError(KirchhoffError):
    """Dense-oracle Newton failed or its random starts disagree."""


class ConfigError(KirchhoffError):
    """Invalid run configuration; message names the offending key."""


class AuditError(KirchhoffError):
    """Solvability-condition audit failed and no override was given."""
