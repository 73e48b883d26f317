"""Dirichlet Poisson solves and the discrete load-regularity surrogate.

The first stage of the splitting repeatedly solves ``-Δ_h w = rhs`` with
homogeneous Dirichlet data. Conjugate gradients is hand-rolled so that the
iteration order and summation order are fixed — identical inputs produce
bit-identical solutions, which the reporting layer relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import GridError, LinearSolveError
from .grid import Grid, apply_laplacian, conformal_field

__all__ = ["LinearSolveReport", "solve_poisson", "estimate_gamma", "grad_inf"]


@dataclass(frozen=True)
class LinearSolveReport:
    iterations: int
    residual_l2: float  # relative to |rhs|_2
    tolerance: float


def _cg(apply_op, rhs: np.ndarray, tol: float, max_iter: int):
    """Plain conjugate gradients with a true-residual confirmation.

    Deterministic: no preconditioner, fixed evaluation order. Raises
    :class:`LinearSolveError` if the relative residual has not reached
    ``tol`` after ``max_iter`` iterations.
    """
    x = np.zeros_like(rhs)
    residual = rhs.copy()
    rhs_norm = float(np.linalg.norm(rhs))
    if rhs_norm == 0.0:
        return x, 0, 0.0
    target = tol * rhs_norm
    direction = residual.copy()
    rs = float(residual @ residual)
    for iteration in range(1, max_iter + 1):
        a_dir = apply_op(direction)
        curvature = float(direction @ a_dir)
        if curvature <= 0.0 or not math.isfinite(curvature):
            raise LinearSolveError("operator lost positive definiteness")
        alpha = rs / curvature
        x += alpha * direction
        residual -= alpha * a_dir
        rs_new = float(residual @ residual)
        if math.sqrt(rs_new) <= target:
            true_residual = rhs - apply_op(x)
            true_norm = float(np.linalg.norm(true_residual))
            if true_norm <= target:
                return x, iteration, true_norm / rhs_norm
            # recursion drifted: restart from the true residual
            residual = true_residual
            rs = true_norm * true_norm
            direction = residual.copy()
            continue
        beta = rs_new / rs
        direction = residual + beta * direction
        rs = rs_new
    raise LinearSolveError(
        f"conjugate gradients stalled after {max_iter} iterations "
        f"(relative residual {math.sqrt(rs) / rhs_norm:.3e} > {tol:.3e})"
    )


def solve_poisson(grid: Grid, rhs, tol: float = 1e-12):
    """Solve ``-Δ_h w = rhs`` with zero boundary values.

    Returns ``(w, LinearSolveReport)``. The system is symmetric positive
    definite, so conjugate gradients converges; the iteration cap is
    ``10 · interior_count``.
    """
    if not tol > 0.0:
        raise GridError(f"tolerance must be positive, got {tol}")
    rhs = conformal_field(grid, rhs, name="rhs")
    if not np.all(np.isfinite(rhs)):
        raise GridError("rhs contains non-finite values")
    w, iterations, rel_residual = _cg(
        lambda u: apply_laplacian(grid, u), rhs, tol, 10 * grid.interior_count
    )
    return w, LinearSolveReport(
        iterations=iterations, residual_l2=rel_residual, tolerance=tol
    )


def grad_inf(grid: Grid, u) -> float:
    """Max magnitude of forward difference quotients, boundary cells included."""
    u = conformal_field(grid, u)
    if grid.dim == 1:
        (h,) = grid.h
        return float(np.max(np.abs(np.diff(u, prepend=0.0, append=0.0)))) / h
    U = u.reshape(grid.shape)
    worst = 0.0
    for axis, h in enumerate(grid.h):
        d = np.diff(U, axis=axis, prepend=0.0, append=0.0)
        worst = max(worst, float(np.max(np.abs(d))) / h)
    return worst


@lru_cache(maxsize=64)
def estimate_gamma(grid: Grid, tol: float = 1e-12) -> float:
    """Discrete surrogate for the constant bounding solution size by load size.

    With φ the discrete torsion function (``-Δ_h φ = 1``):
    ``γ_h = max(|φ|∞, |∇_h φ|∞)``. By the discrete maximum principle
    |φ|∞ is exactly the ∞-operator norm of ``(-Δ_h)⁻¹``; the gradient
    term stands in for the first-derivative part of the continuum
    regularity constant. This is a surrogate: it enters audits only and
    is labelled as such in reports.
    """
    torsion, _ = solve_poisson(grid, np.ones(grid.interior_count), tol)
    return max(float(np.max(np.abs(torsion))), grad_inf(grid, torsion))
