"""The semilinear stage: solve ``-Δ_h z + M_r(z) = w`` by convex minimization.

The equation is the Euler–Lagrange system of the strictly convex energy

    E(z) = ½·Σ|∇_h z|²·Πh + Σ Φ_trunc(z_i)·Πh − Σ w_i z_i·Πh,

where Φ_trunc is the antiderivative of the primitive M_r clamped at the
thresholds (tau1, tau2) where |M_r| reaches c = |w|∞. Clamping bounds the
nonlinearity without moving the minimizer: a comparison argument shows the
minimizer of the clamped energy lies inside [tau1, tau2] nodewise, where
the clamp is inactive — so it also solves the unclamped equation. The
box bound yields the a-priori estimates |M_r(z)|∞ ≤ |w|∞ and
|z|∞ ≤ |w|∞ / m_floor, both asserted as postconditions.

Solved by damped Newton with Armijo backtracking on E; the Newton matrix
``-Δ_h + diag(m(clip(z), r))`` is symmetric positive definite, solved by
the same deterministic conjugate gradients as the Poisson stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coefficient import Coefficient, TruncatedM, find_thresholds
from .elliptic import _cg
from .errors import GridError, PostconditionError, SemilinearError
from .grid import Grid, apply_laplacian, conformal_field, h10_inner

__all__ = ["SemilinearReport", "solve_semilinear"]

_ARMIJO_C1 = 1e-4
_MAX_BACKTRACKS = 60


@dataclass
class SemilinearReport:
    tau1: float
    tau2: float
    newton_iters: int
    final_residual_linf: float
    energy_trace: list[float] = field(default_factory=list)
    box_violation: float = 0.0


def solve_semilinear(grid: Grid, coef: Coefficient, r: float, w, *,
                     residual_tol: float = 1e-9, bound_slack: float = 1e-10,
                     max_iter: int = 200, cg_tol: float = 1e-12,
                     initial_guess=None):
    """Solve ``-Δ_h z + M_r(z) = w`` with zero boundary values.

    Returns ``(z, SemilinearReport)``. The residual ∞-norm of the
    *unclamped* equation is driven below ``residual_tol``; the threshold
    box bound and the a-priori estimates are asserted afterwards
    (violations beyond ``bound_slack`` / 1e-9 raise
    :class:`PostconditionError`, signalling an internal fault).
    """
    w = conformal_field(grid, w, name="w")
    if not np.all(np.isfinite(w)):
        raise GridError("w contains non-finite values")
    r = max(float(r), 0.0)
    clamp = float(np.max(np.abs(w))) if w.size else 0.0

    if clamp == 0.0:
        # strictly convex even energy: the unique minimizer is zero
        zero = np.zeros_like(w)
        return zero, SemilinearReport(
            tau1=0.0, tau2=0.0, newton_iters=0, final_residual_linf=0.0,
            energy_trace=[0.0], box_violation=0.0,
        )

    tau1, tau2 = find_thresholds(coef, r, clamp)
    trunc = TruncatedM(base=coef, r=r, tau1=tau1, tau2=tau2, clamp=clamp)
    weight = grid.cell_volume

    def energy(z: np.ndarray) -> float:
        quad = 0.5 * h10_inner(grid, z, z)
        well = float(np.sum(trunc.potential(z))) * weight
        load = float(w @ z) * weight
        return quad + well - load

    def gradient_field(z: np.ndarray) -> np.ndarray:
        return apply_laplacian(grid, z) + trunc.value(z) - w

    if initial_guess is None:
        z = np.zeros_like(w)
    else:
        z = np.clip(conformal_field(grid, initial_guess, name="initial_guess"),
                    tau1, tau2)

    energies = [energy(z)]
    grad = gradient_field(z)
    residual = float(np.max(np.abs(grad)))
    iterations = 0

    while residual > residual_tol:
        if iterations >= max_iter:
            raise SemilinearError(
                f"Newton did not reach residual {residual_tol:.1e} in "
                f"{max_iter} iterations (last residual {residual:.3e})"
            )
        # SPD modified-Newton matrix: -Δ_h + diag(m at the clipped state).
        # Outside the box the true clamped slope is 0; using m keeps the
        # matrix uniformly definite and the step a descent direction.
        diag = np.maximum(
            np.asarray(coef.m(np.clip(z, tau1, tau2), r), dtype=float),
            coef.m_floor,
        )
        step, _, _ = _cg(
            lambda u: apply_laplacian(grid, u) + diag * u,
            -grad,
            cg_tol,
            10 * grid.interior_count,
        )
        slope = float(grad @ step) * weight  # dE/dα at α=0; negative
        if not slope < 0.0:
            raise SemilinearError("Newton step is not a descent direction")
        current = energies[-1]
        # Once the predicted decrease falls below the rounding noise of the
        # energy itself, the Armijo test can no longer distinguish progress
        # from float noise; we are in the quadratic basin, so take the full
        # Newton step on the residual instead of backtracking blindly.
        noise = 8.0 * np.finfo(float).eps * max(abs(current), 1.0)
        if -slope <= noise:
            candidate = z + step
            value = energy(candidate)
        else:
            alpha = 1.0
            for _ in range(_MAX_BACKTRACKS):
                candidate = z + alpha * step
                value = energy(candidate)
                if value <= current + _ARMIJO_C1 * alpha * slope:
                    break
                alpha *= 0.5
            else:
                raise SemilinearError(
                    "Armijo backtracking exhausted (energy refuses to decrease)"
                )
        z = candidate
        energies.append(value)
        grad = gradient_field(z)
        residual = float(np.max(np.abs(grad)))
        iterations += 1

    box_violation = max(
        0.0,
        float(np.max(tau1 - z, initial=0.0)),
        float(np.max(z - tau2, initial=0.0)),
    )
    if box_violation > bound_slack:
        raise PostconditionError(
            f"minimizer left the threshold box by {box_violation:.3e} "
            f"(> {bound_slack:.1e})"
        )

    # unclamped residual — identical inside the box, asserted for honesty
    m_of_z = coef.big_M_many(z, r)
    final_residual = float(
        np.max(np.abs(apply_laplacian(grid, z) + m_of_z - w))
    )
    if final_residual > 10.0 * residual_tol:
        raise PostconditionError(
            f"unclamped residual {final_residual:.3e} exceeds tolerance"
        )
    if float(np.max(np.abs(m_of_z))) > clamp + 1e-9:
        raise PostconditionError("|M_r(z)|∞ exceeded |w|∞ beyond slack")
    if float(np.max(np.abs(z))) > clamp / coef.m_floor + 1e-9:
        raise PostconditionError("|z|∞ exceeded |w|∞/m_floor beyond slack")

    report = SemilinearReport(
        tau1=tau1,
        tau2=tau2,
        newton_iters=iterations,
        final_residual_linf=final_residual,
        energy_trace=energies,
        box_violation=box_violation,
    )
    return z, report
