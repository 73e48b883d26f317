"""Independent correctness evidence for solved states.

Three instruments, each deliberately built from different ingredients than
the staged solver so failure modes stay independent:

* the composed fourth-order residual and a weak-form (Galerkin) defect
  against random test fields — consistency diagnostics for a bundle;
* a dense brute-force oracle that solves the fully coupled discrete system
  (z, w, r stacked) by damped full Newton from many seeded starts and
  demands consensus — the staged path never forms that system;
* refinement studies that measure observed convergence order against
  closed forms or h²-extrapolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .coefficient import Coefficient, find_thresholds
from .coupled import (
    IterationTrace,
    SolutionBundle,
    assemble_bundle,
    fourth_order_field_residual,
    solve_auxiliary,
)
from .elliptic import LinearSolveReport, estimate_gamma, solve_poisson
from .errors import ConfigError, OracleError
from .fixedpoint import find_fixed_point
from .grid import (
    Domain,
    Grid,
    apply_laplacian,
    build_grid,
    h10_inner,
    lambda1,
    laplacian_matrix,
    norms,
)
from .semilinear import SemilinearReport
from .source import SourceSpec

__all__ = [
    "ResidualReport",
    "RefinementRow",
    "fourth_order_residual",
    "weak_form_defect",
    "dense_oracle",
    "refinement_study",
    "extrapolate_h2",
]

ORACLE_MAX_UNKNOWNS = 1200
WEAK_TEST_FIELDS = 20
WEAK_TEST_SEED = 712


@dataclass(frozen=True)
class ResidualReport:
    """Consistency diagnostics of a solved state (all entries ≥ 0)."""

    fourth_order_linf: float
    fourth_order_l2: float
    system_consistency_linf: float
    weak_form_defect: float


def weak_form_defect(grid: Grid, coef: Coefficient, src: SourceSpec,
                     bundle: SolutionBundle, *,
                     n_fields: int = WEAK_TEST_FIELDS,
                     seed: int = WEAK_TEST_SEED) -> float:
    """Largest Galerkin defect against random unit-L² test fields.

    Tests the summed-by-parts identity
    ``Σ Δ_h u · Δ_h φ · Πh + <M_r(u), φ>_H = Σ f(·,u) · φ · Πh``,
    which the discrete solution satisfies up to solver tolerances (the
    middle term telescopes exactly onto the m-weighted gradient form).
    """
    u = bundle.u
    weight = grid.cell_volume
    lap_u = apply_laplacian(grid, u)
    big_m = coef.big_M_many(u, bundle.r)
    f_vals = src.eval_at(grid, u)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_fields):
        phi = rng.standard_normal(grid.interior_count)
        scale = norms(grid, phi).l2
        if scale == 0.0:
            continue
        phi /= scale
        lhs = float(lap_u @ apply_laplacian(grid, phi)) * weight
        lhs += h10_inner(grid, big_m, phi)
        rhs = float(f_vals @ phi) * weight
        worst = max(worst, abs(lhs - rhs))
    return worst


def fourth_order_residual(grid: Grid, coef: Coefficient, src: SourceSpec,
                          bundle: SolutionBundle) -> ResidualReport:
    """Residual of the original fourth-order equation for a bundle.

    The strong residual is evaluated on nodes at least two cells from the
    boundary (the composed stencil's validity region) in max and L² norms;
    ``system_consistency_linf`` re-measures |v - Δ_h u|_∞ from the stored
    fields, and the weak-form defect re-tests the Galerkin identity.
    """
    res, mask = fourth_order_field_residual(grid, coef, src, bundle.u,
                                            bundle.S_value)
    inside = res[mask]
    linf = float(np.max(np.abs(inside))) if inside.size else 0.0
    l2 = math.sqrt(float(inside @ inside) * grid.cell_volume)
    consistency = float(
        np.max(np.abs(bundle.v + apply_laplacian(grid, bundle.u)))
    ) if bundle.u.size else 0.0
    defect = weak_form_defect(grid, coef, src, bundle)
    return ResidualReport(
        fourth_order_linf=linf,
        fourth_order_l2=l2,
        system_consistency_linf=consistency,
        weak_form_defect=defect,
    )


def _oracle_residual(A: np.ndarray, weight: float, coef: Coefficient,
                     src: SourceSpec, grid: Grid,
                     y: np.ndarray) -> np.ndarray:
    count = grid.interior_count
    z, w, r = y[:count], y[count:2 * count], float(y[-1])
    r_eval = max(r, 0.0)
    f1 = A @ w - src.eval_at(grid, z)
    f2 = A @ z + coef.big_M_many(z, r_eval) - w
    f3 = r - float(z @ (A @ z)) * weight
    return np.concatenate([f1, f2, [f3]])


def _oracle_jacobian(A: np.ndarray, weight: float, coef: Coefficient,
                     src: SourceSpec, grid: Grid,
                     y: np.ndarray) -> np.ndarray:
    count = grid.interior_count
    z, r = y[:count], float(y[-1])
    r_eval = max(r, 0.0)
    total = 2 * count + 1
    J = np.zeros((total, total))
    eye = np.eye(count)

    eps_z = 1e-6 * np.maximum(1.0, np.abs(z))
    df_dt = (
        src.eval_at(grid, z + eps_z) - src.eval_at(grid, z - eps_z)
    ) / (2.0 * eps_z)
    J[:count, :count] = -np.diag(df_dt)
    J[:count, count:2 * count] = A

    J[count:2 * count, :count] = A + np.diag(coef.m(z, r_eval))
    J[count:2 * count, count:2 * count] = -eye
    eps_r = 1e-6 * max(1.0, abs(r))
    r_hi = r_eval + eps_r
    r_lo = max(r_eval - eps_r, 0.0)
    dM_dr = (
        coef.big_M_many(z, r_hi) - coef.big_M_many(z, r_lo)
    ) / (r_hi - r_lo)
    J[count:2 * count, -1] = dM_dr

    J[-1, :count] = -2.0 * weight * (A @ z)
    J[-1, -1] = 1.0
    return J


def _oracle_newton(A: np.ndarray, weight: float, coef: Coefficient,
                   src: SourceSpec, grid: Grid, y0: np.ndarray,
                   tol: float, max_iter: int) -> Optional[tuple[np.ndarray, int, float]]:
    y = y0.copy()
    res = _oracle_residual(A, weight, coef, src, grid, y)
    res_norm = float(np.max(np.abs(res)))
    for it in range(1, max_iter + 1):
        if res_norm <= tol:
            return y, it - 1, res_norm
        try:
            step = np.linalg.solve(
                _oracle_jacobian(A, weight, coef, src, grid, y), -res
            )
        except np.linalg.LinAlgError:
            return None
        res_l2 = float(np.linalg.norm(res))
        factor = 1.0
        for _ in range(40):
            trial = y + factor * step
            trial_res = _oracle_residual(A, weight, coef, src, grid, trial)
            if float(np.linalg.norm(trial_res)) <= (1.0 - 1e-4 * factor) * res_l2:
                break
            factor *= 0.5
        else:
            return None
        y = y + factor * step
        res = _oracle_residual(A, weight, coef, src, grid, y)
        res_norm = float(np.max(np.abs(res)))
    return (y, max_iter, res_norm) if res_norm <= tol else None


def dense_oracle(grid: Grid, coef: Coefficient, src: SourceSpec, *,
                 starts: int = 10, seed: int = 7,
                 consensus_tol: float = 1e-7, newton_tol: float = 1e-11,
                 max_iter: int = 80) -> SolutionBundle:
    """Brute-force solve of the fully coupled discrete system.

    Stacks (z, w, r) and runs damped full Newton with a dense Jacobian
    from ``starts`` seeded initial points (a deterministic zero start plus
    random fields at the problem's natural scales). All converged starts
    must agree to ``consensus_tol`` in max norm; disagreement raises
    :class:`OracleError`, the designated detector for non-unique energy
    fixed points.
    """
    count = grid.interior_count
    if count > ORACLE_MAX_UNKNOWNS:
        raise ConfigError(
            f"dense oracle supports ≤ {ORACLE_MAX_UNKNOWNS} unknowns, "
            f"got {count}"
        )
    A = laplacian_matrix(grid).toarray()
    weight = grid.cell_volume
    lam_h = lambda1(grid)[1]

    f0 = src.eval_at(grid, np.zeros(count))
    w_lin = np.linalg.solve(A, f0)
    scale_w = max(float(np.max(np.abs(w_lin))), 1e-2)
    r_cap = 2.0 * norms(grid, w_lin).l2 ** 2 / lam_h + 1.0
    tol_abs = newton_tol * max(1.0, float(np.max(np.abs(f0))))

    start_points = [
        np.concatenate([np.zeros(count), w_lin, [0.0]]),
    ]
    for k in range(1, starts):
        rng = np.random.default_rng(seed * 1000 + k)
        z0 = rng.standard_normal(count) * 0.5 * scale_w / coef.m_floor
        w0 = w_lin + rng.standard_normal(count) * 0.1 * scale_w
        r0 = float(rng.uniform(0.0, r_cap))
        start_points.append(np.concatenate([z0, w0, [r0]]))

    converged: list[tuple[np.ndarray, int, float]] = []
    for y0 in start_points:
        result = _oracle_newton(A, weight, coef, src, grid, y0,
                                tol_abs, max_iter)
        if result is not None:
            converged.append(result)
    if not converged:
        raise OracleError(
            f"dense oracle: none of {starts} Newton starts converged"
        )

    ref = converged[0][0]
    for y, _, _ in converged[1:]:
        gap_z = float(np.max(np.abs(y[:count] - ref[:count])))
        gap_w = float(np.max(np.abs(y[count:2 * count] - ref[count:2 * count])))
        gap_r = abs(float(y[-1]) - float(ref[-1]))
        if max(gap_z, gap_w, gap_r) > consensus_tol:
            raise OracleError(
                "dense oracle: converged starts disagree "
                f"(Δz={gap_z:.3e}, Δw={gap_w:.3e}, Δr={gap_r:.3e} "
                f"> {consensus_tol:.1e}); multiple energy fixed points "
                "or oracle divergence"
            )

    y, iters, res_norm = converged[0]
    z, w, r = y[:count], y[count:2 * count], float(y[-1])
    c = float(np.max(np.abs(w)))
    tau1, tau2 = find_thresholds(coef, max(r, 0.0), c) if c > 0 else (0.0, 0.0)
    sem_report = SemilinearReport(
        tau1=tau1, tau2=tau2, newton_iters=iters,
        final_residual_linf=res_norm, energy_trace=[], box_violation=0.0,
    )
    lin_report = LinearSolveReport(iterations=iters, residual_l2=res_norm,
                                   tolerance=newton_tol)
    trace = IterationTrace(
        steps=(), converged=True, iterations=0, lambda1_discrete=lam_h,
        gamma_surrogate=estimate_gamma(grid), c1=0.0, c2=0.0,
        contraction_bound=None, audit_overall=None, outside_theory=False,
    )
    return assemble_bundle(grid, coef, src, r, z, w, trace,
                           lin_report, sem_report)


@dataclass(frozen=True)
class RefinementRow:
    n: int
    error: float
    observed_order: Optional[float]


def extrapolate_h2(h_values, values) -> float:
    """Least-squares fit of v(h) = a + b·h²; returns the h → 0 limit a."""
    h = np.asarray(h_values, dtype=float)
    v = np.asarray(values, dtype=float)
    design = np.column_stack([np.ones_like(h), h * h])
    coeffs, *_ = np.linalg.lstsq(design, v, rcond=None)
    return float(coeffs[0])


def refinement_study(coef: Coefficient, src: SourceSpec, n_list,
                     domain: Domain, *, quantity: str = "solution",
                     reference: Optional[Callable | float] = None,
                     r_value: float = 0.0, fixed_point_tol: float = 1e-10,
                     **kwargs) -> tuple[RefinementRow, ...]:
    """Observed-order table for a chosen quantity under mesh refinement.

    ``quantity`` is one of ``"poisson"`` (the load solve, field error),
    ``"solution"`` (the frozen-parameter state at ``r_value``, field
    error), or ``"r_star"`` (the scalar energy fixed point). Field errors
    are max-norm distances to ``reference(x...)``; the scalar quantity may
    omit ``reference``, in which case the h²-extrapolated limit of the
    computed values serves as reference.
    """
    ns = [int(n) for n in n_list]
    if len(ns) < 3:
        raise ConfigError("refinement study needs at least 3 grid sizes")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ConfigError("n_list must be strictly ascending")
    if quantity not in ("poisson", "solution", "r_star"):
        raise ConfigError(f"unknown refinement quantity {quantity!r}")
    if quantity != "r_star" and not callable(reference):
        raise ConfigError(
            "field quantities need a callable closed-form reference"
        )

    h_rep: list[float] = []
    errors: list[float] = []
    scalars: list[float] = []
    for n in ns:
        grid = build_grid(domain, n)
        h_rep.append(grid.h[0])
        if quantity == "r_star":
            value = find_fixed_point(grid, coef, src,
                                     tol=fixed_point_tol, **kwargs).r_star
            scalars.append(value)
            continue
        if quantity == "poisson":
            field_val, _ = solve_poisson(grid, src.poisson_load(grid))
        else:
            field_val = solve_auxiliary(grid, coef, src, r_value,
                                        **kwargs).u
        exact = reference(*grid.coords())
        errors.append(float(np.max(np.abs(field_val - np.asarray(exact)))))

    if quantity == "r_star":
        if reference is None:
            target = extrapolate_h2(h_rep, scalars)
        else:
            target = float(reference)  # type: ignore[arg-type]
        errors = [abs(v - target) for v in scalars]

    rows: list[RefinementRow] = []
    for i, (n, err) in enumerate(zip(ns, errors)):
        if i == 0:
            order = None
        else:
            e_prev = max(errors[i - 1], 1e-300)
            e_cur = max(err, 1e-300)
            order = math.log(e_prev / e_cur) / math.log(h_rep[i - 1] / h_rep[i])
        rows.append(RefinementRow(n=n, error=err, observed_order=order))
    return tuple(rows)
