"""Monotone semilinear stage: -Δ_h z + M_r(z) = w via damped Newton."""

import math

import numpy as np
import pytest

from kirchhoff.coefficient import Coefficient, find_thresholds
from kirchhoff.elliptic import solve_poisson
from kirchhoff.errors import GridError
from kirchhoff.grid import Domain, apply_laplacian, build_grid, laplacian_matrix
from kirchhoff.semilinear import solve_semilinear


@pytest.fixture(scope="module")
def grid():
    return build_grid(Domain.interval(0.0, 1.0), 24)


@pytest.fixture(scope="module")
def coef():
    return Coefficient.polynomial_t([1.0, 0.0, 1.0])  # m = 1 + t²


@pytest.fixture(scope="module")
def load(grid):
    w, _ = solve_poisson(grid, np.ones(grid.interior_count))
    return w


def _dense_reference(grid, coef, r, w, starts=50, seed=421):
    """Independent minimizer: full-Hessian Newton on the unclamped system.

    Dense linear algebra, no clamping, no CG — shares nothing with the
    production path except the stencil definition. Strict convexity makes
    every start land on the same point; the test asserts that too.
    """
    a = laplacian_matrix(grid).toarray()
    rng = np.random.default_rng(seed)
    clamp = float(np.max(np.abs(w)))
    tau1, tau2 = find_thresholds(coef, r, clamp)
    limits = []
    for k in range(starts):
        z = (np.zeros_like(w) if k == 0
             else rng.uniform(tau1, tau2, size=w.shape))
        for _ in range(200):
            residual = a @ z + coef.big_M_many(z, r) - w
            if float(np.max(np.abs(residual))) <= 1e-12:
                break
            jac = a + np.diag(np.asarray(coef.m(z, r), dtype=float))
            step = np.linalg.solve(jac, -residual)
            # plain damping on the residual norm keeps this globally safe
            alpha, base = 1.0, float(np.linalg.norm(residual))
            for _ in range(60):
                trial = z + alpha * step
                trial_res = a @ trial + coef.big_M_many(trial, r) - w
                if float(np.linalg.norm(trial_res)) < base:
                    break
                alpha *= 0.5
            z = z + alpha * step
        limits.append(z)
    spread = max(float(np.max(np.abs(z - limits[0]))) for z in limits[1:])
    return limits[0], spread


class TestAgainstDenseMinimizer:
    def test_matches_the_convexity_reference(self, grid, coef, load):
        z, report = solve_semilinear(grid, coef, 0.0, load)
        reference, spread = _dense_reference(grid, coef, 0.0, load)
        assert spread <= 1e-8  # all 50 starts at one point
        assert float(np.max(np.abs(z - reference))) <= 1e-8
        assert report.final_residual_linf <= 1e-8

    def test_matches_reference_with_energy_argument(self, grid, load):
        bump = Coefficient.gaussian_bump(1.0, 1.0)
        z, _ = solve_semilinear(grid, bump, 2.0, load)
        reference, spread = _dense_reference(grid, bump, 2.0, load, starts=20)
        assert spread <= 1e-8
        assert float(np.max(np.abs(z - reference))) <= 1e-8


class TestUniqueness:
    def test_zero_and_random_starts_agree(self, grid, coef, load):
        clamp = float(np.max(np.abs(load)))
        tau1, tau2 = find_thresholds(coef, 0.0, clamp)
        z0, _ = solve_semilinear(grid, coef, 0.0, load)
        rng = np.random.default_rng(77)
        for _ in range(5):
            guess = rng.uniform(tau1, tau2, size=load.shape)
            z1, _ = solve_semilinear(grid, coef, 0.0, load, initial_guess=guess)
            assert float(np.max(np.abs(z1 - z0))) <= 1e-8


class TestAPrioriBounds:
    @pytest.mark.parametrize("scale", [0.1, 1.0, 25.0])
    def test_primitive_and_solution_stay_in_the_box(self, grid, coef, scale):
        rng = np.random.default_rng(int(scale * 10) + 1)
        w = scale * rng.standard_normal(grid.interior_count)
        z, report = solve_semilinear(grid, coef, 1.0, w)
        w_inf = float(np.max(np.abs(w)))
        assert float(np.max(np.abs(coef.big_M_many(z, 1.0)))) <= w_inf + 1e-9
        assert float(np.max(np.abs(z))) <= w_inf / coef.m_floor + 1e-9
        assert report.tau1 <= float(np.min(z)) + 1e-9
        assert float(np.max(z)) <= report.tau2 + 1e-9

    def test_solution_solves_the_unclamped_equation(self, grid, coef, load):
        z, _ = solve_semilinear(grid, coef, 0.0, load)
        residual = apply_laplacian(grid, z) + coef.big_M_many(z, 0.0) - load
        assert float(np.max(np.abs(residual))) <= 1e-8


class TestMechanics:
    def test_zero_load_returns_zero_without_iterating(self, grid, coef):
        z, report = solve_semilinear(grid, coef, 0.0, np.zeros(grid.interior_count))
        assert np.all(z == 0.0)
        assert report.newton_iters == 0

    def test_energy_trace_is_monotone(self, grid, coef, load):
        _, report = solve_semilinear(grid, coef, 0.0, load)
        trace = report.energy_trace
        eps = 1e-12 * max(1.0, abs(trace[0]))
        assert all(b <= a + eps for a, b in zip(trace, trace[1:]))

    def test_warm_start_cuts_iterations(self, grid, coef, load):
        z, cold = solve_semilinear(grid, coef, 0.0, load)
        _, warm = solve_semilinear(grid, coef, 0.0, load, initial_guess=z)
        assert warm.newton_iters <= 1
        assert cold.newton_iters >= warm.newton_iters

    def test_negative_energy_argument_clamped_to_zero(self, grid, coef, load):
        a, _ = solve_semilinear(grid, coef, -3.0, load)
        b, _ = solve_semilinear(grid, coef, 0.0, load)
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-10)

    def test_wrong_shape_rejected(self, grid, coef):
        with pytest.raises(GridError):
            solve_semilinear(grid, coef, 0.0, np.ones(7))

    def test_nonfinite_load_rejected(self, grid, coef):
        bad = np.ones(grid.interior_count)
        bad[3] = np.nan
        with pytest.raises(GridError):
            solve_semilinear(grid, coef, 0.0, bad)

    def test_linear_case_reduces_to_shifted_poisson(self, grid):
        # m ≡ 2: the equation is (-Δ_h + 2I) z = w with exact sine solution
        g = build_grid(Domain.interval(0.0, math.pi), 40)
        x = g.axes()[0]
        w = np.sin(x)
        (h,) = g.h
        lam = (4.0 / h**2) * math.sin(h / 2.0) ** 2
        z, _ = solve_semilinear(g, Coefficient.constant(2.0), 0.0, w)
        np.testing.assert_allclose(z, w / (lam + 2.0), rtol=0, atol=1e-10)
