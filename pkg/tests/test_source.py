"""Source terms: expression/callable evaluation, caching, validation."""

import math

import numpy as np
import pytest

from kirchhoff.errors import ConfigError, ExprEvalError
from kirchhoff.grid import Domain, build_grid
from kirchhoff.source import SourceKind, SourceSpec

PI = math.pi


@pytest.fixture(scope="module")
def grid():
    return build_grid(Domain.interval(0.0, PI), 32)


@pytest.fixture(scope="module")
def grid_2d():
    return build_grid(Domain.rectangle((0.0, PI), (0.0, 1.0)), (8, 6))


class TestEvaluation:
    def test_pure_load_matches_numpy(self, grid):
        src = SourceSpec.pure_x("sin(x)", mu_bound=1.0)
        x = grid.axes()[0]
        np.testing.assert_allclose(src.eval_at(grid, 0.0), np.sin(x), atol=1e-15)

    def test_pure_load_ignores_the_state(self, grid):
        src = SourceSpec.pure_x("sin(x)", mu_bound=1.0)
        a = src.eval_at(grid, 0.0)
        b = src.eval_at(grid, np.full(grid.interior_count, 7.0))
        np.testing.assert_array_equal(a, b)

    def test_state_coupled_expression(self, grid):
        src = SourceSpec.with_state("sin(x) + 0.1*tanh(t)", 1.0, 0.1, 1.0, 0.1)
        x = grid.axes()[0]
        state = np.cos(x)
        expect = np.sin(x) + 0.1 * np.tanh(state)
        np.testing.assert_allclose(src.eval_at(grid, state), expect, atol=1e-15)

    def test_scalar_state_broadcasts(self, grid):
        src = SourceSpec.with_state("sin(x) + t", 1.0, 1.0, 1.0, 1.0)
        x = grid.axes()[0]
        np.testing.assert_allclose(src.eval_at(grid, 2.0), np.sin(x) + 2.0,
                                   atol=1e-15)

    def test_two_dimensional_expression(self, grid_2d):
        src = SourceSpec.pure_x("sin(x)*y", mu_bound=PI)
        x, y = grid_2d.coords()
        np.testing.assert_allclose(src.eval_at(grid_2d, 0.0), np.sin(x) * y,
                                   atol=1e-15)

    def test_callable_source(self, grid):
        src = SourceSpec.with_state(
            lambda x, t: np.sin(x) + 0.5 * t, 1.0, 0.5, 1.0, 0.5
        )
        x = grid.axes()[0]
        np.testing.assert_allclose(src.eval_at(grid, x), np.sin(x) + 0.5 * x,
                                   atol=1e-15)

    def test_eval_points_off_grid(self):
        src = SourceSpec.pure_x("sin(x)", mu_bound=1.0)
        pts = np.array([0.1, 1.3, 2.9])
        np.testing.assert_allclose(src.eval_points([pts], 0.0), np.sin(pts),
                                   atol=1e-15)

    def test_constant_expression_fills_the_grid(self, grid):
        src = SourceSpec.pure_x("2", mu_bound=2.0)
        out = src.eval_at(grid, 0.0)
        assert out.shape == (grid.interior_count,)
        assert np.all(out == 2.0)

    def test_nonfinite_values_raise(self, grid):
        src = SourceSpec.with_state("1/t", 1.0, 1.0, 1.0, 1.0)
        with pytest.raises(ExprEvalError):
            src.eval_at(grid, 0.0)

    def test_bad_callable_shape_raises(self, grid):
        src = SourceSpec.pure_x(lambda x, t: np.ones(3), mu_bound=1.0)
        with pytest.raises(ConfigError):
            src.eval_at(grid, 0.0)


class TestValidation:
    def test_pure_load_rejects_state_variable(self):
        with pytest.raises(ConfigError):
            SourceSpec.pure_x("sin(x) + t", mu_bound=1.0)

    def test_delta_outside_unit_interval_rejected(self):
        for delta in (0.0, -0.5, 1.5):
            with pytest.raises(ConfigError):
                SourceSpec.with_state("t", 1.0, 1.0, delta, 1.0)

    def test_negative_constants_rejected(self):
        with pytest.raises(ConfigError):
            SourceSpec.pure_x("sin(x)", mu_bound=-1.0)
        with pytest.raises(ConfigError):
            SourceSpec.with_state("t", 1.0, -1.0, 1.0, 1.0)
        with pytest.raises(ConfigError):
            SourceSpec.with_state("t", 1.0, 1.0, 1.0, -1.0)

    def test_nonpositive_q_rejected(self):
        with pytest.raises(ConfigError):
            SourceSpec.pure_x("sin(x)", mu_bound=1.0, q=0.0)

    def test_label_defaults_to_printed_expression(self):
        src = SourceSpec.pure_x("sin(x)", mu_bound=1.0)
        assert "sin" in src.label

    def test_kind_tags(self):
        assert SourceSpec.pure_x("sin(x)", 1.0).kind is SourceKind.PURE_X
        assert SourceSpec.with_state("t", 1.0, 1.0, 1.0, 1.0).kind is SourceKind.X_AND_U


class TestPoissonCache:
    def test_cached_solution_reused_per_grid_and_tol(self, grid):
        src = SourceSpec.pure_x("sin(x)", mu_bound=1.0)
        w1, rep1 = src.cached_w(grid, 1e-12)
        w2, rep2 = src.cached_w(grid, 1e-12)
        assert w1 is w2 and rep1 is rep2

    def test_cache_is_read_only(self, grid):
        src = SourceSpec.pure_x("sin(x)", mu_bound=1.0)
        w, _ = src.cached_w(grid, 1e-12)
        with pytest.raises(ValueError):
            w[0] = 99.0

    def test_different_grids_get_distinct_entries(self, grid):
        other = build_grid(Domain.interval(0.0, PI), 16)
        src = SourceSpec.pure_x("sin(x)", mu_bound=1.0)
        wa, _ = src.cached_w(grid, 1e-12)
        wb, _ = src.cached_w(other, 1e-12)
        assert wa.shape != wb.shape

    def test_state_coupled_sources_have_no_cache(self, grid):
        src = SourceSpec.with_state("t", 1.0, 1.0, 1.0, 1.0)
        with pytest.raises(ConfigError):
            src.cached_w(grid, 1e-12)

    def test_poisson_load_is_f_at_zero_state(self, grid):
        src = SourceSpec.with_state("sin(x) + 0.1*tanh(t)", 1.0, 0.1, 1.0, 0.1)
        x = grid.axes()[0]
        np.testing.assert_allclose(src.poisson_load(grid), np.sin(x), atol=1e-15)
