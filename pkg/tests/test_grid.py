"""Mesh construction, the discrete Laplacian, eigenvalue, and norm layer."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kirchhoff.errors import GridError
from kirchhoff.grid import (
    Domain,
    apply_laplacian,
    build_grid,
    conformal_field,
    h10_inner,
    lambda1,
    laplacian_matrix,
    norms,
)

PI = math.pi


@pytest.fixture(scope="module")
def grid_1d():
    return build_grid(Domain.interval(0.0, PI), 63)


@pytest.fixture(scope="module")
def grid_2d():
    return build_grid(Domain.rectangle((0.0, PI), (0.0, 2.0)), (12, 9))


class TestConstruction:
    def test_spacing_is_length_over_n_plus_one(self):
        g = build_grid(Domain.interval(0.0, 1.0), 9)
        assert g.h == (0.1,)
        assert g.interior_count == 9
        np.testing.assert_allclose(g.axes()[0], np.linspace(0.1, 0.9, 9))

    def test_rectangle_axes_and_volume(self, grid_2d):
        assert grid_2d.shape == (12, 9)
        assert grid_2d.interior_count == 108
        assert grid_2d.domain.volume == pytest.approx(2.0 * PI)
        assert grid_2d.cell_volume == pytest.approx(grid_2d.h[0] * grid_2d.h[1])
        x, y = grid_2d.coords()
        assert x.shape == y.shape == (108,)
        assert x.min() == pytest.approx(grid_2d.h[0])
        assert y.max() == pytest.approx(2.0 - grid_2d.h[1])

    def test_scalar_n_broadcasts_per_axis(self):
        g = build_grid(Domain.rectangle((0.0, 1.0), (0.0, 1.0)), 5)
        assert g.n == (5, 5)

    def test_degenerate_bounds_rejected(self):
        with pytest.raises(GridError):
            Domain.interval(1.0, 1.0)
        with pytest.raises(GridError):
            Domain.interval(2.0, 1.0)

    def test_too_few_nodes_rejected(self):
        with pytest.raises(GridError):
            build_grid(Domain.interval(0.0, 1.0), 1)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(GridError):
            build_grid(Domain.interval(0.0, 1.0), (4, 4))

    def test_conformal_field_rejects_wrong_shape(self, grid_1d):
        with pytest.raises(GridError):
            conformal_field(grid_1d, np.zeros(7))


class TestLaplacian:
    def test_discrete_sine_is_an_exact_eigenvector(self, grid_1d):
        # sin(k·x) diagonalizes the three-point stencil with eigenvalue
        # (4/h²)·sin²(k·h/2); this is exact in floating point up to roundoff.
        (h,) = grid_1d.h
        x = grid_1d.axes()[0]
        for k in (1, 2, 5):
            v = np.sin(k * x)
            lam = (4.0 / h**2) * math.sin(k * h / 2.0) ** 2
            np.testing.assert_allclose(apply_laplacian(grid_1d, v), lam * v,
                                       rtol=0, atol=1e-11 * lam)

    def test_matrix_and_matfree_agree(self, grid_1d, grid_2d):
        rng = np.random.default_rng(5)
        for g in (grid_1d, grid_2d):
            u = rng.standard_normal(g.interior_count)
            matvec = laplacian_matrix(g) @ u
            np.testing.assert_allclose(apply_laplacian(g, u), matvec,
                                       rtol=0, atol=1e-12)

    def test_matrix_is_symmetric(self, grid_2d):
        a = laplacian_matrix(grid_2d)
        assert abs(a - a.T).max() == 0.0

    def test_2d_stencil_sums_node_contributions(self, grid_2d):
        hx, hy = grid_2d.h
        u = np.zeros(grid_2d.shape)
        u[5, 4] = 1.0
        out = apply_laplacian(grid_2d, u.reshape(-1)).reshape(grid_2d.shape)
        assert out[5, 4] == pytest.approx(2.0 / hx**2 + 2.0 / hy**2)
        assert out[4, 4] == pytest.approx(-1.0 / hx**2)
        assert out[5, 3] == pytest.approx(-1.0 / hy**2)


class TestEigenvalue:
    def test_unit_interval_continuum_value(self):
        g = build_grid(Domain.interval(0.0, 1.0), 31)
        cont, disc = lambda1(g)
        assert cont == pytest.approx(PI**2)
        assert disc == pytest.approx(PI**2, rel=1e-3)

    def test_pi_interval_frozen_discrete_value(self, grid_1d):
        cont, disc = lambda1(grid_1d)
        assert cont == pytest.approx(1.0)
        assert disc == pytest.approx(0.999799218511597, abs=1e-12)

    def test_discrete_matches_stencil_closed_form(self, grid_1d, grid_2d):
        for g in (grid_1d, grid_2d):
            expect = sum(
                (4.0 / h**2) * math.sin(PI * h / (2.0 * length)) ** 2
                for h, length in zip(g.h, g.domain.lengths)
            )
            assert lambda1(g)[1] == pytest.approx(expect, rel=1e-11)

    def test_rectangle_continuum_is_sum_of_axis_terms(self, grid_2d):
        cont, _ = lambda1(grid_2d)
        assert cont == pytest.approx(PI**2 * (1.0 / PI**2 + 1.0 / 4.0))

    def test_rayleigh_quotient_never_beats_lambda1(self, grid_2d):
        rng = np.random.default_rng(17)
        _, disc = lambda1(grid_2d)
        w = grid_2d.cell_volume
        for _ in range(25):
            u = rng.standard_normal(grid_2d.interior_count)
            quotient = h10_inner(grid_2d, u, u) / (float(u @ u) * w)
            assert quotient >= disc * (1.0 - 1e-12)


class TestInnerProductAndNorms:
    def test_summation_by_parts_is_exact(self, grid_1d, grid_2d):
        rng = np.random.default_rng(23)
        for g in (grid_1d, grid_2d):
            w = g.cell_volume
            for _ in range(10):
                u = rng.standard_normal(g.interior_count)
                v = rng.standard_normal(g.interior_count)
                lhs = h10_inner(g, u, v)
                rhs = float(apply_laplacian(g, u) @ v) * w
                assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_h10_inner_is_symmetric_positive(self, grid_2d):
        rng = np.random.default_rng(29)
        u = rng.standard_normal(grid_2d.interior_count)
        v = rng.standard_normal(grid_2d.interior_count)
        assert h10_inner(grid_2d, u, v) == pytest.approx(h10_inner(grid_2d, v, u))
        assert h10_inner(grid_2d, u, u) > 0.0

    def test_sine_energy_matches_continuum(self):
        # ∫₀^π |cos|² = π/2; second-order quadrature of the gradient energy
        g = build_grid(Domain.interval(0.0, PI), 255)
        u = np.sin(g.axes()[0])
        assert h10_inner(g, u, u) == pytest.approx(PI / 2.0, rel=1e-4)

    def test_norms_of_known_field(self):
        g = build_grid(Domain.interval(0.0, PI), 255)
        u = np.sin(g.axes()[0])
        got = norms(g, u)
        assert got.linf == pytest.approx(1.0, abs=1e-4)
        assert got.l2 == pytest.approx(math.sqrt(PI / 2.0), rel=1e-4)
        assert got.h10 == pytest.approx(math.sqrt(PI / 2.0), rel=1e-4)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_poincare_inequality_is_exact_discretely(self, seed):
        g = build_grid(Domain.interval(0.0, PI), 40)
        u = np.random.default_rng(seed).standard_normal(g.interior_count)
        _, disc = lambda1(g)
        got = norms(g, u)
        assert got.l2 <= got.h10 / math.sqrt(disc) * (1.0 + 1e-12)
