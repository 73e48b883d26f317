"""Solvability audit: sampled floor/growth checks and contraction limits."""

import math

import numpy as np
import pytest

from kirchhoff.coefficient import Coefficient
from kirchhoff.grid import Domain, build_grid
from kirchhoff.hypotheses import (
    OVERALL_FAIL,
    OVERALL_PASS,
    OVERALL_PASS_SURROGATE,
    audit,
)
from kirchhoff.source import SourceSpec

PI = math.pi


@pytest.fixture(scope="module")
def grid():
    return build_grid(Domain.interval(0.0, PI), 64)


@pytest.fixture(scope="module")
def unit_coef():
    return Coefficient.constant(1.0)


def _tanh_source(nu=0.1, theta=0.1):
    return SourceSpec.with_state("sin(x) + 0.1*tanh(t)", 1.0, nu, 1.0, theta)


class TestStateCoupledLimits:
    def test_benchmark_passes_through_the_surrogate_route(self, grid, unit_coef):
        report = audit(grid, unit_coef, _tanh_source())
        assert report.overall == OVERALL_PASS_SURROGATE
        assert report.passed
        assert report.gamma_binding
        # on (0,π) with δ = 1 the theory limit is λ₁² = 1 while the
        # surrogate route caps ν at m_floor/γ_h < 1, which binds
        assert report.lambda1_continuous == pytest.approx(1.0)
        assert report.nu_limit_theory == pytest.approx(1.0)
        assert report.nu_limit_gamma == pytest.approx(0.6465669563108251, abs=1e-12)
        assert report.theta_limit == pytest.approx(1.0)
        assert report.volume == pytest.approx(PI)

    def test_sublinear_growth_changes_the_theory_limit(self, grid, unit_coef):
        src = SourceSpec.with_state("sin(x) + 0.1*tanh(t)", 1.0, 0.1, 0.5, 0.1)
        report = audit(grid, unit_coef, src)
        # λ₁^{(1+3δ)/2} / |Ω|^{1−δ} at δ = 1/2, λ₁ = 1, |Ω| = π
        assert report.nu_limit_theory == pytest.approx(1.0 / math.sqrt(PI))

    def test_excessive_nu_fails(self, grid, unit_coef):
        report = audit(grid, unit_coef, _tanh_source(nu=0.9))
        assert not report.nu_pass
        assert report.overall == OVERALL_FAIL
        assert not report.passed

    def test_excessive_theta_fails(self, grid, unit_coef):
        report = audit(grid, unit_coef, _tanh_source(theta=1.5))
        assert not report.theta_pass
        assert report.overall == OVERALL_FAIL

    def test_state_constant_source_fails_the_nonzero_load_check(self, grid, unit_coef):
        src = SourceSpec.with_state("t", 1.0, 1.0, 1.0, 0.5)
        report = audit(grid, unit_coef, src)
        assert not report.f1_pass
        assert report.f1_max_abs == 0.0
        assert report.overall == OVERALL_FAIL

    def test_understated_mu_detected_off_grid(self, grid, unit_coef):
        src = SourceSpec.with_state("2*sin(x) + 0.1*tanh(t)", 1.0, 0.1, 1.0, 0.1)
        report = audit(grid, unit_coef, src)
        assert report.mu_sampled_max > 1.0
        assert not report.mu_pass
        assert report.overall == OVERALL_FAIL


class TestPureLoads:
    def test_pure_load_skips_state_gates(self, grid, unit_coef):
        report = audit(grid, unit_coef, SourceSpec.pure_x("sin(x)", 1.0))
        assert report.nu == 0.0
        assert report.nu_pass and report.theta_pass
        assert report.overall == OVERALL_PASS
        assert report.pure_x_pass is True

    def test_hidden_state_dependence_in_callable_detected(self, grid, unit_coef):
        sneaky = SourceSpec.pure_x(lambda x, t: np.sin(x) + 0.05 * t, 1.1)
        report = audit(grid, unit_coef, sneaky)
        assert report.pure_x_pass is False
        assert report.overall == OVERALL_FAIL

    def test_two_dimensional_audit(self, unit_coef):
        g2 = build_grid(Domain.rectangle((0.0, PI), (0.0, PI)), (10, 10))
        report = audit(g2, unit_coef, SourceSpec.pure_x("sin(x)*sin(y)", 1.0))
        assert report.overall == OVERALL_PASS
        assert report.lambda1_continuous == pytest.approx(2.0)
        assert report.volume == pytest.approx(PI**2)


class TestCoefficientFloor:
    def test_overdeclared_floor_detected(self, grid):
        liar = Coefficient.from_callable(
            lambda t, r: np.full_like(np.asarray(t, dtype=float), 1.0),
            m_floor=2.0,
            label="overdeclared",
        )
        report = audit(grid, liar, SourceSpec.pure_x("sin(x)", 1.0))
        assert report.m_floor_sampled_min < 2.0
        assert not report.m_floor_pass
        assert report.overall == OVERALL_FAIL

    def test_honest_floor_passes_with_margin(self, grid):
        bump = Coefficient.gaussian_bump(1.0, 1.0)
        report = audit(grid, bump, SourceSpec.pure_x("sin(x)", 1.0))
        assert report.m_floor_pass
        assert report.m_floor_sampled_min >= 1.0 - 1e-12

    def test_false_halfline_monotonicity_claim_detected(self, grid):
        # a bump that peaks at t = 0 decreases on (0, ∞): (m2) is false
        dishonest = Coefficient.from_callable(
            lambda t, r: 1.0 + np.exp(-np.asarray(t, dtype=float) ** 2),
            m_floor=1.0,
            supports_m2=True,
            label="false-m2",
        )
        report = audit(grid, dishonest, SourceSpec.pure_x("sin(x)", 1.0))
        assert report.m2_pass is False
        assert report.overall == OVERALL_FAIL

    def test_m2_gate_skipped_when_not_declared(self, grid, unit_coef):
        report = audit(grid, unit_coef, SourceSpec.pure_x("sin(x)", 1.0))
        assert report.m2_pass is None


class TestIntegrabilityGate:
    def test_q_above_half_dimension_passes(self, grid, unit_coef):
        src = SourceSpec.pure_x("sin(x)", 1.0, q=2.0)
        report = audit(grid, unit_coef, src)
        assert report.q_pass is True

    def test_q_at_or_below_half_dimension_fails(self, unit_coef):
        g2 = build_grid(Domain.rectangle((0.0, PI), (0.0, PI)), (8, 8))
        src = SourceSpec.pure_x("sin(x)*sin(y)", 1.0, q=1.0)
        report = audit(g2, unit_coef, src)
        assert report.q_pass is False
        assert report.overall == OVERALL_FAIL

    def test_undeclared_q_is_not_gated(self, grid, unit_coef):
        report = audit(grid, unit_coef, SourceSpec.pure_x("sin(x)", 1.0))
        assert report.q_pass is None


class TestReportShape:
    def test_dict_round_trip_has_stable_keys(self, grid, unit_coef):
        report = audit(grid, unit_coef, _tanh_source())
        payload = report.to_dict()
        for key in (
            "overall", "m_floor_pass", "f1_pass", "mu_pass", "nu_pass",
            "theta_pass", "gamma_surrogate", "nu_limit_theory",
            "nu_limit_gamma", "theta_limit", "notes",
        ):
            assert key in payload
        assert payload["overall"] == report.overall

    def test_audit_is_deterministic(self, grid, unit_coef):
        a = audit(grid, unit_coef, _tanh_source())
        b = audit(grid, unit_coef, _tanh_source())
        assert a.to_dict() == b.to_dict()

    def test_seed_changes_samples_not_verdict(self, grid, unit_coef):
        a = audit(grid, unit_coef, _tanh_source(), seed=1)
        b = audit(grid, unit_coef, _tanh_source(), seed=2)
        assert a.overall == b.overall
