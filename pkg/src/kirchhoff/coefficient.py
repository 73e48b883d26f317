"""The diffusion coefficient m(t, r) and its primitive machinery.

A :class:`Coefficient` wraps a positive function ``m(t, r)`` (``t`` the
state value, ``r ≥ 0`` the global energy argument) together with its
declared lower bound ``m_floor``. Everything downstream rests on the
primitive

    M_r(t) = ∫₀ᵗ m(s, r) ds,

a strictly increasing map with slope ≥ ``m_floor``, hence ``M_r(t)·t ≥ 0``
(sign condition), ``|M_r(t)| ≥ m_floor·|t|``, and a Lipschitz inverse with
constant ``1/m_floor``. The clamped primitive :class:`TruncatedM` freezes
``M_r`` outside thresholds where ``|M_r| = c``; it is what the semilinear
energy actually integrates, and its minimizer provably stays inside the
threshold box.

Catalog constructors (constant, affine in r, polynomial in t, gaussian
bump) carry analytic primitives; expression- or callable-backed
coefficients fall back to Simpson quadrature, with a vectorized engine
for whole-grid evaluations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import erf
from scipy.stats import qmc

from . import expr as expr_mod
from ._quadrature import adaptive_simpson, unit_simpson_doubling
from .errors import ConfigError, ExprEvalError, InverseBracketError, QuadratureError

__all__ = [
    "Coefficient",
    "TruncatedM",
    "PropertyReport",
    "CheckResult",
    "DEFAULT_AUDIT_BOX",
    "big_M",
    "big_M_inverse",
    "find_thresholds",
    "truncated_M_eval",
    "check_coefficient_properties",
]

#: Default (t, r) sampling box for structural audits.
DEFAULT_AUDIT_BOX = ((-50.0, 50.0), (0.0, 100.0))

_QUAD_TOL = 1e-12
_INVERSE_TOL = 5e-11  # target residual |M(t) - y|, below the 1e-10 contract


def _as_rows(t) -> tuple[np.ndarray, tuple[int, ...], bool]:
    """Flatten ``t`` to a 1D float array, remembering shape/scalarness."""
    arr = np.asarray(t, dtype=float)
    return arr.reshape(-1), arr.shape, arr.ndim == 0


@dataclass(frozen=True)
class Coefficient:
    """A positive diffusion coefficient with declared floor and audit box.

    Construction goes through the catalog classmethods,
    :meth:`from_expression`, or :meth:`from_callable`. ``m_floor`` is the
    user-declared uniform lower bound (audited by sampling, never
    inferred); ``supports_m2`` declares that ``m(·, r)`` decreases on
    (−∞, 0) and increases on (0, +∞), which strengthens the structure of
    the inverse primitive.
    """

    m_floor: float
    supports_m2: bool
    audit_box: tuple[tuple[float, float], tuple[float, float]]
    label: str
    value_fn: Callable = field(repr=False)
    primitive_fn: Optional[Callable] = field(default=None, repr=False)
    potential_fn: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        if not (self.m_floor > 0.0 and math.isfinite(self.m_floor)):
            raise ConfigError(f"m_floor must be positive, got {self.m_floor}")
        (tlo, thi), (rlo, rhi) = self.audit_box
        if not (tlo < thi and rlo < rhi and rlo >= 0.0):
            raise ConfigError(f"invalid audit box {self.audit_box}")

    # -- evaluation ---------------------------------------------------------

    def m(self, t, r: float):
        """Evaluate m(t, r) on a scalar or array of states.

        Negative ``r`` is clipped to 0 (constant continuous extension);
        the energy argument is intrinsically non-negative, so roots of the
        coupled system are unaffected.
        """
        rows, shape, scalar = _as_rows(t)
        out = np.broadcast_to(
            np.asarray(self.value_fn(rows, max(float(r), 0.0)), dtype=float),
            rows.shape,
        )
        if not np.all(np.isfinite(out)):
            raise ExprEvalError(
                f"coefficient {self.label!r} produced non-finite values"
            )
        if scalar:
            return float(out[0])
        return np.array(out, dtype=float).reshape(shape)

    def big_M(self, t: float, r: float) -> float:
        """Primitive M_r(t) = ∫₀ᵗ m(s, r) ds for a single state.

        Analytic for catalog entries; otherwise recursive adaptive Simpson
        to absolute tolerance 1e-12 (depth cap 40).
        """
        r = max(float(r), 0.0)
        t = float(t)
        if self.primitive_fn is not None:
            return float(
                np.asarray(self.primitive_fn(np.array([t]), r), dtype=float)[0]
            )
        return adaptive_simpson(
            lambda s: self.m(s, r), 0.0, t, tol=_QUAD_TOL, max_depth=40
        )

    def big_M_many(self, t, r: float):
        """Vectorized primitive over a field of states (same values as
        :meth:`big_M` to ~2e-12)."""
        rows, shape, scalar = _as_rows(t)
        r = max(float(r), 0.0)
        if self.primitive_fn is not None:
            out = np.broadcast_to(
                np.asarray(self.primitive_fn(rows, r), dtype=float), rows.shape
            ).copy()
        elif rows.size == 0:
            out = rows.copy()
        else:
            # M_r(t) = t · ∫₀¹ m(t s, r) ds, all endpoints in one pass
            tol_rows = _QUAD_TOL / np.maximum(np.abs(rows), 1.0)
            unit = unit_simpson_doubling(
                lambda s: self.m(rows[:, None] * s[None, :], r),
                rows.size,
                tol_rows,
            )
            out = rows * unit
        if not np.all(np.isfinite(out)):
            raise QuadratureError(
                f"primitive of coefficient {self.label!r} is non-finite"
            )
        if scalar:
            return float(out[0])
        return out.reshape(shape)

    def potential_many(self, t, r: float):
        """Antiderivative of the primitive, ``Φ_r(t) = ∫₀ᵗ M_r(s) ds``.

        Used by the semilinear energy. Computed analytically for catalog
        entries, otherwise by the single-integral identity
        ``Φ_r(t) = t² ∫₀¹ (1−s)·m(t s, r) ds`` (no nested quadrature).
        """
        rows, shape, scalar = _as_rows(t)
        r = max(float(r), 0.0)
        if self.potential_fn is not None:
            out = np.broadcast_to(
                np.asarray(self.potential_fn(rows, r), dtype=float), rows.shape
            ).copy()
        elif rows.size == 0:
            out = rows.copy()
        else:
            tol_rows = _QUAD_TOL / np.maximum(rows * rows, 1.0)
            unit = unit_simpson_doubling(
                lambda s: (1.0 - s)[None, :] * self.m(rows[:, None] * s[None, :], r),
                rows.size,
                tol_rows,
            )
            out = rows * rows * unit
        if scalar:
            return float(out[0])
        return out.reshape(shape)

    def big_M_inverse(self, y: float, r: float) -> float:
        """Solve M_r(t) = y for t; |M_r(t) − y| ≤ 1e-10 on return."""
        return float(self.big_M_inverse_many(np.array([float(y)]), r)[0])

    def big_M_inverse_many(self, y, r: float) -> np.ndarray:
        """Vectorized inverse primitive by monotone bisection.

        Because ``M_r`` has slope ≥ m_floor, ``[min(0, y/m_floor),
        max(0, y/m_floor)]`` brackets the root; the bracket is expanded
        defensively to absorb quadrature slack and a failure to bracket
        raises :class:`InverseBracketError` (a positivity violation).
        """
        y_rows, shape, scalar = _as_rows(y)
        r = max(float(r), 0.0)
        out = np.zeros_like(y_rows)
        active = y_rows != 0.0
        if np.any(active):
            target = y_rows[active]
            guess = target / self.m_floor
            lo = np.minimum(0.0, guess)
            hi = np.maximum(0.0, guess)
            for attempt in range(9):
                m_lo = self.big_M_many(lo, r)
                m_hi = self.big_M_many(hi, r)
                bad = (m_lo > target + _INVERSE_TOL) | (m_hi < target - _INVERSE_TOL)
                if not np.any(bad):
                    break
                if attempt == 8:
                    raise InverseBracketError(
                        f"could not bracket the inverse primitive of "
                        f"{self.label!r}; declared m_floor={self.m_floor} "
                        "appears violated"
                    )
                lo[bad] = np.minimum(2.0 * lo[bad], lo[bad] - 1.0)
                hi[bad] = np.maximum(2.0 * hi[bad], hi[bad] + 1.0)
            t = 0.5 * (lo + hi)
            for _ in range(220):
                m_mid = self.big_M_many(t, r)
                residual = m_mid - target
                if np.all(np.abs(residual) <= _INVERSE_TOL):
                    break
                below = residual < 0.0
                lo = np.where(below, t, lo)
                hi = np.where(below, hi, t)
                t = 0.5 * (lo + hi)
            else:
                raise QuadratureError(
                    f"inverse primitive of {self.label!r} did not reach "
                    f"residual {_INVERSE_TOL}"
                )
            out[active] = t
        if scalar:
            return out[0]
        return out.reshape(shape)

    # -- catalog constructors ----------------------------------------------

    @classmethod
    def constant(cls, value: float, *, audit_box=DEFAULT_AUDIT_BOX) -> "Coefficient":
        """m ≡ value. The primitive is value·t."""
        value = float(value)
        if value <= 0.0:
            raise ConfigError(f"constant coefficient must be positive, got {value}")
        return cls(
            m_floor=value,
            supports_m2=False,
            audit_box=audit_box,
            label=f"constant({value})",
            value_fn=lambda t, r: np.full_like(t, value),
            primitive_fn=lambda t, r: value * t,
            potential_fn=lambda t, r: 0.5 * value * t * t,
        )

    @classmethod
    def affine_r(cls, a: float, b: float, *, audit_box=DEFAULT_AUDIT_BOX) -> "Coefficient":
        """m(t, r) = a + b·r, state-independent but energy-coupled."""
        a, b = float(a), float(b)
        if a <= 0.0 or b < 0.0:
            raise ConfigError(f"affine_r needs a > 0 and b ≥ 0, got a={a}, b={b}")
        return cls(
            m_floor=a,
            supports_m2=False,
            audit_box=audit_box,
            label=f"affine_r({a}, {b})",
            value_fn=lambda t, r: np.full_like(t, a + b * r),
            primitive_fn=lambda t, r: (a + b * r) * t,
            potential_fn=lambda t, r: 0.5 * (a + b * r) * t * t,
        )

    @classmethod
    def polynomial_t(cls, coefficients, *, m_floor: float | None = None,
                     supports_m2: bool | None = None,
                     audit_box=DEFAULT_AUDIT_BOX) -> "Coefficient":
        """m(t) = Σ c_k t^k with termwise-analytic primitives.

        ``m_floor`` may be omitted only for even non-negative polynomials
        with positive constant term, where the infimum is c₀ at t = 0.
        """
        coeffs = tuple(float(c) for c in coefficients)
        if not coeffs or coeffs[0] <= 0.0:
            raise ConfigError("polynomial_t needs a positive constant term")
        even_monotone = all(
            c == 0.0 for k, c in enumerate(coeffs) if k % 2 == 1
        ) and all(c >= 0.0 for c in coeffs)
        if m_floor is None:
            if not even_monotone:
                raise ConfigError(
                    "polynomial_t requires an explicit m_floor unless the "
                    "polynomial is even with non-negative coefficients"
                )
            m_floor = coeffs[0]
        if supports_m2 is None:
            supports_m2 = even_monotone and any(c > 0.0 for c in coeffs[1:])

        def value(t, r):
            return np.polynomial.polynomial.polyval(t, coeffs)

        prim = tuple(c / (k + 1) for k, c in enumerate(coeffs))

        def primitive(t, r):
            return t * np.polynomial.polynomial.polyval(t, prim)

        pot = tuple(c / ((k + 1) * (k + 2)) for k, c in enumerate(coeffs))

        def potential(t, r):
            return t * t * np.polynomial.polynomial.polyval(t, pot)

        return cls(
            m_floor=float(m_floor),
            supports_m2=bool(supports_m2),
            audit_box=audit_box,
            label=f"polynomial_t{coeffs}",
            value_fn=value,
            primitive_fn=primitive,
            potential_fn=potential,
        )

    @classmethod
    def gaussian_bump(cls, base: float, amplitude: float, *,
                      audit_box=DEFAULT_AUDIT_BOX) -> "Coefficient":
        """m(t, r) = base + amplitude·r·exp(−t²), analytic via erf."""
        base, amplitude = float(base), float(amplitude)
        if base <= 0.0 or amplitude < 0.0:
            raise ConfigError(
                f"gaussian_bump needs base > 0 and amplitude ≥ 0, "
                f"got base={base}, amplitude={amplitude}"
            )
        half_sqrt_pi = 0.5 * math.sqrt(math.pi)
        inv_sqrt_pi = 1.0 / math.sqrt(math.pi)

        def value(t, r):
            return base + amplitude * r * np.exp(-t * t)

        def primitive(t, r):
            return base * t + amplitude * r * half_sqrt_pi * erf(t)

        def potential(t, r):
            return 0.5 * base * t * t + amplitude * r * half_sqrt_pi * (
                t * erf(t) + (np.exp(-t * t) - 1.0) * inv_sqrt_pi
            )

        return cls(
            m_floor=base,
            supports_m2=False,  # the bump peaks at t = 0: wrong monotonicity
            audit_box=audit_box,
            label=f"gaussian_bump({base}, {amplitude})",
            value_fn=value,
            primitive_fn=primitive,
            potential_fn=potential,
        )

    @classmethod
    def from_expression(cls, source, m_floor: float, *,
                        supports_m2: bool = False,
                        audit_box=DEFAULT_AUDIT_BOX) -> "Coefficient":
        """Quadrature-backed coefficient from expression text (vars t, r)."""
        tree = (
            source
            if isinstance(source, expr_mod.Expr)
            else expr_mod.parse(source, expr_mod.COEFFICIENT_VARS)
        )
        label = expr_mod.to_string(tree)

        def value(t, r):
            return expr_mod.evaluate(tree, {"t": t, "r": r})

        return cls(
            m_floor=float(m_floor),
            supports_m2=supports_m2,
            audit_box=audit_box,
            label=label,
            value_fn=value,
        )

    @classmethod
    def from_callable(cls, fn: Callable, m_floor: float, *,
                      supports_m2: bool = False, label: str = "callable",
                      audit_box=DEFAULT_AUDIT_BOX) -> "Coefficient":
        """Quadrature-backed coefficient from ``fn(t_array, r) -> array``."""
        return cls(
            m_floor=float(m_floor),
            supports_m2=supports_m2,
            audit_box=audit_box,
            label=label,
            value_fn=fn,
        )


# -- truncation --------------------------------------------------------------


@dataclass(frozen=True)
class TruncatedM:
    """The primitive clamped outside thresholds where |M_r| = clamp.

    ``value`` is constant outside [tau1, tau2] and equals M_r inside; the
    matching ``potential`` continues linearly, keeping the energy convex
    with bounded slope.
    """

    base: Coefficient
    r: float
    tau1: float
    tau2: float
    clamp: float

    def __post_init__(self):
        if not (self.tau1 < 0.0 < self.tau2):
            raise ConfigError(
                f"thresholds must straddle zero, got ({self.tau1}, {self.tau2})"
            )

    def _clip(self, t) -> np.ndarray:
        return np.clip(np.asarray(t, dtype=float), self.tau1, self.tau2)

    def value(self, t):
        """Clamped primitive; non-decreasing, |value| ≤ clamp."""
        return self.base.big_M_many(self._clip(t), self.r)

    def potential(self, t):
        """Antiderivative of the clamped primitive (linear outside the box)."""
        arr = np.asarray(t, dtype=float)
        clipped = self._clip(arr)
        inner = self.base.potential_many(clipped, self.r)
        slope = self.base.big_M_many(clipped, self.r)
        out = inner + slope * (arr - clipped)
        if arr.ndim == 0:
            return float(out)
        return out

    def slope(self, t):
        """One-sided derivative of the clamped primitive: m at the clipped state."""
        arr = np.asarray(t, dtype=float)
        out = np.where(
            (arr < self.tau1) | (arr > self.tau2),
            0.0,
            self.base.m(self._clip(arr), self.r),
        )
        if arr.ndim == 0:
            return float(out)
        return out


def big_M(coef: Coefficient, t: float, r: float) -> float:
    """Module-level alias of :meth:`Coefficient.big_M`."""
    return coef.big_M(t, r)


def big_M_inverse(coef: Coefficient, y: float, r: float) -> float:
    """Module-level alias of :meth:`Coefficient.big_M_inverse`."""
    return coef.big_M_inverse(y, r)


def find_thresholds(coef: Coefficient, r: float, c: float) -> tuple[float, float]:
    """Thresholds tau1 < 0 < tau2 with M_r(tau1) = −c, M_r(tau2) = c.

    Both satisfy |tau| ≤ c / m_floor by the growth bound.
    """
    if not c > 0.0:
        raise ConfigError(f"clamp level must be positive, got {c}")
    tau1 = coef.big_M_inverse(-c, r)
    tau2 = coef.big_M_inverse(c, r)
    if not tau1 < 0.0 < tau2:
        raise InverseBracketError(
            f"thresholds ({tau1}, {tau2}) do not straddle zero; "
            "coefficient positivity is suspect"
        )
    return tau1, tau2


def truncated_M_eval(trunc: TruncatedM, t):
    """Evaluate the clamped primitive (module-level alias of ``trunc.value``)."""
    return trunc.value(t)


# -- sampled structural property checks --------------------------------------


@dataclass
class CheckResult:
    name: str
    checked: bool
    passed: bool
    violations: list
    note: str = ""


@dataclass
class PropertyReport:
    """Outcome of sampled structural checks on a coefficient's primitive."""

    label: str
    samples_used: int
    sign_growth: CheckResult
    continuity: CheckResult
    inverse_lipschitz: CheckResult
    inverse_joint_continuity: CheckResult
    inverse_ratio_monotone: CheckResult

    @property
    def checks(self) -> tuple[CheckResult, ...]:
        return (
            self.sign_growth,
            self.continuity,
            self.inverse_lipschitz,
            self.inverse_joint_continuity,
            self.inverse_ratio_monotone,
        )

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.checked)


def _halton_1d(lo: float, hi: float, count: int, seed: int) -> np.ndarray:
    sampler = qmc.Halton(d=1, scramble=True, seed=seed)
    return lo + (hi - lo) * sampler.random(count).reshape(-1)


def check_coefficient_properties(coef: Coefficient, sample_budget: int = 10_000,
                                 *, seed: int = 99,
                                 inverse_pairs: int = 1000) -> PropertyReport:
    """Sampled verification of the primitive's structural properties.

    Checks, over the coefficient's audit box:

    * sign condition ``M_r(t)·t > 0`` and growth ``|M_r(t)| ≥ m_floor·|t|``
      (quadrature slack 1e-9) on a quasi-random (t, r) lattice;
    * sequential continuity of ``(t, r) ↦ M_r(t)`` along shrinking
      perturbation sequences;
    * the 1/m_floor Lipschitz bound of the inverse on sampled pairs
      (slack 1e-6);
    * when ``supports_m2``: joint continuity of the inverse and
      monotonicity of ``t ↦ M_r⁻¹(t)/t`` on each half-line (skipped and
      so marked otherwise).

    Violations are report content (with witness points), never errors.
    """
    if sample_budget < 100:
        raise ConfigError(f"sample_budget must be ≥ 100, got {sample_budget}")
    (tlo, thi), (rlo, rhi) = coef.audit_box
    n_t = max(10, int(math.sqrt(sample_budget)))
    n_r = max(10, -(-sample_budget // n_t))
    t_set = _halton_1d(tlo, thi, n_t, seed)
    r_set = _halton_1d(rlo, rhi, n_r, seed + 1)
    t_span = thi - tlo
    r_span = rhi - rlo

    max_witnesses = 20

    # (sign + growth) on the full product lattice
    violations: list = []
    for r in r_set:
        m_vals = coef.big_M_many(t_set, float(r))
        sign_bad = (m_vals * t_set <= 0.0) & (np.abs(t_set) > 1e-12)
        growth_bad = np.abs(m_vals) < coef.m_floor * np.abs(t_set) - 1e-9
        for idx in np.flatnonzero(sign_bad | growth_bad):
            if len(violations) < max_witnesses:
                violations.append(
                    ("sign/growth", float(t_set[idx]), float(r), float(m_vals[idx]))
                )
    sign_growth = CheckResult(
        name="sign condition and m_floor growth of the primitive",
        checked=True,
        passed=not violations,
        violations=violations,
    )

    # sequential continuity of M along shrinking perturbations
    rng = np.random.default_rng(seed + 2)
    base_idx = rng.choice(n_t, size=min(20, n_t), replace=False)
    cont_violations: list = []
    for i in base_idx:
        t0 = float(t_set[i])
        r0 = float(r_set[int(rng.integers(n_r))])
        base_val = coef.big_M(t0, r0)
        diffs = []
        for j in range(1, 9):
            dt = 0.05 * t_span / 2**j
            dr = 0.05 * r_span / 2**j
            t_j = min(max(t0 + dt, tlo), thi)
            r_j = min(max(r0 + dr, rlo), rhi)
            diffs.append(abs(coef.big_M(t_j, r_j) - base_val))
        scale = 1.0 + abs(base_val)
        settled = diffs[-1] <= max(0.25 * diffs[0], 1e-9 * scale)
        if not settled and len(cont_violations) < max_witnesses:
            cont_violations.append(("continuity", t0, r0, diffs[0], diffs[-1]))
    continuity = CheckResult(
        name="sequential continuity of (t, r) -> M_r(t)",
        checked=True,
        passed=not cont_violations,
        violations=cont_violations,
    )

    # inverse Lipschitz bound 1/m_floor
    lip_violations: list = []
    n_r_lip = 10
    per_r = 2 * max(1, -(-inverse_pairs // n_r_lip))
    lip_limit = 1.0 / coef.m_floor + 1e-6
    for r in _halton_1d(rlo, rhi, n_r_lip, seed + 3):
        ys = rng.uniform(-10.0, 10.0, size=per_r)
        ts = coef.big_M_inverse_many(ys, float(r))
        y1, y2 = ys[0::2], ys[1::2]
        t1, t2 = ts[0::2], ts[1::2]
        gaps = np.abs(y1 - y2)
        ok = np.abs(t1 - t2) <= lip_limit * gaps + 1e-12
        for idx in np.flatnonzero(~ok):
            if len(lip_violations) < max_witnesses:
                lip_violations.append(
                    ("inverse lipschitz", float(y1[idx]), float(y2[idx]), float(r))
                )
    inverse_lipschitz = CheckResult(
        name="inverse primitive is 1/m_floor-Lipschitz",
        checked=True,
        passed=not lip_violations,
        violations=lip_violations,
    )

    if coef.supports_m2:
        # joint continuity of the inverse along shrinking perturbations
        joint_violations: list = []
        for _ in range(10):
            y0 = float(rng.uniform(-10.0, 10.0))
            r0 = float(rng.uniform(rlo, rhi))
            base_val = coef.big_M_inverse(y0, r0)
            diffs = []
            for j in range(1, 9):
                dy = 0.5 / 2**j
                dr = 0.05 * r_span / 2**j
                r_j = min(max(r0 + dr, rlo), rhi)
                diffs.append(abs(coef.big_M_inverse(y0 + dy, r_j) - base_val))
            if diffs[-1] > max(0.25 * diffs[0], 1e-8 * (1.0 + abs(base_val))):
                if len(joint_violations) < max_witnesses:
                    joint_violations.append(("inverse continuity", y0, r0, diffs))
        inverse_joint_continuity = CheckResult(
            name="joint continuity of (y, r) -> inverse primitive",
            checked=True,
            passed=not joint_violations,
            violations=joint_violations,
        )

        # monotonicity of y -> inverse(y)/y on each half-line
        ratio_violations: list = []
        ys_pos = np.linspace(0.05, 10.0, 60)
        for r in _halton_1d(rlo, rhi, 8, seed + 4):
            r = float(r)
            for sign in (1.0, -1.0):
                ys = sign * ys_pos
                ratios = coef.big_M_inverse_many(ys, r) / ys
                diffs = np.diff(ratios)  # along increasing |y|
                bad = diffs > 1e-9 * np.maximum(1.0, np.abs(ratios[:-1]))
                for idx in np.flatnonzero(bad):
                    if len(ratio_violations) < max_witnesses:
                        ratio_violations.append(
                            ("ratio monotone", float(ys[idx]), float(ys[idx + 1]), r)
                        )
        inverse_ratio_monotone = CheckResult(
            name="inverse(y)/y monotone on each half-line",
            checked=True,
            passed=not ratio_violations,
            violations=ratio_violations,
        )
    else:
        skip_note = "coefficient does not declare the half-line monotonicity"
        inverse_joint_continuity = CheckResult(
            name="joint continuity of (y, r) -> inverse primitive",
            checked=False,
            passed=True,
            violations=[],
            note=skip_note,
        )
        inverse_ratio_monotone = CheckResult(
            name="inverse(y)/y monotone on each half-line",
            checked=False,
            passed=True,
            violations=[],
            note=skip_note,
        )

    return PropertyReport(
        label=coef.label,
        samples_used=n_t * n_r,
        sign_growth=sign_growth,
        continuity=continuity,
        inverse_lipschitz=inverse_lipschitz,
        inverse_joint_continuity=inverse_joint_continuity,
        inverse_ratio_monotone=inverse_ratio_monotone,
    )
