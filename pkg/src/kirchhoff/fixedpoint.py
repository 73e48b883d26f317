"""The scalar energy map S and its fixed point.

``S(r)`` is the squared first-difference seminorm of the solution of the
split system at frozen energy parameter r. A fixed point r* = S(r*) turns
the frozen-parameter solution into a solution of the full nonlocal problem:
the coefficient then reads exactly the energy the solution carries.

The solver relies on precisely what holds in general — continuity of S,
S(0) > 0 for a nontrivial load, and S(r) < r for large r — so the primary
method is bracketing bisection on g(r) = S(r) - r, seeded with the probe
candidate r = S(0) (which finds constant-S families immediately). A damped
self-map iteration is provided for curve exploration only.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .coefficient import Coefficient
from .coupled import SolutionBundle, cached_audit, solve_auxiliary
from .elliptic import estimate_gamma
from .errors import BracketError, ConfigError, FixedPointError
from .grid import Grid, lambda1, norms
from .source import SourceKind, SourceSpec

__all__ = [
    "SampleDigest",
    "SamplePoint",
    "SCurve",
    "FixedPointResult",
    "eval_S",
    "upper_bracket",
    "find_fixed_point",
    "damped_iteration",
    "sweep_S",
    "THREADS_ENV_VAR",
]

THREADS_ENV_VAR = "KIRCHHOFF_THREADS"
DEFAULT_GAP_TOL = 1e-8


@dataclass(frozen=True)
class SampleDigest:
    """Small summary of the solve behind one S sample."""

    sweeps: int
    newton_iterations: int
    flag_count: int
    min_slack: float


@dataclass(frozen=True)
class SamplePoint:
    r: float
    S: float
    digest: SampleDigest


@dataclass(frozen=True)
class SCurve:
    """Sampled energy map with continuity and sign-change bookkeeping."""

    samples: tuple[SamplePoint, ...]
    bracket: Optional[tuple[float, float]]
    continuity_modulus: float
    sign_changes: tuple[tuple[float, float], ...]

    def rs(self) -> np.ndarray:
        return np.array([p.r for p in self.samples])

    def values(self) -> np.ndarray:
        return np.array([p.S for p in self.samples])


@dataclass(frozen=True)
class FixedPointResult:
    """Outcome of the scalar fixed-point search."""

    r_star: float
    S_at_star: float
    gap: float
    evaluations: int
    tolerance: float
    bundle: SolutionBundle
    bracket_history: tuple[tuple[float, float, float, float], ...]
    # each entry: (r_lo, r_hi, g(r_lo), g(r_hi)) after a bracket update


def _digest(bundle: SolutionBundle) -> SampleDigest:
    return SampleDigest(
        sweeps=bundle.trace.iterations,
        newton_iterations=bundle.semilinear_report.newton_iters,
        flag_count=len(bundle.trace.flagged_steps),
        min_slack=bundle.trace.min_slack(),
    )


def _eval_bundle(grid: Grid, coef: Coefficient, src: SourceSpec, r: float,
                 **kwargs) -> SolutionBundle:
    if r < 0:
        raise ConfigError(f"S is defined for r ≥ 0 only, got {r}")
    return solve_auxiliary(grid, coef, src, r, **kwargs)


def eval_S(grid: Grid, coef: Coefficient, src: SourceSpec, r: float,
           **kwargs) -> float:
    """Energy of the frozen-parameter solution; deterministic in its inputs."""
    return _eval_bundle(grid, coef, src, r, **kwargs).S_value


def upper_bracket(grid: Grid, coef: Coefficient, src: SourceSpec) -> float:
    """An R with S(R) < R, from the a-priori energy bounds.

    State-independent loads: S(r) ≤ |w|₂²/λ1h for every r, so
    R = 2|w|₂²/λ1h + 1 works unconditionally. State-coupled loads: the
    load solution norm obeys the self-bound B = μ∞√|Ω|/√λ1h + C2·B^δ
    (solved here by damped iteration), giving S(r) ≤ B²/λ1h², so
    R = 2B²/λ1h + 1 works whenever λ1h ≥ 1/2; the callers re-check
    g(R) < 0 at run time either way.
    """
    lam_h = lambda1(grid)[1]
    if src.kind is SourceKind.PURE_X:
        w, _ = src.cached_w(grid, 1e-12)
        return 2.0 * norms(grid, w).l2 ** 2 / lam_h + 1.0
    vol = grid.domain.volume
    a = src.mu_bound * math.sqrt(vol) / math.sqrt(lam_h)
    c2 = src.nu * vol ** (1.0 - src.delta) / lam_h ** ((1.0 + 3.0 * src.delta) / 2.0)
    b = max(1.0, a)
    for _ in range(100):
        b = 0.5 * b + 0.5 * (a + c2 * b**src.delta)
    return 2.0 * b * b / lam_h + 1.0


def find_fixed_point(grid: Grid, coef: Coefficient, src: SourceSpec,
                     tol: float = DEFAULT_GAP_TOL,
                     **kwargs) -> FixedPointResult:
    """Bisection on g(r) = S(r) - r over [0, upper_bracket].

    Maintains g(r_lo) > 0 > g(r_hi) throughout, stops when the gap
    |S(r) - r| at a candidate drops below ``tol``, and performs at most
    ``ceil(log2(R/tol)) + 2`` S evaluations. The first interior candidate
    is the probe r = S(0), which settles constant-S families in one step.
    """
    if tol <= 0:
        raise ConfigError(f"tolerance must be positive, got {tol}")
    radius = upper_bracket(grid, coef, src)
    max_evals = math.ceil(math.log2(radius / tol)) + 2

    evals = 0
    history: list[tuple[float, float, float, float]] = []

    def sample(r: float) -> tuple[float, float, SolutionBundle]:
        nonlocal evals
        bundle = _eval_bundle(grid, coef, src, r, **kwargs)
        evals += 1
        return bundle.S_value, bundle.S_value - r, bundle

    s_lo, g_lo, bundle_lo = sample(0.0)
    if g_lo <= 0.0:
        raise BracketError(
            "S(0) must be positive for a nontrivial load; got "
            f"S(0) = {s_lo:.3e} (is f ≡ 0?)"
        )
    if g_lo <= tol:
        return FixedPointResult(
            r_star=0.0, S_at_star=s_lo, gap=abs(g_lo), evaluations=evals,
            tolerance=tol, bundle=bundle_lo, bracket_history=tuple(history),
        )
    s_hi, g_hi, bundle_hi = sample(radius)
    if abs(g_hi) <= tol:
        return FixedPointResult(
            r_star=radius, S_at_star=s_hi, gap=abs(g_hi), evaluations=evals,
            tolerance=tol, bundle=bundle_hi, bracket_history=tuple(history),
        )
    if g_hi >= 0.0:
        raise BracketError(
            f"g({radius:.6g}) = {g_hi:.3e} ≥ 0: the a-priori upper bracket "
            "failed; this signals an upstream solver or declaration problem"
        )
    lo, hi = 0.0, radius
    history.append((lo, hi, g_lo, g_hi))

    best: Optional[tuple[float, float, float, SolutionBundle]] = None
    probe = s_lo if 0.0 < s_lo < radius else None

    while evals < max_evals:
        r_c = probe if probe is not None else 0.5 * (lo + hi)
        probe = None
        s_c, g_c, bundle_c = sample(r_c)
        if best is None or abs(g_c) < best[2]:
            best = (r_c, s_c, abs(g_c), bundle_c)
        if abs(g_c) <= tol:
            return FixedPointResult(
                r_star=r_c, S_at_star=s_c, gap=abs(g_c), evaluations=evals,
                tolerance=tol, bundle=bundle_c,
                bracket_history=tuple(history),
            )
        if g_c > 0.0:
            lo, g_lo = r_c, g_c
        else:
            hi, g_hi = r_c, g_c
        history.append((lo, hi, g_lo, g_hi))
        if hi - lo <= max(1e-3 * tol, 8.0 * np.finfo(float).eps * radius):
            break

    if best is not None and best[2] <= tol:
        r_c, s_c, gap, bundle_c = best
        return FixedPointResult(
            r_star=r_c, S_at_star=s_c, gap=gap, evaluations=evals,
            tolerance=tol, bundle=bundle_c, bracket_history=tuple(history),
        )
    raise FixedPointError(
        f"no candidate reached gap ≤ {tol:.3e} within {max_evals} "
        f"evaluations (best gap {best[2]:.3e} at r = {best[0]:.6g})"
        if best is not None else
        "bisection exhausted its budget without any candidate"
    )


def damped_iteration(grid: Grid, coef: Coefficient, src: SourceSpec,
                     r0: float = 0.0, omega: float = 0.5,
                     tol: float = DEFAULT_GAP_TOL, max_iter: int = 200,
                     **kwargs) -> FixedPointResult:
    """Damped self-map iteration r ← (1-ω)r + ω·S(r).

    Exploration helper only: convergence needs contractivity that the
    theory does not grant; prefer :func:`find_fixed_point`.
    """
    if not 0.0 < omega <= 1.0:
        raise ConfigError(f"damping must lie in (0, 1], got {omega}")
    if tol <= 0:
        raise ConfigError(f"tolerance must be positive, got {tol}")
    r = float(r0)
    evals = 0
    for _ in range(max_iter):
        bundle = _eval_bundle(grid, coef, src, r, **kwargs)
        evals += 1
        gap = abs(bundle.S_value - r)
        if gap <= tol:
            return FixedPointResult(
                r_star=r, S_at_star=bundle.S_value, gap=gap,
                evaluations=evals, tolerance=tol, bundle=bundle,
                bracket_history=(),
            )
        r = (1.0 - omega) * r + omega * bundle.S_value
    raise FixedPointError(
        f"damped iteration did not reach gap ≤ {tol:.3e} in {max_iter} steps"
    )


def _thread_count(requested: Optional[int], jobs: int) -> int:
    cap_env = os.environ.get(THREADS_ENV_VAR)
    cap = max(1, int(cap_env)) if cap_env else (os.cpu_count() or 1)
    want = requested if requested is not None else min(jobs, cap)
    return max(1, min(want, cap, jobs))


def sweep_S(grid: Grid, coef: Coefficient, src: SourceSpec, r_values,
            *, threads: Optional[int] = None, **kwargs) -> SCurve:
    """Sample S on a sorted nonnegative lattice, optionally in parallel.

    Records the lattice modulus of continuity max|S(r_{i+1}) - S(r_i)|,
    every adjacent sign change of g = S - r, and the first descending
    crossing as the canonical bracket. The worker count is capped by the
    ``KIRCHHOFF_THREADS`` environment variable.
    """
    rs = [float(r) for r in r_values]
    if not rs:
        raise ConfigError("r_values must be non-empty")
    if any(r < 0 for r in rs):
        raise ConfigError("r_values must be nonnegative")
    if any(b < a for a, b in zip(rs, rs[1:])):
        raise ConfigError("r_values must be sorted ascending")

    # warm the shared caches once so workers never duplicate heavy setup
    lambda1(grid)
    estimate_gamma(grid)
    if src.kind is SourceKind.PURE_X:
        src.cached_w(grid, kwargs.get("poisson_tol", 1e-12))
    else:
        cached_audit(grid, coef, src)

    workers = _thread_count(threads, len(rs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            bundles = list(pool.map(
                lambda r: _eval_bundle(grid, coef, src, r, **kwargs), rs
            ))
    else:
        bundles = [_eval_bundle(grid, coef, src, r, **kwargs) for r in rs]

    samples = tuple(
        SamplePoint(r=r, S=b.S_value, digest=_digest(b))
        for r, b in zip(rs, bundles)
    )
    values = [p.S for p in samples]
    modulus = max(
        (abs(b - a) for a, b in zip(values, values[1:])), default=0.0
    )
    gaps = [p.S - p.r for p in samples]
    changes: list[tuple[float, float]] = []
    bracket: Optional[tuple[float, float]] = None
    for (r_a, g_a), (r_b, g_b) in zip(
        zip(rs, gaps), list(zip(rs, gaps))[1:]
    ):
        if g_a == 0.0:
            changes.append((r_a, r_a))
            if bracket is None:
                bracket = (r_a, r_a)
        elif g_a * g_b < 0.0:
            changes.append((r_a, r_b))
            if bracket is None and g_a > 0.0 > g_b:
                bracket = (r_a, r_b)
    if gaps and gaps[-1] == 0.0:
        changes.append((rs[-1], rs[-1]))
        if bracket is None:
            bracket = (rs[-1], rs[-1])
    if bracket is None and changes:
        bracket = changes[0]
    return SCurve(
        samples=samples, bracket=bracket, continuity_modulus=modulus,
        sign_changes=tuple(changes),
    )
