"""Simpson quadrature engines for coefficient primitives.

Two flavours of the same family:

* :func:`adaptive_simpson` — classic recursive adaptive Simpson for a
  single scalar integral, absolute tolerance driven, depth capped.
* :func:`unit_simpson_doubling` — composite Simpson on the unit interval
  with panel doubling, vectorized over many rows at once (used for
  whole-grid evaluations where one array pass per refinement level is far
  cheaper than thousands of scalar recursions).

Both apply the standard Richardson correction ``S_fine + (S_fine −
S_coarse)/15`` on acceptance.
"""

from __future__ import annotations

import numpy as np

from .errors import QuadratureError

__all__ = ["adaptive_simpson", "unit_simpson_doubling"]


def _simpson(a: float, fa: float, b: float, fb: float, fm: float) -> float:
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive(f, a, fa, b, fb, fm, whole, tol, depth):
    mid = 0.5 * (a + b)
    lm = 0.5 * (a + mid)
    rm = 0.5 * (mid + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(a, fa, mid, fm, flm)
    right = _simpson(mid, fm, b, fb, frm)
    delta = left + right - whole
    if abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    if depth <= 0:
        raise QuadratureError(
            f"adaptive Simpson exceeded maximum depth on [{a}, {b}]"
        )
    half = 0.5 * tol
    return _adaptive(f, a, fa, mid, fm, flm, left, half, depth - 1) + _adaptive(
        f, mid, fm, b, fb, frm, right, half, depth - 1
    )


def adaptive_simpson(f, a: float, b: float, *, tol: float = 1e-12,
                     max_depth: int = 40) -> float:
    """Integrate scalar ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Handles ``a > b`` by sign reversal. Raises :class:`QuadratureError`
    when the recursion depth cap is hit before the tolerance is met.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if a > b:
        a, b = b, a
        sign = -1.0
    fa = float(f(a))
    fb = float(f(b))
    mid = 0.5 * (a + b)
    fm = float(f(mid))
    whole = _simpson(a, fa, b, fb, fm)
    return sign * _adaptive(f, a, fa, b, fb, fm, whole, tol, max_depth)


def unit_simpson_doubling(integrand, rows: int, tol_rows, *,
                          max_doublings: int = 16,
                          start_panels: int = 8) -> np.ndarray:
    """Row-wise ``∫₀¹ g_i(s) ds`` for ``rows`` integrands simultaneously.

    ``integrand(s)`` receives the 1D array of unit-interval sample points
    and must return a ``(rows, len(s))`` matrix of values. Panels double
    until every row's Simpson value moves by at most ``tol_rows[i]``; the
    Richardson-corrected values are returned.
    """
    tol_rows = np.broadcast_to(np.asarray(tol_rows, dtype=float), (rows,))

    def composite(panels: int) -> np.ndarray:
        s = np.linspace(0.0, 1.0, 2 * panels + 1)
        g = np.asarray(integrand(s), dtype=float)
        if g.shape != (rows, s.size):
            raise QuadratureError(
                f"integrand returned shape {g.shape}, expected {(rows, s.size)}"
            )
        acc = g[:, 0] + g[:, -1] + 4.0 * g[:, 1::2].sum(axis=1)
        if panels > 1:
            acc += 2.0 * g[:, 2:-1:2].sum(axis=1)
        return acc / (6.0 * panels)

    panels = start_panels
    coarse = composite(panels)
    for _ in range(max_doublings):
        panels *= 2
        fine = composite(panels)
        if np.all(np.abs(fine - coarse) <= tol_rows):
            return fine + (fine - coarse) / 15.0
        coarse = fine
    raise QuadratureError(
        f"panel doubling did not reach tolerance after {max_doublings} "
        "doublings (pathological coefficient?)"
    )
