"""Source terms f: either a pure load f(x) or state-coupled f(x, u).

A :class:`SourceSpec` bundles the evaluable right-hand side with the
user-declared growth/Lipschitz constants that the solvability audit
checks: ``|f(x,t)| ≤ mu_bound + nu·|t|^delta`` with delta ∈ (0, 1], and
``|f(x,t1) − f(x,t2)| ≤ theta·|t1 − t2|``. For pure loads the state
constants are irrelevant and the Poisson solution is cached per grid —
it does not depend on the energy argument r.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from . import expr as expr_mod
from .errors import ConfigError, ExprEvalError
from .grid import Grid

__all__ = ["SourceKind", "SourceSpec"]


class SourceKind(enum.Enum):
    PURE_X = "pure_x"
    X_AND_U = "x_and_u"


@dataclass(eq=False)
class SourceSpec:
    """Right-hand side with declared growth constants.

    ``f`` is either a parsed expression over {x, y, t} or a callable
    ``f(x, t)`` / ``f(x, y, t)`` taking coordinate arrays and the state.
    """

    kind: SourceKind
    f: Union[expr_mod.Expr, Callable]
    mu_bound: float
    nu: float = 0.0
    delta: float = 1.0
    theta: float = 0.0
    q: Optional[float] = None
    label: str = ""
    _poisson_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not isinstance(self.kind, SourceKind):
            self.kind = SourceKind(self.kind)
        if not (0.0 < self.delta <= 1.0):
            raise ConfigError(f"delta must lie in (0, 1], got {self.delta}")
        for name in ("mu_bound", "nu", "theta"):
            value = getattr(self, name)
            if not (value >= 0.0 and math.isfinite(value)):
                raise ConfigError(f"{name} must be finite and ≥ 0, got {value}")
        if self.q is not None and not self.q > 0.0:
            raise ConfigError(f"q must be positive when declared, got {self.q}")
        if not self.label:
            if isinstance(self.f, expr_mod.Expr):
                self.label = expr_mod.to_string(self.f)
            else:
                self.label = getattr(self.f, "__name__", "callable")

    @classmethod
    def pure_x(cls, f, mu_bound: float, *, q: float | None = None,
               label: str = "") -> "SourceSpec":
        """A load f(x) with no state coupling."""
        f = _coerce(f)
        if isinstance(f, expr_mod.Expr) and "t" in expr_mod.variables(f):
            raise ConfigError(
                "a pure load may not reference the state variable t"
            )
        return cls(kind=SourceKind.PURE_X, f=f, mu_bound=float(mu_bound),
                   q=q, label=label)

    @classmethod
    def with_state(cls, f, mu_bound: float, nu: float, delta: float,
                   theta: float, *, q: float | None = None,
                   label: str = "") -> "SourceSpec":
        """A state-coupled source f(x, u) with declared (mu, nu, delta, theta)."""
        return cls(kind=SourceKind.X_AND_U, f=_coerce(f), mu_bound=float(mu_bound),
                   nu=float(nu), delta=float(delta), theta=float(theta), q=q,
                   label=label)

    def eval_points(self, coords, state) -> np.ndarray:
        """Values f(x_i, state_i) at arbitrary points.

        ``coords`` is a sequence of equal-length 1-D coordinate arrays (one
        per axis); ``state`` is a scalar or an array of matching length.
        """
        coords = [np.asarray(c, dtype=float) for c in coords]
        count = coords[0].size
        state_arr = np.asarray(state, dtype=float)
        if state_arr.ndim == 0:
            state_arr = float(state_arr)
        if isinstance(self.f, expr_mod.Expr):
            bindings = {"x": coords[0], "t": state_arr}
            if len(coords) == 2:
                bindings["y"] = coords[1]
            values = expr_mod.evaluate(self.f, bindings)
        else:
            values = self.f(*coords, state_arr)
        out = np.asarray(values, dtype=float)
        if out.ndim == 0:
            out = np.full(count, float(out))
        if out.shape != (count,):
            raise ConfigError(
                f"source produced shape {out.shape}, expected ({count},)"
            )
        if not np.all(np.isfinite(out)):
            raise ExprEvalError(f"source {self.label!r} produced non-finite values")
        return out

    def eval_at(self, grid: Grid, state) -> np.ndarray:
        """Nodewise values f(x_i, state_i); ``state`` may be scalar or field."""
        return self.eval_points(grid.coords(), state)

    def poisson_load(self, grid: Grid) -> np.ndarray:
        """The load at zero state, f(·, 0)."""
        return self.eval_at(grid, 0.0)

    def cached_w(self, grid: Grid, tol: float):
        """For pure loads: the Poisson solution, computed once per grid.

        The cached array is frozen read-only; the first equation of the
        split system does not involve r, so one solve serves every r.
        """
        from .elliptic import solve_poisson  # local import: avoid cycle at module load

        if self.kind is not SourceKind.PURE_X:
            raise ConfigError("cached_w applies to pure loads only")
        key = (grid, tol)
        if key not in self._poisson_cache:
            w, report = solve_poisson(grid, self.poisson_load(grid), tol)
            w.flags.writeable = False
            self._poisson_cache[key] = (w, report)
        return self._poisson_cache[key]


def _coerce(f):
    if isinstance(f, (expr_mod.Expr,)) or callable(f):
        return f
    if isinstance(f, str):
        return expr_mod.parse(f, expr_mod.SOURCE_VARS)
    raise ConfigError(f"source must be an expression or callable, got {type(f)}")
