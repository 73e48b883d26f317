"""TOML run configuration: parsing, validation, and hashing.

A run file has sections ``[domain]``, ``[grid]``, ``[coefficient]``,
``[source]``, and optional ``[solver]``, ``[fixedpoint]``, ``[run]``.
Errors carry the offending key path. The raw file bytes are hashed so
reports can prove which configuration produced them.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

try:  # stdlib from Python 3.11
    import tomllib
except ImportError:  # pragma: no cover - environment-dependent
    import tomli as tomllib

from .coefficient import DEFAULT_AUDIT_BOX, Coefficient
from .errors import ConfigError
from .grid import Domain
from .source import SourceSpec

__all__ = ["RunConfig", "load_config", "parse_config_text"]

_COEFFICIENT_KINDS = (
    "constant", "affine_r", "polynomial_t", "gaussian_bump", "expression",
)
_SOURCE_KINDS = ("pure_x", "x_and_u")


@dataclass(frozen=True)
class RunConfig:
    """Validated run description plus provenance hash."""

    label: str
    domain: Domain
    n: tuple[int, ...]
    coefficient: Coefficient
    source: SourceSpec
    poisson_tol: float
    newton_tol: float
    picard_tol: float
    max_picard: int
    fixed_point_tol: float
    r_values: Optional[tuple[float, ...]]
    override_theory: bool
    seed: int
    out_dir: Optional[str]
    sha256: str

    def solver_kwargs(self) -> dict:
        """Keyword arguments for the auxiliary solvers."""
        kwargs = {
            "poisson_tol": self.poisson_tol,
            "newton_tol": self.newton_tol,
        }
        if self.source.kind.name == "X_AND_U":
            kwargs.update(
                picard_tol=self.picard_tol,
                max_iter=self.max_picard,
                override_theory=self.override_theory,
            )
        return kwargs


def _expect_table(data: dict, key: str) -> dict:
    try:
        value = data[key]
    except KeyError:
        raise ConfigError(f"missing required section [{key}]") from None
    if not isinstance(value, dict):
        raise ConfigError(f"[{key}] must be a table")
    return value


def _get(table: dict, section: str, key: str, kind, default=...):
    if key not in table:
        if default is ...:
            raise ConfigError(f"missing required key {section}.{key}")
        return default
    value = table[key]
    if kind is float and isinstance(value, bool):
        raise ConfigError(f"{section}.{key}: expected a number, got a boolean")
    if kind is float and isinstance(value, (int, float)):
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError(f"{section}.{key}: must be finite")
        return value
    if kind is int and isinstance(value, bool):
        raise ConfigError(f"{section}.{key}: expected an integer, got a boolean")
    if kind is int and isinstance(value, int):
        return int(value)
    if isinstance(value, kind):
        return value
    raise ConfigError(
        f"{section}.{key}: expected {kind.__name__}, got {type(value).__name__}"
    )


def _positive(value: float, section: str, key: str) -> float:
    if value <= 0:
        raise ConfigError(f"{section}.{key}: must be positive, got {value}")
    return value


def _parse_domain(data: dict) -> Domain:
    table = _expect_table(data, "domain")
    if "bounds" in table:
        bounds = table["bounds"]
        try:
            pairs = tuple((float(lo), float(hi)) for lo, hi in bounds)
        except (TypeError, ValueError):
            raise ConfigError(
                "domain.bounds: expected [[lo, hi], ...] pairs"
            ) from None
        return Domain(pairs)
    if "x" in table:
        x = table["x"]
        try:
            if "y" in table:
                return Domain.rectangle(tuple(map(float, x)),
                                        tuple(map(float, table["y"])))
            lo, hi = map(float, x)
            return Domain.interval(lo, hi)
        except (TypeError, ValueError):
            raise ConfigError("domain.x / domain.y: expected [lo, hi]") from None
    raise ConfigError("domain: provide either 'bounds' or 'x' (and 'y')")


def _parse_grid(data: dict, dim: int) -> tuple[int, ...]:
    table = _expect_table(data, "grid")
    n = table.get("n")
    if isinstance(n, int) and not isinstance(n, bool):
        return (int(n),) * dim
    if isinstance(n, list) and all(
        isinstance(k, int) and not isinstance(k, bool) for k in n
    ):
        if len(n) != dim:
            raise ConfigError(
                f"grid.n: {len(n)} entries for a {dim}D domain"
            )
        return tuple(int(k) for k in n)
    raise ConfigError("grid.n: expected an integer or a list of integers")


def _parse_audit_box(table: dict) -> tuple[tuple[float, float], tuple[float, float]]:
    box = table.get("audit_box")
    if box is None:
        return DEFAULT_AUDIT_BOX
    try:
        (tlo, thi), (rlo, rhi) = box
        return ((float(tlo), float(thi)), (float(rlo), float(rhi)))
    except (TypeError, ValueError):
        raise ConfigError(
            "coefficient.audit_box: expected [[t_lo, t_hi], [r_lo, r_hi]]"
        ) from None


def _parse_coefficient(data: dict) -> Coefficient:
    table = _expect_table(data, "coefficient")
    kind = _get(table, "coefficient", "kind", str)
    if kind not in _COEFFICIENT_KINDS:
        raise ConfigError(
            f"coefficient.kind: unknown kind {kind!r}; "
            f"choose one of {', '.join(_COEFFICIENT_KINDS)}"
        )
    box = _parse_audit_box(table)
    if kind == "constant":
        return Coefficient.constant(
            _get(table, "coefficient", "value", float), audit_box=box
        )
    if kind == "affine_r":
        return Coefficient.affine_r(
            _get(table, "coefficient", "a", float),
            _get(table, "coefficient", "b", float),
            audit_box=box,
        )
    if kind == "polynomial_t":
        coeffs = table.get("coefficients")
        if not isinstance(coeffs, list) or not coeffs:
            raise ConfigError(
                "coefficient.coefficients: expected a non-empty list of numbers"
            )
        return Coefficient.polynomial_t(
            [float(c) for c in coeffs],
            m_floor=_get(table, "coefficient", "m_floor", float, None),
            supports_m2=table.get("supports_m2"),
            audit_box=box,
        )
    if kind == "gaussian_bump":
        return Coefficient.gaussian_bump(
            _get(table, "coefficient", "base", float),
            _get(table, "coefficient", "amplitude", float),
            audit_box=box,
        )
    try:
        return Coefficient.from_expression(
            _get(table, "coefficient", "expression", str),
            _get(table, "coefficient", "m_floor", float),
            supports_m2=bool(table.get("supports_m2", False)),
            audit_box=box,
        )
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"coefficient.expression: {exc}") from exc


def _parse_source(data: dict, dim: int) -> SourceSpec:
    table = _expect_table(data, "source")
    kind = _get(table, "source", "kind", str)
    if kind not in _SOURCE_KINDS:
        raise ConfigError(
            f"source.kind: unknown kind {kind!r}; "
            f"choose one of {', '.join(_SOURCE_KINDS)}"
        )
    f_text = _get(table, "source", "f", str)
    mu = _get(table, "source", "mu_bound", float)
    q = _get(table, "source", "q", float, None)
    if q is not None and q <= dim / 2.0:
        raise ConfigError(
            f"source.q: integrability exponent must exceed N/2 = {dim / 2}, "
            f"got {q}"
        )
    label = _get(table, "source", "label", str, f_text)
    try:
        if kind == "pure_x":
            for key in ("nu", "theta"):
                if table.get(key):
                    raise ConfigError(
                        f"source.{key}: must be absent or 0 for a pure load"
                    )
            return SourceSpec.pure_x(f_text, mu, q=q, label=label)
        return SourceSpec.with_state(
            f_text, mu,
            _get(table, "source", "nu", float),
            _get(table, "source", "delta", float),
            _get(table, "source", "theta", float),
            q=q, label=label,
        )
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"source.f: {exc}") from exc


def parse_config_text(text: str, *, sha256: Optional[str] = None) -> RunConfig:
    """Parse and validate configuration text (TOML)."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc

    domain = _parse_domain(data)
    n = _parse_grid(data, domain.dim)
    coefficient = _parse_coefficient(data)
    source = _parse_source(data, domain.dim)

    solver = data.get("solver", {})
    if not isinstance(solver, dict):
        raise ConfigError("[solver] must be a table")
    poisson_tol = _positive(
        _get(solver, "solver", "poisson_tol", float, 1e-12),
        "solver", "poisson_tol")
    newton_tol = _positive(
        _get(solver, "solver", "newton_tol", float, 1e-9),
        "solver", "newton_tol")
    picard_tol = _positive(
        _get(solver, "solver", "picard_tol", float, 1e-10),
        "solver", "picard_tol")
    max_picard = _get(solver, "solver", "max_picard", int, 500)
    if max_picard < 1:
        raise ConfigError("solver.max_picard: must be at least 1")

    fp = data.get("fixedpoint", {})
    if not isinstance(fp, dict):
        raise ConfigError("[fixedpoint] must be a table")
    fp_tol = _positive(_get(fp, "fixedpoint", "tol", float, 1e-8),
                       "fixedpoint", "tol")
    r_values: Optional[tuple[float, ...]] = None
    if "r_values" in fp:
        raw_values = fp["r_values"]
        if not isinstance(raw_values, list) or not raw_values:
            raise ConfigError("fixedpoint.r_values: expected a non-empty list")
        try:
            r_values = tuple(float(v) for v in raw_values)
        except (TypeError, ValueError):
            raise ConfigError("fixedpoint.r_values: entries must be numbers") from None
    elif "r_stop" in fp:
        start = _get(fp, "fixedpoint", "r_start", float, 0.0)
        stop = _get(fp, "fixedpoint", "r_stop", float)
        step = _positive(_get(fp, "fixedpoint", "r_step", float, 0.1),
                         "fixedpoint", "r_step")
        if stop < start:
            raise ConfigError("fixedpoint.r_stop: must be ≥ r_start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        r_values = tuple(start + k * step for k in range(count))
    if r_values is not None:
        if any(v < 0 for v in r_values):
            raise ConfigError("fixedpoint.r_values: must be nonnegative")
        if any(b < a for a, b in zip(r_values, r_values[1:])):
            raise ConfigError("fixedpoint.r_values: must be sorted ascending")

    run = data.get("run", {})
    if not isinstance(run, dict):
        raise ConfigError("[run] must be a table")
    override = bool(run.get("override_theory", False))
    seed = _get(run, "run", "seed", int, 53)
    out_dir = _get(run, "run", "out_dir", str, None)
    label = _get(data, "top level", "label", str, source.label)

    digest = sha256 if sha256 is not None else hashlib.sha256(
        text.encode("utf-8")
    ).hexdigest()
    return RunConfig(
        label=label, domain=domain, n=n, coefficient=coefficient,
        source=source, poisson_tol=poisson_tol, newton_tol=newton_tol,
        picard_tol=picard_tol, max_picard=max_picard,
        fixed_point_tol=fp_tol, r_values=r_values,
        override_theory=override, seed=seed, out_dir=out_dir, sha256=digest,
    )


def load_config(path) -> RunConfig:
    """Read, hash, and validate a TOML run file."""
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    digest = hashlib.sha256(raw).hexdigest()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ConfigError(f"config {p} is not UTF-8: {exc}") from exc
    return parse_config_text(text, sha256=digest)
