"""Command-line orchestration and machine-readable reporting.

Subcommands
-----------
``solve``   solvability audit, energy fixed point, full state; writes
            ``report.json``, ``solution.csv``, ``trace.csv``.
``sweep``   sample the energy map S on the configured r lattice; writes
            ``report.json``, ``scurve.csv``.
``verify``  staged solve vs dense brute-force oracle plus residual
            diagnostics; writes ``report.json``.
``audit``   solvability audit only; writes ``report.json``.

Exit codes: 0 success; 1 configuration or usage error; 2 solvability audit
failure without ``--override-theory``; 3 solver failure. Reports carry
``schema = 1``, the config's SHA-256, and are byte-identical across runs of
the same configuration except for the ``created_at`` timestamp.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .coupled import SolutionBundle, cached_audit
from .errors import AuditError, ConfigError, GridError, KirchhoffError
from .fixedpoint import FixedPointResult, SCurve, find_fixed_point, sweep_S
from .grid import Grid, build_grid, lambda1, norms
from .hypotheses import OVERALL_FAIL, HypothesisReport
from .source import SourceKind
from .verify import dense_oracle, fourth_order_residual

__all__ = ["main"]

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_HYPOTHESIS = 2
EXIT_SOLVER = 3

TRACE_COLUMNS = (
    "n", "w_h10", "w_linf", "z_h10", "z_linf", "step_delta",
    "slack_z_norm", "slack_w_norm_recursion", "slack_w_sup", "slack_z_sup",
    "slack_w_norm_chain", "contraction_ratio", "contraction_bound", "flags",
)


def _jsonable(value):
    """Recursively convert to JSON-encodable data; non-finite floats → null."""
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, np.floating):
        return _jsonable(float(value))
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return _jsonable(value.to_dict())
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return _jsonable(dataclasses.asdict(value))
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _fmt(value: Optional[float]) -> str:
    if value is None:
        return ""
    return f"{value:.17g}"


def _write_report(out_dir: Path, payload: dict) -> Path:
    path = out_dir / "report.json"
    body = json.dumps(_jsonable(payload), indent=2, sort_keys=True)
    path.write_text(body + "\n", encoding="utf-8")
    return path


def _grid_block(grid: Grid) -> dict:
    cont, disc = lambda1(grid)
    return {
        "bounds": [list(b) for b in grid.domain.bounds],
        "n": list(grid.n),
        "h": list(grid.h),
        "interior_count": grid.interior_count,
        "lambda1_continuous": cont,
        "lambda1_discrete": disc,
    }


def _base_payload(command: str, config: RunConfig, grid: Grid,
                  audit_report: HypothesisReport) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "version": __version__,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "command": command,
        "config": {
            "sha256": config.sha256,
            "label": config.label,
            "coefficient": config.coefficient.label,
            "source": config.source.label,
            "source_kind": config.source.kind.name.lower(),
            "override_theory": config.override_theory,
            "seed": config.seed,
        },
        "grid": _grid_block(grid),
        "audit": audit_report.to_dict(),
    }


def _bundle_block(bundle: SolutionBundle) -> dict:
    u_norms = norms(bundle.grid, bundle.u)
    w_norms = norms(bundle.grid, bundle.w)
    return {
        "r": bundle.r,
        "S_value": bundle.S_value,
        "residual_fourth_order": bundle.residual_fourth_order,
        "consistency_linf": bundle.consistency_linf,
        "outside_theory": bundle.outside_theory,
        "u_l2": u_norms.l2, "u_h10": u_norms.h10, "u_linf": u_norms.linf,
        "w_l2": w_norms.l2, "w_linf": w_norms.linf,
        "poisson_iterations": bundle.poisson_report.iterations,
        "newton_iterations": bundle.semilinear_report.newton_iters,
        "newton_residual_linf": bundle.semilinear_report.final_residual_linf,
        "trace": bundle.trace.to_dict(),
    }


def _write_solution_csv(out_dir: Path, config: RunConfig,
                        bundle: SolutionBundle) -> Path:
    grid = bundle.grid
    coords = grid.coords()
    f_vals = config.source.eval_at(grid, bundle.u)
    path = out_dir / "solution.csv"
    headers = ["x", "y"][: grid.dim] + ["u", "w", "v", "f"]
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(headers)
        for i in range(grid.interior_count):
            row = [coords[a][i] for a in range(grid.dim)]
            row += [bundle.u[i], bundle.w[i], bundle.v[i], f_vals[i]]
            writer.writerow(_fmt(v) for v in row)
    return path


def _write_trace_csv(out_dir: Path, bundle: SolutionBundle) -> Path:
    path = out_dir / "trace.csv"
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(TRACE_COLUMNS)
        for step in bundle.trace.steps:
            row = [
                str(step.n), _fmt(step.w_h10), _fmt(step.w_linf),
                _fmt(step.z_h10), _fmt(step.z_linf), _fmt(step.step_delta),
                _fmt(step.slack_z_norm), _fmt(step.slack_w_norm_recursion),
                _fmt(step.slack_w_sup), _fmt(step.slack_z_sup),
                _fmt(step.slack_w_norm_chain), _fmt(step.contraction_ratio),
                _fmt(step.contraction_bound), "|".join(step.flags),
            ]
            writer.writerow(row)
    return path


def _write_scurve_csv(out_dir: Path, curve: SCurve) -> Path:
    path = out_dir / "scurve.csv"
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow([
            "r", "S", "sweeps", "newton_iterations", "flag_count",
            "min_slack",
        ])
        for point in curve.samples:
            writer.writerow([
                _fmt(point.r), _fmt(point.S), str(point.digest.sweeps),
                str(point.digest.newton_iterations),
                str(point.digest.flag_count),
                _fmt(point.digest.min_slack
                     if math.isfinite(point.digest.min_slack) else None),
            ])
    return path


def _fixed_point_block(result: FixedPointResult) -> dict:
    return {
        "r_star": result.r_star,
        "S_at_star": result.S_at_star,
        "gap": result.gap,
        "evaluations": result.evaluations,
        "tolerance": result.tolerance,
        "bracket_history": [list(entry) for entry in result.bracket_history],
    }


def _gate_hypotheses(config: RunConfig, report: HypothesisReport) -> bool:
    """True when the run may proceed: audit passed or override set."""
    return report.overall != OVERALL_FAIL or config.override_theory


def _cmd_audit(config: RunConfig, grid: Grid, out_dir: Path) -> int:
    report = cached_audit(grid, config.coefficient, config.source)
    payload = _base_payload("audit", config, grid, report)
    _write_report(out_dir, payload)
    print(f"audit: {report.overall}")
    return EXIT_OK if _gate_hypotheses(config, report) else EXIT_HYPOTHESIS


def _cmd_solve(config: RunConfig, grid: Grid, out_dir: Path) -> int:
    report = cached_audit(grid, config.coefficient, config.source)
    payload = _base_payload("solve", config, grid, report)
    if not _gate_hypotheses(config, report):
        _write_report(out_dir, payload)
        print("audit: fail (use --override-theory to run anyway)",
              file=sys.stderr)
        return EXIT_HYPOTHESIS
    kwargs = config.solver_kwargs()
    if config.source.kind is SourceKind.X_AND_U:
        kwargs["audit_report"] = report
    result = find_fixed_point(grid, config.coefficient, config.source,
                              tol=config.fixed_point_tol, **kwargs)
    bundle = result.bundle
    residuals = fourth_order_residual(grid, config.coefficient,
                                      config.source, bundle)
    payload["fixed_point"] = _fixed_point_block(result)
    payload["solution"] = _bundle_block(bundle)
    payload["residuals"] = dataclasses.asdict(residuals)
    _write_report(out_dir, payload)
    _write_solution_csv(out_dir, config, bundle)
    _write_trace_csv(out_dir, bundle)
    print(
        f"solve: r* = {result.r_star:.12g}, gap = {result.gap:.3e}, "
        f"S evaluations = {result.evaluations}"
    )
    return EXIT_OK


def _cmd_sweep(config: RunConfig, grid: Grid, out_dir: Path) -> int:
    if config.r_values is None:
        raise ConfigError(
            "sweep needs [fixedpoint].r_values (or r_start/r_stop/r_step)"
        )
    report = cached_audit(grid, config.coefficient, config.source)
    payload = _base_payload("sweep", config, grid, report)
    if not _gate_hypotheses(config, report):
        _write_report(out_dir, payload)
        print("audit: fail (use --override-theory to run anyway)",
              file=sys.stderr)
        return EXIT_HYPOTHESIS
    kwargs = config.solver_kwargs()
    if config.source.kind is SourceKind.X_AND_U:
        kwargs["audit_report"] = report
    curve = sweep_S(grid, config.coefficient, config.source,
                    config.r_values, **kwargs)
    payload["sweep"] = {
        "samples": [
            {"r": p.r, "S": p.S, "digest": dataclasses.asdict(p.digest)}
            for p in curve.samples
        ],
        "bracket": list(curve.bracket) if curve.bracket else None,
        "continuity_modulus": curve.continuity_modulus,
        "sign_changes": [list(pair) for pair in curve.sign_changes],
    }
    _write_report(out_dir, payload)
    _write_scurve_csv(out_dir, curve)
    print(
        f"sweep: {len(curve.samples)} samples, "
        f"modulus {curve.continuity_modulus:.3e}, bracket {curve.bracket}"
    )
    return EXIT_OK


def _cmd_verify(config: RunConfig, grid: Grid, out_dir: Path) -> int:
    report = cached_audit(grid, config.coefficient, config.source)
    payload = _base_payload("verify", config, grid, report)
    if not _gate_hypotheses(config, report):
        _write_report(out_dir, payload)
        print("audit: fail (use --override-theory to run anyway)",
              file=sys.stderr)
        return EXIT_HYPOTHESIS
    kwargs = config.solver_kwargs()
    if config.source.kind is SourceKind.X_AND_U:
        kwargs["audit_report"] = report
    staged = find_fixed_point(grid, config.coefficient, config.source,
                              tol=config.fixed_point_tol, **kwargs)
    oracle = dense_oracle(grid, config.coefficient, config.source,
                          seed=config.seed)
    gap_u = float(np.max(np.abs(staged.bundle.u - oracle.u)))
    gap_w = float(np.max(np.abs(staged.bundle.w - oracle.w)))
    gap_r = abs(staged.r_star - oracle.r)
    payload["fixed_point"] = _fixed_point_block(staged)
    payload["solution"] = _bundle_block(staged.bundle)
    payload["oracle"] = {
        "r": oracle.r,
        "S_value": oracle.S_value,
        "newton_iterations": oracle.semilinear_report.newton_iters,
        "residual_linf": oracle.semilinear_report.final_residual_linf,
    }
    payload["comparison"] = {
        "gap_u_linf": gap_u, "gap_w_linf": gap_w, "gap_r": gap_r,
    }
    payload["residuals"] = dataclasses.asdict(
        fourth_order_residual(grid, config.coefficient, config.source,
                              staged.bundle)
    )
    payload["oracle_residuals"] = dataclasses.asdict(
        fourth_order_residual(grid, config.coefficient, config.source,
                              oracle)
    )
    _write_report(out_dir, payload)
    print(
        f"verify: |Δu|∞ = {gap_u:.3e}, |Δw|∞ = {gap_w:.3e}, "
        f"|Δr| = {gap_r:.3e}"
    )
    return EXIT_OK


_COMMANDS = {
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
    "audit": _cmd_audit,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kirchhoff",
        description=(
            "Finite-difference solver for a fourth-order problem with a "
            "nonlocal second-order coefficient"
        ),
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (
        ("solve", "find the energy fixed point and the full state"),
        ("sweep", "sample the energy map S over a lattice of r values"),
        ("verify", "compare the staged solver against the dense oracle"),
        ("audit", "run the solvability audit only"),
    ):
        cmd = sub.add_parser(name, help=blurb)
        cmd.add_argument("--config", required=True, help="TOML run file")
        cmd.add_argument("--out", default=None,
                         help="output directory (default: config out_dir or '.')")
        cmd.add_argument("--override-theory", action="store_true",
                         help="proceed even when the solvability audit fails")
        cmd.add_argument("--n", type=int, default=None,
                         help="override the interior grid size per axis")
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help/--version;
        # fold usage errors into the config-error code so that exit 2
        # unambiguously means "hypothesis audit failed".
        code = exc.code if isinstance(exc.code, int) else 1
        return EXIT_OK if code == 0 else EXIT_CONFIG
    try:
        config = load_config(args.config)
        if args.override_theory and not config.override_theory:
            config = dataclasses.replace(config, override_theory=True)
        if args.n is not None:
            config = dataclasses.replace(
                config, n=(int(args.n),) * config.domain.dim
            )
        grid = build_grid(config.domain, config.n)
        out_dir = Path(args.out or config.out_dir or ".")
        out_dir.mkdir(parents=True, exist_ok=True)
    except (ConfigError, GridError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot prepare output directory: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        return _COMMANDS[args.command](config, grid, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AuditError as exc:
        print(f"hypothesis failure: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except KirchhoffError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
