"""Run-file parsing and the command-line front end with its artifacts."""

import csv
import json
import math

import numpy as np
import pytest

from kirchhoff.cli import (
    EXIT_CONFIG,
    EXIT_HYPOTHESIS,
    EXIT_OK,
    EXIT_SOLVER,
    SCHEMA_VERSION,
    TRACE_COLUMNS,
    main,
)
from kirchhoff.config import load_config, parse_config_text
from kirchhoff.errors import ConfigError
from kirchhoff.source import SourceKind

PI = math.pi

BENCHMARK = """
label = "cubic"

[domain]
x = [0.0, 3.141592653589793]

[grid]
n = 64

[coefficient]
kind = "affine_r"
a = 1.0
b = 1.0

[source]
kind = "pure_x"
f = "sin(x)"
mu_bound = 1.0

[fixedpoint]
tol = 1.0e-9
r_values = [0.0, 0.1, 0.2, 0.3, 0.4]

[run]
seed = 53
"""

STATE_COUPLED = """
[domain]
x = [0.0, 3.141592653589793]

[grid]
n = 24

[coefficient]
kind = "constant"
value = 1.0

[source]
kind = "x_and_u"
f = "sin(x) + 0.1*tanh(t)"
mu_bound = 1.0
nu = 0.1
delta = 1.0
theta = 0.1
"""

ZERO_AT_REST = """
[domain]
x = [0.0, 3.141592653589793]

[grid]
n = 16

[coefficient]
kind = "constant"
value = 1.0

[source]
kind = "x_and_u"
f = "t"
mu_bound = 1.0
nu = 1.0
delta = 1.0
theta = 0.5
"""


def _write(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestConfigParsing:
    def test_benchmark_round_trip(self):
        config = parse_config_text(BENCHMARK)
        assert config.label == "cubic"
        assert config.domain.dim == 1
        assert config.n == (64,)
        assert config.coefficient.m_floor == 1.0
        assert config.source.kind is SourceKind.PURE_X
        assert config.fixed_point_tol == 1e-9
        assert config.r_values == (0.0, 0.1, 0.2, 0.3, 0.4)
        assert config.seed == 53
        assert not config.override_theory
        assert len(config.sha256) == 64

    def test_solver_defaults(self):
        config = parse_config_text(BENCHMARK)
        assert config.poisson_tol == 1e-12
        assert config.newton_tol == 1e-9
        assert config.picard_tol == 1e-10
        assert config.max_picard == 500

    def test_rectangle_domain_and_grid_list(self):
        config = parse_config_text(
            """
            [domain]
            x = [0.0, 3.141592653589793]
            y = [0.0, 1.0]

            [grid]
            n = [8, 6]

            [coefficient]
            kind = "constant"
            value = 2.0

            [source]
            kind = "pure_x"
            f = "sin(x)*y"
            mu_bound = 1.0
            """
        )
        assert config.domain.dim == 2
        assert config.n == (8, 6)

    def test_lattice_from_start_stop_step(self):
        config = parse_config_text(
            BENCHMARK.replace(
                "r_values = [0.0, 0.1, 0.2, 0.3, 0.4]",
                "r_start = 0.0\nr_stop = 2.0\nr_step = 0.1",
            )
        )
        assert len(config.r_values) == 21
        assert config.r_values[0] == 0.0
        assert config.r_values[-1] == pytest.approx(2.0)

    def test_expression_coefficient(self):
        config = parse_config_text(
            BENCHMARK.replace(
                'kind = "affine_r"\na = 1.0\nb = 1.0',
                'kind = "expression"\nexpression = "1 + r*exp(-t^2)"\nm_floor = 1.0',
            )
        )
        assert config.coefficient.big_M(0.0, 5.0) == 0.0
        assert config.coefficient.m_floor == 1.0

    def test_missing_key_names_the_key(self):
        with pytest.raises(ConfigError, match="source.mu_bound"):
            parse_config_text(BENCHMARK.replace("mu_bound = 1.0", ""))

    def test_invalid_toml_reported_as_config_error(self):
        with pytest.raises(ConfigError, match="TOML"):
            parse_config_text("label = [unclosed")

    def test_unknown_coefficient_kind(self):
        with pytest.raises(ConfigError, match="coefficient.kind"):
            parse_config_text(BENCHMARK.replace('"affine_r"', '"mystery"'))

    def test_low_integrability_exponent_rejected(self):
        text = """
        [domain]
        x = [0.0, 1.0]
        y = [0.0, 1.0]

        [grid]
        n = 6

        [coefficient]
        kind = "constant"
        value = 1.0

        [source]
        kind = "pure_x"
        f = "x*y"
        mu_bound = 1.0
        q = 1.0
        """
        with pytest.raises(ConfigError, match="source.q"):
            parse_config_text(text)

    def test_pure_load_must_not_declare_state_constants(self):
        with pytest.raises(ConfigError, match="source.nu"):
            parse_config_text(BENCHMARK.replace("mu_bound = 1.0",
                                                "mu_bound = 1.0\nnu = 0.5"))

    def test_descending_r_values_rejected(self):
        with pytest.raises(ConfigError, match="ascending"):
            parse_config_text(BENCHMARK.replace("[0.0, 0.1, 0.2, 0.3, 0.4]",
                                                "[0.3, 0.1]"))

    def test_nonpositive_tolerance_rejected(self):
        with pytest.raises(ConfigError, match="fixedpoint.tol"):
            parse_config_text(BENCHMARK.replace("tol = 1.0e-9", "tol = 0.0"))

    def test_label_falls_back_to_source_label(self):
        config = parse_config_text(BENCHMARK.replace('label = "cubic"\n', ""))
        assert "sin" in config.label

    def test_load_config_hashes_the_bytes(self, tmp_path):
        path = _write(tmp_path, BENCHMARK)
        config = load_config(path)
        import hashlib

        assert config.sha256 == hashlib.sha256(path.read_bytes()).hexdigest()

    def test_load_config_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.toml")


class TestCliSolve:
    def test_solve_writes_the_three_artifacts(self, tmp_path):
        path = _write(tmp_path, BENCHMARK)
        out = tmp_path / "out"
        code = main(["solve", "--config", str(path), "--out", str(out)])
        assert code == EXIT_OK
        report = json.loads((out / "report.json").read_text())
        assert report["schema"] == SCHEMA_VERSION
        assert report["command"] == "solve"
        assert report["config"]["sha256"] == load_config(path).sha256
        assert report["audit"]["overall"] == "pass"
        assert report["fixed_point"]["gap"] <= 1e-9
        assert report["solution"]["r"] == pytest.approx(0.2976523816617176,
                                                        abs=1e-8)
        with (out / "solution.csv").open() as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["x", "u", "w", "v", "f"]
        assert len(rows) - 1 == 64
        with (out / "trace.csv").open() as fh:
            trace_rows = list(csv.reader(fh))
        assert trace_rows[0] == list(TRACE_COLUMNS)

    def test_report_is_reproducible_up_to_timestamp(self, tmp_path):
        path = _write(tmp_path, BENCHMARK)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["solve", "--config", str(path), "--out", str(out_a)]) == EXIT_OK
        assert main(["solve", "--config", str(path), "--out", str(out_b)]) == EXIT_OK
        rep_a = json.loads((out_a / "report.json").read_text())
        rep_b = json.loads((out_b / "report.json").read_text())
        rep_a.pop("created_at"), rep_b.pop("created_at")
        assert rep_a == rep_b
        assert (out_a / "solution.csv").read_text() == (out_b / "solution.csv").read_text()

    def test_grid_override_flag(self, tmp_path):
        path = _write(tmp_path, BENCHMARK)
        out = tmp_path / "out"
        assert main(["solve", "--config", str(path), "--out", str(out),
                     "--n", "32"]) == EXIT_OK
        report = json.loads((out / "report.json").read_text())
        assert report["grid"]["n"] == [32]

    def test_solution_csv_reconstructs_the_field(self, tmp_path):
        path = _write(tmp_path, BENCHMARK)
        out = tmp_path / "out"
        main(["solve", "--config", str(path), "--out", str(out)])
        data = np.genfromtxt(out / "solution.csv", delimiter=",", names=True)
        # u ≈ sin(x)/(2 + r*) on this benchmark
        r_star = json.loads((out / "report.json").read_text())["solution"]["r"]
        np.testing.assert_allclose(
            data["u"], np.sin(data["x"]) / (2.0 + r_star), atol=5e-4
        )
        np.testing.assert_allclose(data["f"], np.sin(data["x"]), atol=1e-12)


class TestCliSweepVerifyAudit:
    def test_sweep_writes_the_curve(self, tmp_path):
        text = BENCHMARK.replace(
            "r_values = [0.0, 0.1, 0.2, 0.3, 0.4]",
            "r_start = 0.0\nr_stop = 2.0\nr_step = 0.1",
        ).replace('kind = "affine_r"\na = 1.0\nb = 1.0',
                  'kind = "constant"\nvalue = 1.0')
        path = _write(tmp_path, text)
        out = tmp_path / "out"
        assert main(["sweep", "--config", str(path), "--out", str(out)]) == EXIT_OK
        with (out / "scurve.csv").open() as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["r", "S", "sweeps", "newton_iterations",
                           "flag_count", "min_slack"]
        assert len(rows) - 1 == 21
        s_column = [float(row[1]) for row in rows[1:]]
        assert max(s_column) - min(s_column) <= 1e-12

    def test_sweep_without_lattice_is_a_config_error(self, tmp_path):
        text = BENCHMARK.replace("r_values = [0.0, 0.1, 0.2, 0.3, 0.4]\n", "")
        path = _write(tmp_path, text)
        assert main(["sweep", "--config", str(path),
                     "--out", str(tmp_path / "out")]) == EXIT_CONFIG

    def test_verify_reports_oracle_gaps(self, tmp_path):
        path = _write(tmp_path, BENCHMARK)
        out = tmp_path / "out"
        assert main(["verify", "--config", str(path), "--out", str(out),
                     "--n", "16"]) == EXIT_OK
        report = json.loads((out / "report.json").read_text())
        assert report["comparison"]["gap_u_linf"] <= 1e-7
        assert report["comparison"]["gap_r"] <= 1e-7
        assert report["oracle_residuals"]["weak_form_defect"] <= 1e-9

    def test_audit_passes_quietly(self, tmp_path):
        path = _write(tmp_path, STATE_COUPLED)
        out = tmp_path / "out"
        assert main(["audit", "--config", str(path), "--out", str(out)]) == EXIT_OK
        report = json.loads((out / "report.json").read_text())
        assert report["audit"]["overall"] == "pass_surrogate_gamma"

    def test_audit_failure_exits_two(self, tmp_path):
        path = _write(tmp_path, ZERO_AT_REST)
        out = tmp_path / "out"
        assert main(["audit", "--config", str(path),
                     "--out", str(out)]) == EXIT_HYPOTHESIS
        report = json.loads((out / "report.json").read_text())
        assert report["audit"]["f1_pass"] is False
        assert report["audit"]["overall"] == "fail"

    def test_solve_respects_the_gate_and_the_override(self, tmp_path):
        path = _write(tmp_path, ZERO_AT_REST)
        out = tmp_path / "out"
        assert main(["solve", "--config", str(path),
                     "--out", str(out)]) == EXIT_HYPOTHESIS
        # overridden, the solve proceeds and then fails honestly: a load
        # vanishing at rest cannot bracket a positive fixed point
        assert main(["solve", "--config", str(path), "--out", str(out),
                     "--override-theory"]) == EXIT_SOLVER


class TestCliErrors:
    def test_missing_config_file(self, tmp_path):
        assert main(["solve", "--config", str(tmp_path / "no.toml")]) == EXIT_CONFIG

    def test_malformed_config(self, tmp_path):
        path = _write(tmp_path, "not really toml [", name="bad.toml")
        assert main(["solve", "--config", str(path)]) == EXIT_CONFIG

    def test_usage_error_maps_to_config_exit(self):
        assert main(["solve"]) == EXIT_CONFIG
        assert main(["frobnicate", "--config", "x"]) == EXIT_CONFIG

    def test_help_exits_zero(self):
        assert main(["--help"]) == EXIT_OK
