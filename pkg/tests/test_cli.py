import csv
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from emse_lab import cli
from emse_lab.state_evolution import FixedPointError


@pytest.fixture()
def runner():
    return CliRunner()


def read_csv(path: Path) -> list[dict]:
    with path.open() as fh:
        return list(csv.DictReader(fh))


class TestTables:
    def test_table1_check_passes(self, runner, tmp_path):
        result = runner.invoke(cli.main, ["table1", "--check", "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        rows = read_csv(tmp_path / "table1.csv")
        assert len(rows) == 5
        assert [r["theta_mismatch"] for r in rows] == ["0.11", "0.13", "0.15", "0.17", "0.2"]
        assert all(float(r["Delta"]) > 0 for r in rows)
        assert (tmp_path / "table1.png").exists()
        sidecar = json.loads((tmp_path / "table1.json").read_text())
        assert sidecar["check"]["passed"] is True

    def test_table2_check_passes(self, runner, tmp_path):
        result = runner.invoke(cli.main, ["table2", "--check", "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert len(read_csv(tmp_path / "table2.csv")) == 5

    def test_self_mismatch_row_reports_na(self, runner, tmp_path):
        config = {
            "experiment": "table1",
            "mismatch_thetas": [0.1],
            "out": str(tmp_path),
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(config))
        result = runner.invoke(cli.main, ["run", str(cfg_path)])
        assert result.exit_code == 0, result.output
        rows = read_csv(tmp_path / "table1.csv")
        assert rows[0]["rel_err_first"] == "n/a"
        assert float(rows[0]["Delta"]) == 0.0


class TestFig1:
    def test_default_check_passes(self, runner, tmp_path):
        result = runner.invoke(cli.main, ["fig1", "--check", "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        rows = read_csv(tmp_path / "fig1_curves.csv")
        assert len(rows) == 200
        assert set(rows[0]) == {"sigma2", "psi_p", "psi_q", "se_line"}
        sidecar = json.loads((tmp_path / "fig1.json").read_text())
        assert set(sidecar["points"]) == {"a", "b", "c"}
        a, b, c = (sidecar["points"][k] for k in "abc")
        assert a[0] == pytest.approx(0.27, abs=0.005)
        assert b[1] > c[1] > a[1]
        assert (tmp_path / "fig1.png").exists()

    def test_custom_grid_via_config(self, runner, tmp_path):
        config = {
            "experiment": "fig1",
            "grid": {"lo": 0.05, "hi": 0.5, "points": 16},
            "out": str(tmp_path),
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(config))
        result = runner.invoke(cli.main, ["run", str(cfg_path)])
        assert result.exit_code == 0, result.output
        assert len(read_csv(tmp_path / "fig1_curves.csv")) == 16


class TestAmpValidate:
    def test_small_run_writes_outputs(self, runner, tmp_path):
        result = runner.invoke(
            cli.main,
            ["amp-validate", "--n", "800", "--trials", "2", "--out", str(tmp_path)],
        )
        assert result.exit_code == 0, result.output
        summary = read_csv(tmp_path / "amp_validate_summary.csv")
        assert [r["config"] for r in summary] == ["bernoulli", "bernoulli_gaussian"]
        traces = read_csv(tmp_path / "amp_validate_traces.csv")
        assert {r["denoiser"] for r in traces} == {"matched", "postulated"}
        assert (tmp_path / "amp_validate.png").exists()


class TestRunConfig:
    def test_custom_experiment(self, runner, tmp_path):
        config = {
            "experiment": "custom",
            "name": "gaussian_pair",
            "true_prior": {"type": "gaussian", "mean": 0.0, "variance": 1.0},
            "postulated_priors": [
                {"type": "gaussian", "mean": 0.0, "variance": 2.0}
            ],
            "delta": 0.5,
            "sigma_z2": 0.1,
            "out": str(tmp_path),
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(config))
        result = runner.invoke(cli.main, ["run", str(cfg_path)])
        assert result.exit_code == 0, result.output
        rows = read_csv(tmp_path / "gaussian_pair.csv")
        assert len(rows) == 1
        assert float(rows[0]["Delta"]) > 0

    def test_check_failure_exits_one(self, runner, tmp_path):
        # shifting the measurement rate invalidates the embedded values
        config = {
            "experiment": "table1",
            "delta": 0.3,
            "check": True,
            "out": str(tmp_path),
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(config))
        result = runner.invoke(cli.main, ["run", str(cfg_path)])
        assert result.exit_code == 1
        sidecar = json.loads((tmp_path / "table1.json").read_text())
        assert sidecar["check"]["passed"] is False
        assert sidecar["check"]["failures"]

    def test_invalid_json_exits_two(self, runner, tmp_path):
        cfg_path = tmp_path / "broken.json"
        cfg_path.write_text("{not json")
        result = runner.invoke(cli.main, ["run", str(cfg_path)])
        assert result.exit_code == 2

    def test_unknown_experiment_exits_two(self, runner, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"experiment": "table9"}))
        result = runner.invoke(cli.main, ["run", str(cfg_path)])
        assert result.exit_code == 2

    def test_missing_config_exits_two(self, runner):
        result = runner.invoke(cli.main, ["run", "/nonexistent/cfg.json"])
        assert result.exit_code == 2

    def test_bad_eval_section_exits_two(self, runner, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(
            json.dumps({"experiment": "table1", "eval": {"quadrature_order": 2}})
        )
        result = runner.invoke(cli.main, ["run", str(cfg_path)])
        assert result.exit_code == 2


class TestNumericalFailure:
    def test_solver_error_exits_three(self, runner, tmp_path, monkeypatch):
        def explode(*args, **kwargs):
            raise FixedPointError("did not settle", [1.0, 2.0])

        monkeypatch.setattr(cli, "full_report", explode)
        result = runner.invoke(cli.main, ["table1", "--out", str(tmp_path)])
        assert result.exit_code == 3
