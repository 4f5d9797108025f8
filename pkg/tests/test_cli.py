import csv
import io
import json

import numpy as np
import pytest

from paneitz.cli import main
from paneitz.field import PeriodicField, save_field
from paneitz.geometry import ManifoldSpec


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestConstantsCommand:
    def test_json_payload(self, capsys):
        code, out, _ = run_cli(capsys, "constants", "--dim", "5")
        assert code == 0
        payload = json.loads(out)
        assert set(payload) == {"n", "two_sharp", "K0", "K0_inv_sq", "c_n"}
        assert payload["n"] == 5
        assert payload["two_sharp"] == 10.0
        assert payload["K0_inv_sq"] == pytest.approx(102.37, rel=1e-3)
        assert payload["c_n"] == pytest.approx(105 ** (1 / 8), rel=1e-12)

    def test_determinism(self, capsys):
        _, out1, _ = run_cli(capsys, "constants", "--dim", "7")
        _, out2, _ = run_cli(capsys, "constants", "--dim", "7")
        assert out1 == out2

    def test_bad_dim_is_domain_error(self, capsys):
        code, _, err = run_cli(capsys, "constants", "--dim", "4")
        assert code == 1
        assert "5" in err


class TestBubbleCheckCommand:
    def test_payload(self, capsys):
        # the n=5 profile decays slowly, so the identity check at finite
        # truncation radius legitimately warns
        with pytest.warns(RuntimeWarning, match="slow decay"):
            code, out, _ = run_cli(capsys, "bubble-check", "--dim", "5")
        assert code == 0
        payload = json.loads(out)
        assert payload["residual_sup"] <= 1e-10
        assert payload["energy"] == pytest.approx(payload["energy_expected"], rel=1e-6)
        assert abs(payload["pohozaev_residual"]) < 0.2


class TestSolveCommand:
    def test_auto_schedule_and_output(self, capsys, tmp_path):
        out_path = tmp_path / "sol.field"
        code, out, _ = run_cli(
            capsys,
            "solve", "--dim", "5", "--t", "1", "--alpha", "8", "--a", "auto",
            "--init", "constant", "--field-out", str(out_path),
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["a_alpha"] == 16.0  # auto = alpha^2/4
        assert payload["is_constant"] is True
        assert payload["residual_sup"] <= 1e-10
        assert out_path.exists()

    def test_schedule_violation_rejected(self, capsys):
        code, _, err = run_cli(capsys, "solve", "--dim", "5", "--alpha", "2", "--a", "2")
        assert code == 1
        assert "alpha^2/4" in err

    def test_unknown_flag_lists_usage(self, capsys):
        code, _, err = run_cli(capsys, "solve", "--dim", "5", "--alpha", "2", "--bogus", "1")
        assert code == 1
        assert "usage" in err

    def test_numerical_failure_exit_code(self, capsys, tmp_path):
        # a wildly under-resolved, iteration-starved solve cannot converge
        spec = ManifoldSpec(5, 1.0)
        u = PeriodicField.from_function(
            spec,
            lambda s: 0.3 + 4.0 * np.exp(-60 * np.minimum(s, spec.period - s) ** 2),
            16,
        )
        path = tmp_path / "seed.field"
        save_field(u, path)
        import paneitz.cli as cli_mod
        from paneitz.solver import SolverOptions

        original = cli_mod.SolverOptions
        cli_mod.SolverOptions = lambda modes: original(
            modes=modes, max_iter=1, adapt_modes=False, max_backtracks=1
        )
        try:
            code, _, err = run_cli(
                capsys,
                "solve", "--dim", "5", "--alpha", "8", "--a", "auto",
                "--init", "file", "--field-in", str(path), "--modes", "16",
            )
        finally:
            cli_mod.SolverOptions = original
        assert code == 2
        assert "numerical failure" in err


class TestSweepCommand:
    def test_csv_file(self, capsys, tmp_path):
        out = tmp_path / "sweep.csv"
        code, _, _ = run_cli(
            capsys,
            "sweep", "--dim", "5", "--t", "1", "--alpha", "2:8:3:log",
            "--out", str(out), "--format", "csv",
        )
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        assert [float(r["alpha"]) for r in rows] == pytest.approx([2.0, 4.0, 8.0])
        assert rows[0]["is_nonconstant"] == "true"

    def test_json_to_stdout(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--dim", "5", "--alpha", "2:4:2:log", "--format", "json"
        )
        assert code == 0
        payload = json.loads(out)
        assert len(payload) == 2

    def test_schedule_file(self, capsys, tmp_path):
        sched = tmp_path / "schedule.txt"
        sched.write_text("2.0 1.0\n4.0 4.0\n")
        out = tmp_path / "s.csv"
        code, _, _ = run_cli(
            capsys, "sweep", "--dim", "5", "--schedule", str(sched),
            "--out", str(out), "--format", "csv",
        )
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        assert [float(r["a_alpha"]) for r in rows] == [1.0, 4.0]

    def test_schedule_file_violating_bound_rejected(self, capsys, tmp_path):
        sched = tmp_path / "bad.txt"
        sched.write_text("2.0 2.0\n4.0 4.0\n")
        code, _, err = run_cli(
            capsys, "sweep", "--dim", "5", "--schedule", str(sched), "--format", "json"
        )
        assert code == 1
        assert "alpha^2/4" in err

    def test_csv_requires_out(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--dim", "5", "--alpha", "2:4:2")
        assert code == 1
        assert "--out" in err

    def test_default_grid_is_log_spaced(self, capsys):
        # omitting --alpha sweeps the canonical log grid 2..128
        code, out, _ = run_cli(capsys, "sweep", "--dim", "5", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert len(payload) == 7
        assert payload[0]["alpha"] == pytest.approx(2.0)
        assert payload[-1]["alpha"] == pytest.approx(128.0)

    def test_byte_identical_reruns(self, capsys, tmp_path):
        args = ("sweep", "--dim", "5", "--alpha", "2:4:2:log", "--out")
        f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
        run_cli(capsys, *args, str(f1))
        run_cli(capsys, *args, str(f2))
        assert f1.read_bytes() == f2.read_bytes()


class TestDiagnoseCommand:
    def test_report(self, capsys, tmp_path):
        spec = ManifoldSpec(5, 1.0)
        u = PeriodicField.from_function(
            spec,
            lambda s: 1.0 + np.exp(-20 * np.minimum(s, spec.period - s) ** 2),
            256,
        )
        path = tmp_path / "u.field"
        save_field(u, path)
        code, out, _ = run_cli(
            capsys, "diagnose", str(path), "--alpha", "2.0", "--a", "1.0"
        )
        assert code == 0
        payload = json.loads(out)
        assert 0.0 <= payload["R_L2"] <= 1.0
        assert 0.0 <= payload["R_gradL2"] <= 1.0
        assert payload["grad_ratios_defined"] is True
        assert payload["hessian_ratio_over_a"] == pytest.approx(
            payload["hessian_ratio"] / 1.0
        )

    def test_missing_file_is_domain_error(self, capsys):
        code, _, err = run_cli(capsys, "diagnose", "missing.field", "--alpha", "2")
        assert code == 1
        assert "missing.field" in err


class TestHelp:
    @pytest.mark.parametrize(
        "cmd", ["constants", "bubble-check", "solve", "sweep", "diagnose"]
    )
    def test_subcommand_help(self, capsys, cmd):
        code, out, _ = run_cli(capsys, cmd, "--help")
        assert code == 0
        assert "--" in out or "usage" in out
