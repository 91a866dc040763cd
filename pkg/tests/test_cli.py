"""Integration tests for the command-line front end."""

import json
import subprocess
import sys

import numpy as np
import pytest

from qclink import cli, cloning


def run_cli(args, tmp_path, name):
    code = cli.main(list(args) + ["--outdir", str(tmp_path)])
    base = tmp_path / name
    return code, base.with_suffix(".csv"), base.with_suffix(".json")


class TestParse:
    def test_sweep_flags(self):
        cfg = cli.parse(["qkd", "sweep", "--d-min", "0", "--d-max", "0.4",
                         "--steps", "81", "--n-max", "30"])
        assert cfg.command == "qkd-sweep"
        assert cfg.params["d-min"] == 0.0
        assert cfg.params["d-max"] == 0.4
        assert cfg.params["steps"] == 81
        assert cfg.params["n-max"] == 30
        assert cfg.seed == 0

    def test_unknown_command_exits_one(self, capsys):
        assert cli.main(["warp", "drive"]) == 1
        assert cli.main(["qkd", "nonsense"]) == 1

    def test_invalid_parameter_names_it(self, tmp_path, capsys):
        code = cli.main(["distill", "classical", "--d", "0.9",
                         "--outdir", str(tmp_path)])
        assert code == 1
        assert "--d" in capsys.readouterr().err

    def test_missing_required_parameter(self, capsys):
        assert cli.main(["clone", "fidelity", "--n", "1"]) == 1
        assert "--m" in capsys.readouterr().err

    def test_config_file_with_flag_override(self, tmp_path):
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps(
            {"d": 0.2, "n": 4, "seed": 42}))
        cfg = cli.parse(["distill", "classical", "--config", str(cfg_path),
                         "--seed", "7"])
        assert cfg.params["d"] == 0.2
        assert cfg.params["n"] == 4
        assert cfg.seed == 7

    def test_config_file_unknown_key(self, tmp_path):
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps({"dee": 0.2}))
        with pytest.raises(cli.UsageError):
            cli.parse(["distill", "classical", "--config", str(cfg_path)])

    def test_outdir_env_default(self, tmp_path, monkeypatch):
        monkeypatch.setenv(cli.OUTDIR_ENV, str(tmp_path))
        cfg = cli.parse(["clone", "fidelity", "--n", "1", "--m", "2"])
        assert cfg.outdir == str(tmp_path)


class TestExitCodes:
    def test_success_is_zero(self, tmp_path):
        code, _, _ = run_cli(["clone", "fidelity", "--n", "1", "--m", "2"],
                             tmp_path, "clone-fidelity-0")
        assert code == 0

    def test_missing_input_file_is_one(self, tmp_path, capsys):
        code = cli.main(["clone", "fit", "--input", str(tmp_path / "no.csv"),
                         "--outdir", str(tmp_path)])
        assert code == 1
        assert "no.csv" in capsys.readouterr().err

    def test_numerical_failure_is_two_with_diagnostic(self, tmp_path):
        code, csv_path, json_path = run_cli(
            ["distill", "classical", "--d", "0.499", "--n", "60",
             "--trials", "10000"], tmp_path, "distill-classical-0")
        assert code == 2
        assert not csv_path.exists()
        diag = json.loads(json_path.read_text())
        assert "error" in diag and "accepted" in diag["error"]

    def test_exit_codes_through_real_process(self, tmp_path):
        calls = {
            0: ["clone", "fidelity", "--n", "2", "--m", "3",
                "--outdir", str(tmp_path)],
            1: ["clone", "fidelity", "--n", "2"],
            2: ["distill", "classical", "--d", "0.499", "--n", "60",
                "--trials", "10000", "--outdir", str(tmp_path)],
        }
        for expected, args in calls.items():
            proc = subprocess.run([sys.executable, "-m", "qclink"] + args,
                                  capture_output=True, text=True)
            assert proc.returncode == expected, proc.stderr


class TestReports:
    def test_thresholds_summary_values(self, tmp_path):
        code, csv_path, json_path = run_cli(
            ["qkd", "thresholds"], tmp_path, "qkd-thresholds-0")
        assert code == 0
        report = json.loads(json_path.read_text())
        assert report["summary"]["one_way"] == pytest.approx(0.1464, abs=1e-3)
        assert report["summary"]["chsh"] == pytest.approx(0.1464, abs=1e-3)
        assert report["summary"]["entanglement"] == pytest.approx(0.2929,
                                                                  abs=1e-3)
        assert report["config"]["seed"] == 0

    def test_clone_fidelity_value(self, tmp_path):
        code, csv_path, _ = run_cli(
            ["clone", "fidelity", "--n", "1", "--m", "2"], tmp_path,
            "clone-fidelity-0")
        assert code == 0
        header, row = csv_path.read_text().splitlines()
        assert header == "n,m,fidelity"
        assert float(row.split(",")[2]) == pytest.approx(5 / 6, abs=1e-12)

    def test_equivalence_columns(self, tmp_path):
        code, csv_path, _ = run_cli(
            ["distill", "equivalence", "--d-min", "0.2", "--d-max", "0.36",
             "--steps", "5", "--n-max", "10"], tmp_path,
            "distill-equivalence-0")
        assert code == 0
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "D,entangled,chsh,i_ab,i_ae,ad_min_block"
        assert len(lines) == 6
        # separable end has an empty block column
        assert lines[-1].endswith(",")

    def test_weak_profile_columns(self, tmp_path):
        code, csv_path, json_path = run_cli(
            ["weak", "profile", "--dtau", "0.3"], tmp_path, "weak-profile-0")
        assert code == 0
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "t,intensity_x,intensity_y,intensity_total"
        data = np.array([[float(v) for v in ln.split(",")]
                         for ln in lines[1:]])
        np.testing.assert_allclose(data[:, 1] + data[:, 2], data[:, 3],
                                   atol=1e-15)

    def test_weak_sweep_columns_and_slope(self, tmp_path):
        code, csv_path, json_path = run_cli(
            ["weak", "sweep", "--theta-pre", "0.96", "--pdl-db", "inf",
             "--pdl-axis", "0.17"], tmp_path, "weak-sweep-0")
        assert code == 0
        lines = csv_path.read_text().splitlines()
        assert lines[0] == ("dtau,tc,theta_pre,phi_pre,pdl_db,pdl_axis,"
                            "toa_exact,toa_weak,abs_error")
        report = json.loads(json_path.read_text())
        assert report["summary"]["weak_end_scaled_error_slope"] == \
            pytest.approx(2.0, abs=0.1)

    def test_weak_toa_routes_agree(self, tmp_path):
        code, _, json_path = run_cli(
            ["weak", "toa", "--dtau", "0.05", "--pdl-db", "15",
             "--pdl-axis", "0.9"], tmp_path, "weak-toa-0")
        assert code == 0
        summary = json.loads(json_path.read_text())["summary"]
        assert summary["toa_numeric"] == pytest.approx(summary["toa_closed"],
                                                       abs=1e-10)

    def test_clone_fit_roundtrip(self, tmp_path):
        data = cloning.generate_fidelity_dataset(
            0.8, np.logspace(np.log10(0.5), np.log10(50), 40),
            noise_sigma=0.003, seed=2)
        path = tmp_path / "records.csv"
        cloning.save_fidelity_csv(path, data)
        code, _, json_path = run_cli(
            ["clone", "fit", "--input", str(path)], tmp_path, "clone-fit-0")
        assert code == 0
        assert json.loads(json_path.read_text())["summary"]["q_hat"] == \
            pytest.approx(0.8, abs=0.02)

    def test_qkd_sweep_with_blocks(self, tmp_path):
        code, csv_path, _ = run_cli(
            ["qkd", "sweep", "--d-min", "0.05", "--d-max", "0.25",
             "--steps", "3", "--n-max", "12"], tmp_path, "qkd-sweep-0")
        assert code == 0
        lines = csv_path.read_text().splitlines()
        assert lines[0].endswith(",ad_min_block")
        assert lines[1].endswith(",1")


class TestDeterminism:
    def test_identical_runs_identical_csv(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        for sub in (a, b):
            code = cli.main(["distill", "classical", "--d", "0.2", "--n", "4",
                             "--trials", "20000", "--seed", "123",
                             "--outdir", str(sub)])
            assert code == 0
        name = "distill-classical-123.csv"
        assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_seed_named_in_outputs(self, tmp_path):
        code = cli.main(["clone", "mc", "--n", "1", "--m", "3",
                         "--seed", "5", "--outdir", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "clone-mc-5.csv").exists()
        report = json.loads((tmp_path / "clone-mc-5.json").read_text())
        assert report["config"]["seed"] == 5

    def test_csv_flag_disables_table(self, tmp_path):
        code = cli.main(["clone", "fidelity", "--n", "1", "--m", "2",
                         "--no-csv", "--outdir", str(tmp_path)])
        assert code == 0
        assert not (tmp_path / "clone-fidelity-0.csv").exists()
        assert (tmp_path / "clone-fidelity-0.json").exists()

    def test_full_precision_numbers(self, tmp_path):
        code, csv_path, _ = run_cli(
            ["clone", "fidelity", "--n", "1", "--m", "2"], tmp_path,
            "clone-fidelity-0")
        value = csv_path.read_text().splitlines()[1].split(",")[2]
        assert float(value) == 5 / 6  # round-trips exactly
