"""Command line behavior: exit codes, config merging, deterministic output."""

import json
import math

import pytest

from semiclab.cli import main


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:
    def test_malformed_observable_is_a_config_error(self, capsys):
        code, _, err = run_cli(capsys, [
            "measure", "--model", "quad-max", "--h", "0.05", "--obs", "x^"])
        assert code == 4
        assert "offset 2" in err

    def test_unknown_model(self, capsys):
        code, _, err = run_cli(capsys, [
            "scan", "--model", "nope", "--h-from", "0.1", "--h-to", "0.05",
            "--h-steps", "3"])
        assert code == 4
        assert "unknown model" in err

    def test_unknown_subcommand(self, capsys):
        code, _, _ = run_cli(capsys, ["frobnicate"])
        assert code == 4

    def test_no_subcommand(self, capsys):
        code, _, _ = run_cli(capsys, [])
        assert code == 4

    def test_missing_required_option(self, capsys):
        code, _, err = run_cli(capsys, ["spectrum", "--model", "harmonic"])
        assert code == 4
        assert "h" in err

    def test_unknown_scenario(self, capsys):
        code, _, err = run_cli(capsys, ["scenario", "run", "no-such-thing"])
        assert code == 4
        assert "harmonic-weyl" in err

    def test_critical_energy_refused_without_flag(self, capsys):
        code, _, _ = run_cli(capsys, [
            "liouville", "--model", "quad-max", "--obs", "1",
            "--energy", "0.0"])
        assert code == 4


class TestConfigFile:
    def test_file_supplies_options(self, capsys, tmp_path):
        conf = tmp_path / "run.conf"
        conf.write_text("model=harmonic\nh=0.04\necenter=1.0\nppw=160\n")
        code, out, _ = run_cli(capsys, ["spectrum", "--config", str(conf)])
        assert code == 0
        assert "# model=harmonic" in out
        assert "# h=0.04" in out

    def test_flags_override_file(self, capsys, tmp_path):
        conf = tmp_path / "run.conf"
        conf.write_text("model=harmonic\nh=0.04\necenter=1.0\n")
        code, out, _ = run_cli(capsys, [
            "spectrum", "--config", str(conf), "--h", "0.02"])
        assert code == 0
        assert "# h=0.02" in out

    def test_unknown_key_rejected(self, capsys, tmp_path):
        conf = tmp_path / "run.conf"
        conf.write_text("model=harmonic\nh=0.04\nwat=1\n")
        code, _, err = run_cli(capsys, ["spectrum", "--config", str(conf)])
        assert code == 4
        assert "wat" in err

    def test_malformed_line_rejected(self, capsys, tmp_path):
        conf = tmp_path / "run.conf"
        conf.write_text("model harmonic\n")
        code, _, err = run_cli(capsys, ["spectrum", "--config", str(conf)])
        assert code == 4
        assert "key=value" in err


class TestModels:
    def test_list_covers_catalog(self, capsys):
        code, out, _ = run_cli(capsys, ["models", "list"])
        assert code == 0
        for name in ("harmonic", "deg-max", "quad-max", "quad-max-steep",
                     "two-max", "radial-deg", "pseudo-k3", "pseudo-k4"):
            assert name in out
        assert "E_c=" in out


class TestSpectrum:
    def test_csv_shape_and_echo(self, capsys):
        code, out, _ = run_cli(capsys, [
            "spectrum", "--model", "harmonic", "--h", "0.04",
            "--ecenter", "1.0", "--ppw", "160"])
        assert code == 0
        lines = out.strip().splitlines()
        assert "# command=spectrum" in lines
        header = next(l for l in lines if not l.startswith("#"))
        assert header == "j,eigenvalue"
        data = [l for l in lines if not l.startswith("#")][1:]
        assert len(data) == 5
        eigs = [float(l.split(",")[1]) for l in data]
        for j, lam in enumerate(eigs):
            assert lam == pytest.approx((2 * j + 21) * 0.04, rel=1e-3)

    def test_deterministic_bytes(self, capsys, tmp_path):
        argv = ["spectrum", "--model", "quad-max", "--h", "0.05"]
        f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(argv + ["--out", str(f1)]) == 0
        assert main(argv + ["--out", str(f2)]) == 0
        capsys.readouterr()
        assert f1.read_bytes() == f2.read_bytes()

    def test_radial_rows_carry_channel_index(self, capsys):
        code, out, _ = run_cli(capsys, [
            "spectrum", "--model", "radial-deg", "--h", "0.05"])
        assert code == 0
        lines = [l for l in out.strip().splitlines() if not l.startswith("#")]
        assert lines[0] == "m,weight,j,eigenvalue"
        assert len(lines) > 1

    def test_grid_override_needs_both_flags(self, capsys):
        code, _, err = run_cli(capsys, [
            "spectrum", "--model", "harmonic", "--h", "0.04", "--n", "512"])
        assert code == 4
        assert "box" in err


class TestMeasure:
    def test_json_config_echo_and_records(self, capsys):
        code, out, _ = run_cli(capsys, [
            "measure", "--model", "quad-max", "--h", "0.05",
            "--obs", "exp(-x^2-xi^2)"])
        assert code == 0
        payload = json.loads(out)
        assert payload["config"]["command"] == "measure"
        assert payload["config"]["model"] == "quad-max"
        assert payload["config"]["quantization"] == "both"
        assert payload["records"]
        rec = payload["records"][0]
        assert {"nu_weyl", "nu_antiwick", "gap", "eigenvalue"} <= set(rec)

    def test_quantization_filter(self, capsys):
        code, out, _ = run_cli(capsys, [
            "measure", "--model", "quad-max", "--h", "0.05",
            "--obs", "x^2", "--quantization", "weyl"])
        assert code == 0
        rec = json.loads(out)["records"][0]
        assert "nu_weyl" in rec and "nu_antiwick" not in rec

    def test_radial_rejects_phase_space_observables(self, capsys):
        code, _, err = run_cli(capsys, [
            "measure", "--model", "radial-deg", "--h", "0.05",
            "--obs", "xi^2"])
        assert code == 4
        assert "xi" in err


class TestLiouville:
    def test_radial_average(self, capsys):
        code, out, _ = run_cli(capsys, [
            "liouville", "--model", "radial-deg", "--obs", "exp(-x^2)",
            "--energy", "0.0", "--allow-critical"])
        assert code == 0
        payload = json.loads(out)
        assert not payload["divergent"]
        assert payload["average"] == pytest.approx(1.0 - math.exp(-1.0),
                                                   abs=1e-6)

    def test_divergent_surface_reported(self, capsys):
        code, out, _ = run_cli(capsys, [
            "liouville", "--model", "quad-max", "--obs", "1",
            "--energy", "0.0", "--allow-critical"])
        assert code == 0
        payload = json.loads(out)
        assert payload["divergent"] is True
        assert payload["average"] is None


class TestScanFit:
    def test_roundtrip_critical_fit(self, capsys, tmp_path):
        csv_path = tmp_path / "scan.csv"
        code = main(["scan", "--model", "deg-max", "--h-from", "0.1",
                     "--h-to", "0.01", "--h-steps", "8", "--ecenter", "0",
                     "--out", str(csv_path)])
        assert code == 0
        code, out, _ = run_cli(capsys, ["fit", "--in", str(csv_path),
                                        "--law", "critical"])
        assert code == 0
        payload = json.loads(out)
        assert payload["law"] == "schrodinger_critical"
        assert payload["alpha_hat"] == pytest.approx(-0.25)
        assert payload["beta_hat"] == 0
        for key in ("alpha_hat", "beta_hat", "coeff_hat", "residual", "law",
                    "config"):
            assert key in payload

    def test_fit_regular_on_harmonic(self, capsys, tmp_path):
        csv_path = tmp_path / "scan.csv"
        code = main(["scan", "--model", "harmonic", "--h-from", "0.1",
                     "--h-to", "0.01", "--h-steps", "6", "--ecenter", "1.0",
                     "--out", str(csv_path)])
        assert code == 0
        code, out, _ = run_cli(capsys, ["fit", "--in", str(csv_path),
                                        "--law", "regular"])
        assert code == 0
        payload = json.loads(out)
        assert payload["law"] == "regular_weyl"
        assert payload["alpha_hat"] == pytest.approx(0.0)
        assert payload["coeff_hat"] == pytest.approx(5.0, rel=0.1)

    def test_fit_missing_file(self, capsys):
        code, _, err = run_cli(capsys, ["fit", "--in", "/no/such/file.csv"])
        assert code == 4
        assert "cannot read" in err


class TestScenario:
    def test_harmonic_weyl_verdict(self, capsys):
        code, out, _ = run_cli(capsys, ["scenario", "run", "harmonic-weyl"])
        assert code == 0
        payload = json.loads(out)
        assert payload["scenario"] == "harmonic-weyl"
        assert payload["passed"] is True
        names = [c["name"] for c in payload["checks"]]
        assert "window_count" in names and "eigenvalue_accuracy" in names
        assert all(c["passed"] for c in payload["checks"])
        assert payload["config"]["model"] == "harmonic"

    def test_verdict_bytes_deterministic(self, capsys, tmp_path):
        f1, f2 = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["scenario", "run", "two-wells", "--out", str(f1)]) == 0
        assert main(["scenario", "run", "two-wells", "--out", str(f2)]) == 0
        capsys.readouterr()
        assert f1.read_bytes() == f2.read_bytes()
