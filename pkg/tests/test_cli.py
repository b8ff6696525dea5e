import math

import numpy as np
import pytest

from sqreadout import cli, ies


def run_cli(args):
    return cli.main(list(args))


def parse_kv(text):
    out = {}
    for line in text.strip().splitlines():
        key, _, value = line.partition("=")
        out[key] = value
    return out


class TestSnrCommand:
    def test_combined_headline(self, tmp_path):
        out = tmp_path / "rec.txt"
        assert run_cli(["snr", "--scheme", "combined", "-o", str(out)]) == 0
        rec = parse_kv(out.read_text())
        assert float(rec["snr"]) == pytest.approx(5.549, abs=0.01)
        assert float(rec["omega_sq"]) == pytest.approx(5.6943, abs=1e-3)
        assert float(rec["n_critical"]) == 100.0

    def test_standard_point(self, tmp_path):
        out = tmp_path / "rec.txt"
        assert run_cli(["snr", "--scheme", "standard", "-o", str(out)]) == 0
        rec = parse_kv(out.read_text())
        assert float(rec["snr"]) == pytest.approx(0.1826, abs=1e-3)

    def test_ics_zero_drive_matches_standard(self, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        run_cli(["snr", "--scheme", "ics", "--omega-2ph", "0", "-o", str(a)])
        run_cli(["snr", "--scheme", "standard", "-o", str(b)])
        ra, rb = parse_kv(a.read_text()), parse_kv(b.read_text())
        for key in ("snr", "separation", "noise_sum", "error"):
            assert float(ra[key]) == pytest.approx(float(rb[key]), rel=1e-9)

    def test_kappa_tau_flag(self, tmp_path):
        out = tmp_path / "rec.txt"
        run_cli(["snr", "--scheme", "standard", "--kappa", "2", "--kappa-tau", "1",
                 "-o", str(out)])
        rec = parse_kv(out.read_text())
        assert float(rec["tau"]) == pytest.approx(0.5)
        assert float(rec["kappa_tau"]) == pytest.approx(1.0)


class TestExitCodes:
    def test_config_error_unknown_scheme(self, capsys):
        assert run_cli(["snr", "--config", "/nonexistent/readout.ini"]) == 2

    def test_stability_error(self):
        assert run_cli(["snr", "--scheme", "ics", "--chi", "0",
                        "--omega-2ph", "0.3"]) == 3

    def test_sweep_count_too_small(self):
        assert run_cli(["sweep", "--scheme", "standard", "--var", "chi",
                        "--start", "0.1", "--stop", "1.0", "--count", "1"]) == 2

    def test_sweep_unknown_variable(self):
        assert run_cli(["sweep", "--scheme", "standard", "--var", "banana",
                        "--start", "0.1", "--stop", "1.0", "--count", "3"]) == 2

    def test_unknown_figure(self):
        with pytest.raises(SystemExit) as err:
            run_cli(["figure", "fig99"])
        assert err.value.code == 2

    def test_solver_error_exit_code(self, monkeypatch):
        from sqreadout import combined
        from sqreadout.core import BracketError

        def no_root(*args, **kwargs):
            raise BracketError("no sign change")

        monkeypatch.setattr(combined, "solve_omega_sq", no_root)
        assert run_cli(["snr", "--scheme", "combined"]) == 4

    def test_oracle_error_exit_code(self, monkeypatch):
        from sqreadout import oracle
        from sqreadout.core import OracleConvergenceError

        def diverges(*args, **kwargs):
            raise OracleConvergenceError("stuck")

        monkeypatch.setattr(oracle, "oracle_check", diverges)
        assert run_cli(["oracle-check", "--scheme", "standard"]) == 5


class TestConfigFile:
    def test_sections_and_override(self, tmp_path):
        cfg = tmp_path / "readout.ini"
        cfg.write_text("""
[readout]
scheme = ies
kappa = 1.0
chi = 0.5
alpha_in = 1.0
tau = 1.0

[ies]
r = 0.5
varphi = 3.141592653589793
""")
        out = tmp_path / "rec.txt"
        assert run_cli(["snr", "--config", str(cfg), "-o", str(out)]) == 0
        rec = parse_kv(out.read_text())
        assert float(rec["r"]) == 0.5
        out2 = tmp_path / "rec2.txt"
        assert run_cli(["snr", "--config", str(cfg), "--r", "0.9",
                        "-o", str(out2)]) == 0
        assert float(parse_kv(out2.read_text())["r"]) == 0.9


class TestSweep:
    def test_deterministic_and_parallel_agree(self, tmp_path):
        args = ["sweep", "--scheme", "standard", "--var", "kappa_tau",
                "--start", "0.2", "--stop", "2.0", "--count", "5",
                "--spacing", "log"]
        a, b, c = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
        assert run_cli(args + ["-o", str(a), "--jobs", "1"]) == 0
        assert run_cli(args + ["-o", str(b), "--jobs", "1"]) == 0
        assert run_cli(args + ["-o", str(c), "--jobs", "2"]) == 0
        assert a.read_bytes() == b.read_bytes() == c.read_bytes()

    def test_sweep_values_spacing(self):
        lin = cli.sweep_values(0.0, 1.0, 5, "linear")
        assert lin == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
        log = cli.sweep_values(0.1, 10.0, 3, "log")
        assert log == pytest.approx([0.1, 1.0, 10.0])

    def test_mismatch_sweep(self, tmp_path):
        out = tmp_path / "mm.csv"
        assert run_cli(["sweep", "--scheme", "combined", "--var", "delta_p",
                        "--start", "0.0", "--stop", "0.1", "--count", "3",
                        "--delta-r", "0.1", "-o", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 4
        header = lines[0].split(",")
        snrs = [float(line.split(",")[header.index("snr")]) for line in lines[1:]]
        assert snrs[0] > snrs[-1]


class TestFigureCommand:
    def test_fig2b_values(self, tmp_path):
        assert run_cli(["figure", "fig2b", "--output-dir", str(tmp_path)]) == 0
        path = tmp_path / "fig2b.csv"
        header, *rows = path.read_text().strip().splitlines()
        cols = header.split(",")
        table = {c: [float(r.split(",")[i]) for r in rows] for i, c in enumerate(cols)}
        idx = min(range(len(table["kappa_tau"])),
                  key=lambda i: abs(table["kappa_tau"][i] - 1.0))
        assert table["kappa_tau"][idx] == pytest.approx(1.0, rel=1e-9)
        assert table["snr_combined"][idx] == pytest.approx(5.549, abs=0.01)
        assert table["snr_ies_opt"][idx] == pytest.approx(0.2946, abs=0.005)
        assert table["snr_ics_opt"][idx] == pytest.approx(0.2080, abs=0.005)
        assert table["snr_std"][idx] == pytest.approx(0.1826, abs=0.002)

    def test_gnuplot_script(self, tmp_path):
        assert run_cli(["figure", "fig4b", "--output-dir", str(tmp_path),
                        "--gnuplot"]) == 0
        assert (tmp_path / "fig4b.csv").exists()
        script = (tmp_path / "fig4b.gp").read_text()
        assert "plot" in script and "fig4b.csv" in script

    def test_idempotent(self, tmp_path):
        run_cli(["figure", "fig4b", "--output-dir", str(tmp_path)])
        first = (tmp_path / "fig4b.csv").read_bytes()
        run_cli(["figure", "fig4b", "--output-dir", str(tmp_path)])
        assert (tmp_path / "fig4b.csv").read_bytes() == first


class TestOracleCheckCommand:
    def test_passes_for_each_scheme(self):
        assert run_cli(["oracle-check", "--scheme", "standard",
                        "--steps", "4096"]) == 0
        assert run_cli(["oracle-check", "--scheme", "ies", "--r", "0.5",
                        "--steps", "4096"]) == 0
        assert run_cli(["oracle-check", "--scheme", "ics", "--omega-2ph", "0.15",
                        "--steps", "4096"]) == 0
        assert run_cli(["oracle-check", "--scheme", "combined",
                        "--steps", "8192"]) == 0

    def test_negative_control(self, monkeypatch):
        true_noise = ies.ies_noise

        def corrupted(params, cfg, state):
            return 1.01 * true_noise(params, cfg, state)

        monkeypatch.setattr(ies, "ies_noise", corrupted)
        assert run_cli(["oracle-check", "--scheme", "ies", "--r", "0.5",
                        "--steps", "4096"]) != 0


class TestWignerCommand:
    def test_vacuum_peak(self, tmp_path):
        assert run_cli(["wigner", "--scheme", "standard", "--alpha-in", "0",
                        "--resolution", "101", "--window", "4",
                        "--output-dir", str(tmp_path)]) == 0
        path = tmp_path / "wigner_standard_up.csv"
        rows = path.read_text().strip().splitlines()[1:]
        w = np.array([float(r.split(",")[2]) for r in rows])
        assert w.max() == pytest.approx(2.0 / math.pi, rel=1e-9)
        assert len(rows) == 101 * 101

    def test_figS5_preset(self, tmp_path):
        assert run_cli(["wigner", "--preset", "figS5", "--resolution", "33",
                        "--output-dir", str(tmp_path)]) == 0
        diag_path = tmp_path / "figS5_diagnostics.csv"
        header, *rows = diag_path.read_text().strip().splitlines()
        cols = header.split(",")
        by_grid = {}
        for row in rows:
            vals = dict(zip(cols, row.split(",")))
            by_grid[vals["grid"]] = vals
        assert len(by_grid) == 6
        # equal squeeze degree for the two states at each time
        for kt in ("1", "2", "5"):
            up = by_grid[f"figS5_kt{kt}_up"]
            down = by_grid[f"figS5_kt{kt}_down"]
            assert float(up["xi2_dB"]) == pytest.approx(float(down["xi2_dB"]),
                                                        abs=1e-9)

    def test_figS4_preset_runs(self, tmp_path):
        assert run_cli(["wigner", "--preset", "figS4", "--resolution", "33",
                        "--output-dir", str(tmp_path)]) == 0
        assert (tmp_path / "figS4_diagnostics.csv").exists()
        assert (tmp_path / "figS4_kt5_down.csv").exists()

    def test_figS2_preset_opposite_rotations(self, tmp_path):
        assert run_cli(["wigner", "--preset", "figS2", "--resolution", "33",
                        "--output-dir", str(tmp_path)]) == 0
        header, *rows = (tmp_path / "figS2_diagnostics.csv").read_text().strip().splitlines()
        cols = header.split(",")
        thetas = {}
        for row in rows:
            vals = dict(zip(cols, row.split(",")))
            thetas[(vals["grid"], vals["state"])] = float(vals["theta_N"])
        for kt in ("1", "2", "5"):
            up = thetas[(f"figS2_kt{kt}_up", "up")]
            down = thetas[(f"figS2_kt{kt}_down", "down")]
            assert up == pytest.approx(-down, abs=1e-6)
            assert up != 0.0


class TestMismatchCommand:
    def test_headline_ratio(self, tmp_path):
        out = tmp_path / "mm.txt"
        assert run_cli(["mismatch", "--scheme", "combined", "--delta-r", "0.1",
                        "--delta-p", "0.1", "-o", str(out)]) == 0
        rec = parse_kv(out.read_text())
        assert float(rec["snr_over_e_r_snr_std"]) == pytest.approx(0.742, abs=0.01)
        assert float(rec["snr_matched"]) == pytest.approx(5.549, abs=0.01)

    def test_requires_combined(self):
        assert run_cli(["mismatch", "--scheme", "ies"]) == 2


class TestFormatting:
    def test_fmt_significant_digits(self):
        assert cli.fmt(math.pi) == "3.14159265359"
        assert cli.fmt(1.0) == "1"
        assert cli.fmt(1e-13) == "1e-13"
