import subprocess
import sys

import pytest

from pilipovic.cli import main, parse_grid, UsageError


class TestGridParsing:
    def test_arithmetic(self):
        assert parse_grid("5:40:5", integer=True) == [5, 10, 15, 20, 25, 30, 35, 40]

    def test_log_spaced(self):
        grid = parse_grid("1e2:1e6:log", integer=True)
        assert grid[0] == 100 and grid[-1] == 10**6
        assert len(grid) == 41

    def test_comma_list(self):
        assert parse_grid("1,0.5,0.25") == [1.0, 0.5, 0.25]

    def test_single_value(self):
        assert parse_grid("7") == [7.0]

    def test_malformed(self):
        with pytest.raises(UsageError):
            parse_grid("40:5")
        with pytest.raises(UsageError):
            parse_grid("5:40:0")
        with pytest.raises(UsageError):
            parse_grid("")


class TestVerify:
    def test_thm1_roundtrip(self, tmp_path):
        code = main(["--out", str(tmp_path), "verify", "thm1",
                     "--r", "0.25", "--d", "1", "--Ngrid", "5:40:5"])
        assert code == 0
        report = tmp_path / "thm1_report.csv"
        assert report.exists()
        lines = report.read_text().splitlines()
        assert lines[0] == "check,param,N,lhs_log,rhs_log,ratio_log,pass"
        assert all(ln.endswith("true") for ln in lines[1:])
        assert (tmp_path / "thm1_ratio.svg").exists()

    def test_thm2_sweep(self, tmp_path):
        code = main(["--out", str(tmp_path), "verify", "thm2",
                     "--rgrid", "1,0.5,0.25,0.1", "--d", "1", "--Ngrid", "5:20:5"])
        assert code == 0
        lines = (tmp_path / "thm2_report.csv").read_text().splitlines()
        rs = {ln.split(",")[1] for ln in lines[1:]}
        assert len(rs) == 4

    def test_malformed_grid_exits_one(self, tmp_path):
        code = main(["--out", str(tmp_path), "verify", "thm1", "--Ngrid", "40:5"])
        assert code == 1
        assert not (tmp_path / "thm1_report.csv").exists()

    def test_determinism(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        args = ["verify", "thm1", "--r", "0.25", "--Ngrid", "5:25:5"]
        assert main(["--out", str(a)] + args) == 0
        assert main(["--out", str(b)] + args) == 0
        assert (a / "thm1_report.csv").read_bytes() == (b / "thm1_report.csv").read_bytes()


class TestLemma:
    def test_interval(self, tmp_path, capsys):
        code = main(["--out", str(tmp_path), "lemma", "interval",
                     "--r", "1", "--Ngrid", "1e2:1e5:log"])
        assert code == 0
        out = capsys.readouterr().out
        assert "empirical N0" in out
        lines = (tmp_path / "lemma_interval.csv").read_text().splitlines()
        assert lines[0] == "param,N,t1,tstar,t2,pass"

    def test_series(self, tmp_path):
        code = main(["--out", str(tmp_path), "lemma", "series",
                     "--a1", "1", "--a2", "0", "--r", "0.3", "--r0", "0.5"])
        assert code == 0
        assert (tmp_path / "lemma_series.csv").exists()

    def test_maximum(self, tmp_path):
        code = main(["--out", str(tmp_path), "lemma", "maximum",
                     "--r", "1", "--Ngrid", "1e3:1e5:log"])
        assert code == 0

    def test_convex(self, tmp_path, capsys):
        code = main(["--out", str(tmp_path), "lemma", "convex", "--r", "2.718281828"])
        assert code == 0
        out = capsys.readouterr().out
        assert "residual" in out
        assert (tmp_path / "lemma_convex.csv").exists()
        assert (tmp_path / "lemma_convex.svg").exists()


class TestBell:
    def test_fifty_rows(self, tmp_path):
        code = main(["--out", str(tmp_path), "bell", "--nmax", "50"])
        assert code == 0
        lines = (tmp_path / "bell_report.csv").read_text().splitlines()
        assert len(lines) == 51  # header + 50 rows
        assert (tmp_path / "bell_cn.csv").exists()

    def test_small_table_values(self, tmp_path):
        assert main(["--out", str(tmp_path), "bell", "--nmax", "5"]) == 0
        lines = (tmp_path / "bell_report.csv").read_text().splitlines()
        first = lines[1].split(",")
        assert first[0] == "1" and first[1] == "1"  # B_1 = 1
        # dobinski column is B_2 = 2, below the 2.0788 upper envelope
        import math

        assert math.exp(float(first[2])) == pytest.approx(2.0, rel=1e-9)
        assert float(first[2]) < float(first[4])

    def test_empty_grid_exits_one(self, tmp_path):
        assert main(["--out", str(tmp_path), "bell", "--nmax", "0"]) == 1


class TestBargmann:
    def test_subexp_growth(self, tmp_path, capsys):
        code = main(["--out", str(tmp_path), "bargmann", "--law", "subexp",
                     "--r", "1", "--s", "0.25", "--radii", "1e1:1e6:log"])
        assert code == 0
        out = capsys.readouterr().out
        assert "class = A_s" in out
        lines = (tmp_path / "growth_fit.csv").read_text().splitlines()
        assert lines[0] == "rho,logM,model,R_hat,theta_hat,residual"
        assert ",log_power," in lines[1]

    def test_geometric_outside(self, tmp_path, capsys):
        code = main(["--out", str(tmp_path), "bargmann", "--law", "geometric",
                     "--r", "1", "--s", "0.25"])
        assert code == 0
        assert "class = outside" in capsys.readouterr().out

    def test_vartheta_sweep(self, tmp_path):
        code = main(["--out", str(tmp_path), "bargmann", "--vartheta",
                     "--s", "0.25", "--R", "1", "--kgrid", "10:200:10"])
        assert code == 0
        lines = (tmp_path / "vartheta_sweep.csv").read_text().splitlines()
        assert lines[0] == "k,R,s,log_vartheta,lower_env,upper_env,pass"
        assert all(ln.endswith("true") for ln in lines[1:])


class TestPlumbing:
    def test_env_var_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PILIPOVIC_OUT", str(tmp_path))
        assert main(["bell", "--nmax", "3"]) == 0
        assert (tmp_path / "bell_report.csv").exists()

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "run.ini"
        cfg.write_text("[bell]\nnmax = 7\n")
        assert main(["--out", str(tmp_path), "--config", str(cfg), "bell"]) == 0
        assert len((tmp_path / "bell_report.csv").read_text().splitlines()) == 8
        assert main(["--out", str(tmp_path), "--config", str(cfg), "bell", "--nmax", "3"]) == 0
        assert len((tmp_path / "bell_report.csv").read_text().splitlines()) == 4

    def test_missing_config_exits_one(self, tmp_path):
        assert main(["--config", str(tmp_path / "nope.ini"), "bell"]) == 1

    def test_console_entry_point(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "pilipovic.cli", "--out", str(tmp_path),
             "bell", "--nmax", "3"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
