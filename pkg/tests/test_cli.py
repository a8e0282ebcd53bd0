import json
import math

import pytest

from qwalk.cli import run_cli
from qwalk.coin import Region, hadamard, rotation
from qwalk.export import export_profile, export_sweep, load_profile_json, render_profile
from qwalk.limits import LawKind, LimitLaw, SweepRow
from qwalk.stationary import stationary_distribution

QUARTER = "-0.7853981633974483"

GOLDEN_BOUNDARY_M2 = (
    "n,x,phi_norm_sq,mu,F_M,F_limit,abs_diff\n"
    "0,0.0,1.2,0.75,0.75,0.0,0.75\n"
    "1,0.5,0.39999999999999997,0.25,1.0,0.875,0.125\n"
)


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


class TestExportProfile:
    def test_single_site(self, tmp_path):
        p = stationary_distribution(1, hadamard(), 0.3)
        out = tmp_path / "p.csv"
        export_profile(p, None, out)
        lines = out.read_text().splitlines()
        assert lines[0] == "n,x,phi_norm_sq,mu,F_M,F_limit,abs_diff"
        assert lines[1:] == ["0,0.0,1.0,1.0,1.0,,"]

    def test_with_law(self):
        p = stationary_distribution(2, hadamard(), math.pi / 4)
        assert render_profile(p, LimitLaw(LawKind.CUBIC)) == GOLDEN_BOUNDARY_M2

    def test_empty_law_json(self):
        p = stationary_distribution(3, hadamard(), 0.2)
        doc = json.loads(render_profile(p, None, "json"))
        assert doc["columns"]["F_limit"] == [None] * 3
        assert doc["metadata"]["law"] is None
        assert list(doc["columns"]) == ["n", "x", "phi_norm_sq", "mu", "F_M", "F_limit", "abs_diff"]

    @pytest.mark.parametrize("law", [None, LimitLaw(LawKind.SINE_SQUARED, theta_star=1.3)])
    def test_json_round_trip(self, tmp_path, law):
        p = stationary_distribution(37, rotation(0.7), 1.1)
        first = tmp_path / "a.json"
        export_profile(p, law, first, "json", metadata={"xi": 1.1, "regime": "Bin"})
        profile, law2, meta = load_profile_json(first)
        second = tmp_path / "b.json"
        export_profile(profile, law2, second, "json", metadata=meta)
        assert read(first) == read(second)

    def test_bad_format(self):
        with pytest.raises(ValueError):
            render_profile(stationary_distribution(2, hadamard(), 0.1), None, "xml")


class TestExportSweep:
    rows = [SweepRow(M, 1.0 / M, Region.BOUNDARY, 0.0) for M in (100, 200, 400, 800)]

    def test_csv(self, tmp_path):
        out = tmp_path / "s.csv"
        export_sweep(self.rows, out)
        lines = out.read_text().splitlines()
        assert lines[0] == "M,regime,theta_star_effective,ks"
        assert lines[1] == "100,BoundaryB,0.0,0.01"
        assert len(lines) == 5

    def test_empty(self, tmp_path):
        out = tmp_path / "s.csv"
        export_sweep([], out)
        assert out.read_text() == "M,regime,theta_star_effective,ks\n"

    def test_json(self, tmp_path):
        out = tmp_path / "s.json"
        export_sweep(self.rows + [SweepRow(5, 0.0, Region.BOUT, None)], out, "json")
        doc = json.loads(out.read_text())
        assert [r["M"] for r in doc] == [100, 200, 400, 800, 5]
        assert doc[-1] == {"M": 5, "regime": "Bout", "theta_star_effective": None, "ks": 0.0}


class TestCli:
    def test_regime(self, capsys):
        assert run_cli(["regime", "--coin", "hadamard", "--xi", "0"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert "region=Bin" in out
        assert f"omega={math.pi / 2!r}" in out
        assert f"theta={math.pi / 2!r}" in out

    def test_stationary_golden(self, capsys):
        assert run_cli(["stationary", "--coin", "hadamard", "--xi", QUARTER, "--M", "2"]) == 0
        assert capsys.readouterr().out == GOLDEN_BOUNDARY_M2

    def test_zero_M(self, capsys):
        assert run_cli(["stationary", "--xi", "0", "--M", "0"]) == 1
        assert "--M" in capsys.readouterr().err

    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["bogus"],
            ["stationary", "--M", "3"],
            ["stationary", "--M", "3", "--xi", "0", "--theta-star", "1"],
            ["stationary", "--M", "3", "--xi", "0", "--coin", "pauli"],
            ["stationary", "--M", "3", "--xi", "0", "--entries", "1", "0", "0", "0", "0", "0", "1", "0"],
            ["sweep", "--xi", "0", "--M-list", "200,100"],
            ["limit", "--law", "sine"],
        ],
    )
    def test_usage_errors(self, argv, capsys):
        assert run_cli(argv) == 1
        assert capsys.readouterr().err

    def test_numerical_failure(self, capsys):
        assert run_cli(["simulate", "--M", "8", "--xi", "0", "--t-max", "1"]) == 2
        assert "numerical failure" in capsys.readouterr().err

    def test_simulate_report(self, tmp_path, capsys):
        out = tmp_path / "sim.json"
        argv = ["simulate", "--M", "6", "--xi", "0.4", "--coin", "rot:0.9", "--tol", "1e-13", "-o", str(out), "--format", "json"]
        assert run_cli(argv) == 0
        report = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())
        assert float(report["max_rel_site_diff"]) < 1e-9
        assert float(report["solve_eigen_residual"]) < 1e-12
        meta = json.loads(out.read_text())["metadata"]
        assert meta["source"] == "dynamics"

    def test_entries_coin(self, capsys):
        s = 1 / math.sqrt(2)
        vals = [s, 0, s, 0, s, 0, -s, 0]
        assert run_cli(["regime", "--entries", *map(repr, vals), "--xi", "0"]) == 0
        assert "region=Bin" in capsys.readouterr().out

    def test_theta_star_metadata(self, tmp_path):
        out = tmp_path / "p.json"
        assert run_cli(["stationary", "--theta-star", "1", "--M", "50", "-o", str(out), "--format", "json"]) == 0
        meta = json.loads(out.read_text())["metadata"]
        assert meta["theta_star"] == 1.0
        assert isinstance(meta["xi"], float)
        assert meta["law"] == {"kind": "SineSquared", "theta_star": 1.0, "lambda_plus": None}

    @pytest.mark.parametrize(
        "argv",
        [
            ["stationary", "--theta-star", "1", "--M", "64"],
            ["sweep", "--theta-star", "1", "--M-list", "100,200,400"],
            ["limit", "--law", "sine", "--theta-star", "2", "--points", "11"],
            ["simulate", "--M", "5", "--xi", "1.3"],
        ],
    )
    def test_deterministic(self, argv, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run_cli(argv + ["-o", str(a)]) == 0
        assert run_cli(argv + ["-o", str(b)]) == 0
        assert read(a) == read(b)

    def test_sweep_csv(self, capsys):
        assert run_cli(["sweep", "--xi", QUARTER, "--M-list", "100,200,400,800"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "M,regime,theta_star_effective,ks"
        ks = [float(l.split(",")[3]) for l in lines[1:]]
        assert len(ks) == 4 and all(b < a for a, b in zip(ks, ks[1:]))

    def test_limit_table(self, capsys):
        assert run_cli(["limit", "--law", "cubic", "--points", "3"]) == 0
        assert capsys.readouterr().out == "x,density,cdf\n0.0,3.0,0.0\n0.5,0.75,0.875\n1.0,0.0,1.0\n"

    def test_limit_geometric_and_point_mass(self, capsys):
        assert run_cli(["limit", "--law", "geometric", "--lambda-plus", "2", "--points", "2"]) == 0
        assert capsys.readouterr().out == "x,density,cdf\n0.0,0.75,0.75\n1.0,0.1875,0.9375\n"
        assert run_cli(["limit", "--law", "pointmass", "--points", "2"]) == 0
        assert capsys.readouterr().out == "x,density,cdf\n0.0,,1.0\n1.0,,1.0\n"

    def test_module_entry_point(self):
        import subprocess
        import sys

        proc = subprocess.run(
            [sys.executable, "-m", "qwalk", "regime", "--xi", "0"], capture_output=True, text=True, check=False
        )
        assert proc.returncode == 0 and "region=Bin" in proc.stdout
