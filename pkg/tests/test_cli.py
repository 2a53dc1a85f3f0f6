import csv
import json
from pathlib import Path

import numpy as np
import pytest

from breakdate.cli import density_grid, density_modes, main, read_config

DATA = Path(__file__).parent / "data"


@pytest.fixture
def noiseless_csv(tmp_path):
    y = np.r_[np.zeros(50), np.ones(50)]
    p = tmp_path / "noiseless.csv"
    np.savetxt(p, np.c_[y, np.ones(100)], delimiter=",", header="y,z1", comments="", fmt="%.17g")
    return p


@pytest.fixture
def m1_csv(tmp_path):
    from breakdate import DgpSpec, generate
    from breakdate.dgp import to_csv

    p = tmp_path / "m1.csv"
    to_csv(generate(DgpSpec("M1", 100, 0.5, 1.0, seed=3)), p)
    return p


def run(*args):
    return main([str(a) for a in args])


class TestEstimate:
    def test_noiseless(self, noiseless_csv, tmp_path):
        out = tmp_path / "est.json"
        assert run("estimate", "-i", noiseless_csv, "-o", out) == 0
        r = json.loads(out.read_text())
        assert r["t_hat"] == 50 and r["lambda_hat"] == 0.5
        assert r["plugins"]["rho"] is None  # infinite, written as null

    def test_missing_file(self, tmp_path):
        out = tmp_path / "est.json"
        assert run("estimate", "-i", tmp_path / "nope.csv", "-o", out) == 2
        assert not out.exists()

    def test_byte_identical(self, m1_csv, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run("estimate", "-i", m1_csv, "-o", a)
        run("estimate", "-i", m1_csv, "-o", b)
        assert a.read_bytes() == b.read_bytes()

    @pytest.mark.parametrize("text", [
        "x,z1\n1,1\n",
        "y\n1\n2\n",
        "y,z1\n1,a\n",
        "y,z1\n1,1\n2\n",
        "",
    ])
    def test_malformed(self, tmp_path, text):
        p = tmp_path / "bad.csv"
        p.write_text(text)
        assert run("estimate", "-i", p) == 3

    def test_degenerate(self, tmp_path):
        p = tmp_path / "deg.csv"
        z = np.r_[np.zeros(90), np.ones(10)]
        np.savetxt(p, np.c_[np.random.default_rng(0).standard_normal(100), z], delimiter=",",
                   header="y,z1", comments="")
        assert run("estimate", "-i", p) == 4

    def test_predictable(self, tmp_path, capsys):
        from breakdate import DgpSpec, generate
        from breakdate.dgp import to_csv

        p = tmp_path / "m7.csv"
        to_csv(generate(DgpSpec("M7", 100, 0.5, 2.0, seed=1)), p)
        assert run("estimate", "-i", p, "--predictable") == 0
        r = json.loads(capsys.readouterr().out)
        assert set(r["predictable_coeffs"]) == {"mu1", "alpha1", "mu2", "alpha2"}


class TestConfset:
    def test_golden(self, tmp_path):
        out = tmp_path / "cs.json"
        assert run("confset", "-i", DATA / "worked_example.csv", "--units", "vartheta",
                   "--seed", 1, "-o", out) == 0
        got = json.loads(out.read_text())
        want = json.loads((DATA / "worked_example_golden.json").read_text())
        assert got["confidence_sets"] == want["confidence_sets"]
        hdr = got["confidence_sets"]["hdr"]
        assert got["t_hat"] == 70
        assert len(hdr["intervals"]) == 2
        assert any(a <= 35 <= b for a, b in hdr["intervals"])
        lo, hi = got["confidence_sets"]["bai"]["intervals"][0]
        assert not lo <= 35 <= hi

    def test_nested_alpha(self, m1_csv, tmp_path):
        sets = []
        for a in ("0.5", "0.05"):
            out = tmp_path / f"{a}.json"
            run("confset", "-i", m1_csv, "--alpha", a, "--n-draws", 3000, "-o", out)
            sets.append(json.loads(out.read_text())["confidence_sets"]["hdr"]["intervals"])
        inner = {d for a, b in sets[0] for d in range(a, b + 1)}
        outer = {d for a, b in sets[1] for d in range(a, b + 1)}
        assert inner <= outer

    def test_bai_only(self, m1_csv, capsys):
        assert run("confset", "-i", m1_csv, "--method", "bai") == 0
        r = json.loads(capsys.readouterr().out)
        assert list(r["confidence_sets"]) == ["bai"]
        assert len(r["confidence_sets"]["bai"]["intervals"]) == 1

    def test_weak_flagged(self, tmp_path, capsys):
        p = tmp_path / "flat.csv"
        np.savetxt(p, np.c_[np.ones(60), np.ones(60)], delimiter=",", header="y,z1", comments="")
        assert run("confset", "-i", p) == 0
        r = json.loads(capsys.readouterr().out)
        assert r["weak_identification"] and r["confidence_sets"]["hdr"]["weak_identification"]

    def test_draws_out(self, m1_csv, tmp_path, capsys):
        d = tmp_path / "draws.csv"
        assert run("confset", "-i", m1_csv, "--n-draws", 1000, "--draws-out", d) == 0
        assert len(d.read_text().splitlines()) == 1001
        r = json.loads(capsys.readouterr().out)
        assert r["draws_path"] == str(d)

    def test_too_few_draws(self, m1_csv):
        assert run("confset", "-i", m1_csv, "--n-draws", 500) == 3

    def test_bad_method(self, m1_csv):
        assert run("confset", "-i", m1_csv, "--method", "em") == 3

    def test_bad_alpha(self, m1_csv):
        assert run("confset", "-i", m1_csv, "--alpha", "1.5") == 3


class TestConfig:
    def test_flags_win(self, tmp_path, m1_csv, capsys):
        cfg = tmp_path / "run.conf"
        cfg.write_text(f"# comment\ninput = {m1_csv}\nalpha = 0.5\nmethod = bai\n")
        assert run("confset", "--config", cfg, "--alpha", "0.05") == 0
        r = json.loads(capsys.readouterr().out)
        assert r["alpha"] == 0.05 and list(r["confidence_sets"]) == ["bai"]

    def test_unknown_key(self, tmp_path):
        cfg = tmp_path / "run.conf"
        cfg.write_text("colour = red\n")
        assert run("estimate", "--config", cfg) == 3

    def test_parse(self, tmp_path):
        cfg = tmp_path / "run.conf"
        cfg.write_text("n-draws = 10 # inline\n\nseed=3\n")
        assert read_config(cfg) == {"n_draws": "10", "seed": "3"}

    def test_env_seed(self, m1_csv, monkeypatch, tmp_path):
        outs = []
        for s in ("1", "2", "1"):
            monkeypatch.setenv("BREAKDATE_SEED", s)
            out = tmp_path / f"{len(outs)}.json"
            run("confset", "-i", m1_csv, "--n-draws", 1000, "--draws-out", tmp_path / "d.csv", "-o", out)
            outs.append((tmp_path / "d.csv").read_text())
        assert outs[0] == outs[2] != outs[1]

    def test_missing_input(self):
        assert run("estimate") == 3

    def test_bad_subcommand(self):
        assert run("frobnicate") == 3


class TestDensity:
    def test_csv(self, tmp_path):
        out = tmp_path / "f.csv"
        assert run("density", "--rho2", 0.5, "--lambda0", 0.5, "--n-draws", 2000, "-o", out) == 0
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["x", "density"] and len(rows) == 513

    def test_integrates(self):
        x, f, _ = density_grid(0.3, 0.3, n_draws=5000, seed=2)
        assert np.trapezoid(f, x) == pytest.approx(1.0, abs=0.01)

    def test_single_mode(self):
        x, f, _ = density_grid(0.8, 0.5, n_draws=5000, seed=2)
        m = density_modes(f)
        assert len(m) == 1
        assert abs(x[m[0]] - (x[0] + x[-1]) / 2) <= 0.05 * (x[-1] - x[0])

    def test_degenerate(self):
        assert run("density", "--rho2", 0, "--lambda0", 0.5) == 4

    def test_requires_params(self):
        assert run("density", "--rho2", 0.5) == 3

    def test_modes_helper(self):
        f = np.r_[3, 1, 2, 1, 3.0]
        np.testing.assert_array_equal(density_modes(f), [0, 2, 4])


class TestMc:
    def test_row_and_resume(self, tmp_path):
        out = tmp_path / "mc.csv"
        args = ("mc", "--model", "M1", "--delta", "1.5", "--reps", 6, "--n-draws", 1000,
                "--n-grid", 500, "--seed", 3, "-o", out)
        assert run(*args) == 0
        first = out.read_text()
        rows = list(csv.DictReader(first.splitlines()))
        assert [r["method"] for r in rows] == ["hdr", "bai"]
        assert run(*args) == 0  # cell already present: nothing appended
        assert out.read_text() == first

    def test_rerun_identical(self, tmp_path):
        outs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            run("mc", "--model", "M1", "--delta", "2", "--reps", 4, "--n-draws", 1000,
                "--n-grid", 500, "-o", out)
            outs.append(out.read_text())
        assert outs[0] == outs[1]

    def test_invalid_model(self):
        assert run("mc", "--model", "M42") == 3

    def test_zero_reps(self):
        assert run("mc", "--model", "M1", "--reps", 0) == 3
