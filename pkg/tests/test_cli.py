"""CLI subcommands: outputs, provenance headers, exit codes, determinism."""

import numpy as np
import pytest

from hessiancone.cli import main


def run(tmp_path, command, cfg_text="", seed=0, profile="fast", sub="out"):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(cfg_text)
    out = tmp_path / sub
    code = main([
        command, "--config", str(cfg), "--seed", str(seed),
        "--out", str(out), "--profile", profile,
    ])
    return code, out


class TestLemmaSweep:
    def test_small_sweep_no_violations(self, tmp_path):
        code, out = run(tmp_path, "lemma-sweep",
                        "ns = 2 3\neps = 0.2\ntrials = 300\n")
        assert code == 0
        for mode in ("strong", "weak", "distinct"):
            lines = (out / f"lemma_{mode}.csv").read_text().splitlines()
            assert lines[0].startswith("# hessiancone=")
            assert lines[1] == "n,eps,corner_fraction,max_dev,max_excess,violations"
            assert all(row.endswith(",0") for row in lines[2:])

    def test_below_threshold_rows(self, tmp_path):
        code, out = run(
            tmp_path, "lemma-sweep",
            "ns = 2\neps = 0.1\ntrials = 200\ncorner_fractions = 1.0 0.5\n",
        )
        assert code == 0  # observation rows never gate the exit code
        body = (out / "below_threshold.csv").read_text().splitlines()[2:]
        assert all(",0.5," in row for row in body)

    def test_byte_identical_rerun(self, tmp_path):
        cfg = "ns = 2 3\neps = 0.05 1.0\ntrials = 250\n"
        _, out1 = run(tmp_path, "lemma-sweep", cfg, seed=9, sub="a")
        _, out2 = run(tmp_path, "lemma-sweep", cfg, seed=9, sub="b")
        for mode in ("strong", "weak", "distinct"):
            assert (out1 / f"lemma_{mode}.csv").read_bytes() == \
                (out2 / f"lemma_{mode}.csv").read_bytes()

    def test_zero_trials_header_only(self, tmp_path):
        code, out = run(tmp_path, "lemma-sweep", "ns = 2\ntrials = 0\n")
        assert code == 0
        lines = (out / "lemma_strong.csv").read_text().splitlines()
        assert len(lines) == 2  # provenance + header, no rows


class TestConeCheck:
    def test_all_pass(self, tmp_path):
        code, out = run(tmp_path, "cone-check",
                        "n = 3\nkinds = sigma1,ma\nsamples = 60\n")
        assert code == 0
        text = (out / "cone_check.csv").read_text()
        assert "sigma1,gradient_positivity,60,0," in text
        assert "ma,euler_identity,60,0," in text
        assert "gap_epsprime_min" in text

    def test_byte_identical_rerun(self, tmp_path):
        cfg = "n = 3\nkinds = quotient:1:2\nsamples = 40\n"
        _, out1 = run(tmp_path, "cone-check", cfg, seed=4, sub="a")
        _, out2 = run(tmp_path, "cone-check", cfg, seed=4, sub="b")
        assert (out1 / "cone_check.csv").read_bytes() == \
            (out2 / "cone_check.csv").read_bytes()


class TestSolveCommand:
    def test_trivial_preset_dumps_zero_field(self, tmp_path):
        code, out = run(
            tmp_path, "solve",
            "resolution = 8\nkind = ma\npsi = one\nphi = zero\n"
            "subsolution = zero\ndump_fields = csv,raw\n",
        )
        assert code == 0
        report = (out / "report.csv").read_text().splitlines()
        assert report[1].startswith("label,resolution")
        values = report[2].split(",")
        assert values[0] == "ma" and values[2] == "1"
        raw = np.fromfile(out / "u.raw", dtype="<f8", offset=32)
        assert np.abs(raw).max() <= 1e-10
        assert (out / "u.csv").read_text().splitlines()[0].startswith("i0,")

    def test_manufactured_error_table(self, tmp_path):
        code, out = run(
            tmp_path, "solve",
            "resolution = 8\nkind = sigma1\npsi = manufactured\n"
            "subsolution = star-bump\n",
        )
        assert code == 0
        err_line = (out / "error.csv").read_text().splitlines()[2]
        res, err = err_line.split(",")
        assert res == "8" and float(err) < 5e-3

    def test_riemannian_preset(self, tmp_path):
        code, out = run(
            tmp_path, "solve",
            "geometry = riemannian\nd = 3\nresolution = 8\nkind = ma\n"
            "psi = manufactured\nsubsolution = star-bump\n",
        )
        assert code == 0
        assert (out / "report.csv").exists()

    def test_byte_identical_rerun(self, tmp_path):
        cfg = ("resolution = 8\nkind = ma\npsi = manufactured\n"
               "subsolution = star-bump\ndump_fields = raw\n")
        _, out1 = run(tmp_path, "solve", cfg, seed=2, sub="a")
        _, out2 = run(tmp_path, "solve", cfg, seed=2, sub="b")
        assert (out1 / "report.csv").read_bytes() == (out2 / "report.csv").read_bytes()
        assert (out1 / "u.raw").read_bytes() == (out2 / "u.raw").read_bytes()

    def test_invalid_subsolution_fails_loudly(self, tmp_path):
        # the reference-minus-bump field does not dominate psi == 1
        code, out = run(tmp_path, "solve",
                        "resolution = 8\nkind = ma\npsi = one\n"
                        "subsolution = star-bump\n")
        assert code == 1
        row = (out / "report.csv").read_text().splitlines()[2]
        assert row.split(",")[2] == "0"  # converged flag


class TestScalingCommand:
    def test_ratio_table(self, tmp_path):
        code, out = run(tmp_path, "boundary-scaling",
                        "resolution = 8\nscales = 1 2 4 8\n")
        assert code == 0
        lines = (out / "boundary_scaling.csv").read_text().splitlines()
        assert lines[1] == "s,sup_grad,sup_ddbar_boundary,ratio"
        ratios = [float(r.split(",")[3]) for r in lines[2:]]
        assert max(ratios) / min(ratios) <= 10.0
        grads = [float(r.split(",")[1]) for r in lines[2:]]
        assert grads == sorted(grads)  # monotone in s

    def test_zero_scale_row_is_zero(self, tmp_path):
        code, out = run(tmp_path, "boundary-scaling",
                        "resolution = 8\nscales = 0\n")
        assert code == 0
        row = (out / "boundary_scaling.csv").read_text().splitlines()[2]
        s, grad, ddb, ratio = (float(x) for x in row.split(","))
        # exact solution is u = 0; discrete zeros up to the Newton tolerance
        assert s == 0.0 and grad <= 1e-6 and ddb <= 1e-6 and ratio <= 1e-6


class TestDegenerateCommand:
    def test_three_eps_table(self, tmp_path):
        code, out = run(tmp_path, "degenerate",
                        "resolution = 8\neps_list = 0.1 0.01 0.001\n")
        assert code == 0
        lines = (out / "degenerate.csv").read_text().splitlines()
        assert lines[1] == "eps,converged,final_residual,sup_grad,sup_lap,error"
        rows = [r.split(",") for r in lines[2:]]
        assert len(rows) == 3
        assert all(r[1] == "1" for r in rows)
        assert all(float(r[2]) <= 1e-8 for r in rows)
