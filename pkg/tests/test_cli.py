"""End-to-end tests of the command-line front end and its file contracts."""

import json
import math

import numpy as np
import pytest

from cwsoc.cli import main
from cwsoc.limit_law import QuarticLaw


def read(path):
    return path.read_text()


class TestSimulate:
    def test_zero_sweeps_header_only(self, tmp_path):
        out = tmp_path / "run"
        assert main(["simulate", "--n", "8", "--sweeps", "0", "--out", str(out)]) == 0
        assert read(out / "samples.csv") == "chain,sweep,s,t,s_scaled,t_scaled\n"
        manifest = json.loads(read(out / "manifest.json"))
        assert manifest["output_paths"] == ["samples.csv"]
        assert manifest["params"]["n"] == 8
        assert "simulate" in manifest["command"]

    def test_identical_flags_byte_identical_csv(self, tmp_path):
        flags = ["simulate", "--n", "12", "--sweeps", "50", "--seed", "3", "--chains", "2"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(flags + ["--out", str(a)]) == 0
        assert main(flags + ["--out", str(b)]) == 0
        assert (a / "samples.csv").read_bytes() == (b / "samples.csv").read_bytes()

    def test_chain_output_independent_of_chain_count(self, tmp_path):
        # chain 0's rows depend only on (seed, chain_id), not on --chains
        base = ["simulate", "--n", "12", "--sweeps", "40", "--seed", "3"]
        solo, multi = tmp_path / "solo", tmp_path / "multi"
        assert main(base + ["--chains", "1", "--out", str(solo)]) == 0
        assert main(base + ["--chains", "3", "--out", str(multi)]) == 0
        solo_rows = read(solo / "samples.csv").splitlines()[1:]
        multi_rows = [r for r in read(multi / "samples.csv").splitlines()[1:] if r.startswith("0,")]
        assert solo_rows == multi_rows

    def test_csv_schema_and_scaling_columns(self, tmp_path):
        out = tmp_path / "run"
        assert main(["simulate", "--n", "16", "--sweeps", "5", "--out", str(out)]) == 0
        lines = read(out / "samples.csv").splitlines()
        assert lines[0] == "chain,sweep,s,t,s_scaled,t_scaled"
        chain, sweep, s, t, s_scaled, t_scaled = lines[1].split(",")
        assert chain == "0" and sweep == "1"
        assert float(s_scaled) == float(s) / 16**0.75
        assert float(t_scaled) == float(t) / 16

    def test_invalid_flag_exits_2(self, tmp_path):
        assert main(["simulate", "--n", "not-a-number", "--out", str(tmp_path)]) == 2

    def test_missing_out_exits_2(self):
        assert main(["simulate", "--n", "8"]) == 2

    def test_chains_recorded_in_id_order(self, tmp_path):
        out = tmp_path / "run"
        assert main(["simulate", "--n", "8", "--sweeps", "3", "--chains", "3", "--out", str(out)]) == 0
        chain_col = [line.split(",")[0] for line in read(out / "samples.csv").splitlines()[1:]]
        assert chain_col == sorted(chain_col)
        assert set(chain_col) == {"0", "1", "2"}

    def test_t_scaled_concentrates_at_desk_scale(self, tmp_path):
        out = tmp_path / "run"
        assert main(["simulate", "--n", "256", "--sweeps", "20000", "--burn-in", "1000",
                     "--thin", "5", "--seed", "6", "--out", str(out)]) == 0
        t_scaled = [float(line.split(",")[5]) for line in read(out / "samples.csv").splitlines()[1:]]
        assert 0.9 <= sum(t_scaled) / len(t_scaled) <= 1.1


class TestLimit:
    def test_cdf_at_zero(self, capsys):
        assert main(["limit", "--cdf", "0"]) == 0
        assert capsys.readouterr().out.strip() == "0.5"

    def test_quantile_median(self, capsys):
        assert main(["limit", "--quantile", "0.5"]) == 0
        assert float(capsys.readouterr().out) == 0.0

    def test_density_matches_library(self, capsys):
        assert main(["limit", "--density", "0.7", "--sigma", "2.0"]) == 0
        printed = float(capsys.readouterr().out)
        assert printed == pytest.approx(QuarticLaw(2.0).density(0.7), rel=1e-15)

    def test_seventeen_significant_digits_round_trip(self, capsys):
        assert main(["limit", "--density", "0.3"]) == 0
        text = capsys.readouterr().out.strip()
        assert float(text) == QuarticLaw(1.0).density(0.3)

    def test_sample_count_and_determinism(self, capsys):
        assert main(["limit", "--sample", "10", "--seed", "5"]) == 0
        first = capsys.readouterr().out.splitlines()
        assert main(["limit", "--sample", "10", "--seed", "5"]) == 0
        second = capsys.readouterr().out.splitlines()
        assert len(first) == 10
        assert first == second

    def test_mutually_exclusive_queries(self):
        assert main(["limit", "--cdf", "0", "--quantile", "0.5"]) == 2

    def test_out_of_domain_quantile_is_usage_error(self):
        assert main(["limit", "--quantile", "1.5"]) == 2


class TestVerify:
    def test_complex_suite_report_and_exit(self, tmp_path, capsys):
        assert main(["verify", "--suite", "complex", "--out", str(tmp_path)]) == 0
        reports = json.loads(read(tmp_path / "report.json"))
        assert reports, "report.json must not be empty"
        for item in reports:
            assert set(item) == {"name", "value", "expected", "tolerance", "pass", "details"}
            assert item["pass"] is True
        stdout = capsys.readouterr().out
        assert "PASS" in stdout and "FAIL" not in stdout

    def test_unknown_suite_exits_2(self, tmp_path):
        assert main(["verify", "--suite", "nonsense", "--out", str(tmp_path)]) == 2

    def test_bad_tol_override_exits_2(self, tmp_path):
        assert main(["verify", "--suite", "complex", "--tol", "garbage", "--out", str(tmp_path)]) == 2
        assert main(["verify", "--suite", "complex", "--tol", "nope=1e-3", "--out", str(tmp_path)]) == 2

    def test_tol_override_applies(self, tmp_path):
        # an absurdly tight oracle tolerance must flip checks to FAIL -> exit 1
        code = main(["verify", "--suite", "complex", "--tol", "complex_quad_tol=1e-18",
                     "--out", str(tmp_path)])
        assert code == 1
        reports = json.loads(read(tmp_path / "report.json"))
        assert any(not item["pass"] for item in reports)


class TestConvergence:
    def test_single_n_row(self, tmp_path):
        out = tmp_path / "conv"
        assert main([
            "convergence", "--n-list", "16", "--sweeps", "300", "--burn-in", "100",
            "--seed", "4", "--out", str(out),
        ]) == 0
        lines = read(out / "convergence.csv").splitlines()
        assert lines[0] == "n,ks,mean_t_scaled,sd_t_scaled,samples"
        assert len(lines) == 2
        n, ks, mean_t, sd_t, samples = lines[1].split(",")
        assert n == "16"
        assert 0.0 < float(ks) < 1.0
        assert int(samples) == 200

    def test_requested_counts_and_manifest(self, tmp_path):
        out = tmp_path / "conv"
        assert main([
            "convergence", "--n-list", "8,16", "--sweeps", "220", "--burn-in", "20",
            "--thin", "2", "--out", str(out),
        ]) == 0
        rows = read(out / "convergence.csv").splitlines()[1:]
        assert [int(r.split(",")[-1]) for r in rows] == [100, 100]
        assert (out / "manifest.json").exists()

    def test_ks_shrinks_from_n32_to_n256_on_fixed_seed(self, tmp_path):
        # empirical convergence trend; deterministic given the frozen seed
        out = tmp_path / "trend"
        assert main([
            "convergence", "--n-list", "32,256", "--sweeps", "42000", "--burn-in", "2000",
            "--thin", "2", "--seed", "321", "--out", str(out),
        ]) == 0
        rows = [line.split(",") for line in read(out / "convergence.csv").splitlines()[1:]]
        ks = {int(r[0]): float(r[1]) for r in rows}
        assert ks[256] < ks[32]


class TestPlotdata:
    @pytest.fixture()
    def samples_dir(self, tmp_path):
        out = tmp_path / "run"
        assert main(["simulate", "--n", "16", "--sweeps", "400", "--seed", "11",
                     "--out", str(out)]) == 0
        return out

    def test_single_bin_density_is_inverse_width(self, samples_dir, tmp_path):
        out = tmp_path / "plot"
        assert main(["plotdata", "--input", str(samples_dir / "samples.csv"), "--bins", "1",
                     "--out", str(out)]) == 0
        lines = read(out / "histogram.csv").splitlines()
        assert lines[0] == "bin_left,bin_right,density_empirical,density_limit"
        left, right, emp, _ = lines[1].split(",")
        assert float(emp) == pytest.approx(1.0 / (float(right) - float(left)), rel=1e-12)

    def test_normalization_exact(self, samples_dir, tmp_path):
        out = tmp_path / "plot"
        assert main(["plotdata", "--input", str(samples_dir / "samples.csv"), "--bins", "20",
                     "--out", str(out)]) == 0
        rows = [line.split(",") for line in read(out / "histogram.csv").splitlines()[1:]]
        total = sum((float(r[1]) - float(r[0])) * float(r[2]) for r in rows)
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_overlay_matches_limit_density_at_midpoints(self, samples_dir, tmp_path):
        out = tmp_path / "plot"
        assert main(["plotdata", "--input", str(samples_dir / "samples.csv"), "--bins", "7",
                     "--overlay-limit", "--sigma", "1.0", "--out", str(out)]) == 0
        law = QuarticLaw(1.0)
        for row in read(out / "histogram.csv").splitlines()[1:]:
            left, right, _, limit = row.split(",")
            mid = 0.5 * (float(left) + float(right))
            assert float(limit) == pytest.approx(law.density(mid), rel=1e-15)

    def test_missing_input_exits_1(self, tmp_path):
        assert main(["plotdata", "--input", str(tmp_path / "nope.csv"), "--out", str(tmp_path)]) == 1


class TestConfigPrecedence:
    def test_flag_beats_config_beats_default(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("sigma = 2.0\nsweeps = 7\n# comment\n")
        out = tmp_path / "a"
        assert main(["simulate", "--n", "8", "--sigma", "3.0", "--config", str(cfg),
                     "--out", str(out)]) == 0
        manifest = json.loads(read(out / "manifest.json"))
        assert manifest["params"]["sigma"] == 3.0  # flag wins
        assert manifest["sampler"]["sweeps"] == 7  # config beats default

    def test_malformed_config_exits_2(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("sigma 2.0\n")
        assert main(["simulate", "--n", "8", "--config", str(cfg), "--out", str(tmp_path / "x")]) == 2

    def test_env_seed_used_when_flag_absent(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CWSOC_SEED", "314")
        out = tmp_path / "env"
        assert main(["simulate", "--n", "8", "--sweeps", "2", "--out", str(out)]) == 0
        manifest = json.loads(read(out / "manifest.json"))
        assert manifest["sampler"]["seed"] == 314

    def test_flag_beats_env_seed(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CWSOC_SEED", "314")
        out = tmp_path / "flag"
        assert main(["simulate", "--n", "8", "--sweeps", "2", "--seed", "9", "--out", str(out)]) == 0
        manifest = json.loads(read(out / "manifest.json"))
        assert manifest["sampler"]["seed"] == 9


class TestLimitSampleAgainstKs:
    def test_printed_samples_pass_ks_against_cdf(self, capsys):
        from cwsoc.verification import ks_statistic

        assert main(["limit", "--sample", "20000", "--sigma", "1.0", "--seed", "8"]) == 0
        values = np.sort([float(line) for line in capsys.readouterr().out.splitlines()])
        assert values.size == 20000
        ks = ks_statistic(values, QuarticLaw(1.0).cdf)
        assert ks < 1.36 / math.sqrt(values.size)
