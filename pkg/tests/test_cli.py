import json
import math
from importlib import resources

import jsonschema
import numpy as np
import pytest

from ginfo import CovarianceMatrix, Ordering
from ginfo.cli import main
from ginfo.matrixio import save_cvm

SCHEMA = json.loads(resources.files("ginfo").joinpath("schemas/report.schema.json").read_text())


def run(tmp_path, *argv):
    out = tmp_path / "out.txt"
    code = main([*argv, "--out", str(out)])
    return code, out.read_text() if out.exists() else ""


def validate_report(text):
    doc = json.loads(text)
    jsonschema.validate(doc, SCHEMA)
    return doc


class TestFigures:
    def test_figure1_csv_layout(self, tmp_path):
        code, text = run(tmp_path, "--command", "figure1", "--grid", "99")
        assert code == 0
        lines = text.strip().splitlines()
        header_lines = [ln for ln in lines if ln.startswith("#")]
        assert "# command=figure1" in header_lines
        assert "# m=0.125" in header_lines
        columns = lines[len(header_lines)]
        assert columns == "theta,min_invariant,margin,crossing_theta"
        rows = lines[len(header_lines) + 1:]
        assert len(rows) == 99
        crossing = {row.split(",")[3] for row in rows}
        assert len(crossing) == 1 and crossing != {""}   # one crossing, emitted on every row

    def test_byte_identical_reruns(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert main(["--command", "figure1", "--grid", "30", "--out", str(out1)]) == 0
        assert main(["--command", "figure1", "--grid", "30", "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_sweep_requires_correlations(self, tmp_path):
        code, _ = run(tmp_path, "--command", "sweep")
        assert code == 1

    def test_grid_floor(self, tmp_path):
        code, _ = run(tmp_path, "--command", "figure1", "--grid", "5")
        assert code == 1

    def test_unknown_flag_is_usage_error(self, tmp_path):
        assert main(["--command", "figure1", "--bogus", "1"]) == 1

    def test_unwritable_path_is_io_error(self):
        code = main(["--command", "figure1", "--grid", "10",
                     "--out", "/nonexistent-dir/f.csv"])
        assert code == 2

    def test_json_format(self, tmp_path):
        code, text = run(tmp_path, "--command", "figure3", "--grid", "12",
                         "--format", "json")
        assert code == 0
        doc = validate_report(text)
        assert doc["config"]["m"] == 0.0625
        assert len(doc["results"]["rows"]) == 12


class TestDistance:
    def test_identical_sources(self, tmp_path):
        code, text = run(tmp_path, "--command", "distance",
                         "--a", "1", "--b", "1", "--a0", "1", "--b0", "1")
        assert code == 0
        doc = validate_report(text)
        assert doc["results"]["distance_half"] == pytest.approx(0.0, abs=1e-12)

    def test_scaled_pair(self, tmp_path):
        code, text = run(tmp_path, "--command", "distance",
                         "--a", "1", "--b", "1", "--a0", "2", "--b0", "2")
        doc = validate_report(text)
        assert doc["results"]["distance_half"] == pytest.approx(
            math.sqrt(2) * math.log(2), rel=1e-12)
        assert doc["results"]["generalized_eigenvalues"] == pytest.approx([2.0] * 4)

    def test_invariance_check(self, tmp_path):
        code, text = run(tmp_path, "--command", "distance",
                         "--a", "1", "--b", "0.9", "--c", "0.2",
                         "--a0", "1.3", "--b0", "1.1", "--d0", "-0.3",
                         "--check-invariance", "--seed", "7")
        doc = validate_report(text)
        assert doc["results"]["invariance_delta"] < 1e-10

    def test_file_source(self, tmp_path):
        rng = np.random.default_rng(61)
        a = rng.normal(size=(4, 4))
        cvm = CovarianceMatrix(a @ a.T + np.eye(4), ordering=Ordering.MODE_INTERLEAVED)
        path = tmp_path / "s1.cvm"
        save_cvm(path, cvm)
        code, text = run(tmp_path, "--command", "distance",
                         "--sigma1", str(path), "--sigma2", str(path))
        assert code == 0
        doc = validate_report(text)
        assert doc["results"]["distance_half"] == pytest.approx(0.0, abs=1e-10)

    def test_uncertainty_violating_state_rejected(self, tmp_path):
        code, _ = run(tmp_path, "--command", "distance",
                      "--a", "0.4", "--b", "0.4", "--a0", "1", "--b0", "1")
        assert code == 3

    def test_malformed_file_rejected(self, tmp_path):
        bad = tmp_path / "bad.cvm"
        bad.write_text("no header\n1 0\n0 1\n")
        code = main(["--command", "distance", "--sigma1", str(bad),
                     "--sigma2", str(bad), "--out", str(tmp_path / "o")])
        assert code == 3

    def test_missing_source_is_usage_error(self, tmp_path):
        code, _ = run(tmp_path, "--command", "distance", "--a", "1", "--b", "1")
        assert code == 1


class TestReports:
    def test_metric_report(self, tmp_path):
        code, text = run(tmp_path, "--command", "metric",
                         "--a", "1", "--b", "1")
        assert code == 0
        doc = validate_report(text)
        g = np.array(doc["results"]["metric"])
        np.testing.assert_allclose(g, np.eye(4), atol=1e-12)
        assert doc["results"]["det_closed_form"] == pytest.approx(1.0)
        assert doc["results"]["numeric_route_max_deviation"] < 1e-6

    def test_oscillator_report(self, tmp_path):
        code, text = run(tmp_path, "--command", "oscillator",
                         "--m1", "1", "--m2", "1", "--w1", "1", "--w2", "2",
                         "--theta", "0.3", "--eta", "0.2")
        assert code == 0
        doc = validate_report(text)
        res = doc["results"]
        assert res["separable"] is False
        assert res["ppt_margin"] < 0
        assert res["min_invariant"] == pytest.approx(1.0, abs=1e-9)
        assert res["hbar_effective"] == pytest.approx(1.015)

    def test_volume_report(self, tmp_path):
        args = ("--command", "volume", "--region", "separable",
                "--samples", "2000", "--seed", "3")
        code, text = run(tmp_path, *args)
        assert code == 0
        doc = validate_report(text)
        assert doc["results"]["volume"] > 0
        code2, text2 = run(tmp_path, *args)
        assert text == text2   # seeded determinism


class TestSelftest:
    def test_full_battery_passes(self, tmp_path, capsys):
        import time
        out = tmp_path / "selftest.json"
        start = time.monotonic()
        code = main(["--command", "selftest", "--out", str(out)])
        elapsed = time.monotonic() - start
        captured = capsys.readouterr().out
        assert "seed=20240901" in captured
        assert "selftest PASSED" in captured
        assert code == 0
        assert captured.count("PASS") >= 25
        assert elapsed < 60.0
        doc = validate_report(out.read_text())
        assert doc["results"]["passed"] is True
        assert len(doc["results"]["deviation_report"]) == 3 * 99
