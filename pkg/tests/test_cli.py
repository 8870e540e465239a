import json
import math
import os

import pytest

from sensedesign import design_optimal, worst_subset
from sensedesign.cli import evaluation_report, main


def run(tmp_path, *argv) -> int:
    return main([str(a) for a in argv])


class TestDesign:
    def test_csv_contents(self, tmp_path):
        out = tmp_path / "d.csv"
        assert run(tmp_path, "design", "--n", 4, "--scheme", "theorem_even_b", "--output", out) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "index,angle_rad,angle_rad_raw,x,y"
        assert len(lines) == 5
        raw = [float(line.split(",")[2]) for line in lines[1:]]
        assert raw == pytest.approx([0.0, math.pi / 2, math.pi, 3 * math.pi / 2], abs=1e-12)
        folded = [float(line.split(",")[1]) for line in lines[1:]]
        assert folded == pytest.approx([0.0, math.pi / 2, 0.0, math.pi / 2], abs=1e-12)
        # x,y follow the raw (full-circle) angle, not the folded one
        assert float(lines[3].split(",")[3]) == pytest.approx(-1.0, abs=1e-12)

    def test_json_format(self, tmp_path):
        out = tmp_path / "d.json"
        assert run(tmp_path, "design", "--n", 7, "--format", "json", "--output", out) == 0
        doc = json.loads(out.read_text())
        assert doc["scheme"] == "optimal_auto"
        assert len(doc["angles"]) == 7

    def test_manifest_sidecar(self, tmp_path):
        out = tmp_path / "d.csv"
        run(tmp_path, "design", "--n", 4, "--output", out)
        manifest = json.loads((tmp_path / "d.csv.manifest.json").read_text())
        assert set(manifest) == {"command", "config", "seed", "tool_version", "timestamp_utc"}
        assert manifest["command"] == "design"
        assert manifest["config"]["n"] == 4

    def test_parity_violation_exits_2(self, tmp_path, capsys):
        out = tmp_path / "d.csv"
        assert run(tmp_path, "design", "--n", 7, "--scheme", "theorem_even_a", "--output", out) == 2
        assert "even" in capsys.readouterr().err
        assert not out.exists()

    def test_unknown_scheme_rejected_by_parser(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run(tmp_path, "design", "--n", 4, "--scheme", "nope")
        assert exc.value.code == 2

    def test_output_dir_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SENSEDESIGN_OUTPUT_DIR", str(tmp_path))
        assert run(tmp_path, "design", "--n", 5) == 0
        assert (tmp_path / "design_n5_optimal_auto.csv").exists()


class TestEvaluate:
    def test_round_trip_matches_in_process(self, tmp_path):
        d = tmp_path / "design.csv"
        run(tmp_path, "design", "--n", 7, "--output", d)
        out = tmp_path / "eval.json"
        assert run(tmp_path, "evaluate", "--angles-file", d, "--output", out) == 0
        doc = json.loads(out.read_text())
        want = evaluation_report(design_optimal(7), 3, "x")
        assert doc["worst_subset"] == list(want["worst_subset"])
        assert doc["pair_cosine_sum"] == want["pair_cosine_sum"]
        assert doc["gram_condition"] == want["gram_condition"]
        assert doc["subsets_evaluated"] == 35

    def test_by_scheme(self, tmp_path):
        out = tmp_path / "eval.json"
        assert run(tmp_path, "evaluate", "--n", 7, "--scheme", "semicircle", "--output", out) == 0
        doc = json.loads(out.read_text())
        assert doc["gram_condition"] == pytest.approx(6.967911665634092, abs=1e-9)

    def test_singular_design_serializes_inf(self, tmp_path):
        src = tmp_path / "angles.csv"
        src.write_text("angle_rad\n0.2\n0.2\n0.2\n")
        out = tmp_path / "eval.json"
        assert run(tmp_path, "evaluate", "--angles-file", src, "--output", out) == 0
        doc = json.loads(out.read_text())
        assert doc["gram_condition"] == "+inf"
        assert doc["lambda_min"] == 0.0

    def test_malformed_file_exits_3_with_line(self, tmp_path, capsys):
        src = tmp_path / "angles.csv"
        src.write_text("angle_rad\n0.2\nbanana\n")
        assert run(tmp_path, "evaluate", "--angles-file", src) == 3
        err = capsys.readouterr().err
        assert "line 3" in err
        assert "banana" in err

    def test_missing_column_exits_3(self, tmp_path, capsys):
        src = tmp_path / "angles.csv"
        src.write_text("theta\n0.2\n")
        assert run(tmp_path, "evaluate", "--angles-file", src) == 3
        assert "angle_rad" in capsys.readouterr().err

    def test_needs_exactly_one_source(self, tmp_path, capsys):
        src = tmp_path / "angles.csv"
        src.write_text("angle_rad\n0.2\n0.4\n0.9\n")
        assert run(tmp_path, "evaluate", "--angles-file", src, "--n", 5) == 2
        assert run(tmp_path, "evaluate") == 2

    def test_csv_format(self, tmp_path):
        out = tmp_path / "eval.csv"
        assert run(tmp_path, "evaluate", "--n", 5, "--output", out, "--format", "csv") == 0
        header, row = out.read_text().splitlines()
        cols = dict(zip(header.split(","), row.split(",")))
        assert cols["worst_subset"] == "0;1;2"
        assert float(cols["pair_cosine_sum"]) == pytest.approx(-0.19098300562505244, abs=1e-12)


class TestVerify:
    def test_small_run(self, tmp_path):
        out = tmp_path / "verify.csv"
        code = run(
            tmp_path,
            "verify",
            "--n-min", 3, "--n-max", 4,
            "--grid-max-n", 3, "--grid-points", 60,
            "--output", out,
        )
        assert code == 0
        lines = out.read_text().splitlines()
        header = lines[0].split(",")
        assert header[0] == "n" and header[-1] == "grid_minus_optimal"
        row3 = dict(zip(header, lines[1].split(",")))
        row4 = dict(zip(header, lines[2].split(",")))
        assert float(row3["optimal_objective"]) == pytest.approx(-1.5, abs=1e-12)
        assert abs(float(row3["grid_minus_optimal"])) <= 1e-4
        # grid columns are blank above --grid-max-n
        assert row4["grid_objective"] == "" and row4["grid_minus_optimal"] == ""
        assert float(row4["optimal_objective"]) == pytest.approx(-1.0, abs=1e-12)

    def test_resource_guard_exits_4(self, tmp_path, capsys):
        out = tmp_path / "verify.csv"
        code = run(
            tmp_path,
            "verify",
            "--n-min", 6, "--n-max", 6,
            "--grid-max-n", 6, "--grid-points", 180,
            "--output", out,
        )
        assert code == 4
        assert "resource limit" in capsys.readouterr().err

    def test_bad_range_exits_2(self, tmp_path):
        assert run(tmp_path, "verify", "--n-min", 5, "--n-max", 4) == 2


class TestSimulateEstimation:
    def test_reruns_are_byte_identical(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        args = ["simulate-estimation", "--n-min", 3, "--n-max", 4, "--trials", 25, "--seed", 7]
        assert run(tmp_path, *args, "--output", a) == 0
        assert run(tmp_path, *args, "--output", b) == 0
        assert a.read_bytes() == b.read_bytes()
        c = tmp_path / "c.csv"
        assert run(tmp_path, *args[:-1], 8, "--output", c) == 0
        assert c.read_bytes() != a.read_bytes()

    def test_row_layout(self, tmp_path):
        out = tmp_path / "est.csv"
        run(tmp_path, "simulate-estimation", "--n-min", 3, "--n-max", 3, "--trials", 10, "--output", out)
        lines = out.read_text().splitlines()
        assert lines[0] == "n,design,worst_subset,mse,std_error,expected_mse"
        assert len(lines) == 3  # optimal + semicircle for the single n
        assert lines[1].split(",")[1] == "optimal"
        manifest = json.loads((tmp_path / "est.csv.manifest.json").read_text())
        assert manifest["seed"] == 0
        assert manifest["config"]["trials"] == 10


class TestSimulateMonitoring:
    def test_tiny_run_deterministic(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        args = ["simulate-monitoring", "--n", 6, "--snr", "15,25", "--trials", 3, "--seed", 2]
        assert run(tmp_path, *args, "--output", a) == 0
        assert run(tmp_path, *args, "--output", b) == 0
        assert a.read_bytes() == b.read_bytes()
        lines = a.read_text().splitlines()
        assert lines[0] == "snr_db,design,noise_std,mse,std_error,mse_db,worst_subset"
        assert len(lines) == 1 + 2 * 2  # two SNR points, two designs
        # rows sorted by (snr, design)
        assert [l.split(",")[1] for l in lines[1:]] == ["optimal", "semicircle"] * 2
        manifest = json.loads((tmp_path / "a.csv.manifest.json").read_text())
        assert manifest["config"]["metadata"]["optimal"]["snr_reference"] == "unit_log_power"

    def test_bad_n_exits_2(self, tmp_path):
        assert run(tmp_path, "simulate-monitoring", "--n", 2) == 2


class TestWorstSubsetReexport:
    def test_consistency_with_cli_report(self):
        report = worst_subset(design_optimal(7))
        want = evaluation_report(design_optimal(7), 3, "x")
        assert list(report.worst_subset.indices) == want["worst_subset"]
