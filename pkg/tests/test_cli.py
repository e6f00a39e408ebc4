import json

import pytest

from spinkick.cli import main


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


class TestExitCodes:
    def test_usage_error_from_bad_chain_length(self, capsys):
        rc, _, err = run(capsys, "graph", "1")
        assert rc == 2
        assert "error:" in err

    def test_usage_error_from_conflicting_schedule_flags(self, capsys):
        rc, _, err = run(capsys, "simulate", "--n-sites", "3",
                         "--scheme", "JxJy", "--sin-m", "4")
        assert rc == 2
        assert "exactly one" in err

    def test_usage_error_from_missing_n_sites(self, capsys):
        rc, _, err = run(capsys, "simulate", "--sin-m", "4")
        assert rc == 2
        assert "--n-sites" in err

    def test_usage_error_from_missing_schedule_file(self, capsys):
        rc, _, _ = run(capsys, "simulate", "--schedule", "/no/such/file.json")
        assert rc == 2

    def test_resource_cap_exit(self, capsys):
        rc, _, err = run(capsys, "oracle", "ghz", "--sites", *(["0"] * 16))
        assert rc == 4
        assert "error:" in err

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0

    def test_missing_subcommand(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2


class TestGraphCommand:
    def test_dot_output(self, capsys):
        rc, out, _ = run(capsys, "graph", "3")
        assert rc == 0
        assert out.startswith("digraph operator_graph")
        assert out.count("->") == 3 * 3 - 2

    def test_json_output(self, capsys):
        rc, out, _ = run(capsys, "graph", "4", "--format", "json")
        assert rc == 0
        data = json.loads(out)
        assert len(data["nodes"]) == 8
        channels = {e["channel"] for node in data["nodes"] for e in node["edges"]}
        assert channels == {"B", "Jx", "Jy"}

    def test_channel_restriction(self, capsys):
        rc, out, _ = run(capsys, "graph", "5", "--channels", "B", "--format", "json")
        assert rc == 0
        data = json.loads(out)
        assert len(data["nodes"]) == 2

    def test_write_to_file(self, capsys, tmp_path):
        target = tmp_path / "graph.dot"
        rc, out, _ = run(capsys, "graph", "3", "--out", str(target))
        assert rc == 0
        assert out == ""
        assert target.read_text().startswith("digraph operator_graph")


class TestSimulateCommand:
    def test_csv_to_stdout(self, capsys):
        rc, out, _ = run(capsys, "simulate", "--n-sites", "3",
                         "--scheme", "JxJy", "--steps", "6")
        assert rc == 0
        lines = out.splitlines()
        assert lines[0].startswith("# spinkick simulate version=")
        assert "scheme=JxJy" in lines[1]
        assert lines[2] == "t," + ",".join(f"alpha_{i}" for i in range(1, 7)) + ",norm"
        assert len(lines) == 3 + 7

    def test_summary_file_and_csv_file(self, capsys, tmp_path):
        csv_path = tmp_path / "run.csv"
        summary_path = tmp_path / "run.json"
        rc, out, _ = run(capsys, "simulate", "--n-sites", "3", "--scheme", "JxJy",
                         "--steps", "6", "--out", str(csv_path),
                         "--summary", str(summary_path))
        assert rc == 0
        report = json.loads(summary_path.read_text())
        assert abs(report["max_alpha_N"]) == pytest.approx(1.0, abs=1e-9)
        assert report["fidelity"] == pytest.approx(1.0, abs=1e-9)
        assert report["meta"]["n_steps"] == 6
        assert csv_path.read_text().count("\n") == 3 + 7

    def test_y_seed(self, capsys):
        rc, out, _ = run(capsys, "simulate", "--n-sites", "3", "--scheme", "JxJy",
                         "--steps", "6", "--seed-node", "Y")
        assert rc == 0
        assert "seed_node=Y" in out


class TestSweepCommand:
    JSON_SPEC = {
        "schedule_family": "sin_power",
        "swept_parameter": "m",
        "values": [2, 4],
        "fixed": {"n_sites": 3},
        "steps_per_pi": 60,
    }
    KEYVALUE_SPEC = """\
# sin-power sweep over the pulse exponent
family = sin_power
sweep = m
values = 2,4
fixed.n_sites = 3
steps_per_pi = 60
"""

    def test_json_and_keyvalue_specs_agree(self, capsys, tmp_path):
        json_file = tmp_path / "spec.json"
        json_file.write_text(json.dumps(self.JSON_SPEC))
        kv_file = tmp_path / "spec.txt"
        kv_file.write_text(self.KEYVALUE_SPEC)
        rc1, out1, _ = run(capsys, "sweep", str(json_file))
        rc2, out2, _ = run(capsys, "sweep", str(kv_file))
        assert rc1 == rc2 == 0
        assert out1 == out2
        lines = out1.splitlines()
        assert lines[2] == "param,max_alpha,t_star,fidelity_max,fidelity_at_tau"
        assert len(lines) == 3 + 2

    def test_unknown_family_is_usage_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({**self.JSON_SPEC, "schedule_family": "nope"}))
        rc, _, err = run(capsys, "sweep", str(bad))
        assert rc == 2
        assert "family" in err

    def test_malformed_json_is_usage_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        rc, _, _ = run(capsys, "sweep", str(bad))
        assert rc == 2


class TestOracleCommands:
    def test_compare_reports_tiny_deviation(self, capsys):
        rc, out, _ = run(capsys, "oracle", "compare", "--n-sites", "3",
                         "--scheme", "JxJy", "--steps", "12")
        assert rc == 0
        report = json.loads(out)
        assert report["max_deviation"] < 1e-6
        assert report["grid_points"] == 13

    def test_fidelity_report_shape(self, capsys):
        rc, out, _ = run(capsys, "oracle", "fidelity", "--n-sites", "2",
                         "--scheme", "JxJy", "--steps", "8",
                         "--samples", "50", "--seed", "7", "--read-time", "end")
        assert rc == 0
        report = json.loads(out)
        assert report["read_time"] == pytest.approx(2.0)
        assert 0.0 <= report["monte_carlo_mean"] <= 1.0
        assert report["meta"]["samples"] == 50

    def test_fidelity_numeric_read_time(self, capsys):
        rc, out, _ = run(capsys, "oracle", "fidelity", "--n-sites", "2",
                         "--scheme", "JxJy", "--steps", "8",
                         "--samples", "20", "--read-time", "1.0")
        assert rc == 0
        assert json.loads(out)["read_time"] == pytest.approx(1.0)

    def test_ghz_fidelity_and_state_dump(self, capsys, tmp_path):
        dump = tmp_path / "state.json"
        rc, out, _ = run(capsys, "oracle", "ghz",
                         "--sites", "X+", "0", "0", "X+",
                         "--dump-state", str(dump))
        assert rc == 0
        report = json.loads(out)
        assert report["fidelity"] == pytest.approx(1.0, abs=1e-9)
        assert report["n_sites"] == 4
        entries = json.loads(dump.read_text())
        assert all(len(bits) == 4 for bits, _, _ in entries)
        total = sum(re * re + im * im for _, re, im in entries)
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_ghz_comma_tokens(self, capsys):
        rc, out, _ = run(capsys, "oracle", "ghz", "--sites", "X+,0,0,X+")
        assert rc == 0
        assert json.loads(out)["fidelity"] == pytest.approx(1.0, abs=1e-9)


class TestCalibrateCommand:
    def test_sin_power_amplitude(self, capsys):
        rc, out, _ = run(capsys, "calibrate", "--sin-m", "6")
        assert rc == 0
        report = json.loads(out)
        assert report["amplitude"] == pytest.approx(0.8, abs=1e-12)

    def test_boxcar_amplitude(self, capsys):
        rc, out, _ = run(capsys, "calibrate", "--boxcar-width", "0.5")
        assert rc == 0
        import math
        assert json.loads(out)["amplitude"] == pytest.approx(math.pi / 2, abs=1e-12)

    def test_requires_exactly_one_shape(self, capsys):
        rc, _, _ = run(capsys, "calibrate")
        assert rc == 2
        rc, _, _ = run(capsys, "calibrate", "--sin-m", "4", "--boxcar-width", "1.0")
        assert rc == 2


class TestDeterminism:
    def test_simulate_is_byte_identical(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["simulate", "--n-sites", "4", "--sin-m", "4", "--steps", "100"]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_monte_carlo_is_seed_deterministic(self, capsys):
        argv = ["oracle", "fidelity", "--n-sites", "2", "--scheme", "JxJy",
                "--steps", "8", "--samples", "40", "--seed", "9",
                "--read-time", "end"]
        _, out1, _ = run(capsys, *argv)
        _, out2, _ = run(capsys, *argv)
        assert out1 == out2
