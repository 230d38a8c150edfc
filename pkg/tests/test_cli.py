import json
import subprocess
import sys

import pytest

from stridecue.cli import main
from stridecue.noise import read_series_csv


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write_series(path, values):
    path.write_text("index,duration_s\n" + "".join(f"{i},{v!r}\n" for i, v in enumerate(values)))
    return path


class TestCalibrate:
    def test_three_rows(self, tmp_path, capsys):
        trial = write_series(tmp_path / "trial.csv", [1.0, 1.2, 1.1])
        code, out, _ = run(["calibrate", str(trial)], capsys)
        assert code == 0
        d = json.loads(out)
        assert d["mu_s"] == pytest.approx(1.1)
        assert d["sigma_s"] == pytest.approx(0.1)
        assert (d["clamp_min_s"], d["clamp_max_s"]) == (1.0, 1.2)
        assert d["kind"] == "pink" and d["n"] == 5000

    def test_empty_file(self, tmp_path, capsys):
        (tmp_path / "e.csv").write_text("")
        code, _, err = run(["calibrate", str(tmp_path / "e.csv")], capsys)
        assert code == 1 and "no data" in err

    def test_non_numeric_cell(self, tmp_path, capsys):
        (tmp_path / "t.csv").write_text("index,duration_s\n0,1.1\n1,1.2\n2,x\n")
        code, _, err = run(["--json-errors", "calibrate", str(tmp_path / "t.csv")], capsys)
        assert code == 1
        assert "line 4" in json.loads(err)["message"]


class TestGenerate:
    def test_iso(self, capsys):
        code, out, _ = run(["generate", "--kind", "iso", "--n", "3", "--value", "1.15"], capsys)
        assert code == 0
        assert out == "index,duration_s\n0,1.15\n1,1.15\n2,1.15\n"

    def test_deterministic_files(self, tmp_path, capsys):
        args = ["generate", "--kind", "pink", "--n", "5000", "--mu", "1.15", "--sigma", "0.02", "--seed", "7"]
        assert main(args + ["-o", str(tmp_path / "a.csv")]) == 0
        assert main(args + ["-o", str(tmp_path / "b.csv")]) == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert len(read_series_csv(tmp_path / "a.csv")) == 5000

    def test_zero_n_usage_error(self, capsys):
        code, _, err = run(["generate", "--kind", "white", "--n", "0"], capsys)
        assert code == 2

    def test_params_json(self, tmp_path, capsys):
        (tmp_path / "p.json").write_text(json.dumps({"kind": "white", "n": 10, "mu_s": 1.0, "sigma_s": 0.0, "seed": 1}))
        code, out, _ = run(["generate", "--params", str(tmp_path / "p.json")], capsys)
        assert code == 0
        assert out.splitlines()[1:] == [f"{i},1" for i in range(10)]

    def test_calibrate_then_generate(self, tmp_path, capsys):
        write_series(tmp_path / "trial.csv", [1.05, 1.2, 1.1, 1.15])
        assert main(["calibrate", str(tmp_path / "trial.csv"), "--n", "256", "-o", str(tmp_path / "p.json")]) == 0
        assert main(["generate", "--params", str(tmp_path / "p.json"), "-o", str(tmp_path / "s.csv")]) == 0
        vals = read_series_csv(tmp_path / "s.csv")
        assert len(vals) == 256 and min(vals) >= 1.05 and max(vals) <= 1.2

    def test_unknown_flag(self, capsys):
        code, _, err = run(["--json-errors", "generate", "--bogus"], capsys)
        assert code == 2
        assert json.loads(err)["exit_code"] == 2

    def test_output_dir_env(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("STRIDECUE_OUTPUT_DIR", str(tmp_path / "out"))
        assert main(["generate", "--kind", "iso", "--n", "2", "--value", "1.0", "-o", "s.csv"]) == 0
        assert (tmp_path / "out" / "s.csv").exists()


class TestAnalyze:
    def test_constant_series(self, tmp_path, capsys):
        write_series(tmp_path / "c.csv", [1.15] * 200)
        code, out, _ = run(["analyze", str(tmp_path / "c.csv")], capsys)
        assert code == 0
        d = json.loads(out)
        assert d["sd_s"] == 0.0 and d["mean_s"] == 1.15
        assert d["psd_slope"] is None and "zero variance" in d["psd_slope_error"]
        assert {"mean_s", "sd_s", "min_s", "max_s", "psd_slope", "dfa_alpha"} <= set(d)

    def test_pink_fixture(self, tmp_path, capsys):
        main(["generate", "--kind", "pink", "--n", "5000", "--seed", "3", "-o", str(tmp_path / "p.csv")])
        code, out, _ = run(["analyze", str(tmp_path / "p.csv"), "--spectrum-csv", str(tmp_path / "spec.csv")], capsys)
        d = json.loads(out)
        assert 0.9 <= d["dfa_alpha"] <= 1.1
        assert -1.2 <= d["psd_slope"] <= -0.8
        assert (tmp_path / "spec.csv").read_text().startswith("freq,power\n")

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run(["analyze", str(tmp_path / "nope.csv")], capsys)
        assert code == 1 and "nope.csv" in err


class TestSchedule:
    def test_reference_durations(self, tmp_path, capsys):
        write_series(tmp_path / "s.csv", [2.15, 1.28, 1.84])
        code, out, _ = run(["schedule", str(tmp_path / "s.csv")], capsys)
        lines = out.splitlines()
        assert lines[0] == "cycle,target_s,speed_factor"
        speeds = [float(l.split(",")[2]) for l in lines[1:]]
        assert speeds == pytest.approx([1.18 / 2.15, 1.18 / 1.28, 1.18 / 1.84], rel=1e-12)

    def test_custom_baseline(self, tmp_path, capsys):
        write_series(tmp_path / "s.csv", [2.0])
        _, out, _ = run(["schedule", str(tmp_path / "s.csv"), "--baseline", "1.0"], capsys)
        assert float(out.splitlines()[1].split(",")[2]) == 0.5

    @pytest.mark.parametrize("b", ["0", "-1"])
    def test_bad_baseline(self, tmp_path, capsys, b):
        write_series(tmp_path / "s.csv", [2.0])
        code, _, _ = run(["schedule", str(tmp_path / "s.csv"), "--baseline", b], capsys)
        assert code == 2


class TestSimulate:
    def test_stationary_all_idle(self, tmp_path, capsys):
        (tmp_path / "poses.csv").write_text("t_s,x_m,y_m,heading_rad\n" + "".join(f"{i / 60},1,2,0.5\n" for i in range(120)))
        code = main(["simulate", "--poses", str(tmp_path / "poses.csv"), "--out-dir", str(tmp_path)])
        assert code == 0
        rows = (tmp_path / "trace.csv").read_text().splitlines()
        assert rows[0] == "t_s,mode,avatar_x,avatar_y,bearing_offset_rad,user_speed_mps"
        assert {r.split(",")[1] for r in rows[1:]} == {"idle"}

    def test_straight_walk(self, tmp_path, capsys):
        assert main(["simulate", "--walk-speed", "1.0", "--duration", "5", "--out-dir", str(tmp_path)]) == 0
        rep = json.loads((tmp_path / "report.json").read_text())
        assert rep["final_mode"] == "walking"
        assert abs(rep["final_bearing_offset_rad"]) < 0.0175
        assert abs(rep["final_separation_m"] - 2.0) <= 0.1

    def test_full_coupling_report(self, tmp_path, capsys):
        main(["generate", "--kind", "pink", "--n", "1000", "--seed", "2", "-o", str(tmp_path / "cue.csv")])
        code = main(
            ["simulate", "--duration", "3", "--cue", str(tmp_path / "cue.csv"), "--coupling", "1", "--out-dir", str(tmp_path)]
        )
        assert code == 0
        rep = json.loads((tmp_path / "report.json").read_text())
        assert rep["coupling"] == 1.0
        assert rep["follower_dfa_alpha"] == rep["cue_dfa_alpha"]
        assert rep["cycles_completed"] >= 1
        assert (tmp_path / "follower.csv").read_text() == (tmp_path / "cue.csv").read_text()


class TestBench:
    def test_rows(self, tmp_path, capsys):
        code, out, _ = run(["bench", "--kinds", "pink,white,iso", "--n", "512", "--repeats", "2"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "noise_type,cpu_pct_avg,gpu_pct_avg,memory_mb_avg,wall_ms_avg"
        assert [l.split(",")[0] for l in lines[1:]] == ["pink", "white", "iso"]
        assert all(l.split(",")[2] == "" for l in lines[1:])

    def test_mean_of_repeats(self, tmp_path, capsys):
        import statistics

        code = main(
            ["bench", "--kinds", "white", "--n", "512", "--repeats", "5", "--raw", str(tmp_path / "raw.csv"), "-o", str(tmp_path / "b.csv")]
        )
        assert code == 0
        raw = [float(l.split(",")[4]) for l in (tmp_path / "raw.csv").read_text().splitlines()[1:]]
        agg = float((tmp_path / "b.csv").read_text().splitlines()[1].split(",")[4])
        assert len(raw) == 5
        assert agg == statistics.mean(raw)

    def test_single_repeat(self, tmp_path, capsys):
        main(["bench", "--kinds", "pink", "--n", "256", "--repeats", "1", "--raw", str(tmp_path / "raw.csv"), "-o", str(tmp_path / "b.csv")])
        assert (tmp_path / "raw.csv").read_text() == (tmp_path / "b.csv").read_text()

    def test_trace_export(self, tmp_path, capsys):
        main(["bench", "--kinds", "iso", "--n", "8", "--repeats", "3", "--trace", str(tmp_path / "t.csv"), "-o", str(tmp_path / "b.csv")])
        lines = (tmp_path / "t.csv").read_text().splitlines()
        assert len(lines) == 4 and lines[1].startswith("generate.iso,")

    def test_unknown_kind(self, capsys):
        code, _, _ = run(["bench", "--kinds", "pink,brown"], capsys)
        assert code == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "stridecue.cli", "generate", "--kind", "iso", "--n", "2", "--value", "1.2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "index,duration_s\n0,1.2\n1,1.2\n"
