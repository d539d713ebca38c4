import json

import pytest

from divgreen.cli import main
from divgreen.config import RunConfig, load_config


class TestFixturesCommand:
    def test_lists_fields(self, capsys):
        assert main(["fixtures"]) == 0
        out = capsys.readouterr().out
        for name in ("vortex", "point-source", "diag-tangential"):
            assert name in out

    def test_json_output_is_valid(self, capsys):
        assert main(["fixtures", "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert "vortex" in payload["fields"]
        assert "disk" in payload["regions"]

    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["fixtures", "--bogus"])
        assert exc.value.code == 2


class TestGaussCommand:
    def test_linear_disk_ramp_passes(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        rc = main(
            ["gauss", "--field", "linear", "--region", "disk", "--approx", "ramp",
             "--out", str(out)]
        )
        assert rc == 0
        payload = json.loads(out.read_text())
        assert payload["version"] == 1
        assert payload["summary"]["failed"] == 0
        record = payload["records"][0]
        assert record["anchor"]
        assert record["values"]["residual"] <= 1e-3
        capsys.readouterr()

    def test_unknown_field_exits_2(self, capsys):
        assert main(["gauss", "--field", "nope", "--region", "disk", "--approx", "ramp"]) == 2
        capsys.readouterr()

    def test_failing_tolerance_exits_1(self, tmp_path, capsys):
        cfg = tmp_path / "cfg"
        cfg.write_text("gauss.tol = 1e-12\n")
        rc = main(
            ["--config", str(cfg), "gauss", "--field", "linear", "--region", "disk",
             "--approx", "ramp"]
        )
        assert rc == 1
        capsys.readouterr()

    def test_csv_trace(self, tmp_path, capsys):
        csv = tmp_path / "trace.csv"
        main(
            ["gauss", "--field", "constant", "--region", "box", "--approx", "ramp",
             "--csv", str(csv)]
        )
        lines = csv.read_text().splitlines()
        assert lines[0] == "scale,value"
        assert len(lines) > 1
        capsys.readouterr()


class TestDensityCommand:
    def test_quarter_sector(self, capsys):
        assert main(["density", "--set", "sector:1.5708"]) == 0
        payload = json.loads(capsys.readouterr().out)
        value = payload["records"][0]["values"]["value"]
        assert abs(value - 0.25) <= 1e-3

    def test_strip_family_flags_violation(self, capsys):
        assert main(["density", "--set", "strips"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["records"][0]["values"]["sigma_additivity_violated"] is True

    def test_bad_spec_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["density", "--set", "wat"])
        assert exc.value.code == 2


class TestTraceCommand:
    def test_vortex_detection(self, capsys):
        rc = main(["trace", "--field", "vortex", "--region", "unit-square", "--detect"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert (
            payload["records"][0]["values"]["classification"]
            == "pure-gradient-part-required"
        )


class TestSuiteCommand:
    def test_quick_suite_deterministic(self, tmp_path, capsys):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        assert main(["suite", "quick", "--out", str(a)]) == 0
        assert main(["suite", "quick", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        capsys.readouterr()

    def test_plot_data_written(self, tmp_path, capsys):
        plots = tmp_path / "plots"
        main(["suite", "quick", "--plots", str(plots)])
        files = sorted(p.name for p in plots.iterdir())
        assert "vortex_strip.dat" in files
        rows = (plots / "vortex_strip.dat").read_text().splitlines()
        assert len(rows) == 3 and all(len(r.split()) == 2 for r in rows)
        capsys.readouterr()


class TestConfig:
    def test_defaults(self):
        cfg = RunConfig()
        assert cfg.schedule().steps == 24

    def test_key_value_file(self, tmp_path):
        path = tmp_path / "cfg"
        path.write_text("quad.tol = 1e-6\nquad.schedule.steps = 12\n")
        cfg = load_config(str(path))
        assert cfg.quad_tol == 1e-6
        assert cfg.schedule_steps == 12

    def test_json_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"quad.schedule.ratio": 0.25}))
        cfg = load_config(str(path))
        assert cfg.schedule_ratio == 0.25

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "cfg"
        path.write_text("quad.typo = 1\n")
        with pytest.raises(ValueError, match="unknown config key"):
            load_config(str(path))

    def test_env_var_pickup(self, tmp_path, monkeypatch):
        path = tmp_path / "cfg"
        path.write_text("gauss.tol = 0.01\n")
        monkeypatch.setenv("DIVGREEN_CONFIG", str(path))
        cfg = load_config()
        assert cfg.gauss_tol == 0.01

    def test_invalid_values_rejected(self):
        with pytest.raises(ValueError):
            RunConfig(schedule_ratio=1.5)
        with pytest.raises(ValueError):
            RunConfig(quad_tol=-1)
