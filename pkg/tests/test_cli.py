import csv
import io
import json
import subprocess
import sys

import pytest

from hydrostab import __version__
from hydrostab.catalog import PRESETS, load_preset
from hydrostab.cli import build_parser, main
from hydrostab.model import format_config


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def demo_config(tmp_path):
    path = tmp_path / "demo.cfg"
    path.write_text(format_config(load_preset("bdn19-demo").params))
    return path


class TestCheck:
    def test_certified_exit_zero(self, capsys, demo_config):
        code, out, _ = run(capsys, "check", str(demo_config))
        assert code == 0
        assert json.loads(out)["verdict"] == "StableC1"

    def test_preset_name(self, capsys):
        code, out, _ = run(capsys, "check", "ft-c2")
        assert code == 0 and json.loads(out)["verdict"] == "StableC2"

    def test_not_certified_exit_one(self, capsys, tmp_path):
        path = tmp_path / "neg.cfg"
        path.write_text(format_config(load_preset("bdn19-demo").params.replace(eta=-1.0)))
        code, out, err = run(capsys, "check", str(path))
        assert code == 1
        assert "eta_pos" in err and "hyperbolicity" in err
        assert json.loads(out)["certified"] is False

    def test_malformed_exit_two_names_key(self, capsys, tmp_path, demo_config):
        bad = tmp_path / "bad.cfg"
        bad.write_text(demo_config.read_text().replace("mu = 1.0", "mu = abc"))
        code, _, err = run(capsys, "check", str(bad))
        assert code == 2 and "[mu]" in err

    def test_unknown_source_exit_two(self, capsys):
        code, _, err = run(capsys, "check", "no-such-preset")
        assert code == 2 and "bdn19-demo" in err

    def test_numerical_failure_exit_three(self, capsys, tmp_path):
        path = tmp_path / "amb.cfg"
        path.write_text("kappa = 1\nmu = 1\neta = 1\nnu = -1e-14\nchi = 1.3333333333333233\n"
                        "tau = -0.9999999999999\nomega = 1.1e-13\ncs = 1\n")
        code, _, err = run(capsys, "check", str(path))
        assert code == 3 and "AmbiguousClassification" in err

    def test_json_is_byte_identical(self, capsys, demo_config):
        _, a, _ = run(capsys, "check", str(demo_config))
        _, b, _ = run(capsys, "check", str(demo_config))
        assert a == b

    def test_csv_and_output_file(self, capsys, demo_config, tmp_path):
        target = tmp_path / "out.csv"
        code, out, _ = run(capsys, "check", str(demo_config), "--format", "csv", "-o", str(target))
        assert code == 0 and out == ""
        rows = dict(csv.reader(io.StringIO(target.read_text())))
        assert rows["verdict"] == "StableC1"
        assert rows["hyperbolicity.class"] == "ClassI_strict"


class TestOtherCommands:
    def test_dispersion(self, capsys):
        code, out, _ = run(capsys, "dispersion", "bdn19-demo", "--n", "10")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "xi,re_lambda,im_lambda,branch_id,block" and len(lines) == 61

    def test_decay(self, capsys):
        code, out, _ = run(capsys, "decay", "bdn19-demo", "--n-times", "12")
        assert code == 0
        exponent = float(out.splitlines()[0].split("=")[1])
        assert -0.80 <= exponent <= -0.70

    def test_decay_bad_amplitudes(self, capsys):
        code, _, err = run(capsys, "decay", "bdn19-demo", "--amplitudes", "1,0")
        assert code == 2 and "[amplitudes]" in err

    def test_scan(self, capsys, tmp_path):
        spec = tmp_path / "scan.json"
        spec.write_text(json.dumps({"preset": "ft-c2", "axes": [{"name": "tau", "lo": -1.5, "hi": -0.5, "n": 3}]}))
        code, out, _ = run(capsys, "scan", str(spec))
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [r["theorem1_verdict"] for r in rows] == ["NotCertified", "StableC2", "NotCertified"]

    def test_scan_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "scan", str(tmp_path / "missing.json"))
        assert code == 2 and "missing.json" in err

    def test_presets(self, capsys):
        code, out, _ = run(capsys, "presets")
        assert code == 0
        assert [p["name"] for p in json.loads(out)] == list(PRESETS)
        code, out, _ = run(capsys, "presets", "--format", "csv")
        assert out.splitlines()[0].startswith("name,family,expected_verdict")


def test_help_shows_defaults():
    text = build_parser()._subparsers._group_actions[0].choices["decay"].format_help()
    text = " ".join(text.split())
    for default in ("1e-08", "(default: 1,0,0,0)", "(default: 40)"):
        assert default in text


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "hydrostab.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == __version__
