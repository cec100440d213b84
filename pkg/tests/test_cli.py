import json

import pytest

import dpilab.cli as cli
import dpilab.suites as suites
from dpilab.suites import Case


def run(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_suite_run_to_stdout(capsys):
    code, out, err = run(["szego"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["schema"] == 1 and report["passed"]
    assert err == ""


def test_out_directory_writes_files(tmp_path, capsys):
    code, out, _ = run(
        ["szego", "--out", str(tmp_path), "--format", "json,csv"], capsys
    )
    assert code == 0
    paths = out.strip().splitlines()
    assert any(p.endswith("report.json") for p in paths)
    assert any(p.endswith("report.csv") for p in paths)
    assert (tmp_path / "report.json").exists()
    assert (tmp_path / "report.csv").exists()
    assert not (tmp_path / "failures.json").exists()


def test_seed_flag_sets_report_seed(capsys):
    code, out, _ = run(["szego", "--seed", "99"], capsys)
    assert code == 0
    assert json.loads(out)["seed"] == 99


def test_seed_flag_beats_config_and_env(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 5}))
    monkeypatch.setenv("DPILAB_SEED", "7")
    code, out, _ = run(["szego", "--config", str(cfg), "--seed", "11"], capsys)
    assert code == 0 and json.loads(out)["seed"] == 11


def test_config_seed_beats_env(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 5}))
    monkeypatch.setenv("DPILAB_SEED", "7")
    code, out, _ = run(["szego", "--config", str(cfg)], capsys)
    assert code == 0 and json.loads(out)["seed"] == 5


def test_env_seed_fallback(monkeypatch, capsys):
    monkeypatch.setenv("DPILAB_SEED", "13")
    code, out, _ = run(["szego"], capsys)
    assert code == 0 and json.loads(out)["seed"] == 13


def test_env_seed_must_be_integer(monkeypatch, capsys):
    monkeypatch.setenv("DPILAB_SEED", "not-a-number")
    code, _, err = run(["szego"], capsys)
    assert code == 1
    assert "DPILAB_SEED" in err


def test_missing_config_file(capsys):
    code, _, err = run(["szego", "--config", "/nonexistent/cfg.json"], capsys)
    assert code == 1
    assert "cannot read config" in err


def test_malformed_json_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    code, _, err = run(["szego", "--config", str(cfg)], capsys)
    assert code == 1
    assert "not valid JSON" in err


def test_unknown_config_field_names_it(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus_field": 1}))
    code, _, err = run(["szego", "--config", str(cfg)], capsys)
    assert code == 1
    assert "bogus_field" in err


def test_case_suite_mismatch_rejected(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {"cases": [{"case": "szego", "spectrum": {"kind": "white", "level": 1.0}, "sizes": [16, 32]}]}
        )
    )
    code, _, err = run(["alpha", "--config", str(cfg)], capsys)
    assert code == 1
    assert "config error" in err


def test_bad_seed_value_rejected(capsys):
    code, _, err = run(["szego", "--seed", "-3"], capsys)
    assert code == 1
    assert "seed" in err


def test_failing_case_exits_two(monkeypatch, capsys):
    # force a failing battery so the failure path is exercised honestly
    def fake_defaults(suite):
        return [Case("doomed", lambda rng: {"passed": False, "failure": "injected failure"})]

    monkeypatch.setattr(suites, "default_cases", fake_defaults)
    code, out, err = run(["szego"], capsys)
    assert code == 2
    assert json.loads(out)["passed"] is False
    assert "injected failure" in err


def test_failing_case_writes_manifest(monkeypatch, tmp_path, capsys):
    def fake_defaults(suite):
        return [Case("doomed", lambda rng: {"passed": False, "failure": "injected failure"})]

    monkeypatch.setattr(suites, "default_cases", fake_defaults)
    code, out, _ = run(["szego", "--out", str(tmp_path)], capsys)
    assert code == 2
    manifest = json.loads((tmp_path / "failures.json").read_text())
    assert manifest["failures"][0]["case"] == "doomed"


def test_unwritable_out_dir(capsys):
    code, _, err = run(["szego", "--out", "/proc/definitely/not/writable"], capsys)
    assert code == 1
    assert "cannot write report" in err


def test_unknown_suite_rejected_by_parser(capsys):
    with pytest.raises(SystemExit):
        cli.main(["not-a-suite"])
