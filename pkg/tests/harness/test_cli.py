import json

import pytest

from rbm_trace.fracdim import CalibrationResult, fit_loglog
from rbm_trace.harness import PRESETS, Aggregate
from rbm_trace.harness.cli import EXIT_ERROR, EXIT_FAIL, EXIT_PASS, build_parser, main


@pytest.fixture(autouse=True)
def wide_console(monkeypatch, tmp_path):
    monkeypatch.setenv("COLUMNS", "300")
    monkeypatch.delenv("RBM_TRACE_OUT_DIR", raising=False)
    monkeypatch.delenv("RBM_TRACE_WORKERS", raising=False)
    monkeypatch.chdir(tmp_path)


def test_list(capsys):
    assert main(["list"]) == EXIT_PASS
    out = capsys.readouterr().out
    for name in PRESETS:
        assert name in out
    assert "1.2619" in out
    assert "exploratory" in out


def test_run_writes_outputs(tmp_path, capsys):
    out_dir = tmp_path / "results"
    code = main(
        [
            "run",
            "--preset",
            "holder-regularity",
            "--paths",
            "2",
            "--T",
            "0.2",
            "--dt",
            "1e-4",
            "--seed",
            "5",
            "--workers",
            "2",
            "--out",
            str(out_dir),
            "--quiet",
        ]
    )
    assert code in (EXIT_PASS, EXIT_FAIL)
    for name in ("report.json", "loglog.csv", "summary.csv", "fit.csv"):
        assert (out_dir / name).exists()
    with open(out_dir / "report.json", encoding="utf-8") as f:
        doc = json.load(f)
    assert doc["config"]["master_seed"] == 5
    assert doc["config"]["paths"] == 2
    assert code == (EXIT_PASS if doc["passed"] else EXIT_FAIL)
    out = capsys.readouterr().out
    assert "Fingerprint" in out


def test_run_reports_a_failed_seed_check(mocker, capsys):
    flagged = Aggregate(n=2, mean=0.5, std=0.0, stderr=0.0, lag1_autocorrelation=0.45, seed_independent=False)
    mocker.patch("rbm_trace.harness._runner.aggregate", return_value=flagged)
    code = main(["run", "--preset", "holder-regularity", "--paths", "2", "--T", "0.2", "--dt", "1e-4"])
    assert code in (EXIT_PASS, EXIT_FAIL)
    assert "Seed check failed: |lag-1 rho| = 0.450" in capsys.readouterr().out


def test_run_from_config_file(tmp_path):
    config = tmp_path / "experiment.json"
    config.write_text(json.dumps({"preset": "holder-regularity", "paths": 1, "T": 0.2, "dt": 1e-4}))
    assert main(["run", "--config", str(config), "--out", str(tmp_path / "o"), "--quiet"]) in (EXIT_PASS, EXIT_FAIL)
    assert (tmp_path / "o" / "report.json").exists()


def test_run_replays_a_report(tmp_path):
    config = tmp_path / "experiment.json"
    config.write_text(json.dumps({"preset": "holder-regularity", "paths": 2, "T": 0.2, "dt": 1e-4, "master_seed": 3}))
    main(["run", "--config", str(config), "--out", str(tmp_path / "first"), "--quiet"])
    main(["run", "--config", str(tmp_path / "first" / "report.json"), "--out", str(tmp_path / "again"), "--quiet"])
    docs = []
    for name in ("first", "again"):
        with open(tmp_path / name / "report.json", encoding="utf-8") as f:
            doc = json.load(f)
        doc.pop("timing")
        docs.append(doc)
    assert docs[0] == docs[1]


def test_run_without_preset_is_an_error(capsys):
    assert main(["run", "--quiet"]) == EXIT_ERROR
    assert "No preset given" in capsys.readouterr().err


def test_run_with_invalid_values_is_an_error(capsys):
    assert main(["run", "--preset", "square-trace", "--paths", "0", "--quiet"]) == EXIT_ERROR
    assert "Invalid experiment config" in capsys.readouterr().err


def test_run_with_missing_env_file_is_an_error(capsys):
    assert main(["run", "--preset", "square-trace", "--env-file", "missing.env"]) == EXIT_ERROR
    assert "not found" in capsys.readouterr().err


def test_unknown_preset_is_rejected_by_the_parser():
    with pytest.raises(SystemExit) as e:
        build_parser().parse_args(["run", "--preset", "nope"])
    assert e.value.code == 2


def test_parser_overrides():
    args = build_parser().parse_args(["run", "--preset", "square-trace", "--k-min", "2", "--no-auto-window"])
    assert args.k_min == 2
    assert args.auto_window is False
    assert build_parser().parse_args(["run"]).auto_window is None


def _calibration(slope_offset):
    est = fit_loglog([1 / 2, 1 / 4, 1 / 8, 1 / 16], [2, 4, 8, 16], auto_window=False)
    return CalibrationResult(name="fixture", analytic=1.0 + slope_offset, estimate=est)


def test_calibrate(mocker, capsys):
    mocker.patch("rbm_trace.harness.cli.calibration_gate", return_value=[_calibration(0.0)])
    assert main(["calibrate"]) == EXIT_PASS
    assert "PASS" in capsys.readouterr().out
    mocker.patch("rbm_trace.harness.cli.calibration_gate", return_value=[_calibration(0.0), _calibration(0.2)])
    assert main(["calibrate"]) == EXIT_FAIL
    assert "FAIL" in capsys.readouterr().out
