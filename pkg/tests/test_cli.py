import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from bihenon import __version__
from bihenon.cli import (
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    UsageError,
    int_list,
    main,
    parse_and_validate,
    render,
    run,
)
from bihenon.report import load_schema


def invoke(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def json_run(capsys, *argv):
    status, out, err = invoke(capsys, *argv, "--format", "json")
    report = json.loads(out)
    jsonschema.validate(report, load_schema())
    return status, report, err


def test_int_list():
    assert int_list("5:8") == [5, 6, 7, 8]
    assert int_list("13,15") == [13, 15]
    with pytest.raises(UsageError):
        int_list("8:5")


def test_parse_valid_exponents():
    cfg = parse_and_validate(["exponents", "--n", "13", "--a", "0"])
    assert cfg.command == "exponents"
    assert cfg.options == {"n": [13], "a": [0.0]}


def test_missing_p_is_usage_error(capsys):
    with pytest.raises(UsageError, match="--p"):
        parse_and_validate(["shoot", "--n", "6"])
    status, _, err = invoke(capsys, "shoot", "--n", "6")
    assert status == EXIT_USAGE and "usage error" in err


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["classify", "--n", "4", "--p", "3"],
    ["classify", "--n", "6", "--p", "3", "--unknown", "1"],
    ["shoot", "--n", "6", "--p", "5", "--rel-tol", "-1"],
    ["energy", "--n", "10", "--p", "4", "--form", "other"],
    ["exponents", "--n", "x"],
])
def test_usage_errors(capsys, argv):
    status, _, _ = invoke(capsys, *argv)
    assert status == EXIT_USAGE


def test_config_file_and_override(tmp_path):
    cfg_file = tmp_path / "run.ini"
    cfg_file.write_text("[bihenon]\nn = 10\np = 4\n\n[shoot]\nrel_tol = 1e-9\nb = -1\n")
    cfg = parse_and_validate(["shoot", "--config", str(cfg_file)])
    assert cfg.options["rel_tol"] == 1e-9 and cfg.options["b"] == -1.0
    cfg = parse_and_validate(["shoot", "--config", str(cfg_file), "--rel-tol", "1e-10"])
    assert cfg.options["rel_tol"] == 1e-10


def test_config_rejects_unknown_key(tmp_path):
    cfg_file = tmp_path / "run.ini"
    cfg_file.write_text("[shoot]\nn = 10\np = 4\ncolour = blue\n")
    with pytest.raises(UsageError, match="colour"):
        parse_and_validate(["shoot", "--config", str(cfg_file)])


def test_exponents_csv(capsys):
    status, out, _ = invoke(capsys, "exponents", "--n", "5:20", "--a", "0", "--format", "csv")
    assert status == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["n"]) for r in rows] == list(range(5, 21))
    assert set(rows[0]) == {"n", "a", "p_crit", "n_a", "p_a"}
    assert rows[0]["p_a"] == "inf"
    assert float(rows[8]["p_a"]) == pytest.approx(28.172379819867103, abs=1e-9)


def test_exponents_json_infinity_is_null(capsys):
    status, report, _ = json_run(capsys, "exponents", "--n", "12,13")
    assert status == EXIT_OK
    assert report["records"][0]["p_a"] is None
    assert report["version"] == __version__


def test_singular_error_exit(capsys):
    status, report, err = json_run(capsys, "singular", "--n", "6", "--p", "2.5")
    assert status == EXIT_FAILURE
    assert "ℓ2 ≤ 0" in report["errors"][0]["message"]
    assert "ℓ2 ≤ 0" in err


def test_singular_pass(capsys):
    status, report, _ = json_run(capsys, "singular", "--n", "10", "--p", "4")
    assert status == EXIT_OK
    assert len(report["records"]) == 20
    assert report["summary"]["is_stable"] is False


def test_pohozaev_pass(capsys):
    status, report, _ = json_run(capsys, "pohozaev", "--n", "6", "--p", "5")
    assert status == EXIT_OK
    assert all(v["passed"] for v in report["verdicts"])
    assert [r["R"] for r in report["records"]] == [1.0, 2.0, 4.0]


def test_pohozaev_beyond_blowup_is_computational_error(capsys):
    status, report, _ = json_run(capsys, "pohozaev", "--n", "6", "--p", "5", "--radius", "9")
    assert status == EXIT_FAILURE
    assert report["errors"][0]["type"] == "GridError"


def test_energy_verdict_failure_keeps_records(capsys):
    status, report, _ = json_run(capsys, "energy", "--n", "10", "--p", "4", "--b", "-1",
                                 "--form", "typeset")
    assert status == EXIT_FAILURE
    assert len(report["records"]) == 30
    assert report["verdicts"][0]["passed"] is False


def test_energy_pass(capsys):
    status, report, _ = json_run(capsys, "energy", "--n", "10", "--p", "4", "--b", "-1")
    assert status == EXIT_OK


def test_shoot_and_classify(capsys):
    status, report, _ = json_run(capsys, "shoot", "--n", "10", "--p", "4", "--b", "-1")
    assert status == EXIT_OK and report["summary"]["termination"] == "reached_horizon"
    status, report, _ = json_run(capsys, "classify", "--n", "13", "--p", "3")
    assert report["records"][0]["regime"] == "supercritical_below_JL"


def test_identities_command(capsys):
    status, report, _ = json_run(capsys, "identities", "--n", "6")
    assert status == EXIT_OK
    assert len(report["records"]) == 25 + 5


def test_scan_parallel_matches_serial(capsys):
    serial = invoke(capsys, "scan", "--n", "13:14", "--a", "0,1", "--p-step", "0.05")
    parallel = invoke(capsys, "scan", "--n", "14,13", "--a", "1,0", "--p-step", "0.05",
                      "--workers", "2")
    assert serial[0] == parallel[0] == EXIT_OK
    assert json.loads(serial[1])["records"] == json.loads(parallel[1])["records"]


def test_byte_identical_output(tmp_path, monkeypatch):
    monkeypatch.setenv("BIHENON_OUTPUT_DIR", str(tmp_path))
    argv = ["energy", "--n", "13", "--p", "3", "--format", "csv"]
    assert main(argv + ["--output", "one.csv"]) == EXIT_OK
    assert main(argv + ["--output", "two.csv"]) == EXIT_OK
    assert (tmp_path / "one.csv").read_bytes() == (tmp_path / "two.csv").read_bytes()


def test_timing_is_opt_in():
    cfg = parse_and_validate(["classify", "--n", "6", "--p", "5", "--timing"])
    report, _ = run(cfg)
    assert report["timing"]["wall_seconds"] >= 0
    jsonschema.validate(json.loads(render(report, "json")), load_schema())
    report, _ = run(parse_and_validate(["classify", "--n", "6", "--p", "5"]))
    assert "timing" not in report


def test_full_precision_in_json(capsys):
    _, report, _ = json_run(capsys, "exponents", "--n", "13")
    assert report["records"][0]["p_a"] == 28.172379819867103


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bihenon", "classify", "--n", "6", "--p", "5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["records"][0]["regime"] == "critical"
