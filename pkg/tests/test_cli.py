#!/usr/bin/env python3
"""
End-to-end tests of the command-line entry point.
"""

import csv
import json

import pytest

import main
from modules import pipeline
from modules.config_manager import PROJECT_ROOT
from modules.constants import LOG_FILE, MANIFEST_FILE, REPORT_FILE
from modules.rep_solver import EstimateViolated

SOLVE = ["solve", "heisenberg", "--lambda", "0,0,1", "--X", "1,0,0", "--f", "dgaussian"]


@pytest.fixture
def out(tmp_path):
    return tmp_path / "run"


def read_report(directory):
    return json.loads((directory / REPORT_FILE).read_text(encoding="utf-8"))


def test_no_arguments_prints_help(capsys):
    assert main.main([]) == 0
    assert "usage: nilcohom" in capsys.readouterr().out


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as excinfo:
        main.main(["transmogrify"])
    assert excinfo.value.code == 2


def test_analyze(out):
    assert main.main(["--out", str(out), "analyze", "heisenberg"]) == 0
    report = read_report(out)
    assert report["subcommand"] == "analyze"
    assert report["central_series_dims"] == [3, 1, 0]
    assert report["lattice"]["integer_brackets"] is True
    assert (out / MANIFEST_FILE).exists()
    assert (out / LOG_FILE).exists()


def test_orbit_and_adapt(out):
    assert main.main(["--out", str(out), "orbit", "filiform4", "--lambda", "0,0,0,1", "--X", "1,0,0,0"]) == 0
    assert read_report(out)["maximal_rank"] is True
    assert main.main(["--out", str(out), "adapt", "filiform4", "--lambda", "0,0,0,1", "--X", "1,0,0,0"]) == 0
    assert read_report(out)["Y_central_in_quotient"] is True


def test_solve_inverts(out):
    assert main.main(["--out", str(out)] + SOLVE) == 0
    report = read_report(out)
    assert report["abs_D_f"] < 1e-12
    assert report["obstruction_free"] is True
    assert report["solution_kind"] == "schwartz"
    assert report["relative_residual"] < 1e-8
    assert report["estimates"]["green"]["max_ratio"] <= 1.0
    with open(out / pipeline.SOLUTION_CSV, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "re_f", "im_f", "re_u", "im_u"]
    assert len(rows) == 4096 + 1


def test_solve_hermite_mode(out):
    assert main.main(["--out", str(out)] + SOLVE + ["--mode", "hermite", "--hermite-modes", "128"]) == 0
    assert read_report(out)["estimates"]["central"]["ratio"] <= 1.0


def test_outputs_are_deterministic(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    assert main.main(["--out", str(first)] + SOLVE) == 0
    assert main.main(["--out", str(second)] + SOLVE) == 0
    for name in (pipeline.SOLUTION_CSV, REPORT_FILE):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_json_output(out, capsys):
    assert main.main(["--out", str(out), "--json", "analyze", "filiform4"]) == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed["step"] == 3


def test_missing_algebra_file(out):
    assert main.main(["--out", str(out), "analyze", "missing_algebra.alg"]) == pipeline.EXIT_USAGE


def test_missing_config_file(out):
    assert main.main(["-c", str(out / "absent.json"), "analyze", "heisenberg"]) == pipeline.EXIT_USAGE


def test_not_maximal_rank(out):
    argv = ["--out", str(out), "adapt", "filiform4", "--lambda", "0,0,1,0", "--X", "1,0,0,0"]
    assert main.main(argv) == pipeline.EXIT_VALIDATION


def test_invalid_flag_value(out):
    assert main.main(["--out", str(out)] + SOLVE + ["--grid-N", "15"]) == pipeline.EXIT_VALIDATION


def test_estimate_violation_exit_code(out, monkeypatch):
    def violated(*args, **kwargs):
        raise EstimateViolated("forced")

    monkeypatch.setattr(pipeline, "check_invdist_estimate", violated)
    assert main.main(["--out", str(out)] + SOLVE) == pipeline.EXIT_ESTIMATE


def test_diophantine_shells(out):
    argv = ["--out", str(out), "diophantine", "--omega", "1,(1+sqrt(5))/2", "--mmax", "50"]
    assert main.main(argv) == 0
    lines = (out / pipeline.SHELLS_CSV).read_text(encoding="utf-8").splitlines()
    assert lines[0] == "r,min_scaled"
    assert len(lines) == 51
    assert read_report(out)["witness"] == [1, -1]


def test_diophantine_rational_direction(out):
    argv = ["--out", str(out), "diophantine", "heisenberg", "--X", "2,3,0", "--mmax", "10"]
    assert main.main(argv) == pipeline.EXIT_VALIDATION


def test_simulate_character(out):
    argv = [
        "--out", str(out), "simulate", "heisenberg", "--X", "1,(1+sqrt(5))/2,0",
        "--obs", "char:1,0", "--T", "10", "20", "--dt", "0.1",
    ]
    assert main.main(argv) == 0
    report = read_report(out)
    assert all(row["within_bound"] for row in report["rows"])
    assert len(report["equidistribution"]) == 2
    lines = (out / pipeline.BIRKHOFF_CSV).read_text(encoding="utf-8").splitlines()
    assert lines[0] == "T,re_avg,im_avg,bound"
    assert len(lines) == 3


def test_config_file_run(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main.main(["-c", str(PROJECT_ROOT / "config.sample.json")]) == 0
    assert read_report(tmp_path / "output")["subcommand"] == "solve"
