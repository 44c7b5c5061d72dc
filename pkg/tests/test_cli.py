from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import pytest

from weylepi.cli import EXIT_BUDGET, EXIT_CONFIG, EXIT_FAIL, EXIT_OK, main, read_config

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_lemma31_report(capsys):
    code, out, _ = run(capsys, "verify", "lemma31", "--n", "3", "--p", "3")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["suite"] == "lemma31"
    assert len(rep["rows"]) == 64
    assert set(rep["rows"][0]) == {"degree", "statement", "expected", "computed", "pass", "paper_ref"}
    assert rep["summary"]["all_pass"]


def test_thm41_table(capsys):
    code, out, _ = run(capsys, "verify", "thm41", "--family", "sl", "--n", "2", "--p", "3", "--max-deg", "60",
                       "--format", "csv")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["degree"]) for r in rows] == list(range(61))
    assert all(r["pass"] == "True" and r["expected"] == r["computed"] for r in rows)


def test_weyl_golden(capsys):
    code, out, _ = run(capsys, "verify", "weyl", "--case", "pu3", "--max-deg", "40", "--format", "csv",
                       "--golden", str(GOLDEN / "weyl_pu3.csv"))
    assert code == EXIT_OK
    assert "full table equals golden file" in out


def test_weyl_golden_mismatch_is_a_failure(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    text = (GOLDEN / "weyl_pu3.csv").read_text().replace("4,1,0,", "4,2,0,")
    bad.write_text(text)
    code, _, err = run(capsys, "verify", "weyl", "--case", "pu3", "--golden", str(bad))
    assert code == EXIT_FAIL
    assert "failed" in err


@pytest.mark.parametrize("argv", [
    ["verify", "thm41", "--max-deg", "-1"],
    ["verify", "thm41", "--family", "sp"],
    ["verify", "weyl", "--case", "g2"],
    ["verify", "thm41", "--p", "4"],
    ["verify", "prop34", "--family", "gn", "--n", "3"],
    ["verify", "serre", "--case", "su3"],
    ["verify", "weyl", "--golden", "/nonexistent.csv"],
    ["nonsense"],
])
def test_configuration_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_CONFIG


def test_budget_exit_code(capsys):
    code, _, err = run(capsys, "verify", "weyl", "--case", "e7")
    assert code == EXIT_BUDGET
    assert "budget" in err


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nsuite_ignored_below = 1\n")
    assert run(capsys, "verify", "division", "--config", str(cfg))[0] == EXIT_CONFIG
    cfg.write_text("n = 3\np = 5\nformat = text\nmax-deg = 4\n")
    assert read_config(str(cfg)) == {"n": 3, "p": 5, "format": "text", "max_deg": 4}
    code, out, _ = run(capsys, "verify", "division", "--config", str(cfg), "--p", "3")
    assert code == EXIT_OK
    assert out.startswith("suite division")
    code, out, _ = run(capsys, "verify", "division", "--config", str(cfg), "--format", "json")
    assert json.loads(out)["config"] == {"n": 3, "p": 5}


def test_series_command(capsys):
    code, out, _ = run(capsys, "series", "--case", "pu3", "--part", "M1", "--max-deg", "10", "--format", "text")
    assert code == EXIT_OK
    assert out.split()[:4] == ["0", "0", "1", "1"]
    code, out, _ = run(capsys, "series", "--case", "f4", "--max-deg", "0", "--format", "json")
    assert json.loads(out)["coefficients"] == [1]
    code, out, _ = run(capsys, "series", "--case", "e8", "--part", "M0even", "--max-deg", "41", "--format", "text")
    assert all(c == "0" for c in out.split()[1::2])


def test_out_file(capsys, tmp_path):
    target = tmp_path / "rep.json"
    code, out, _ = run(capsys, "verify", "serre", "--case", "e6", "--out", str(target))
    assert code == EXIT_OK and out == ""
    assert json.loads(target.read_text())["summary"]["all_pass"]


def test_repeat_runs_are_byte_identical(capsys, tmp_path):
    args = ["verify", "thm41", "--n", "2", "--p", "5", "--max-deg", "30"]
    first = run(capsys, *args)[1]
    cold = run(capsys, *args, "--cache-dir", str(tmp_path / "c"))[1]
    warm = run(capsys, *args, "--cache-dir", str(tmp_path / "c"), "--jobs", "2")[1]
    assert first == cold == warm
