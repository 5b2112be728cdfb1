import json
import subprocess
import sys

import pytest

from golden_cases import CASES, GOLDEN, INPUTS, run


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    argv, expected = CASES[name]
    status, out, err = run(argv)
    assert status == expected
    assert out == (GOLDEN / f"{name}.out").read_text()
    err_file = GOLDEN / f"{name}.err"
    if err_file.exists():
        assert err == err_file.read_text()
    else:
        assert err == ""


@pytest.mark.parametrize("name", ["nf_d1x1", "chen_square", "check_chen"])
def test_output_is_deterministic(name):
    argv, _ = CASES[name]
    assert run(argv) == run(argv)


def test_documented_examples():
    assert run(["nf", "D1*x1"])[1] == "x1*D1 + 1\n"
    status, out, _ = run(["dims", "--n", "2", "--max-deg", "5"])
    assert status == 0
    assert [int(line.split()[1]) for line in out.splitlines()[1:]] == [2, 1, 2, 3, 6]


@pytest.mark.parametrize(
    "argv",
    [
        ["nf"],
        ["frobnicate"],
        ["check", "nosuch"],
        ["curv"],
        ["nf", "D1", "--cap", "-1"],
        ["source", "D1", "--path", str(INPUTS / "path2.json")],
    ],
)
def test_usage_errors_exit_2(argv):
    assert run(argv)[0] == 2


def test_bad_json_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    status, _, err = run(["chen", "--path", str(bad)])
    assert status == 2 and "not valid JSON" in err
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"pts": []}))
    assert run(["chen", "--path", str(wrong)])[0] == 2


def test_json_flag_emits_json():
    status, out, _ = run(["transport", "--path", str(INPUTS / "path2.json"), "--conn", str(INPUTS / "nil.json"), "--json"])
    assert status == 0
    assert json.loads(out) == [["1", "1", "0"], ["0", "1", "1"], ["0", "0", "1"]]


def test_jobs_do_not_change_output():
    argv = ["check", "all", "--n", "2", "--cap", "3", "--samples", "2", "--seed", "7"]
    assert run(argv) == run(argv + ["--jobs", "3"])


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pathalg", "nf", "D1*x1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "x1*D1 + 1\n"


def test_check_all_documented_invocation():
    proc = subprocess.run(
        [sys.executable, "-m", "pathalg", "check", "all", "--n", "2", "--cap", "4", "--seed", "42", "--jobs", "4"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert proc.stdout.splitlines()[-1].startswith("OK ")
