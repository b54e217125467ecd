import json

import pytest

from rpqverify.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_p1_exit_zero(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, text, _ = run(capsys, "verify", "--preset", "js", "--delta", "2", "--suite", "p1",
                        "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["cases"] and doc["summary"]["unexplained"] == 0
    assert (tmp_path / "r.md").exists()


def test_bad_delta_is_config_error(tmp_path, capsys):
    code, _, err = run(capsys, "verify", "--delta", "1/0", "--out", str(tmp_path / "r.json"))
    assert code == 2 and "config error" in err


def test_empty_suite_list(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "--suite", "", "--out", str(out))
    assert code == 0
    assert json.loads(out.read_text())["cases"] == []


def test_unexplained_fail_exits_one(tmp_path, capsys):
    empty = tmp_path / "allow.json"
    empty.write_text(json.dumps({"version": 1, "entries": []}))
    code, _, _ = run(capsys, "verify", "--preset", "js", "--delta", "2", "--suite", "bell",
                     "--allowlist", str(empty), "--out", str(tmp_path / "r.json"))
    assert code == 1


def test_unknown_suite_and_window(tmp_path, capsys):
    assert run(capsys, "verify", "--suite", "nope")[0] == 2
    assert run(capsys, "verify", "--window", "3..1")[0] == 2


def test_numbers_table(capsys):
    code, out, _ = run(capsys, "table", "numbers", "--preset", "js")
    assert code == 0
    rows = [l for l in out.splitlines() if l.startswith("| ") and l[2].isdigit()]
    assert len(rows) == 6
    assert rows[0].split("|")[2].strip() == "0"
    assert rows[1].split("|")[2].strip() == "1"


def test_central_table(capsys):
    code, out, _ = run(capsys, "table", "central", "--preset", "bm", "--n=-2..2")
    assert code == 0
    vals = {}
    for line in out.splitlines():
        parts = [p.strip() for p in line.strip("|").split("|")]
        if len(parts) == 2 and parts[0].lstrip("-").isdigit():
            vals[int(parts[0])] = parts[1]
    assert vals[-1] == vals[0] == vals[1] == "0"
    assert vals[2] != "0"


def test_structure_table(capsys):
    code, out, _ = run(capsys, "table", "structure", "--preset", "js", "--delta", "2", "--n", "0..1")
    assert code == 0 and "| 0 | 1 |" in out


def test_tables_are_deterministic(capsys):
    a = run(capsys, "table", "numbers", "--seed", "3")
    b = run(capsys, "table", "numbers", "--seed", "3")
    assert a == b


def test_presets_listing(tmp_path, capsys):
    code, out, _ = run(capsys, "presets")
    assert code == 0 and len([l for l in out.splitlines() if l.startswith("| ")]) == 1 + 5
    custom = tmp_path / "p.json"
    custom.write_text(json.dumps([{"name": "custom", "R": "(s - t)/(p - q)", "tau1": "p",
                                   "tau2": "q"}]))
    code, out, _ = run(capsys, "presets", "--presets-file", str(custom))
    assert code == 0 and len([l for l in out.splitlines() if l.startswith("| ")]) == 1 + 6
    dup = tmp_path / "d.json"
    dup.write_text(json.dumps([{"name": "js", "R": "s", "tau1": "p", "tau2": "q"}]))
    assert run(capsys, "presets", "--presets-file", str(dup))[0] == 2


@pytest.mark.parametrize("argv", [["verify", "--seed", "x"], ["bogus"]])
def test_argument_errors(argv, capsys):
    assert main(argv) == 2
