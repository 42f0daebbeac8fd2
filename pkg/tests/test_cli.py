import json
import os
import subprocess
import sys

import pytest

from conftest import fixture_path
from tbisim.cli import run


def bisim(capsys, *args):
    code = run([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out, err


def test_bisimilar_pair(capsys):
    code, out, err = bisim(capsys, fixture_path("a2.tck"), fixture_path("a3.tck"))
    assert (code, out, err) == (0, "bisimilar\n", "")


def test_json_contradictions(capsys):
    code, out, _ = bisim(capsys, fixture_path("a1.tck"), fixture_path("a2.tck"), "--json")
    assert code == 1
    assert json.loads(out) == {"bisimilar": False, "contradictions": ["χ0 = χ1 = 0"], "pairs_visited": 3}
    assert out == '{"bisimilar": false, "contradictions": ["χ0 = χ1 = 0"], "pairs_visited": 3}\n'


def test_text_contradictions_and_stats(capsys):
    code, out, _ = bisim(capsys, fixture_path("a1.tck"), fixture_path("a2.tck"), "--stats")
    lines = out.splitlines()
    assert code == 1
    assert lines[:3] == ["not bisimilar", "  χ0 = χ1 = 0", "pairs visited: 3"]
    assert lines[3].startswith("time: ") and lines[3].endswith(" ms")
    code, out, _ = bisim(capsys, fixture_path("a1.tck"), fixture_path("a2.tck"), "--json", "--stats")
    assert "millis" in json.loads(out)


def test_output_is_deterministic(capsys):
    args = (fixture_path("a4.tck"), fixture_path("a5.tck"), "--json")
    first = bisim(capsys, *args)
    assert first[0] == 1
    assert bisim(capsys, *args) == first


def test_order_flag(capsys):
    assert bisim(capsys, fixture_path("a1.tck"), fixture_path("a2.tck"), "--order", "0")[0] == 0
    assert bisim(capsys, fixture_path("a1.tck"), fixture_path("a2.tck"), "--order", "3")[0] == 1
    code, _, err = bisim(capsys, fixture_path("a1.tck"), fixture_path("a2.tck"), "--order", "-1")
    assert code == 2 and "non-negative" in err


def test_missing_file(capsys):
    code, out, err = bisim(capsys, "missing.tck", fixture_path("a1.tck"))
    assert code == 2 and out == ""
    assert err.startswith("bisim: missing.tck: ")


def test_parse_error_has_span(capsys, tmp_path):
    bad = tmp_path / "bad.tck"
    bad.write_text("system:S\nclock:1:x\nevent:a\nprocess:P\nlocation:P:l{initial:}\nedge:P:l:l:a{provided: y<1}\n")
    code, _, err = bisim(capsys, bad, fixture_path("a1.tck"))
    assert code == 2
    assert err == "bisim: %s:6:24: undeclared clock 'y'\n" % bad


def test_visited_limit(capsys):
    code, out, err = bisim(capsys, fixture_path("a4.tck"), fixture_path("a5.tck"), "--max-visited", "1")
    assert code == 2 and out == ""
    assert err == "bisim: visited more than 1 state pairs\n"


@pytest.mark.parametrize("args", [[], ["only-one.tck"], ["a", "b", "--bogus"], ["a", "b", "--order", "x"]])
def test_usage_errors(capsys, args):
    with pytest.raises(SystemExit) as info:
        run(args)
    assert info.value.code == 2
    assert "usage: bisim" in capsys.readouterr().err


def test_console_script_and_trace_logging():
    env = dict(os.environ, BISIM_LOG="trace")
    proc = subprocess.run(
        [sys.executable, "-m", "tbisim.cli", fixture_path("a2.tck"), fixture_path("a6.tck")],
        capture_output=True,
        text=True,
        env=env,
    )
    assert proc.returncode == 0
    assert proc.stdout == "bisimilar\n"
    assert "visit l0 / l0" in proc.stderr
    assert "checked A2 vs A6" in proc.stderr
    env["BISIM_LOG"] = "off"
    quiet = subprocess.run(
        [sys.executable, "-m", "tbisim.cli", fixture_path("a2.tck"), fixture_path("a6.tck")],
        capture_output=True,
        text=True,
        env=env,
    )
    assert quiet.stderr == "" and quiet.stdout == proc.stdout
