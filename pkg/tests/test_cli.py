import argparse
import hashlib
import json
import math
import subprocess
import sys

import pytest

from critline import cli


@pytest.mark.parametrize("text,value", [
    ("2+3i", 2 + 3j), ("2-3i", 2 - 3j), ("0.5+14.134725i", 0.5 + 14.134725j), ("3i", 3j),
    ("i", 1j), ("-i", -1j), ("1e2-2.5e-1j", 100 - 0.25j), ("7", 7 + 0j), (" 1 + 2i ", 1 + 2j),
])
def test_parse_complex(text, value):
    assert cli.parse_complex(text) == value


@pytest.mark.parametrize("text", ["", "abc", "1+2k", "nan", "1++2i"])
def test_parse_complex_rejects(text):
    with pytest.raises(argparse.ArgumentTypeError):
        cli.parse_complex(text)


def _eval(capsys, *argv):
    code = cli.main(["eval", *argv])
    return code, capsys.readouterr()


def test_eval_delta6(capsys):
    code, out = _eval(capsys, "--fn", "delta6", "--s", "2+3i")
    assert code == cli.EXIT_OK
    rec = json.loads(out.out)
    assert rec["s"] == [2.0, 3.0] and rec["forms_residual"] < 1e-10
    assert rec["quadrant"] in (1, 2, 3, 4)
    assert rec["modulus"] == pytest.approx(math.hypot(rec["re"], rec["im"]))


def test_eval_xi1(capsys):
    code, out = _eval(capsys, "--fn", "xi1", "--s", "2")
    assert code == 0 and json.loads(out.out)["re"] == pytest.approx(math.pi / 6, rel=1e-13)


def test_eval_pole_exit_code(capsys):
    code, out = _eval(capsys, "--fn", "delta6", "--s", "1")
    assert code == cli.EXIT_DOMAIN
    assert "pole at s=1" in out.err


def test_bad_profile(capsys, monkeypatch):
    monkeypatch.setenv("CRITLINE_PRECISION_PROFILE", "nonsense")
    assert cli.main(["eval", "--s", "2"]) == cli.EXIT_DOMAIN


def test_io_error_exit_code(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code = cli.main(["scan", "--t", "10", "20", "--out", str(blocker / "sub")])
    assert code == cli.EXIT_IO


def test_scan_to_stdout(capsys):
    assert cli.main(["scan", "--t", "0", "15"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "t,kind,multiplicity,source,residual"
    assert [l.split(",")[1][0] for l in lines[1:]] == list("ZPZPZP")
    assert float(lines[2].split(",")[0]) == pytest.approx(7.0673625709, abs=1e-9)


def test_grid_is_deterministic_and_manifest_digests(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        args = ["grid", "--sigma", "0.2", "1.5", "--t", "980", "981", "--nx", "7", "--nt", "5", "--out", str(d)]
        if k:
            args += ["--workers", "2"]
        assert cli.main(args) == 0
        outs.append(d)
    a, b = ((d / "grid.csv").read_bytes() for d in outs)
    assert a == b
    man = json.loads((outs[0] / "manifest.json").read_text())
    assert man["outputs"]["grid.csv"] == hashlib.sha256(a).hexdigest()
    assert man["command"] == "grid" and man["backend"] in ("numba", "numpy")
    assert man["precision"] and man["tool_version"]


def test_modified_grid(tmp_path):
    code = cli.main(["grid", "--sigma", "0.3", "0.7", "--t", "983.2", "983.8", "--nx", "5", "--nt", "7",
                     "--mode", "modified", "--both", "--s0", "0.45+983.5i", "--s1", "0.5+983.3i",
                     "--s2", "0.5+983.7i", "--out", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "grid.csv").read_text().splitlines()
    assert len(rows) == 36


def test_modified_grid_needs_roots(capsys):
    code = cli.main(["grid", "--sigma", "0.3", "0.7", "--t", "983", "984", "--mode", "modified"])
    assert code == cli.EXIT_DOMAIN


def test_trace_then_balance(tmp_path):
    tr = tmp_path / "tr"
    assert cli.main(["trace", "--n", "432", "434", "--out", str(tr)]) == 0
    lines = (tr / "lines.jsonl").read_text().splitlines()
    assert len(lines) == 3
    bal = tmp_path / "bal"
    assert cli.main(["balance", "--traces", str(tr / "lines.jsonl"), "--out", str(bal)]) == 0
    rec = json.loads((bal / "balance.json").read_text())
    assert rec["all_balanced"] is True and len(rec["pairs"]) == 2


def test_distribution(tmp_path):
    assert cli.main(["distribution", "--t-max", "30", "--step", "10", "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "distribution.csv").read_text().splitlines()
    assert len(rows) == 4
    assert rows[-1].split(",")[1:3] == ["13", "13"]


def test_counterexample(tmp_path):
    assert cli.main(["counterexample", "--check-expansion", "--out", str(tmp_path)]) == 0
    rec = json.loads((tmp_path / "counterexample.json").read_text())
    assert json.dumps(rec)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "critline", "eval", "--fn", "xi1", "--s", "4"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["re"] == pytest.approx(math.pi ** 2 / 90, rel=1e-13)
