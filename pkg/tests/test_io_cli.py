import json
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adskit import cli, grp, io, verify
from adskit.liealg import WeightLabel, mirror_weight
from adskit.weylalg import Space


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def write(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def violator(q=3):
    rot = np.eye(q + 2, dtype=int).tolist()
    rot[0][0] = rot[q + 1][q + 1] = 0
    rot[0][q + 1], rot[q + 1][0] = -1, 1
    return {"q": q, "entries": rot}


# ---------------------------------------------------------------------------
# io


@given(st.sampled_from([2, 3, 4]), st.integers(0, 10**6))
def test_group_roundtrip(q, seed):
    g = grp.random_element(q, seed, 1)
    data = json.loads(io.dumps(io.encode_group(g)))
    assert all(isinstance(v, str) for row in data["entries"] for v in row)
    assert io.decode_group(data) == g


def test_decode_group_errors():
    with pytest.raises(io.InputError):
        io.decode_group([1, 2])
    with pytest.raises(io.InputError):
        io.decode_group({"q": 2, "entries": [[1, 0], [0, 1]]})
    with pytest.raises(io.InputError):
        io.decode_group({"q": 2, "entries": np.eye(4).tolist()})  # floats in exact mode
    with pytest.raises(io.InputError):
        io.decode_group({"q": 2, "entries": (2 * np.eye(4, dtype=int)).tolist()})
    assert io.decode_group({"q": 2, "mode": "float", "entries": np.eye(4).tolist()}).mode == "float"


def test_weight_roundtrip():
    for w in (WeightLabel(4, (-1, 2)), mirror_weight(WeightLabel(3, (1,))), WeightLabel(2, (0,), 3)):
        assert io.decode_weight(json.loads(io.dumps(io.encode_weight(w)))) == w


def test_parse_poly():
    sp = Space(3)
    assert io.parse_poly("x0^2 - 3*x1*y + 1/2", sp) == sp.x(0) ** 2 - 3 * sp.x(1) * sp.y + Fraction(1, 2)
    assert io.parse_poly("(x0 + z1)^2", sp) == (sp.x(0) + sp.z(1)) ** 2
    for bad in ("x0/y", "sin(x0)", "x0^y", "x7", "Delta", "1.5*x0", "x0 +"):
        with pytest.raises(io.InputError):
            io.parse_poly(bad, sp)


# ---------------------------------------------------------------------------
# verify


def test_verify_structure(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(["verify", "--q", "3", "--suite", "structure", "--json", str(report)], capsys)
    assert code == 0 and "PASS  structure" in out
    data = json.loads(report.read_text())
    assert data["schema"] == 1 and data["status"] == "pass"
    assert data["suites"][0]["counts"]["failed"] == 0
    assert "wall_time_s" not in data


def test_verify_casimir_emits_polynomial(capsys):
    code, out, _ = run(["verify", "--q", "4", "--suite", "casimir", "--json", "-"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["suites"][0]["details"]["chi2_scalar"] == "-Delta^2 + 4*Delta"


@pytest.mark.parametrize(
    "argv", [["--q", "1"], ["--q", "9"], ["--q", "3", "--suite", "nope"], ["--q", "x"], []]
)
def test_verify_invalid_input(argv, capsys):
    with pytest.raises(SystemExit) as err:
        code = cli.main(["verify", *argv])
        raise SystemExit(code)
    assert err.value.code == 3


def test_max_q_env(monkeypatch):
    monkeypatch.setenv("ADSKIT_MAX_Q", "10")
    assert cli.max_q() == 10
    monkeypatch.setenv("ADSKIT_MAX_Q", "3")
    assert cli.max_q() == 8


def test_reports_are_deterministic():
    a = io.dumps(cli.build_report(3, "all", 5))
    b = io.dumps(cli.build_report(3, "all", 5))
    assert a == b
    names = [s["name"] for s in json.loads(a)["suites"]]
    assert names == sorted(names)


def test_failing_suite_carries_counterexample(monkeypatch, capsys):
    def broken(q, seed):
        res = verify.SuiteResult("structure")
        res.check(True)
        res.check(False, indices=[[0, 1], [1, 2]])
        return res

    def crashing(q, seed):
        raise ZeroDivisionError("boom")

    monkeypatch.setitem(verify.RUNNERS, "structure", broken)
    monkeypatch.setitem(verify.RUNNERS, "casimir", crashing)
    report = cli.build_report(2, "all", 4)
    by_name = {s["name"]: s for s in report["suites"]}
    assert report["status"] == "fail"
    assert by_name["structure"]["counterexample"] == {"q": 2, "seed": 4, "indices": [[0, 1], [1, 2]]}
    assert "boom" in by_name["casimir"]["counterexample"]["error"]
    code, out, _ = run(["verify", "--q", "2", "--suite", "structure"], capsys)
    assert code == 1 and "counterexample" in out


# ---------------------------------------------------------------------------
# factorize / act


def test_factorize(capsys, tmp_path):
    ident = write(tmp_path / "id.json", {"q": 3, "entries": np.eye(5, dtype=int).tolist()})
    out = tmp_path / "f.json"
    code, _, _ = run(["factorize", "--mode", "sekiguchi", "--in", ident, "--out", str(out)], capsys)
    data = json.loads(out.read_text())
    assert code == 0 and data["x"] == ["0", "0", "0"] and data["y"] == "1" and data["in_cell"]

    code, text, _ = run(["factorize", "--mode", "bruhat", "--in", ident], capsys)
    assert code == 0 and json.loads(text)["residuals"]["ntilde_params"] == ["0", "0", "0"]

    bad = write(tmp_path / "rot.json", violator())
    code, text, _ = run(["factorize", "--mode", "sekiguchi", "--in", bad], capsys)
    assert code == 2 and json.loads(text)["in_cell"] is False

    (tmp_path / "broken.json").write_text("{", encoding="utf-8")
    code, _, err = run(["factorize", "--mode", "bruhat", "--in", str(tmp_path / "broken.json")], capsys)
    assert code == 3 and "invalid JSON" in err
    code, _, _ = run(["factorize", "--mode", "bruhat", "--in", str(tmp_path / "missing.json")], capsys)
    assert code == 3


def test_factorize_recovers_inputs(capsys, tmp_path):
    q = 2
    x, y = [Fraction(1, 3), Fraction(-2)], Fraction(5, 4)
    g = grp.make_n(x) @ grp.make_dilatation(q, y) @ grp.make_h_cayley(
        Fraction(1, 2) * grp.liealg.generator(q, 0, 1)
    )
    path = tmp_path / "g.json"
    path.write_text(io.dumps(io.encode_group(g)))
    code, text, _ = run(["factorize", "--mode", "sekiguchi", "--in", str(path)], capsys)
    data = json.loads(text)
    assert code == 0 and data["x"] == ["1/3", "-2"] and data["y"] == "5/4"


def test_act(capsys, tmp_path):
    ident = write(tmp_path / "id.json", {"q": 2, "entries": np.eye(4, dtype=int).tolist()})
    pts = write(tmp_path / "pts.json", [[0, 0], ["1/2", -1]])
    code, text, _ = run(
        ["act", "--rep", "boundary", "--g", ident, "--delta", "2", "--poly", "x0^2 + x1", "--points", pts],
        capsys,
    )
    assert code == 0
    assert [r["value"] for r in json.loads(text)["values"]] == ["0", "-3/4"]

    dil = tmp_path / "dil.json"
    dil.write_text(io.dumps(io.encode_group(grp.make_dilatation(2, 2))))
    code, text, _ = run(
        ["act", "--rep", "boundary", "--g", str(dil), "--delta", "3", "--poly", "1", "--points", pts], capsys
    )
    assert [r["value"] for r in json.loads(text)["values"]] == ["1/8", "1/8"]

    bad = write(tmp_path / "rot.json", violator(2))
    bpts = write(tmp_path / "bpts.json", [{"x": [0, 0], "y": 1}, ["1/2", 1, 3]])
    code, text, _ = run(["act", "--rep", "bulk", "--g", bad, "--poly", "y*x0", "--points", bpts], capsys)
    values = [r["value"] for r in json.loads(text)["values"]]
    assert code == 0 and values[0] == "undefined" and values[1] != "undefined"

    code, text, _ = run(
        ["act", "--rep", "boundary", "--g", ident, "--delta", "1/2", "--poly", "x0+1", "--points", pts], capsys
    )
    assert isinstance(json.loads(text)["values"][0]["value"], float)


@pytest.mark.parametrize(
    "extra",
    [
        ["--rep", "boundary", "--delta", "2", "--poly", "y*x0"],
        ["--rep", "boundary", "--delta", "2", "--poly", "x0/x1"],
        ["--rep", "boundary", "--delta", "two", "--poly", "x0"],
        ["--rep", "bulk", "--poly", "z0"],
    ],
)
def test_act_invalid(extra, capsys, tmp_path):
    ident = write(tmp_path / "id.json", {"q": 2, "entries": np.eye(4, dtype=int).tolist()})
    pts = write(tmp_path / "pts.json", [[0, 0]] if extra[1] == "boundary" else [[0, 0, 1]])
    code, _, _ = run(["act", "--g", ident, "--points", pts, *extra], capsys)
    assert code == 3


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "adskit.cli", "verify", "--q", "2", "--suite", "structure"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "overall: PASS" in proc.stdout
