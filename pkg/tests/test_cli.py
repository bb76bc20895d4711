import json

import pytest

from main import build_parser, run
from utils import canonical_json


@pytest.fixture
def sequence_file(tmp_path):
    def write(x, name):
        path = tmp_path / name
        path.write_text(canonical_json(x.to_json()), encoding="utf-8")
        return str(path)
    return write


def _report(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


def test_gate_odds(capsys):
    assert run(["gate", "2N+1", "--kmax", "4"]) == 0
    report = _report(capsys)
    assert report["schema"] == "1"
    assert report["command"] == "gate"
    lineable, dense = report["outputs"]["verdicts"]
    assert lineable["holds"] and lineable["witness_k"] == 2
    assert not dense["holds"]


def test_decrement_built_surrogate(capsys, sequence_file, two_valued_y):
    y = sequence_file(two_valued_y, "y.json")
    assert run(["witness", "decrement", y, "--eps", "0"]) == 0
    report = _report(capsys)
    assert report["command"] == "witness decrement"
    assert report["outputs"]["card"] == 3
    assert report["outputs"]["oracle"]["agrees"]
    assert report["inputs"]["eps"] == "0"
    assert report["checks_failed"] == 0


def test_spectrum(capsys, sequence_file, alternating, mod4_y):
    assert run(["spectrum", sequence_file(alternating, "x.json"), sequence_file(mod4_y, "y.json")]) == 0
    outputs = _report(capsys)["outputs"]
    assert outputs["spectrum"] == [2, 3, 4]
    assert outputs["size"] == 4


def test_basis_writes_to_file(tmp_path, capsys):
    out = tmp_path / "basis.json"
    assert run(["basis", "--nk", "k^2", "--r", "2", "--out", str(out), "--seed", "9"]) == 0
    assert capsys.readouterr().out == ""
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["seed"] == 9
    assert report["outputs"]["l_values"] == [2, 18]
    assert report["checks_passed"] == 3


def test_nonsep_ratio_is_a_string(capsys):
    code = run(["nonsep", "--labels", "bin(;0)", "bin(;1)", "--M", "2", "--prefix", "400", "--burn-in", "10"])
    assert code == 0
    report = _report(capsys)
    assert report["inputs"]["ratio"] == "1/2"
    assert report["outputs"]["distances"][0]["distance"] == "1"


def test_scenario(capsys):
    assert run(["scenario"]) == 0
    report = _report(capsys)
    outputs = report["outputs"]
    assert outputs["obstruction_in_gap"]
    assert outputs["obstruction_k"] == 1
    assert outputs["obstruction"]["card"] == 64
    assert outputs["obstruction"]["oracle"]["agrees"]
    # growth, gap, certificates, then oracle and interval for the obstruction
    assert report["checks_passed"] == 5


def test_verify_output_is_byte_identical(capsys):
    assert run(["verify", "--quick", "--seed", "7"]) == 0
    first = capsys.readouterr().out
    assert run(["verify", "--quick", "--seed", "7"]) == 0
    assert capsys.readouterr().out == first


def test_verify_quick_subset(capsys):
    assert run(["verify", "--suite", "gates", "estimate", "--quick", "--seed", "1"]) == 0
    outputs = _report(capsys)["outputs"]
    assert outputs["order"] == ["estimate", "gates"]


def test_bad_expression_exits_2(capsys):
    assert run(["gate", "three apples"]) == 2
    assert capsys.readouterr().out == ""


def test_unwritable_path(tmp_path):
    assert run(["gate", "2N", "--out", str(tmp_path / "missing" / "r.json")]) == 2


def test_unknown_suite_is_a_usage_error():
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(["verify", "--suite", "nope"])
    assert info.value.code == 2
