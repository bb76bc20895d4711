import json
from fractions import Fraction

import pytest

from errors import ParseError, WitnessError
from utils import (
    canonical_json,
    case_rng,
    get_modulus_cap,
    load_json_file,
    parse_fraction,
    random_fraction,
)


class TestParseFraction:
    @pytest.mark.parametrize("raw, expected", [("1/2", Fraction(1, 2)), (" -3/6 ", Fraction(-1, 2)), (4, Fraction(4)), ("7", Fraction(7))])
    def test_exact_inputs(self, raw, expected):
        assert parse_fraction(raw) == expected

    @pytest.mark.parametrize("raw", [0.5, True, "1/0", "half", None])
    def test_rejected(self, raw):
        with pytest.raises(ParseError):
            parse_fraction(raw)


def test_canonical_json_is_sorted_and_exact():
    text = canonical_json({"b": Fraction(1, 3), "a": frozenset({3, 1})})
    assert json.loads(text) == {"a": [1, 3], "b": "1/3"}
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith("\n")


def test_load_json_file(tmp_path):
    path = tmp_path / "x.json"
    path.write_text('{"mod": 2}', encoding="utf-8")
    assert load_json_file(str(path)) == {"mod": 2}
    with pytest.raises(ParseError):
        load_json_file(str(tmp_path / "missing.json"))


def test_case_rng_depends_on_every_part():
    draws = {case_rng(1, "gap", 0).random(), case_rng(2, "gap", 0).random(), case_rng(1, "gap", 1).random(), case_rng(1, "gates", 0).random()}
    assert len(draws) == 4
    assert case_rng(1, "gap", 0).random() == case_rng(1, "gap", 0).random()


def test_random_fraction_grid():
    rng = case_rng(0, "utils", 0)
    for _ in range(50):
        v = random_fraction(rng, -2, 2, 4)
        assert -2 <= v <= 2
        assert (v * 4).denominator == 1


def test_modulus_cap_from_env(monkeypatch):
    monkeypatch.setenv("ACCUM_LAB_MODULUS_CAP", "77")
    assert get_modulus_cap() == 77


def test_error_codes():
    err = WitnessError("no room", code="degenerate")
    assert err.code == "degenerate"
    assert err.to_json() == {"error": "degenerate", "message": "no room"}
    assert ParseError("x").code == "parse-error"
