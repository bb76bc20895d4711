import pytest
from hypothesis import given, settings, strategies as st

from errors import InvalidGapsError, InvalidSetError, ParseError
from index_sets import make_ap
from set_gates import (
    APUnion,
    ExplicitFinite,
    GapComplement,
    PolynomialImage,
    dense_gate,
    gap_complement_build,
    lineable_gate,
    members_upto,
    membership,
    parse_index_set,
    parse_rule,
    parse_set_expression,
    prescribed_set_adapter,
    shift_intersection,
)
from step_sequences import CardinalityClass


class TestShiftIntersection:
    def test_evens_shifted_by_two(self):
        assert shift_intersection(parse_set_expression("2N"), 2) == CardinalityClass.countably_infinite()

    def test_odds_shifted_by_one(self):
        assert shift_intersection(parse_set_expression("2N+1"), 1) == CardinalityClass.finite(0)

    def test_squares_are_finite_for_small_shifts(self):
        squares = parse_set_expression("poly(1,0,0)@2")
        for k in range(1, 11):
            size = shift_intersection(squares, k)
            assert not size.is_infinite
            brute = [m for m in members_upto(squares, 200) if squares.contains(m + k)]
            assert size.count == len(brute)

    def test_linear_polynomial_behaves_like_a_progression(self):
        a = parse_set_expression("poly(3,1)@1")
        assert shift_intersection(a, 3).is_infinite
        assert not shift_intersection(a, 2).is_infinite

    def test_explicit_finite(self):
        a = parse_set_expression("finite{2,3,5}")
        assert shift_intersection(a, 1) == CardinalityClass.finite(1)

    @settings(max_examples=40)
    @given(st.integers(2, 10), st.data(), st.integers(1, 12))
    def test_progressions_against_brute_force(self, modulus, data, k):
        residues = data.draw(st.frozensets(st.integers(0, modulus - 1), min_size=1))
        a = APUnion(cell=make_ap(residues, modulus, removed={1}))
        bound = 40 * modulus
        hits = [n for n in range(2, bound) if a.contains(n) and a.contains(n + k)]
        assert shift_intersection(a, k).is_infinite == bool(hits)


class TestGates:
    def test_odds(self):
        a = parse_set_expression("2N+1")
        first = lineable_gate(a, 10)
        assert first.holds and first.witness_k == 2
        assert first.evidence[0] == 3
        second = dense_gate(a)
        assert not second.holds
        assert second.reason == "parity"
        assert second.conclusion == "L(A) is not densely lineable"

    def test_evens_leave_lineability_open(self):
        a = parse_set_expression("2N")
        first = lineable_gate(a, 10)
        assert first.holds and first.witness_k == 2
        assert "not decided" in first.conclusion
        assert not dense_gate(a).holds

    @pytest.mark.parametrize("text", ["poly(1,0,0)@2", "exp(3)@1"])
    def test_gap_divergence(self, text):
        verdict = lineable_gate(parse_set_expression(text), 10)
        assert not verdict.holds
        assert verdict.reason == "gap-divergence"
        assert verdict.conclusion == "L(A) is not lineable"

    @pytest.mark.parametrize("text", ["N\\{1}", "N+1"])
    def test_cofinite_set(self, text):
        a = parse_set_expression(text)
        first, second = lineable_gate(a, 10), dense_gate(a)
        assert first.holds and second.holds
        assert first.conclusion == "L(A) is lineable (A is cofinite)"

    def test_finite_set(self):
        verdict = lineable_gate(parse_set_expression("finite{2,3}"), 10)
        assert verdict.reason == "finite-support"

    def test_search_bound(self):
        verdict = lineable_gate(parse_set_expression("7N"), 3)
        assert not verdict.holds
        assert verdict.reason == "search-bound"

    def test_note_is_always_attached(self):
        assert dense_gate(parse_set_expression("2N")).to_json()["note"] == "necessary-condition"


class TestGapComplement:
    def test_square_rule_membership(self):
        a = parse_set_expression("gaps(k^2; K={2,7})")
        assert not membership(a, 5)
        assert membership(a, 3)
        assert membership(a, 9)
        assert not membership(a, 50)
        assert not membership(a, 1)

    def test_empty_index_set(self):
        a = parse_set_expression("gaps(k^2; K={})")
        assert members_upto(a, 20) == list(range(2, 21))

    def test_periodic_indices_on_a_linear_rule(self):
        a = parse_set_expression("gaps(poly(2,0); K=2N)")
        # removes [4j, 4j+2) for every j >= 1
        assert members_upto(a, 12) == [2, 3, 6, 7, 10, 11]
        assert shift_intersection(a, 1).is_infinite
        assert not shift_intersection(a, 2).is_infinite

    def test_growing_rule_keeps_long_intervals(self):
        a = parse_set_expression("gaps(k^2; K=2N)")
        assert dense_gate(a).holds

    def test_tower_rule_gates_stop_at_the_first_interval(self):
        # kept intervals after [2, 8) are 2^27 and 2^81 wide
        a = parse_set_expression("gaps(2^(3^k); K={1,2})")
        verdict = dense_gate(a)
        assert verdict.holds
        assert verdict.evidence == (2, 3, 4, 5, 6)
        assert lineable_gate(parse_set_expression("gaps(2^(3^k); K={1,3})"), 3).witness_k == 1

    def test_decreasing_rule(self):
        with pytest.raises(InvalidGapsError):
            gap_complement_build(parse_rule("poly(-1,0)"), parse_index_set("{2}"))


class TestParsing:
    def test_bare_naturals_contain_one(self):
        with pytest.raises(ParseError):
            parse_set_expression("N")

    def test_union(self):
        a = parse_set_expression("2N|3N+1")
        assert members_upto(a, 10) == [2, 4, 6, 7, 8, 10]

    def test_progression_offsets(self):
        assert parse_index_set("3N+1").contains(4)
        assert not parse_index_set("3N+1").contains(1)

    def test_rules(self):
        assert parse_rule("k^2").value(3) == 9
        assert parse_rule("3*2^k").value(2) == 12
        assert parse_rule("2^(3^k)").value(1) == 8
        with pytest.raises(ParseError):
            parse_rule("k!")

    def test_polynomial_must_be_integer_valued(self):
        with pytest.raises(InvalidSetError):
            parse_set_expression("poly(1/2,0)@1")

    def test_sets_must_avoid_one(self):
        with pytest.raises(InvalidSetError):
            ExplicitFinite(elements={1, 2})

    def test_discriminated_union_round_trip(self):
        a = parse_set_expression("poly(1,0,0)@2")
        again = prescribed_set_adapter.validate_python(a.model_dump())
        assert isinstance(again, PolynomialImage)
        assert again == a
        gaps = prescribed_set_adapter.validate_python(parse_set_expression("gaps(k^2; K={2})").model_dump())
        assert isinstance(gaps, GapComplement)
