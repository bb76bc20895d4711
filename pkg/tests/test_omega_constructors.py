from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from errors import AccumLabError, NotDistinctError, ParseError, RatioOutOfRangeError
from omega_constructors import (
    OmegaCombination,
    almost_disjoint_family,
    code,
    common_prefix_length,
    decode,
    in_member_set,
    is_limit_point,
    observable_levels,
    omega_combination_limits,
    omega_vector,
    pairwise_distance,
    parse_pattern,
    shared_codes,
)


@pytest.fixture
def family():
    return almost_disjoint_family(["bin(;0)", "bin(;1)", "bin(;01)", "bin(1;0)"])


class TestPatterns:
    def test_code_round_trip(self):
        assert code("") == 1
        assert code("01") == 5
        assert decode(5) == "01"

    def test_canonical_form(self):
        assert parse_pattern("bin(0;0)") == parse_pattern("bin(;0)")
        assert parse_pattern("bin(;0101)").period == "01"
        assert parse_pattern("bin(1;0)").describe() == "bin(1;0)"

    def test_bad_pattern(self):
        with pytest.raises(ParseError):
            parse_pattern("bin(;2)")
        with pytest.raises(ParseError):
            parse_pattern("bin(01;)")

    def test_common_prefix(self):
        assert common_prefix_length(parse_pattern("bin(1;0)"), parse_pattern("bin(;1)")) == 1
        assert common_prefix_length(parse_pattern("bin(;0)"), parse_pattern("bin(;0)")) is None


class TestAlmostDisjoint:
    def test_zeros_and_ones_share_the_root(self):
        assert shared_codes(parse_pattern("bin(;0)"), parse_pattern("bin(;1)")) == {1}

    def test_shared_codes_follow_the_common_prefix(self):
        shared = shared_codes(parse_pattern("bin(;01)"), parse_pattern("bin(;0)"))
        assert shared == {1, 2}

    def test_same_pattern_twice(self):
        with pytest.raises(NotDistinctError):
            almost_disjoint_family(["bin(;0)", "bin(0;0)"])
        with pytest.raises(NotDistinctError):
            shared_codes(parse_pattern("bin(;1)"), parse_pattern("bin(;1)"))

    def test_members(self, family):
        assert family.members("bin(;0)", 5) == [1, 2, 4, 8, 16]
        assert family.members(1, 4) == [1, 3, 7, 15]
        assert all(in_member_set(family.pattern(2), n) for n in family.members(2, 10))

    def test_unknown_label(self, family):
        with pytest.raises(AccumLabError) as info:
            family.pattern("bin(;001)")
        assert info.value.code == "unknown-label"

    @given(st.integers(1, 4000))
    def test_each_index_belongs_to_at_most_a_prefix_set(self, n):
        patterns = [parse_pattern(p) for p in ("bin(;0)", "bin(;1)", "bin(;01)")]
        hits = [p for p in patterns if in_member_set(p, n)]
        if len(hits) > 1:
            assert n in shared_codes(hits[0], hits[1])


class TestOmegaSequence:
    def test_ladder_values(self, family):
        x = omega_vector(family, "bin(;0)")
        assert x.value_at(1) == 1
        assert x.value_at(2) == Fraction(1, 2)
        assert x.value_at(4) == 1
        assert x.value_at(8) == Fraction(1, 4)
        assert x.value_at(3) == 0

    def test_cell_members(self, family):
        x = omega_vector(family, "bin(;0)")
        assert x.cell_members(0, 3) == [1, 4, 16]
        assert x.cell_members(1, 2) == [2, 32]

    def test_truncation_zeroes_high_cells(self, family):
        x = omega_vector(family, "bin(;0)").truncated(1)
        assert x.value_at(2) == Fraction(1, 2)
        assert x.value_at(8) == 0

    @pytest.mark.parametrize("ratio", [0, 1, "3/2", -1])
    def test_ratio_out_of_range(self, family, ratio):
        with pytest.raises(RatioOutOfRangeError):
            omega_vector(family, 0, ratio)

    def test_distance_is_one_with_witness(self, family):
        x = omega_vector(family, "bin(;0)")
        y = omega_vector(family, "bin(;1)")
        distance, witness = pairwise_distance(x, y)
        assert distance == 1
        assert witness == 4
        assert abs(x.value_at(witness) - y.value_at(witness)) == 1

    def test_distance_to_itself(self, family):
        x = omega_vector(family, "bin(;01)")
        assert pairwise_distance(x, x) == (Fraction(0), None)

    def test_distance_needs_one_ratio(self, family):
        with pytest.raises(AccumLabError) as info:
            pairwise_distance(omega_vector(family, 0), omega_vector(family, 1, "1/3"))
        assert info.value.code == "ratio-mismatch"


class TestCombination:
    @pytest.fixture
    def combo(self, family):
        return OmegaCombination(terms=((1, omega_vector(family, "bin(;0)")), (-2, omega_vector(family, "bin(;1)"))))

    def test_truncated_limits(self, combo):
        expected = {Fraction(v) for v in (1, "1/2", "1/4", -2, -1, "-1/2", 0)}
        assert omega_combination_limits(combo, 2) == expected

    def test_limit_points(self, combo):
        assert is_limit_point(combo, "1/8")
        assert is_limit_point(combo, "-1/4")
        assert is_limit_point(combo, 0)
        assert not is_limit_point(combo, 3)
        assert not is_limit_point(combo, "3/4")

    def test_support_is_the_merged_union(self, combo):
        support = combo.support()
        assert [next(support) for _ in range(5)] == [1, 2, 3, 4, 7]

    def test_value_on_shared_root(self, combo):
        assert combo.value_at(1) == -1

    def test_empty_and_zero_terms(self, family):
        with pytest.raises(AccumLabError) as info:
            OmegaCombination(terms=())
        assert info.value.code == "empty-combination"
        with pytest.raises(AccumLabError) as info:
            OmegaCombination(terms=((0, omega_vector(family, 0)),))
        assert info.value.code == "zero-coefficient"

    def test_repeated_stream(self, family):
        x = omega_vector(family, "bin(;0)")
        with pytest.raises(NotDistinctError):
            OmegaCombination(terms=((1, x), (1, x)))
        with pytest.raises(NotDistinctError):
            OmegaCombination(terms=((1, x), (2, omega_vector(family, "bin(0;0)"))))


def test_observable_levels():
    assert observable_levels(15) == 2
    assert observable_levels(1) == 0
