from fractions import Fraction

import pytest
from hypothesis import given, settings

from constructors import make_step_with_card, overflow_family
from errors import InvalidArgumentError, WitnessError, ZeroDirectionError
from index_sets import make_ap
from span_geometry import (
    combo_cardinality,
    decrement_bound,
    decrement_witness,
    estimate_bounds,
    gap_witness,
    interaction,
    is_dependent_mod_c0,
    overflow_peel,
    spectrum,
    witness_max_and_submax,
)
from step_sequences import StepSequence, accumulation_count, accumulation_set, constant, linear_combine
from tests.strategies import step_sequences


class TestInteraction:
    def test_mod4_points(self, alternating, mod4_y):
        si = interaction(alternating, mod4_y)
        assert si.size == 4
        assert set(si.points) == {(-1, 1), (-1, 2), (1, 0), (1, 2)}

    def test_constant_x_gives_one_column(self, mod4_y):
        assert interaction(constant(7), mod4_y).size == accumulation_count(mod4_y)

    def test_identical_partitions_are_diagonal(self, mod4_y):
        doubled = linear_combine([(2, mod4_y)])
        si = interaction(mod4_y, doubled)
        assert si.e_pairs == ((0, 0), (1, 1), (2, 2))
        assert is_dependent_mod_c0(si)

    def test_mod4_pair_is_independent(self, alternating, mod4_y):
        assert not is_dependent_mod_c0(interaction(alternating, mod4_y))


class TestSpectrum:
    def test_combo_cardinalities(self, alternating, mod4_y):
        si = interaction(alternating, mod4_y)
        assert combo_cardinality(si, 1, 1) == 3
        assert combo_cardinality(si, 3, 1) == 4
        assert combo_cardinality(si, 0, 1) == accumulation_count(mod4_y)

    def test_zero_direction(self, alternating, mod4_y):
        with pytest.raises(ZeroDirectionError):
            combo_cardinality(interaction(alternating, mod4_y), 0, 0)

    def test_mod4_spectrum(self, alternating, mod4_y):
        assert spectrum(interaction(alternating, mod4_y)) == {2, 3, 4}

    def test_single_point(self):
        assert spectrum(interaction(constant(1), constant(2))) == {1}

    def test_collinear_points_collapse(self, mod4_y):
        si = interaction(mod4_y, linear_combine([(1, mod4_y), (1, constant(1))]))
        assert 1 in spectrum(si)

    @settings(max_examples=40)
    @given(step_sequences(), step_sequences())
    def test_maximum_is_the_pair_count(self, x, y):
        si = interaction(x, y)
        assert max(spectrum(si)) == si.size

    @settings(max_examples=40)
    @given(step_sequences(), step_sequences())
    def test_counts_match_the_refinement(self, x, y):
        si = interaction(x, y)
        for lam, mu in [(1, 1), (2, -1), (0, 1)]:
            z = linear_combine([(lam, x), (mu, y)])
            assert combo_cardinality(si, lam, mu) == accumulation_count(z)


class TestMaxAndSubmax:
    def test_mod4(self, alternating, mod4_y):
        top, below = witness_max_and_submax(alternating, mod4_y)
        assert top.cardinality == 4
        assert below.cardinality <= 3

    def test_diagonal_case(self, mod4_y):
        other = StepSequence(parts=[(5, make_ap({0}, 4)), (7, make_ap({1}, 4)), (6, make_ap({2, 3}, 4))])
        top, below = witness_max_and_submax(mod4_y, other)
        assert top.cardinality == 3
        assert below.cardinality < 3

    def test_single_pair(self):
        with pytest.raises(WitnessError) as info:
            witness_max_and_submax(constant(1), constant(2))
        assert info.value.code == "no-submax"


class TestGapWitness:
    def test_mod8_instance(self):
        x = StepSequence(parts=[(0, make_ap({0, 1, 2, 3}, 8)), (1, make_ap({4, 5, 6, 7}, 8))])
        y = StepSequence(
            parts=[
                (0, make_ap({0, 1}, 8)),
                (1, make_ap({2, 3}, 8)),
                (2, make_ap({4, 5}, 8)),
                (3, make_ap({6, 7}, 8)),
            ]
        )
        report = gap_witness(x, y)
        assert report.slope == 1
        assert report.coefficients == (-1, 1)
        assert report.cardinality == 3
        assert report.target_interval == (2, 4)
        assert report.in_target()

    def test_all_gaps_equal(self):
        # three columns with equal gap slopes collapse n₁ − 1 pairs
        x = StepSequence(parts=[(0, make_ap({0, 1}, 6)), (1, make_ap({2, 3}, 6)), (2, make_ap({4, 5}, 6))])
        y = StepSequence(parts=[(v, make_ap({r}, 6)) for r, v in enumerate((0, 1, 2, 3, 4, 5))])
        report = gap_witness(x, y)
        assert report.multiplicity == 2
        assert report.cardinality == 6 - 3 + 1

    def test_equal_sizes(self, mod4_y):
        with pytest.raises(WitnessError) as info:
            gap_witness(mod4_y, mod4_y)
        assert info.value.code == "bad-order"

    def test_not_dominant(self, alternating, mod4_y):
        y = StepSequence(parts=[(0, make_ap({0}, 3)), (1, make_ap({1}, 3)), (2, make_ap({2}, 3))])
        with pytest.raises(WitnessError) as info:
            gap_witness(alternating, y)
        assert info.value.code == "not-dominant"


class TestDecrementWitness:
    def test_hand_instance(self, alternating, two_valued_y):
        report = decrement_witness(two_valued_y, 0, x=alternating)
        assert report.slope == Fraction(1, 2)
        assert accumulation_set(report.witness)[0] == {Fraction(-1, 2), Fraction(1, 2), Fraction(3, 2)}
        assert report.cardinality == interaction(alternating, two_valued_y).size - 1

    def test_built_surrogate(self, two_valued_y):
        report = decrement_witness(two_valued_y, 0)
        assert report.surrogate is not None
        assert report.cardinality == 3

    def test_positive_epsilon(self, mod4_y):
        eps = decrement_bound(mod4_y)
        report = decrement_witness(mod4_y, eps)
        assert report.cardinality == interaction(report.surrogate, mod4_y).size - 1

    def test_sign_flip(self, two_valued_y):
        x = StepSequence(parts=[(1, make_ap({0}, 4)), (-1, make_ap({1, 2, 3}, 4))])
        report = decrement_witness(two_valued_y, 0, x=x)
        assert report.flipped
        assert report.coefficients[1] == -1
        assert report.cardinality == 2

    def test_constant_y(self):
        with pytest.raises(WitnessError) as info:
            decrement_witness(constant(3), 0)
        assert info.value.code == "degenerate"

    def test_epsilon_too_large(self, two_valued_y):
        assert decrement_bound(two_valued_y) == Fraction(1, 8)
        with pytest.raises(WitnessError) as info:
            decrement_witness(two_valued_y, Fraction(1, 4))
        assert info.value.code == "epsilon-too-large"

    def test_surrogate_off_the_plateaus(self, two_valued_y):
        x = StepSequence(parts=[(2, make_ap({0}, 2)), (-1, make_ap({1}, 2))])
        with pytest.raises(WitnessError) as info:
            decrement_witness(two_valued_y, 0, x=x)
        assert info.value.code == "bad-surrogate"


class TestEstimateBounds:
    def test_values(self):
        assert estimate_bounds([2, 3]) == (Fraction(3, 2), 6)
        assert estimate_bounds([5]) == (5, 5)
        assert estimate_bounds([2, 18]) == (9, 36)

    @pytest.mark.parametrize("cards", [[], [2, 0]])
    def test_rejects_empty_or_zero(self, cards):
        with pytest.raises(InvalidArgumentError):
            estimate_bounds(cards)

    def test_random_combination_respects_bounds(self):
        x, y = make_step_with_card(2), make_step_with_card(18, modulus=19)
        lower, upper = estimate_bounds([2, 18])
        z = linear_combine([(3, x), (-1, y)])
        assert lower <= accumulation_count(z) <= upper


class TestOverflowPeel:
    def test_already_in_range(self):
        family, coefs = overflow_family(2)
        report = overflow_peel(family, coefs, 2)
        assert report.cardinality == 4
        assert report.peel_steps == 0

    def test_peels_trailing_terms(self):
        family = [make_step_with_card(2, modulus=q) for q in (2, 3, 5)]
        report = overflow_peel(family, [1, 2, 4], 2)
        assert report.peel_steps == 1
        assert 3 <= report.cardinality <= 4
        assert report.coefficients == (1, 2, 0)

    def test_shared_partition_never_overflows(self):
        x = make_step_with_card(2)
        with pytest.raises(WitnessError) as info:
            overflow_peel([x, x], [1, 1], 2)
        assert info.value.code == "no-overflow"

    def test_member_too_large(self):
        with pytest.raises(WitnessError) as info:
            overflow_peel([make_step_with_card(3)], [1], 2)
        assert info.value.code == "bad-family"
