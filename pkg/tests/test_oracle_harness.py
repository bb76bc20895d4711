from fractions import Fraction

import pytest
from hypothesis import given, settings

from errors import InadequateConfigError
from index_sets import make_ap
from omega_constructors import OmegaCombination, almost_disjoint_family, omega_vector
from oracle_harness import (
    OracleConfig,
    adequate_config,
    check_against_symbolic,
    cluster_accumulation,
    compare_with_symbolic,
    perturb_c0,
)
from step_sequences import StepSequence, accumulation_set
from tests.strategies import step_sequences


@pytest.fixture
def with_exception() -> StepSequence:
    """5 on the odds and on 6, 1 on the other evens."""
    return StepSequence(parts=[(5, make_ap({1}, 2, added={6})), (1, make_ap({0}, 2, removed={6}))])


@pytest.fixture
def family():
    return almost_disjoint_family(["bin(;0)", "bin(;1)"])


class TestConfig:
    def test_burn_in_below_prefix(self):
        with pytest.raises(InadequateConfigError):
            OracleConfig(prefix_len=100, burn_in=100)

    def test_negative_tolerance(self):
        with pytest.raises(InadequateConfigError):
            OracleConfig(prefix_len=100, burn_in=0, tolerance="-1/10")

    def test_adequate_config_covers_the_period(self, mod4_y):
        cfg = adequate_config(mod4_y)
        assert cfg.prefix_len >= 80
        assert check_against_symbolic(mod4_y, cfg)


class TestClusters:
    def test_exact_repeats(self):
        cfg = OracleConfig(prefix_len=10, burn_in=0)
        values = [Fraction(v) for v in (1, 1, 1, 2, 2)]
        assert cluster_accumulation(values, cfg) == {1}

    def test_tolerance_chains_close_values(self):
        cfg = OracleConfig(prefix_len=10, burn_in=0, tolerance="1/50", min_recurrence=2)
        values = [Fraction(0), Fraction(1, 100), Fraction(2, 100), Fraction(1), Fraction(1)]
        assert cluster_accumulation(values, cfg) == {Fraction(1, 100), 1}

    def test_burn_in_is_dropped(self):
        cfg = OracleConfig(prefix_len=10, burn_in=3)
        values = [Fraction(7)] * 3 + [Fraction(0)] * 4
        assert cluster_accumulation(values, cfg) == {0}


class TestStepSequences:
    def test_alternating(self, alternating):
        comparison = compare_with_symbolic(alternating, OracleConfig(prefix_len=100, burn_in=0))
        assert comparison.agrees
        assert comparison.to_json()["observed"] == ["-1", "1"]

    def test_short_prefix(self, mod4_y):
        with pytest.raises(InadequateConfigError):
            compare_with_symbolic(mod4_y, OracleConfig(prefix_len=40, burn_in=0))

    def test_burn_in_must_cover_exceptions(self, with_exception):
        with pytest.raises(InadequateConfigError):
            compare_with_symbolic(with_exception, OracleConfig(prefix_len=200, burn_in=3))
        assert check_against_symbolic(with_exception, OracleConfig(prefix_len=200, burn_in=10))

    @settings(max_examples=30, deadline=None)
    @given(step_sequences(max_modulus=8))
    def test_random_sequences_agree(self, x):
        assert check_against_symbolic(x, adequate_config(x))


class TestPerturbation:
    def test_c0_perturbation_keeps_clusters(self, alternating):
        perturbed = perturb_c0(alternating, 1)
        cfg = OracleConfig(prefix_len=2000, burn_in=200, tolerance="1/50")
        assert check_against_symbolic(perturbed, cfg)

    def test_exact_oracle_sees_nothing_repeat(self, alternating):
        perturbed = perturb_c0(alternating, 1)
        comparison = compare_with_symbolic(perturbed, OracleConfig(prefix_len=2000, burn_in=200))
        assert comparison.observed == frozenset()
        assert comparison.expected == accumulation_set(alternating)[0]
        assert not comparison.agrees


class TestOmega:
    def test_single_ladder(self, family):
        x = omega_vector(family, "bin(;0)")
        comparison = compare_with_symbolic(x, OracleConfig(prefix_len=200, burn_in=0), truncation=2)
        assert comparison.agrees
        assert comparison.observed == {1, Fraction(1, 2), Fraction(1, 4), 0}

    def test_truncation_required(self, family):
        with pytest.raises(InadequateConfigError):
            compare_with_symbolic(omega_vector(family, 0), OracleConfig(prefix_len=200, burn_in=0))

    def test_combination(self, family):
        combo = OmegaCombination(terms=((1, omega_vector(family, 0)), (-2, omega_vector(family, 1))))
        assert check_against_symbolic(combo, OracleConfig(prefix_len=400, burn_in=10), truncation=2)

    def test_shared_codes_need_burn_in(self, family):
        combo = OmegaCombination(terms=((1, omega_vector(family, 0)), (-2, omega_vector(family, 1))))
        with pytest.raises(InadequateConfigError):
            compare_with_symbolic(combo, OracleConfig(prefix_len=400, burn_in=0), truncation=2)
