"""
Brute-force oracle for accumulation sets.

Evaluate a long prefix, drop a burn-in, and keep the values (or tolerance
clusters) that recur at least ``min_recurrence`` times. This is independent of
the symbolic cell algebra and is used to re-check every symbolic answer.
"""
import logging
from collections import Counter
from collections.abc import Sequence
from fractions import Fraction
from itertools import combinations, islice
from math import lcm

from pydantic import Field, model_validator

from errors import InadequateConfigError
from omega_constructors import OmegaCombination, OmegaStepSequence, omega_combination_limits, shared_codes
from step_sequences import StepSequence, accumulation_set, eval_prefix, value_at
from utils import FrozenModel, Rational, format_fraction, get_default_burn_in, get_default_prefix_len, parse_fraction

logger = logging.getLogger(__name__)


class OracleConfig(FrozenModel):
    prefix_len: int = Field(default_factory=get_default_prefix_len, ge=1, description="Number of terms evaluated")
    burn_in: int = Field(default_factory=get_default_burn_in, ge=0, description="Leading terms ignored")
    tolerance: Rational = Field(default=Fraction(0), description="Single-link distance joining values into a cluster")
    min_recurrence: int = Field(default=3, ge=2, description="Occurrences needed to count a cluster")

    @model_validator(mode="after")
    def _check(self) -> "OracleConfig":
        if self.burn_in >= self.prefix_len:
            raise InadequateConfigError("burn_in must be smaller than prefix_len")
        if self.tolerance < 0:
            raise InadequateConfigError("tolerance must be nonnegative")
        return self


class PerturbedSequence(FrozenModel):
    """n ↦ x_n + amplitude/n, a c₀ perturbation of a step sequence."""

    base: StepSequence
    amplitude: Rational = Field(default=Fraction(0))

    @model_validator(mode="after")
    def _check(self) -> "PerturbedSequence":
        if self.amplitude < 0:
            raise ValueError("amplitude must be nonnegative")
        return self

    def value_at(self, n: int) -> Fraction:
        return value_at(self.base, n) + self.amplitude / n

    def eval_prefix(self, count: int) -> list[Fraction]:
        return [self.value_at(n) for n in range(1, count + 1)]


class OracleComparison(FrozenModel):
    observed: frozenset[Rational]
    expected: frozenset[Rational]
    agrees: bool

    def to_json(self) -> dict:
        return {
            "observed": [format_fraction(v) for v in sorted(self.observed)],
            "expected": [format_fraction(v) for v in sorted(self.expected)],
            "agrees": self.agrees,
        }


def perturb_c0(x: StepSequence, amplitude: Fraction | int | str) -> PerturbedSequence:
    return PerturbedSequence(base=x, amplitude=parse_fraction(amplitude))


def cluster_accumulation(values: Sequence[Fraction], cfg: OracleConfig) -> frozenset[Fraction]:
    """Representatives of the values recurring at least min_recurrence times after the burn-in.

    Tolerance 0 counts exact repeats. Otherwise sorted values closer than the
    tolerance are chained into one cluster, represented by its mean.
    """
    tail = list(values[cfg.burn_in:])
    if cfg.tolerance == 0:
        counts = Counter(tail)
        return frozenset(v for v, c in counts.items() if c >= cfg.min_recurrence)

    clusters: list[list[Fraction]] = []
    for v in sorted(tail):
        if clusters and v - clusters[-1][-1] <= cfg.tolerance:
            clusters[-1].append(v)
        else:
            clusters.append([v])
    return frozenset(sum(c, Fraction(0)) / len(c) for c in clusters if len(c) >= cfg.min_recurrence)


def _matches(observed: frozenset[Fraction], expected: frozenset[Fraction], tolerance: Fraction) -> bool:
    if tolerance == 0:
        return observed == expected
    if len(observed) != len(expected):
        return False
    return all(any(abs(o - e) <= tolerance for o in observed) for e in expected)


def _check_step_config(x: StepSequence, cfg: OracleConfig) -> None:
    period = lcm(*(p.cell.modulus for p in x.parts))
    if cfg.prefix_len < 20 * period:
        raise InadequateConfigError(
            "prefix_len " + str(cfg.prefix_len) + " is shorter than 20 periods (" + str(20 * period) + ")"
        )
    if cfg.prefix_len - cfg.burn_in < cfg.min_recurrence * period:
        raise InadequateConfigError("the tail after burn-in holds fewer than min_recurrence periods")
    if cfg.burn_in < x.threshold - 1:
        raise InadequateConfigError(
            "burn_in " + str(cfg.burn_in) + " does not cover the exceptions below " + str(x.threshold)
        )


def _check_omega_config(c: OmegaCombination, cfg: OracleConfig, truncation: int) -> None:
    needed = cfg.burn_in + len(c.terms) * (cfg.min_recurrence + 1) * 2 ** (truncation + 1)
    if cfg.prefix_len < needed:
        raise InadequateConfigError(
            "prefix_len " + str(cfg.prefix_len) + " below " + str(needed) + " support positions for M = " + str(truncation)
        )
    patterns = {x.pattern for _, x in c.terms}
    overlap = sum(len(shared_codes(s, t)) for s, t in combinations(sorted(patterns, key=lambda p: p.describe()), 2))
    if cfg.burn_in < overlap:
        raise InadequateConfigError("burn_in must cover the " + str(overlap) + " codes shared between terms")


def compare_with_symbolic(
    x: StepSequence | PerturbedSequence | OmegaStepSequence | OmegaCombination,
    cfg: OracleConfig,
    truncation: int | None = None,
) -> OracleComparison:
    """Oracle clusters next to the symbolic accumulation set.

    Omega inputs are evaluated with their values truncated at level M along the
    merged support of the terms, since the code sets are too sparse for a
    plain prefix.
    """
    if isinstance(x, OmegaStepSequence):
        x = OmegaCombination(terms=((Fraction(1), x),))
    if isinstance(x, OmegaCombination):
        if truncation is None:
            raise InadequateConfigError("omega comparisons need a truncation level")
        _check_omega_config(x, cfg, truncation)
        capped = x.truncated(truncation)
        values = [capped.value_at(n) for n in islice(x.support(), cfg.prefix_len)]
        expected = omega_combination_limits(x, truncation)
    else:
        base = x.base if isinstance(x, PerturbedSequence) else x
        _check_step_config(base, cfg)
        values = x.eval_prefix(cfg.prefix_len) if isinstance(x, PerturbedSequence) else eval_prefix(x, cfg.prefix_len)
        expected = accumulation_set(base)[0]

    observed = cluster_accumulation(values, cfg)
    agrees = _matches(observed, expected, cfg.tolerance)
    if not agrees:
        logger.debug("oracle saw %d clusters, symbolic set has %d", len(observed), len(expected))
    return OracleComparison(observed=observed, expected=expected, agrees=agrees)


def check_against_symbolic(
    x: StepSequence | PerturbedSequence | OmegaStepSequence | OmegaCombination,
    cfg: OracleConfig,
    truncation: int | None = None,
) -> bool:
    return compare_with_symbolic(x, cfg, truncation).agrees


def adequate_config(x: StepSequence, min_recurrence: int = 3) -> OracleConfig:
    """Smallest standard configuration the step-sequence checks accept for x."""
    period = lcm(*(p.cell.modulus for p in x.parts))
    burn_in = max(get_default_burn_in(), x.threshold)
    prefix_len = max(get_default_prefix_len(), 20 * period, burn_in + (min_recurrence + 1) * period)
    return OracleConfig(prefix_len=prefix_len, burn_in=burn_in, min_recurrence=min_recurrence)
