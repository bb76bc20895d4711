"""
Almost-disjoint families of prefix-code sets and the sequences that place a
geometric ladder of values on their dyadic cells.

A binary stream s (eventually periodic) gives A_s = {code(s[:L]) : L >= 0} with
code(w) = int("1" + w, 2). Two distinct streams share only the codes of their
common prefixes, so the family is almost disjoint. The member of A_s for prefix
length L has enumeration index L + 1, and the dyadic cell A_s^m collects the
members whose index has 2-adic valuation m.
"""
import heapq
import logging
import re
from collections.abc import Iterator, Sequence
from fractions import Fraction
from functools import lru_cache
from itertools import count
from math import lcm

from pydantic import Field, model_validator

from errors import AccumLabError, NotDistinctError, ParseError, RatioOutOfRangeError
from index_sets import two_adic_valuation
from utils import FrozenModel, Rational, format_fraction, parse_fraction

logger = logging.getLogger(__name__)

_PATTERN = re.compile(r"^bin\(([01]*);([01]+)\)$")


def code(word: str) -> int:
    """Bijection between finite binary words and ℕ: the word w maps to "1w" read in binary."""
    return int("1" + word, 2)


def decode(n: int) -> str:
    return bin(n)[3:]


def _minimal_period(period: str) -> str:
    size = len(period)
    for d in range(1, size + 1):
        if size % d == 0 and period[:d] * (size // d) == period:
            return period[:d]
    return period


class BinaryPattern(FrozenModel):
    """Eventually periodic binary stream prefix · period^ω, stored canonically."""

    prefix: str = Field(default="", description="Pre-periodic part")
    period: str = Field(description="Repeated block")

    @model_validator(mode="before")
    @classmethod
    def _canonicalize(cls, data):
        if not isinstance(data, dict):
            return data
        prefix, period = data.get("prefix", ""), data.get("period", "")
        if not period or set(prefix + period) - {"0", "1"}:
            raise ParseError("binary patterns need a nonempty 0/1 period, got " + repr((prefix, period)))
        period = _minimal_period(period)
        # a prefix ending like the period can be rolled into it
        while prefix and prefix[-1] == period[-1]:
            prefix, period = prefix[:-1], period[-1] + period[:-1]
        return {"prefix": prefix, "period": period}

    def char_at(self, i: int) -> str:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def head(self, length: int) -> str:
        return _head(self, length)

    def describe(self) -> str:
        return "bin(" + self.prefix + ";" + self.period + ")"


@lru_cache(maxsize=256)
def _head(pattern: BinaryPattern, length: int) -> str:
    if length <= len(pattern.prefix):
        return pattern.prefix[:length]
    tail = length - len(pattern.prefix)
    repeats = tail // len(pattern.period) + 1
    return pattern.prefix + (pattern.period * repeats)[:tail]


def parse_pattern(text: str) -> BinaryPattern:
    match = _PATTERN.match(text.replace(" ", ""))
    if not match:
        raise ParseError("cannot parse binary pattern " + repr(text) + "; expected bin(prefix;period)")
    return BinaryPattern(prefix=match.group(1), period=match.group(2))


def common_prefix_length(s: BinaryPattern, t: BinaryPattern) -> int | None:
    """Length of the longest common prefix, or None when s = t."""
    if s == t:
        return None
    # distinct streams differ before both have entered a common period
    horizon = max(len(s.prefix), len(t.prefix)) + lcm(len(s.period), len(t.period))
    for i in range(horizon):
        if s.char_at(i) != t.char_at(i):
            return i
    raise AssertionError("distinct canonical patterns must differ within " + str(horizon) + " symbols")


def shared_codes(s: BinaryPattern, t: BinaryPattern) -> frozenset[int]:
    """A_s ∩ A_t: the codes of the common prefixes."""
    lcp = common_prefix_length(s, t)
    if lcp is None:
        raise NotDistinctError(s.describe() + " is not distinct from itself")
    return frozenset(code(s.head(L)) for L in range(lcp + 1))


def iter_codes(s: BinaryPattern) -> Iterator[int]:
    """A_s in increasing order."""
    for length in count():
        yield code(s.head(length))


def in_member_set(s: BinaryPattern, n: int) -> bool:
    return n >= 1 and decode(n) == s.head(n.bit_length() - 1)


def cell_level(n: int) -> int:
    """m with n ∈ A_s^m, for n ∈ A_s."""
    return two_adic_valuation(n.bit_length())


class AlmostDisjointFamily(FrozenModel):
    patterns: tuple[BinaryPattern, ...] = Field(description="Pairwise distinct streams labelling the sets A_s")

    @model_validator(mode="after")
    def _check_distinct(self) -> "AlmostDisjointFamily":
        seen = set()
        for p in self.patterns:
            if p in seen:
                raise NotDistinctError("pattern " + p.describe() + " appears twice")
            seen.add(p)
        return self

    def labels(self) -> list[str]:
        return [p.describe() for p in self.patterns]

    def pattern(self, label: str | int | BinaryPattern) -> BinaryPattern:
        if isinstance(label, BinaryPattern):
            found = label
        elif isinstance(label, int):
            found = self.patterns[label]
        else:
            found = parse_pattern(label)
        if found not in self.patterns:
            raise AccumLabError("pattern " + found.describe() + " is not in the family", code="unknown-label")
        return found

    def members(self, label: str | int | BinaryPattern, how_many: int) -> list[int]:
        codes = iter_codes(self.pattern(label))
        return [next(codes) for _ in range(how_many)]


def almost_disjoint_family(patterns: Sequence[BinaryPattern | str]) -> AlmostDisjointFamily:
    parsed = tuple(p if isinstance(p, BinaryPattern) else parse_pattern(p) for p in patterns)
    family = AlmostDisjointFamily(patterns=parsed)
    logger.debug("almost-disjoint family of %d patterns", len(parsed))
    return family


class OmegaStepSequence(FrozenModel):
    """x_n = ratio^m on A_s^m and 0 off A_s; L_x = {ratio^m : m >= 0} ∪ {0}.

    With a truncation M the values on the cells m > M are replaced by 0.
    """

    pattern: BinaryPattern = Field(description="The stream s whose code set carries the values")
    ratio: Rational = Field(default=Fraction(1, 2), description="Ladder ratio in (0, 1)")
    truncation: int | None = Field(default=None, ge=0, description="Highest cell level kept")

    @model_validator(mode="after")
    def _check_ratio(self) -> "OmegaStepSequence":
        if not 0 < self.ratio < 1:
            raise RatioOutOfRangeError("ladder ratio must lie in (0, 1), got " + format_fraction(self.ratio))
        return self

    def ladder_value(self, m: int) -> Fraction:
        if self.truncation is not None and m > self.truncation:
            return Fraction(0)
        return self.ratio ** m

    def value_at(self, n: int) -> Fraction:
        if not in_member_set(self.pattern, n):
            return Fraction(0)
        return self.ladder_value(cell_level(n))

    def eval_prefix(self, how_many: int) -> list[Fraction]:
        return [self.value_at(n) for n in range(1, how_many + 1)]

    def cell_members(self, m: int, how_many: int) -> list[int]:
        """First members of the dyadic cell A_s^m."""
        out = []
        for length in count():
            if two_adic_valuation(length + 1) == m:
                out.append(code(self.pattern.head(length)))
                if len(out) == how_many:
                    return out

    def truncated(self, m: int) -> "OmegaStepSequence":
        return self.model_copy(update={"truncation": m})


def omega_vector(
    family: AlmostDisjointFamily,
    label: str | int | BinaryPattern,
    ratio: Fraction | int | str = Fraction(1, 2),
) -> OmegaStepSequence:
    return OmegaStepSequence(pattern=family.pattern(label), ratio=parse_fraction(ratio))


def pairwise_distance(x: OmegaStepSequence, y: OmegaStepSequence) -> tuple[Fraction, int | None]:
    """sup_n |x_n − y_n| with a witness index attaining it.

    Values lie in [0, 1], so the distance is at most 1; an index of A_s^0 beyond
    the shared prefixes carries 1 in x and 0 in y.
    """
    if x.ratio != y.ratio:
        raise AccumLabError("distance is defined for a common ladder ratio", code="ratio-mismatch")
    lcp = common_prefix_length(x.pattern, y.pattern)
    if lcp is None:
        return Fraction(0), None
    length = lcp + 1 if (lcp + 1) % 2 == 0 else lcp + 2
    witness = code(x.pattern.head(length))
    assert abs(x.value_at(witness) - y.value_at(witness)) == 1
    return Fraction(1), witness


class OmegaCombination(FrozenModel):
    terms: tuple[tuple[Rational, OmegaStepSequence], ...] = Field(description="(a_k, x_{s_k}) pairs")

    @model_validator(mode="after")
    def _check_terms(self) -> "OmegaCombination":
        if not self.terms:
            raise AccumLabError("a combination needs at least one term", code="empty-combination")
        if any(a == 0 for a, _ in self.terms):
            raise AccumLabError("combination coefficients must be nonzero", code="zero-coefficient")
        # one term per stream; the limit set is read off term by term
        seen = set()
        for _, x in self.terms:
            if x.pattern in seen:
                raise NotDistinctError("pattern " + x.pattern.describe() + " appears in two terms")
            seen.add(x.pattern)
        return self

    def value_at(self, n: int) -> Fraction:
        return sum((a * x.value_at(n) for a, x in self.terms), Fraction(0))

    def truncated(self, m: int) -> "OmegaCombination":
        return OmegaCombination(terms=tuple((a, x.truncated(m)) for a, x in self.terms))

    def support(self) -> Iterator[int]:
        """∪ A_{s_k} in increasing order, each index once."""
        merged = heapq.merge(*(iter_codes(x.pattern) for _, x in self.terms))
        last = None
        for n in merged:
            if n != last:
                yield n
                last = n


def omega_combination_limits(c: OmegaCombination, truncation: int) -> frozenset[Fraction]:
    """{a_k c_m : k, m <= M} ∪ {0}."""
    values = {a * x.ratio ** m for a, x in c.terms for m in range(truncation + 1)}
    return frozenset(values | {Fraction(0)})


def is_limit_point(c: OmegaCombination, q: Fraction | int | str) -> bool:
    """Membership in the full countable accumulation set {a_k c_m : k, m >= 0} ∪ {0}."""
    q = parse_fraction(q)
    if q == 0:
        return True
    for a, x in c.terms:
        value = a
        while abs(value) >= abs(q):
            if value == q:
                return True
            value *= x.ratio
    return False


def observable_levels(bound: int) -> int:
    """Highest cell level whose prefix length L still allows a code <= bound (codes of length-L prefixes are >= 2^L)."""
    longest = bound.bit_length() - 1
    return max(two_adic_valuation(i) for i in range(1, longest + 2))
