"""
Prescribed sets A ⊆ ℕ \\ {1} and decidable necessary conditions on L(A).

If L(A) is lineable then |A ∩ (A−k)| = ∞ for some k ≥ 1; if L(A) is densely
lineable then |A ∩ (A−1)| = ∞. The gates below decide these conditions exactly
for the supported families of sets and never claim the converse.
"""
import logging
import re
from fractions import Fraction
from math import ceil, comb
from typing import Annotated, Literal, Union

from pydantic import Field, TypeAdapter, field_serializer, model_validator

from errors import InvalidArgumentError, InvalidGapsError, InvalidSetError, ParseError, UndecidablePatternError
from index_sets import (
    EventuallyPeriodicSet,
    _from_rule,
    cardinality,
    complement,
    enumerate_members,
    intersect,
    is_infinite,
    iter_members,
    make_ap,
    naturals,
    shift_down,
    union,
)
from models import GateVerdict
from step_sequences import CardinalityClass
from utils import FrozenModel, Rational, format_fraction, parse_fraction

logger = logging.getLogger(__name__)

EVIDENCE_SIZE = 5


# Polynomial helpers (coefficients highest degree first)

def _strip(coeffs: list[Fraction]) -> list[Fraction]:
    while len(coeffs) > 1 and coeffs[0] == 0:
        coeffs = coeffs[1:]
    return coeffs


def poly_eval(coeffs: tuple[Fraction, ...] | list[Fraction], n: int) -> Fraction:
    total = Fraction(0)
    for c in coeffs:
        total = total * n + c
    return total


def forward_difference(coeffs: tuple[Fraction, ...] | list[Fraction]) -> list[Fraction]:
    """Coefficients of p(n+1) − p(n)."""
    asc = list(coeffs)[::-1]
    shifted = [sum((asc[i] * comb(i, j) for i in range(j, len(asc))), Fraction(0)) for j in range(len(asc))]
    diff = [s - a for s, a in zip(shifted, asc)]
    return _strip(diff[::-1][1:] or [Fraction(0)])


def cauchy_bound(coeffs: list[Fraction]) -> int:
    """Every real root of the polynomial lies below this integer."""
    coeffs = _strip(list(coeffs))
    if len(coeffs) == 1:
        return 0
    lead = coeffs[0]
    return ceil(1 + max(abs(c / lead) for c in coeffs[1:]))


def positive_from(coeffs: list[Fraction], start: int) -> int:
    """Smallest m >= start with p(n) > 0 for every n >= m; raises if the leading coefficient is not positive."""
    coeffs = _strip(list(coeffs))
    if coeffs[0] <= 0:
        raise InvalidGapsError("polynomial is not eventually positive")
    m = max(start, cauchy_bound(coeffs))
    while m > start and poly_eval(coeffs, m - 1) > 0:
        m -= 1
    return m


# Sequence rules k ↦ n_k

class SequenceRule(FrozenModel):
    """Increasing integer sequence: polynomial p(k), c·b^k, or the tower b^(e^k)."""

    kind: Literal["polynomial", "exponential", "tower"] = Field(description="Rule family")
    coeffs: tuple[Rational, ...] = Field(default=(), description="Polynomial coefficients, highest degree first")
    base: int = Field(default=2, description="b in c·b^k or b^(e^k)")
    scale: int = Field(default=1, description="c in c·b^k")
    exponent: int = Field(default=3, description="e in b^(e^k)")

    @model_validator(mode="after")
    def _check(self) -> "SequenceRule":
        if self.kind == "polynomial":
            if not self.coeffs or _strip(list(self.coeffs))[0] == 0:
                raise InvalidGapsError("polynomial rule needs a nonzero coefficient")
        elif self.kind == "exponential":
            if self.scale < 1 or self.base < 2:
                raise InvalidGapsError("exponential rule needs c >= 1 and b >= 2")
        elif self.base < 2 or self.exponent < 2:
            raise InvalidGapsError("tower rule needs b >= 2 and e >= 2")
        return self

    @property
    def degree(self) -> int:
        return len(_strip(list(self.coeffs))) - 1 if self.kind == "polynomial" else 0

    def value(self, k: int) -> int:
        if self.kind == "exponential":
            return self.scale * self.base ** k
        if self.kind == "tower":
            return self.base ** (self.exponent ** k)
        v = poly_eval(self.coeffs, k)
        if v.denominator != 1:
            raise InvalidGapsError("rule value at k = " + str(k) + " is not an integer: " + format_fraction(v))
        return int(v)

    def is_increasing(self, start: int = 1) -> bool:
        if self.kind != "polynomial":
            return True
        coeffs = _strip(list(self.coeffs))
        if len(coeffs) < 2 or coeffs[0] < 0:
            return False
        diff = forward_difference(coeffs)
        bound = max(start, cauchy_bound(diff))
        return all(poly_eval(diff, k) > 0 for k in range(start, bound + 1))

    def gaps_diverge(self) -> bool:
        return self.kind != "polynomial" or self.degree >= 2

    def index_of(self, n: int) -> int | None:
        """The k with n_k <= n < n_{k+1}, or None when n < n_1."""
        if n < self.value(1):
            return None
        k = 1
        while self.value(k + 1) <= n:
            k += 1
        return k

    def describe(self) -> str:
        if self.kind == "exponential":
            return ("" if self.scale == 1 else str(self.scale) + "*") + str(self.base) + "^k"
        if self.kind == "tower":
            return str(self.base) + "^(" + str(self.exponent) + "^k)"
        coeffs = _strip(list(self.coeffs))
        if len(coeffs) > 1 and coeffs[0] == 1 and all(c == 0 for c in coeffs[1:]):
            return "k^" + str(len(coeffs) - 1) if len(coeffs) > 2 else "k"
        return "poly(" + ",".join(format_fraction(c) for c in coeffs) + ")"


def _integer_valued_from(coeffs: tuple[Fraction, ...], n0: int) -> bool:
    # integer at deg+1 consecutive integers implies integer everywhere
    degree = len(coeffs) - 1
    return all(poly_eval(coeffs, n).denominator == 1 for n in range(n0, n0 + degree + 1))


# Prescribed sets

class APUnion(FrozenModel):
    kind: Literal["ap"] = "ap"
    cell: EventuallyPeriodicSet = Field(description="The set itself")

    @model_validator(mode="after")
    def _check(self) -> "APUnion":
        if self.cell.contains(1):
            raise InvalidSetError("prescribed sets must not contain 1")
        return self

    def contains(self, n: int) -> bool:
        return self.cell.contains(n)

    def describe(self) -> str:
        return self.cell.describe()


class PolynomialImage(FrozenModel):
    kind: Literal["poly"] = "poly"
    coeffs: tuple[Rational, ...] = Field(description="Coefficients of p, highest degree first")
    n0: int = Field(default=1, ge=1, description="A = {p(n) : n >= n0}")

    @model_validator(mode="after")
    def _check(self) -> "PolynomialImage":
        coeffs = _strip(list(self.coeffs))
        if len(coeffs) < 2:
            raise InvalidSetError("a constant polynomial does not give an increasing image")
        if not _integer_valued_from(tuple(coeffs), self.n0):
            raise InvalidSetError("polynomial is not integer-valued")
        rule = SequenceRule(kind="polynomial", coeffs=tuple(coeffs))
        if not rule.is_increasing(self.n0):
            raise InvalidSetError("polynomial is not strictly increasing from n0 = " + str(self.n0))
        if poly_eval(coeffs, self.n0) < 2:
            raise InvalidSetError("prescribed sets must lie in ℕ \\ {1}")
        return self

    @property
    def degree(self) -> int:
        return len(_strip(list(self.coeffs))) - 1

    def term(self, n: int) -> int:
        return int(poly_eval(self.coeffs, n))

    def contains(self, m: int) -> bool:
        n = self.n0
        while self.term(n) < m:
            n += 1
        return self.term(n) == m

    def describe(self) -> str:
        return "{p(n) : n >= " + str(self.n0) + "}, p = " + SequenceRule(kind="polynomial", coeffs=self.coeffs).describe()


class ExponentialImage(FrozenModel):
    kind: Literal["exp"] = "exp"
    scale: int = Field(default=1, ge=1, description="c in c·b^n")
    base: int = Field(ge=2, description="b in c·b^n")
    n0: int = Field(default=1, ge=0)

    @model_validator(mode="after")
    def _check(self) -> "ExponentialImage":
        if self.term(self.n0) < 2:
            raise InvalidSetError("prescribed sets must lie in ℕ \\ {1}")
        return self

    def term(self, n: int) -> int:
        return self.scale * self.base ** n

    def contains(self, m: int) -> bool:
        n = self.n0
        while self.term(n) < m:
            n += 1
        return self.term(n) == m

    def describe(self) -> str:
        scale = "" if self.scale == 1 else str(self.scale) + "·"
        return "{" + scale + str(self.base) + "^n : n >= " + str(self.n0) + "}"


class GapComplement(FrozenModel):
    """[2, ∞) \\ ∪_{k∈K} [n_k, n_{k+1})."""

    kind: Literal["gaps"] = "gaps"
    rule: SequenceRule = Field(description="k ↦ n_k")
    indices: EventuallyPeriodicSet = Field(description="K, the indices whose interval is removed")

    def contains(self, n: int) -> bool:
        if n < 2:
            return False
        k = self.rule.index_of(n)
        return k is None or not self.indices.contains(k)

    def describe(self) -> str:
        return "[2,∞) \\ ∪_{k∈K} [n_k, n_{k+1}), n_k = " + self.rule.describe() + ", K = " + self.indices.describe()


class ExplicitFinite(FrozenModel):
    kind: Literal["finite"] = "finite"
    elements: frozenset[int] = Field(description="The members")

    @model_validator(mode="after")
    def _check(self) -> "ExplicitFinite":
        if any(n < 2 for n in self.elements):
            raise InvalidSetError("prescribed sets must lie in ℕ \\ {1}")
        return self

    @field_serializer("elements")
    def _sorted(self, values: frozenset[int]) -> list[int]:
        return sorted(values)

    def contains(self, n: int) -> bool:
        return n in self.elements

    def describe(self) -> str:
        return "{" + ", ".join(str(n) for n in sorted(self.elements)) + "}"


PrescribedSet = Annotated[
    Union[APUnion, PolynomialImage, ExponentialImage, GapComplement, ExplicitFinite],
    Field(discriminator="kind"),
]
prescribed_set_adapter = TypeAdapter(PrescribedSet)


def membership(a: PrescribedSet, n: int) -> bool:
    return a.contains(n)


def members_upto(a: PrescribedSet, bound: int) -> list[int]:
    return [n for n in range(2, bound + 1) if a.contains(n)]


# Construction

def gap_complement_build(rule: SequenceRule, indices: EventuallyPeriodicSet) -> GapComplement:
    if not rule.is_increasing(1):
        raise InvalidGapsError("n_k = " + rule.describe() + " is not strictly increasing")
    if rule.value(1) < 1:
        raise InvalidGapsError("n_1 must be a natural number")
    return GapComplement(rule=rule, indices=indices)


def _linear_gaps_as_set(a: GapComplement) -> EventuallyPeriodicSet:
    # n_k = αk + β: the interval holding n is determined by n mod α·period(K)
    alpha = a.rule.value(2) - a.rule.value(1)
    period = alpha * a.indices.modulus
    start = max(a.rule.value(a.indices.threshold), 2)
    residues = {n % period for n in range(start, start + period) if a.contains(n)}
    return _from_rule(period, residues, start, a.contains)


def _finite_members(a: PrescribedSet) -> list[int] | None:
    """All members of a finite prescribed set, or None when the set is infinite."""
    if isinstance(a, ExplicitFinite):
        return sorted(a.elements)
    if isinstance(a, APUnion):
        return None if is_infinite(a.cell) else sorted(a.cell.added)
    if isinstance(a, GapComplement):
        kept = complement(a.indices)
        if is_infinite(kept):
            return None
        top = max(kept.added, default=0)
        return members_upto(a, a.rule.value(top + 1) - 1)
    return None


def _shift_analysis(a: PrescribedSet, k: int) -> tuple[CardinalityClass, tuple[int, ...]]:
    """Cardinality of A ∩ (A−k) with up to EVIDENCE_SIZE members (all of them when finite)."""
    if k < 1:
        raise InvalidArgumentError("shift must be a positive integer, got " + str(k))

    if isinstance(a, APUnion):
        both = intersect(a.cell, shift_down(a.cell, k))
        size = cardinality(both)
        if size is None:
            return CardinalityClass.countably_infinite(), tuple(enumerate_members(both, EVIDENCE_SIZE))
        return CardinalityClass.finite(size), tuple(sorted(both.added))

    if isinstance(a, PolynomialImage) and a.degree == 1:
        alpha, beta = a.term(1) - a.term(0), a.term(0)
        first = a.term(a.n0)
        cell = make_ap({beta % alpha}, alpha, removed=range(1, first))
        return _shift_analysis(APUnion(cell=cell), k)

    if isinstance(a, (PolynomialImage, ExponentialImage)):
        if isinstance(a, PolynomialImage):
            gap = forward_difference(a.coeffs)
            gap[-1] -= k
            stop = positive_from(gap, a.n0)
        else:
            stop = a.n0
            while a.term(stop + 1) - a.term(stop) <= k:
                stop += 1
        # from index `stop` on every gap exceeds k, so only earlier terms can pair up
        found = []
        for n in range(a.n0, stop):
            m = n + 1
            while a.term(m) - a.term(n) < k:
                m += 1
            if a.term(m) - a.term(n) == k:
                found.append(a.term(n))
        return CardinalityClass.finite(len(found)), tuple(found)

    if isinstance(a, GapComplement):
        members = _finite_members(a)
        if members is not None:
            found = tuple(n for n in members if a.contains(n + k))
            return CardinalityClass.finite(len(found)), found
        if not is_infinite(a.indices):
            # cofinite A
            return CardinalityClass.countably_infinite(), _first_shift_members(a, k)
        if a.rule.kind == "polynomial" and a.rule.degree == 1:
            return _shift_analysis(APUnion(cell=_linear_gaps_as_set(a)), k)
        if a.rule.gaps_diverge():
            # infinitely many kept intervals whose lengths tend to infinity
            return CardinalityClass.countably_infinite(), _first_shift_members(a, k)
        raise UndecidablePatternError("cannot decide A ∩ (A−k) for " + a.describe())

    if isinstance(a, ExplicitFinite):
        found = tuple(n for n in sorted(a.elements) if n + k in a.elements)
        return CardinalityClass.finite(len(found)), found

    raise UndecidablePatternError("unsupported prescribed set " + type(a).__name__)


def _first_shift_members(a: GapComplement, k: int) -> tuple[int, ...]:
    kept = complement(a.indices)
    found: list[int] = []
    ranges = [(2, a.rule.value(1))]
    for index in iter_members(kept):
        ranges.append((a.rule.value(index), a.rule.value(index + 1)))
        for lo, hi in ranges:
            # an interval longer than k + EVIDENCE_SIZE fills the evidence from its head
            for n in range(lo, min(hi, lo + k + EVIDENCE_SIZE)):
                if n not in found and a.contains(n) and a.contains(n + k):
                    found.append(n)
                    if len(found) >= EVIDENCE_SIZE:
                        return tuple(sorted(found))
        ranges = []
    return tuple(sorted(found))


def shift_intersection(a: PrescribedSet, k: int) -> CardinalityClass:
    """Exact cardinality class of A ∩ (A−k)."""
    return _shift_analysis(a, k)[0]


# Gates

def _is_finite(a: PrescribedSet) -> bool:
    return _finite_members(a) is not None


def _is_cofinite(a: PrescribedSet) -> bool:
    if isinstance(a, APUnion):
        return len(a.cell.residues) == a.cell.modulus
    if isinstance(a, GapComplement):
        return not is_infinite(a.indices)
    return False


def _failure_reason(a: PrescribedSet, k_max: int | None) -> str:
    if _is_finite(a):
        return "finite-support"
    if isinstance(a, (PolynomialImage, ExponentialImage)):
        return "gap-divergence"
    if isinstance(a, APUnion):
        cell = a.cell
        if k_max is not None and k_max < cell.modulus:
            return "search-bound"
        if cell.modulus % 2 == 0 and len({r % 2 for r in cell.residues}) == 1:
            return "parity"
    return "periodicity"


def lineable_gate(a: PrescribedSet, k_max: int) -> GateVerdict:
    """Search k <= k_max with |A ∩ (A−k)| = ∞; a failure proves L(A) is not lineable."""
    divergent = isinstance(a, ExponentialImage) or (isinstance(a, PolynomialImage) and a.degree >= 2)
    if divergent or _is_finite(a):
        reason = _failure_reason(a, None)
        evidence = _shift_analysis(a, 1)[1]
        return GateVerdict(
            gate="lineable-necessary",
            set_description=a.describe(),
            holds=False,
            evidence=evidence,
            reason=reason,
            conclusion="L(A) is not lineable",
        )

    for k in range(1, k_max + 1):
        size, evidence = _shift_analysis(a, k)
        if size.is_infinite:
            logger.debug("lineable gate holds at k = %d for %s", k, a.describe())
            if _is_cofinite(a):
                conclusion = "L(A) is lineable (A is cofinite)"
            else:
                conclusion = "necessary condition met; lineability of L(A) is not decided"
            return GateVerdict(
                gate="lineable-necessary",
                set_description=a.describe(),
                holds=True,
                witness_k=k,
                evidence=evidence,
                conclusion=conclusion,
            )

    reason = _failure_reason(a, k_max)
    conclusion = (
        "no shift k <= " + str(k_max) + " found; nothing is concluded"
        if reason == "search-bound"
        else "L(A) is not lineable"
    )
    return GateVerdict(
        gate="lineable-necessary",
        set_description=a.describe(),
        holds=False,
        reason=reason,
        conclusion=conclusion,
    )


def dense_gate(a: PrescribedSet) -> GateVerdict:
    """|A ∩ (A−1)| = ∞, necessary for dense lineability of L(A)."""
    size, evidence = _shift_analysis(a, 1)
    if size.is_infinite:
        return GateVerdict(
            gate="densely-lineable-necessary",
            set_description=a.describe(),
            holds=True,
            witness_k=1,
            evidence=evidence,
            conclusion="necessary condition met; dense lineability of L(A) is not decided",
        )
    reason = _failure_reason(a, None)
    if reason == "search-bound":
        reason = "periodicity"
    return GateVerdict(
        gate="densely-lineable-necessary",
        set_description=a.describe(),
        holds=False,
        evidence=evidence,
        reason=reason,
        conclusion="L(A) is not densely lineable",
    )


# Expression grammar

_AP = re.compile(r"^(\d*)N(?:\+(\d+))?$")
_POLY = re.compile(r"^poly\(([^)]*)\)(?:@(\d+))?$")
_EXP = re.compile(r"^exp\((\d+)(?:,(\d+))?\)(?:@(\d+))?$")
_GAPS = re.compile(r"^gaps\((.+);\s*K\s*=\s*(.+)\)$")
_FINITE = re.compile(r"^(?:finite)?\{([\d,\s]*)\}$")
_POWER = re.compile(r"^k\^(\d+)$")
_EXPONENTIAL = re.compile(r"^(?:(\d+)\*)?(\d+)\^k$")
_TOWER = re.compile(r"^(\d+)\^\((\d+)\^k\)$")


def _split_top_level(text: str, sep: str) -> list[str]:
    parts, depth, current = [], 0, []
    for ch in text:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return [p.strip() for p in parts]


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as e:
        raise ParseError("expected integers in {" + text + "}") from e


def parse_index_set(text: str) -> EventuallyPeriodicSet:
    """Sets of naturals: "N", "2N", "3N+1", "{2,7}" and unions with "|"."""
    result = None
    for token in _split_top_level(text.replace(" ", ""), "|"):
        finite = _FINITE.match(token)
        if finite:
            piece = make_ap((), 1, added=_int_list(finite.group(1)))
        elif token in ("N\\{1}", "N\\{1\\}"):
            piece = make_ap({0}, 1, removed={1})
        else:
            ap = _AP.match(token)
            if not ap:
                raise ParseError("cannot parse set expression " + repr(token))
            step = int(ap.group(1) or 1)
            offset = int(ap.group(2) or 0)
            if step == 0:
                raise ParseError("progression step must be positive in " + repr(token))
            # {step·n + offset : n >= 1}
            piece = make_ap({offset % step}, step, removed=range(1, step + offset))
        result = piece if result is None else union(result, piece)
    if result is None:
        raise ParseError("empty set expression")
    return result


def parse_rule(text: str) -> SequenceRule:
    """Rules k ↦ n_k: "k^2", "poly(1,0,0)", "2^k", "3*2^k", "2^(3^k)"."""
    text = text.replace(" ", "")
    if text == "k":
        return SequenceRule(kind="polynomial", coeffs=(Fraction(1), Fraction(0)))
    power = _POWER.match(text)
    if power:
        degree = int(power.group(1))
        return SequenceRule(kind="polynomial", coeffs=(Fraction(1),) + (Fraction(0),) * degree)
    poly = _POLY.match(text)
    if poly and poly.group(2) is None:
        return SequenceRule(kind="polynomial", coeffs=tuple(parse_fraction(c) for c in poly.group(1).split(",")))
    tower = _TOWER.match(text)
    if tower:
        return SequenceRule(kind="tower", base=int(tower.group(1)), exponent=int(tower.group(2)))
    exponential = _EXPONENTIAL.match(text)
    if exponential:
        return SequenceRule(kind="exponential", scale=int(exponential.group(1) or 1), base=int(exponential.group(2)))
    raise ParseError("cannot parse sequence rule " + repr(text))


def parse_set_expression(text: str) -> PrescribedSet:
    """Parse the CLI grammar into a PrescribedSet."""
    compact = text.strip()
    gaps = _GAPS.match(compact)
    if gaps:
        return gap_complement_build(parse_rule(gaps.group(1)), parse_index_set(gaps.group(2)))
    spaced = compact.replace(" ", "")
    poly = _POLY.match(spaced)
    if poly:
        coeffs = tuple(parse_fraction(c) for c in poly.group(1).split(","))
        return PolynomialImage(coeffs=coeffs, n0=int(poly.group(2) or 1))
    exp = _EXP.match(spaced)
    if exp:
        if exp.group(2) is None:
            scale, base = 1, int(exp.group(1))
        else:
            scale, base = int(exp.group(1)), int(exp.group(2))
        return ExponentialImage(scale=scale, base=base, n0=int(exp.group(3) or 1))
    finite = _FINITE.match(spaced)
    if finite and spaced.startswith("finite"):
        return ExplicitFinite(elements=frozenset(_int_list(finite.group(1))))
    cell = parse_index_set(spaced)
    if cell == naturals():
        raise ParseError("ℕ contains 1; use N\\{1} or N+1")
    return APUnion(cell=cell)
