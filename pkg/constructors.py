"""
Explicit subspace constructions: step sequences with a prescribed number of
accumulation points and the inductive basis whose span avoids the removed
intervals ∪_{k∈K} [n_k, n_{k+1}).
"""
import logging
from collections.abc import Sequence
from fractions import Fraction
from math import gcd, prod

from errors import AccumLabError, InvalidArgumentError, InvalidGapsError, SizeLimitError
from index_sets import make_ap
from models import CorollaryReport, NkBasisReport
from set_gates import SequenceRule, gap_complement_build, parse_index_set
from span_geometry import overflow_peel
from step_sequences import StepSequence, combination_accumulation
from utils import get_modulus_cap, parse_fraction

logger = logging.getLogger(__name__)

SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def make_step_with_card(
    l: int,
    values: Sequence[Fraction | int | str] | None = None,
    modulus: int | None = None,
) -> StepSequence:
    """Step sequence with exactly l accumulation points.

    Residues 0, ..., l−2 mod ``modulus`` get their own cell and the remaining
    residues share the last one. Values default to 0, 1, ..., l−1.
    """
    if l < 1:
        raise InvalidArgumentError("l must be a positive integer, got " + str(l))
    q = l if modulus is None else modulus
    if q < l:
        raise InvalidArgumentError("modulus " + str(q) + " cannot carry " + str(l) + " cells")
    if q > get_modulus_cap():
        raise SizeLimitError("modulus " + str(q) + " exceeds the cap " + str(get_modulus_cap()))
    values = [Fraction(v) for v in range(l)] if values is None else [parse_fraction(v) for v in values]
    if len(values) != l or len(set(values)) != l:
        raise InvalidArgumentError("need " + str(l) + " distinct values")
    parts = [(values[r], make_ap({r}, q)) for r in range(l - 1)]
    parts.append((values[l - 1], make_ap(range(l - 1, q), q)))
    return StepSequence(parts=parts)


def _next_coprime(start: int, moduli: Sequence[int]) -> int:
    q = start
    while any(gcd(q, m) != 1 for m in moduli):
        q += 1
    return q


def _first_index_above(rule: SequenceRule, bound: int, start: int) -> int:
    k = start
    while rule.value(k) <= bound:
        k += 1
    return k


def build_nk_basis(rule: SequenceRule, r: int) -> NkBasisReport:
    """Greedy minimal l_j and k_j with l_j/(l_1⋯l_{j−1}) >= n_{k_{j−1}+1} and n_{k_j} > l_1⋯l_j."""
    if r < 1:
        raise InvalidArgumentError("r must be a positive integer, got " + str(r))
    if not rule.is_increasing(1):
        raise InvalidGapsError("n_k = " + rule.describe() + " is not strictly increasing")
    cap = get_modulus_cap()

    l_values: list[int] = []
    k_indices: list[int] = []
    moduli: list[int] = []
    certificates: list[str] = []
    for j in range(1, r + 1):
        if j == 1:
            l = 2
        else:
            before = prod(l_values)
            target = rule.value(k_indices[-1] + 1)
            l = before * target
            certificates.append(
                "l_" + str(j) + "/(" + "·".join("l_" + str(i) for i in range(1, j)) + ") = "
                + str(l) + "/" + str(before) + " = " + str(target)
                + " >= n_" + str(k_indices[-1] + 1) + " = " + str(target)
            )
        if l > cap:
            raise SizeLimitError("l_" + str(j) + " = " + str(l) + " exceeds the cap " + str(cap))
        q = _next_coprime(l, moduli)
        if q > cap:
            raise SizeLimitError("modulus for step " + str(j) + " exceeds the cap " + str(cap))
        l_values.append(l)
        moduli.append(q)

        total = prod(l_values)
        k = _first_index_above(rule, total, k_indices[-1] + 1 if k_indices else 1)
        k_indices.append(k)
        certificates.append(
            "n_" + str(k) + " = " + str(rule.value(k)) + " > " + str(total) + " = "
            + "·".join("l_" + str(i) for i in range(1, j + 1))
        )
        logger.debug("step %d: l = %d, modulus = %d, k = %d", j, l, q, k)

    basis = tuple(make_step_with_card(l, modulus=q) for l, q in zip(l_values, moduli))
    return NkBasisReport(
        rule=rule.describe(),
        basis=basis,
        l_values=tuple(l_values),
        k_indices=tuple(k_indices),
        moduli=tuple(moduli),
        certificates=tuple(certificates),
    )


def certificates_hold(report: NkBasisReport, rule: SequenceRule) -> bool:
    """Re-check both inequalities of every step with exact arithmetic."""
    for j, (l, k) in enumerate(zip(report.l_values, report.k_indices)):
        if j > 0 and Fraction(l, prod(report.l_values[:j])) < rule.value(report.k_indices[j - 1] + 1):
            return False
        if rule.value(k) <= prod(report.l_values[: j + 1]):
            return False
    return True


def combination_card(report: NkBasisReport, coefs: Sequence[Fraction | int | str]) -> int:
    return len(combination_accumulation(list(zip(coefs, report.basis))))


def verify_nk_membership(
    report: NkBasisReport,
    coefs: Sequence[Fraction | int | str],
    rule: SequenceRule,
    indices: Sequence[int] | None = None,
) -> bool:
    """Check n_{k_{j−1}+1} <= |L_z| < n_{k_j} and |L_z| ∉ ∪_{k∈K} [n_k, n_{k+1}) for z = Σ coefs·x_i."""
    coefs = [parse_fraction(c) for c in coefs]
    if len(coefs) > len(report.basis):
        raise InvalidArgumentError("more coefficients than basis vectors")
    nonzero = [i for i, c in enumerate(coefs) if c != 0]
    if not nonzero:
        raise AccumLabError("the zero combination has no accumulation count", code="zero-combination")

    top = nonzero[-1]
    card = combination_card(report, coefs)
    lower = 2 if top == 0 else rule.value(report.k_indices[top - 1] + 1)
    upper = rule.value(report.k_indices[top])
    sandwich = lower <= card < upper

    removed = set(report.k_indices if indices is None else indices)
    k = rule.index_of(card)
    avoids = k is None or k not in removed
    if not (sandwich and avoids):
        logger.debug("combination %s has |L| = %d outside [%d, %d) or in a removed interval", coefs, card, lower, upper)
    return sandwich and avoids


def square_growth_holds(rule: SequenceRule, upto: int) -> bool:
    """n_{k+1} > n_k² for k = 1..upto."""
    return all(rule.value(k + 1) > rule.value(k) ** 2 for k in range(1, upto + 1))


def overflow_family(n: int) -> tuple[list[StepSequence], list[Fraction]]:
    """n two-valued sequences on distinct prime moduli and coefficients 1, 2, 4, ...

    The combination has 2^n accumulation points while every member has 2.
    """
    if n > len(SMALL_PRIMES):
        raise SizeLimitError("overflow family supports n <= " + str(len(SMALL_PRIMES)))
    family = [make_step_with_card(2, modulus=p) for p in SMALL_PRIMES[:n]]
    coefs = [Fraction(2 ** i) for i in range(n)]
    return family, coefs


def corollary_scenario(rule: SequenceRule, r: int = 2, upto: int = 3) -> CorollaryReport:
    """Basis side (lineable) and overflow side (not densely lineable) for one rule.

    With square growth, n_k independent vectors of L([2, n_k]) span some z with
    n_k+1 <= |L_z| <= n_k² < n_{k+1}, a cardinality removed when k ∈ K.
    """
    basis = build_nk_basis(rule, r)
    indices = parse_index_set("{" + ",".join(str(k) for k in basis.k_indices) + "}")
    prescribed = gap_complement_build(rule, indices)

    k = basis.k_indices[0]
    n = rule.value(k)
    family, coefs = overflow_family(n)
    obstruction = overflow_peel(family, coefs, n)
    caught = rule.index_of(obstruction.cardinality) in basis.k_indices
    return CorollaryReport(
        rule=rule.describe(),
        square_growth=square_growth_holds(rule, upto),
        prescribed_set=prescribed.describe(),
        basis=basis,
        obstruction_k=k,
        obstruction=obstruction,
        obstruction_in_gap=caught,
    )
