"""
Geometry of the point set 𝓟_{x,y} = {(ξ_i, η_j) : S_i ∩ T_j infinite} for two step sequences.

For z = λx + μy the accumulation set is {λξ + μη : (ξ, η) ∈ 𝓟}, so |L_z| only
depends on which pairs of points the direction (λ, μ) identifies. Everything in
this module is an exact computation on that finite arrangement, plus the
explicit witnesses built from it.
"""
import logging
from collections.abc import Sequence
from fractions import Fraction
from math import gcd, lcm, prod

from pydantic import Field, field_serializer

from errors import InvalidArgumentError, WitnessError, ZeroDirectionError
from index_sets import is_infinite, make_ap, meets_infinitely
from models import WitnessReport
from step_sequences import (
    StepSequence,
    accumulation_count,
    combination_accumulation,
    linear_combine,
    sup_norm,
)
from utils import FrozenModel, Rational, format_fraction, parse_fraction

logger = logging.getLogger(__name__)


class SpanInteraction(FrozenModel):
    """Index pairs whose cells meet infinitely, with their value points.

    Indices refer to positions in ``x.parts`` / ``y.parts``; only infinite cells
    can take part in a pair.
    """

    x_values: tuple[Rational, ...] = Field(description="Values of x, ascending")
    y_values: tuple[Rational, ...] = Field(description="Values of y, ascending")
    e_pairs: tuple[tuple[int, int], ...] = Field(description="(i, j) with S_i ∩ T_j infinite, sorted")
    column_min: dict[int, int] = Field(description="Smallest row j paired with column i")
    column_max: dict[int, int] = Field(description="Largest row j paired with column i")
    slope_candidates: frozenset[Rational] = Field(description="Ratios t for which (1, t) identifies two points")

    @field_serializer("slope_candidates")
    def _sorted_slopes(self, values: frozenset[Fraction]) -> list[str]:
        return [format_fraction(v) for v in sorted(values)]

    @property
    def points(self) -> list[tuple[Fraction, Fraction]]:
        return [(self.x_values[i], self.y_values[j]) for i, j in self.e_pairs]

    @property
    def size(self) -> int:
        return len(self.e_pairs)


def _forbidden_ratios(points: Sequence[tuple[Fraction, Fraction]]) -> frozenset[Fraction]:
    ratios = set()
    for a in range(len(points)):
        for b in range(a + 1, len(points)):
            da = points[a][0] - points[b][0]
            db = points[a][1] - points[b][1]
            if db != 0:
                ratios.add(-da / db)
    return frozenset(ratios)


def interaction(x: StepSequence, y: StepSequence) -> SpanInteraction:
    pairs = []
    for i, xp in enumerate(x.parts):
        if not is_infinite(xp.cell):
            continue
        for j, yp in enumerate(y.parts):
            if is_infinite(yp.cell) and meets_infinitely(xp.cell, yp.cell):
                pairs.append((i, j))

    column_min: dict[int, int] = {}
    column_max: dict[int, int] = {}
    for i, j in pairs:
        column_min[i] = min(j, column_min.get(i, j))
        column_max[i] = max(j, column_max.get(i, j))

    x_values = tuple(x.values)
    y_values = tuple(y.values)
    points = [(x_values[i], y_values[j]) for i, j in pairs]
    logger.debug("interaction has %d pairs over %d columns", len(pairs), len(column_min))
    return SpanInteraction(
        x_values=x_values,
        y_values=y_values,
        e_pairs=tuple(pairs),
        column_min=column_min,
        column_max=column_max,
        slope_candidates=_forbidden_ratios(points),
    )


def combo_cardinality(si: SpanInteraction, lam: Fraction | int | str, mu: Fraction | int | str) -> int:
    """|L_{λx+μy}| = |{λξ + μη : (ξ, η) ∈ 𝓟}|."""
    lam, mu = parse_fraction(lam), parse_fraction(mu)
    if lam == 0 and mu == 0:
        raise ZeroDirectionError("(λ, μ) = (0, 0) is not a direction")
    return len({lam * xi + mu * eta for xi, eta in si.points})


def generic_ratio(si: SpanInteraction) -> Fraction:
    """A ratio t such that the direction (1, t) separates every pair of points."""
    forbidden = sorted(si.slope_candidates)
    if not forbidden:
        return Fraction(0)
    if len(forbidden) == 1:
        return forbidden[0] + 1
    return (forbidden[0] + forbidden[1]) / 2


def spectrum(si: SpanInteraction) -> frozenset[int]:
    """Every value of |L_z| over z ∈ span{x, y} with z ∉ c₀.

    Directions (λ, μ) and (cλ, cμ) give the same count, so one direction per
    class suffices: (0, 1), each forbidden ratio (1, t), and one generic (1, t).
    """
    if not si.e_pairs:
        return frozenset()
    directions = [(Fraction(0), Fraction(1)), (Fraction(1), generic_ratio(si))]
    directions += [(Fraction(1), t) for t in si.slope_candidates]
    return frozenset(combo_cardinality(si, lam, mu) for lam, mu in directions)


def is_dependent_mod_c0(si: SpanInteraction) -> bool:
    """True when every point lies on one line through the origin (y ~ c·x or x ~ 0 modulo c₀)."""
    points = [p for p in si.points if p != (0, 0)]
    if not points:
        return True
    xi0, eta0 = points[0]
    return all(xi * eta0 - eta * xi0 == 0 for xi, eta in points)


def _report(
    coefficients: Sequence[Fraction],
    inputs: Sequence[StepSequence],
    **extra,
) -> WitnessReport:
    witness = linear_combine(list(zip(coefficients, inputs)))
    return WitnessReport(
        coefficients=tuple(coefficients),
        witness=witness,
        cardinality=accumulation_count(witness),
        **extra,
    )


def witness_max_and_submax(x: StepSequence, y: StepSequence) -> tuple[WitnessReport, WitnessReport]:
    """z₁ with |L_{z₁}| = |𝓔| and z₂ with |L_{z₂}| < |𝓔|."""
    si = interaction(x, y)
    if si.size < 2:
        raise WitnessError("|𝓔| = " + str(si.size) + " leaves no room below the maximum", code="no-submax")

    top = _report([Fraction(1), generic_ratio(si)], [x, y])

    # a direction normal to one segment of 𝓟 merges its two endpoints
    (xa, ya), (xb, yb) = si.points[0], si.points[1]
    da, db = xa - xb, ya - yb
    if db != 0:
        direction = [Fraction(1), -da / db]
    else:
        direction = [Fraction(0), Fraction(1)]
    below = _report(direction, [x, y])
    logger.debug("max witness %d, sub-max witness %d", top.cardinality, below.cardinality)
    return top, below


def gap_witness(x: StepSequence, y: StepSequence) -> WitnessReport:
    """z = −Cx + y with C the smallest slope between consecutive columns of 𝓟."""
    si = interaction(x, y)
    columns = [i for i, p in enumerate(x.parts) if is_infinite(p.cell)]
    n1 = len(columns)
    n2 = accumulation_count(y)
    if n1 < 2 or n1 >= n2:
        raise WitnessError(
            "needs 2 <= |L_x| < |L_y|, got |L_x| = " + str(n1) + ", |L_y| = " + str(n2), code="bad-order"
        )
    if si.size != n2:
        raise WitnessError("|𝓔| = " + str(si.size) + " differs from |L_y| = " + str(n2), code="not-dominant")
    missing = [i for i in columns if i not in si.column_min]
    if missing:
        raise WitnessError("column " + str(missing[0]) + " meets no row infinitely", code="empty-column")

    a, b = si.x_values, si.y_values
    slopes = [
        (b[si.column_min[hi]] - b[si.column_max[lo]]) / (a[hi] - a[lo])
        for lo, hi in zip(columns, columns[1:])
    ]
    c = min(slopes)
    r = slopes.count(c)
    return _report(
        [-c, Fraction(1)],
        [x, y],
        target_interval=(n2 - n1, n2),
        slope=c,
        multiplicity=r,
    )


def decrement_bound(y: StepSequence) -> Fraction:
    """min{δ/(8‖y‖), 1/2} with δ the smallest gap between accumulation values of y."""
    values = sorted(p.value for p in y.infinite_parts())
    if len(values) < 2:
        raise WitnessError("y has a single accumulation point", code="degenerate")
    delta = min(hi - lo for lo, hi in zip(values, values[1:]))
    return min(delta / (8 * sup_norm(y)), Fraction(1, 2))


def _plateau_values(eps: Fraction) -> list[Fraction]:
    if eps == 0:
        return [Fraction(1), Fraction(-1)]
    half = eps / 2
    return [1 - half, -1 - half, 1 + half, -1 + half]


def _meets_every_cell(x: StepSequence, y: StepSequence) -> bool:
    return all(
        meets_infinitely(xp.cell, yp.cell)
        for xp in x.infinite_parts()
        for yp in y.infinite_parts()
    )


def plateau_surrogate(y: StepSequence, eps: Fraction) -> StepSequence:
    """x with values within eps of ±1, every cell meeting every infinite cell of y infinitely.

    Tries residues mod 2 (eps = 0) or mod 4 first, so that x stays close to
    1_{2ℕ} − 1_{2ℕ+1}; otherwise spreads the plateau values over a modulus
    coprime to the period of y.
    """
    values = _plateau_values(eps)
    count = len(values)
    x = StepSequence(parts=[(values[r], make_ap({r}, count)) for r in range(count)])
    if _meets_every_cell(x, y):
        return x

    period = lcm(*(p.cell.modulus for p in y.parts))
    q = count + 1
    while gcd(q, period) != 1:
        q += 1
    residues_by_value: dict[Fraction, set[int]] = {}
    for r in range(q):
        residues_by_value.setdefault(values[min(r, count - 1)], set()).add(r)
    return StepSequence(parts=[(v, make_ap(res, q)) for v, res in residues_by_value.items()])


def _cross_slope(si: SpanInteraction) -> Fraction:
    left = [(xi, eta) for xi, eta in si.points if xi < 0]
    right = [(xi, eta) for xi, eta in si.points if xi > 0]
    return max((ek - ei) / (xj - xl) for xl, ei in left for xj, ek in right)


def decrement_witness(
    y: StepSequence,
    eps: Fraction | int | str,
    x: StepSequence | None = None,
) -> WitnessReport:
    """z = −Cx ± y with |L_z| = |𝓔_{x,y}| − 1, for x within eps of the ±1 plateaus."""
    eps = parse_fraction(eps)
    bound = decrement_bound(y)
    if eps < 0 or eps > bound:
        raise WitnessError(
            "eps = " + format_fraction(eps) + " must lie in [0, " + format_fraction(bound) + "]",
            code="epsilon-too-large",
        )
    if x is None:
        x = plateau_surrogate(y, eps)
    else:
        for xi, _ in interaction(x, y).points:
            if not (abs(xi - 1) <= eps or abs(xi + 1) <= eps):
                raise WitnessError(
                    "accumulation value " + format_fraction(xi) + " of x is not within eps of ±1",
                    code="bad-surrogate",
                )

    si = interaction(x, y)
    if not any(xi < 0 for xi, _ in si.points) or not any(xi > 0 for xi, _ in si.points):
        raise WitnessError("x must accumulate near both -1 and 1", code="bad-surrogate")

    sign = Fraction(1)
    c = _cross_slope(si)
    if c == 0:
        flipped_y = linear_combine([(-1, y)])
        si = interaction(x, flipped_y)
        c = _cross_slope(si)
        sign = Fraction(-1)
        if c == 0:
            raise WitnessError("all points of 𝓟 are aligned on both signs", code="degenerate")

    report = _report(
        [-c, sign],
        [x, y],
        target_interval=(si.size - 2, si.size),
        slope=c,
        multiplicity=1,
        flipped=sign < 0,
        surrogate=x,
    )
    logger.debug("decrement witness C = %s, |𝓔| = %d, card = %d", c, si.size, report.cardinality)
    return report


def estimate_bounds(cards: Sequence[int]) -> tuple[Fraction, int]:
    """(n_k / (n₁⋯n_{k−1}), n₁⋯n_k) bracketing |L_z| for z with a nonzero last coefficient."""
    if not cards or any(n < 1 for n in cards):
        raise InvalidArgumentError("cardinalities must be a nonempty list of positive integers")
    return Fraction(cards[-1], prod(cards[:-1])), prod(cards)


def overflow_peel(
    family: Sequence[StepSequence],
    coefs: Sequence[Fraction | int | str],
    n: int,
) -> WitnessReport:
    """Drop trailing terms of z₀ = Σ coefs·x_i until n+1 <= |L_z| <= n².

    While |L_z| > n², the shorter combination still has more than n
    accumulation points, since otherwise adding back one term with at most n
    points would give at most n² of them.
    """
    coefs = [parse_fraction(c) for c in coefs]
    if len(coefs) != len(family) or not family:
        raise WitnessError("need one coefficient per family member", code="bad-family")
    for index, member in enumerate(family):
        if accumulation_count(member) > n:
            raise WitnessError(
                "member " + str(index) + " has more than " + str(n) + " accumulation points", code="bad-family"
            )

    length = len(family)
    card = len(combination_accumulation(list(zip(coefs, family))))
    if card <= n:
        raise WitnessError("|L_{z0}| = " + str(card) + " does not exceed " + str(n), code="no-overflow")
    while card > n * n:
        length -= 1
        card = len(combination_accumulation(list(zip(coefs[:length], family[:length]))))
        logger.debug("peeled to %d terms, |L| = %d", length, card)

    kept = coefs[:length] + [Fraction(0)] * (len(family) - length)
    return _report(kept, list(family), target_interval=(n, n * n + 1), peel_steps=len(family) - length)
