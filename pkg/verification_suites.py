"""
Seeded verification suites as LangGraph nodes.

Every suite draws its cases from ``case_rng(seed, suite, index)``, so a run is a
pure function of the seed. Each node returns increments for the shared
counters and one entry for ``suite_results``.
"""
import logging
import random
from collections.abc import Callable
from fractions import Fraction
from math import prod

from pydantic import Field

from constructors import build_nk_basis, certificates_hold, make_step_with_card, verify_nk_membership
from errors import AccumLabError
from index_sets import finite_set, make_ap
from omega_constructors import OmegaCombination, almost_disjoint_family, omega_vector, pairwise_distance
from oracle_harness import OracleConfig, adequate_config, check_against_symbolic, compare_with_symbolic, perturb_c0
from set_gates import (
    APUnion,
    dense_gate,
    lineable_gate,
    members_upto,
    parse_rule,
    parse_set_expression,
    shift_intersection,
)
from span_geometry import (
    decrement_bound,
    decrement_witness,
    estimate_bounds,
    gap_witness,
    interaction,
    overflow_peel,
    spectrum,
    combo_cardinality,
    witness_max_and_submax,
)
from step_sequences import StepSequence, accumulation_count, combination_accumulation
from utils import FrozenModel, canonical_json, case_rng, format_fraction, random_fraction
from verification_state import VerificationState

logger = logging.getLogger(__name__)

SUITE_ORDER = (
    "spectrum",
    "gap",
    "decrement",
    "estimate",
    "gates",
    "basis",
    "overflow",
    "nonsep",
    "oracle",
    "determinism",
)

NONSEP_PATTERNS = ("bin(;0)", "bin(;1)", "bin(;01)", "bin(1;0)", "bin(;001)")

# (expression, lineable holds, witness k, dense holds, dense reason)
GATE_FIXTURES = (
    ("2N+1", True, 2, False, "parity"),
    ("2N", True, 2, False, "parity"),
    ("poly(1,0,0)@2", False, None, False, "gap-divergence"),
    ("exp(3)@1", False, None, False, "gap-divergence"),
    ("N\\{1}", True, 1, True, None),
    ("N+1", True, 1, True, None),
)


class SuiteOutcome(FrozenModel):
    name: str = Field(description="Suite name")
    cases: int = Field(ge=0, description="Cases drawn")
    passed: int = Field(ge=0, description="Checks that held")
    failed: int = Field(ge=0, description="Checks that did not hold")
    failures: tuple[str, ...] = Field(default=(), description="One line per failed check")
    details: dict = Field(default_factory=dict, description="Suite-specific facts for the report")


class _Tally:
    def __init__(self, name: str):
        self.name = name
        self.passed = 0
        self.failed = 0
        self.failures: list[str] = []

    def check(self, ok: bool, message: str) -> bool:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            self.failures.append(self.name + ": " + message)
            logger.debug("check failed in %s: %s", self.name, message)
        return ok

    def outcome(self, cases: int, **details) -> SuiteOutcome:
        return SuiteOutcome(
            name=self.name,
            cases=cases,
            passed=self.passed,
            failed=self.failed,
            failures=tuple(self.failures),
            details=details,
        )


# Random instances

def _distinct_values(rng: random.Random, count: int, bound: int, denominator: int) -> list[Fraction]:
    grid = rng.sample(range(-bound * denominator, bound * denominator + 1), count)
    return [Fraction(v, denominator) for v in grid]


def _random_partition(rng: random.Random, modulus: int, count: int) -> list[set[int]]:
    residues = list(range(modulus))
    rng.shuffle(residues)
    groups = [{r} for r in residues[:count]]
    for r in residues[count:]:
        groups[rng.randrange(count)].add(r)
    return groups


def random_step_sequence(
    rng: random.Random,
    max_modulus: int = 12,
    max_parts: int = 6,
    bound: int = 5,
    denominator: int = 4,
    exceptions: bool = False,
) -> StepSequence:
    """Random periodic step sequence, optionally with a finite cell of small indices."""
    modulus = rng.randint(2, max_modulus)
    count = rng.randint(2, min(max_parts, modulus))
    groups = _random_partition(rng, modulus, count)
    values = _distinct_values(rng, count + 1, bound, denominator)
    removed = set(rng.sample(range(1, 21), rng.randint(1, 3))) if exceptions else set()
    parts = [(v, make_ap(g, modulus, removed=removed)) for v, g in zip(values, groups)]
    if removed:
        parts.append((values[-1], finite_set(removed)))
    return StepSequence(parts=parts)


def _dominated_pair(rng: random.Random) -> tuple[StepSequence, StepSequence]:
    """x coarser than y: every cell of y sits inside one cell of x, so |𝓔| = |L_y|."""
    modulus = rng.randint(4, 24)
    n2 = rng.randint(3, min(6, modulus))
    n1 = rng.randint(2, n2 - 1)
    y_groups = _random_partition(rng, modulus, n2)
    owner = list(range(n1)) + [rng.randrange(n1) for _ in range(n2 - n1)]
    rng.shuffle(owner)
    x_groups: list[set[int]] = [set() for _ in range(n1)]
    for group, g in zip(y_groups, owner):
        x_groups[g] |= group
    x = StepSequence(parts=[(v, make_ap(g, modulus)) for v, g in zip(_distinct_values(rng, n1, 5, 4), x_groups)])
    y = StepSequence(parts=[(v, make_ap(g, modulus)) for v, g in zip(_distinct_values(rng, n2, 5, 4), y_groups)])
    return x, y


def _smooth_modulus(rng: random.Random) -> int:
    return rng.choice((2, 3, 4, 6, 8, 9, 12, 16, 18, 24, 27, 32, 36))


def _oracle_confirms(x: StepSequence) -> bool:
    return check_against_symbolic(x, adequate_config(x))


# Suites

def run_spectrum(seed: int, quick: bool) -> SuiteOutcome:
    """Maximum of the span spectrum equals |𝓔| and a sub-maximal witness exists."""
    tally = _Tally("spectrum")
    cases = 20 if quick else 200
    for i in range(cases):
        rng = case_rng(seed, "spectrum", i)
        x, y = random_step_sequence(rng, max_modulus=60), random_step_sequence(rng, max_modulus=60)
        si = interaction(x, y)
        tally.check(max(spectrum(si)) == si.size, "case " + str(i) + ": spectrum max differs from |𝓔|")
        if si.size < 2:
            continue
        top, below = witness_max_and_submax(x, y)
        tally.check(top.cardinality == si.size, "case " + str(i) + ": maximal witness misses |𝓔|")
        tally.check(below.cardinality < si.size, "case " + str(i) + ": sub-max witness is maximal")
        tally.check(
            combo_cardinality(si, *below.coefficients) == below.cardinality,
            "case " + str(i) + ": point count disagrees with the refinement",
        )
        if i % 10 == 0:
            tally.check(_oracle_confirms(below.witness), "case " + str(i) + ": oracle disagrees")
    return tally.outcome(cases)


def run_gap(seed: int, quick: bool) -> SuiteOutcome:
    tally = _Tally("gap")
    cases = 10 if quick else 100
    collapsed = 0
    for i in range(cases):
        rng = case_rng(seed, "gap", i)
        x, y = _dominated_pair(rng)
        report = gap_witness(x, y)
        size = interaction(x, y).size
        tally.check(report.in_target(), "case " + str(i) + ": |L_z| = " + str(report.cardinality) + " outside the interval")
        tally.check(
            report.cardinality == size - report.multiplicity,
            "case " + str(i) + ": |L_z| differs from |𝓔| − r",
        )
        tally.check(_oracle_confirms(report.witness), "case " + str(i) + ": oracle disagrees")
        collapsed += report.multiplicity
    return tally.outcome(cases, collapsed=collapsed)


def _hand_decrement(tally: _Tally) -> None:
    y = StepSequence(parts=[(0, make_ap({0, 1}, 4)), (1, make_ap({2, 3}, 4))])
    x = StepSequence(parts=[(1, make_ap({0}, 2)), (-1, make_ap({1}, 2))])
    report = decrement_witness(y, 0, x=x)
    tally.check(report.slope == Fraction(1, 2), "hand instance: C = " + format_fraction(report.slope))
    tally.check(report.cardinality == 3, "hand instance: |L_z| = " + str(report.cardinality))


def run_decrement(seed: int, quick: bool) -> SuiteOutcome:
    tally = _Tally("decrement")
    _hand_decrement(tally)
    cases = 5 if quick else 50
    for i in range(cases):
        rng = case_rng(seed, "decrement", i)
        modulus = _smooth_modulus(rng)
        count = rng.randint(2, min(6, modulus))
        groups = _random_partition(rng, modulus, count)
        y = StepSequence(parts=[(v, make_ap(g, modulus)) for v, g in zip(_distinct_values(rng, count, 5, 4), groups)])
        eps = decrement_bound(y)
        report = decrement_witness(y, eps)
        size = interaction(report.surrogate, y).size
        tally.check(report.cardinality == size - 1, "case " + str(i) + ": |L_z| = " + str(report.cardinality) + ", |𝓔| = " + str(size))
        tally.check(_oracle_confirms(report.witness), "case " + str(i) + ": oracle disagrees")
    return tally.outcome(cases + 1)


def run_estimate(seed: int, quick: bool) -> SuiteOutcome:
    """n_k/(n₁⋯n_{k−1}) <= |L_z| <= n₁⋯n_k for a nonzero last coefficient."""
    tally = _Tally("estimate")
    families, vectors = (20, 20) if quick else (100, 100)
    for i in range(families):
        rng = case_rng(seed, "estimate", i)
        family = [random_step_sequence(rng, max_modulus=12, max_parts=6) for _ in range(rng.randint(1, 4))]
        cards = [accumulation_count(x) for x in family]
        lower, upper = estimate_bounds(cards)
        violations = 0
        for _ in range(vectors):
            coefs = [Fraction(rng.randint(-3, 3)) for _ in family]
            coefs[-1] = Fraction(rng.choice((-3, -2, -1, 1, 2, 3)))
            card = len(combination_accumulation(list(zip(coefs, family))))
            if not lower <= card <= upper:
                violations += 1
        tally.check(violations == 0, "family " + str(i) + ": " + str(violations) + " combinations escape the bounds")
    return tally.outcome(families * vectors)


def run_gates(seed: int, quick: bool) -> SuiteOutcome:
    tally = _Tally("gates")
    for text, lineable, k, dense, reason in GATE_FIXTURES:
        a = parse_set_expression(text)
        first = lineable_gate(a, 10)
        tally.check(first.holds == lineable and first.witness_k == k, text + ": lineable gate " + str(first.holds))
        second = dense_gate(a)
        tally.check(second.holds == dense and second.reason == reason, text + ": dense gate " + str(second.holds))
    tally.check(
        "not decided" in lineable_gate(parse_set_expression("2N"), 10).conclusion,
        "2N: lineability should be left open",
    )

    # shift intersections against brute force on random AP unions
    cases = 10 if quick else 50
    for i in range(cases):
        rng = case_rng(seed, "gates", i)
        modulus = rng.randint(2, 12)
        residues = set(rng.sample(range(modulus), rng.randint(1, modulus)))
        if residues == set(range(modulus)):
            residues.discard(0)
        a = APUnion(cell=make_ap(residues, modulus, removed={1}))
        k = rng.randint(1, 2 * modulus)
        bound = 20 * modulus * k
        members = set(members_upto(a, bound + k))
        hits = sum(1 for n in members if n <= bound and n + k in members)
        infinite = shift_intersection(a, k).is_infinite
        tally.check(infinite == (hits > 10), "case " + str(i) + ": A ∩ (A−" + str(k) + ") misjudged")
    return tally.outcome(len(GATE_FIXTURES) + cases)


def run_basis(seed: int, quick: bool) -> SuiteOutcome:
    tally = _Tally("basis")
    rule = parse_rule("k^2")
    report = build_nk_basis(rule, 3)
    tally.check(report.l_values == (2, 18, 2304), "l = " + str(report.l_values))
    tally.check(certificates_hold(report, rule), "certificates fail on re-check")
    # one less at any step breaks the matching certificate
    for j in range(1, len(report.l_values)):
        before = prod(report.l_values[:j])
        tally.check(
            Fraction(report.l_values[j] - 1, before) < rule.value(report.k_indices[j - 1] + 1),
            "l_" + str(j + 1) + " is not minimal",
        )
    for j, k in enumerate(report.k_indices):
        tally.check(k == 1 or rule.value(k - 1) <= prod(report.l_values[: j + 1]), "k_" + str(j + 1) + " is not minimal")

    cases = 20 if quick else 200
    for i in range(cases):
        rng = case_rng(seed, "basis", i)
        top = rng.randrange(len(report.basis))
        coefs = [Fraction(rng.randint(-5, 5)) for _ in range(top)]
        coefs.append(Fraction(rng.choice((-5, -4, -3, -2, -1, 1, 2, 3, 4, 5))))
        tally.check(verify_nk_membership(report, coefs, rule), "combination " + str(coefs) + " leaves the sandwich")
    return tally.outcome(cases, l_values=list(report.l_values), k_indices=list(report.k_indices))


def run_overflow(seed: int, quick: bool) -> SuiteOutcome:
    tally = _Tally("overflow")
    cases = 5 if quick else 20
    n = 3
    for i in range(cases):
        rng = case_rng(seed, "overflow", i)
        moduli = [2, 3, 5]
        rng.shuffle(moduli)
        family = []
        for q in moduli:
            l = min(rng.randint(2, 3), q)
            family.append(make_step_with_card(l, _distinct_values(rng, l, 4, 2), modulus=q))
        for _ in range(20):
            coefs = [Fraction(rng.choice((-3, -2, -1, 1, 2, 3)), rng.choice((1, 2))) for _ in family]
            if len(combination_accumulation(list(zip(coefs, family)))) >= n + 1:
                break
        else:
            tally.check(False, "case " + str(i) + ": no starting combination with more than " + str(n) + " points")
            continue
        report = overflow_peel(family, coefs, n)
        tally.check(n + 1 <= report.cardinality <= n * n, "case " + str(i) + ": |L_z| = " + str(report.cardinality))
        tally.check(_oracle_confirms(report.witness), "case " + str(i) + ": oracle disagrees")
    return tally.outcome(cases)


def run_nonsep(seed: int, quick: bool) -> SuiteOutcome:
    tally = _Tally("nonsep")
    family = almost_disjoint_family(NONSEP_PATTERNS)
    vectors = [omega_vector(family, label) for label in family.labels()]
    for a in range(len(vectors)):
        for b in range(a + 1, len(vectors)):
            distance, witness = pairwise_distance(vectors[a], vectors[b])
            tally.check(
                distance == 1 and witness is not None,
                family.labels()[a] + " vs " + family.labels()[b] + ": distance " + format_fraction(distance),
            )

    truncation = 4
    cfg = OracleConfig(prefix_len=2000 if quick else 20000, burn_in=200, min_recurrence=3)
    cases = 3 if quick else 10
    for i in range(cases):
        rng = case_rng(seed, "nonsep", i)
        chosen = rng.sample(range(len(vectors)), rng.randint(1, 3))
        terms = tuple((random_fraction(rng, 1, 3, 2) * rng.choice((-1, 1)), vectors[k]) for k in chosen)
        comparison = compare_with_symbolic(OmegaCombination(terms=terms), cfg, truncation)
        tally.check(comparison.agrees, "combination " + str(i) + ": oracle clusters differ from the ladder")
    return tally.outcome(cases, pairs=len(vectors) * (len(vectors) - 1) // 2)


def run_oracle(seed: int, quick: bool) -> SuiteOutcome:
    tally = _Tally("oracle")
    cases = 50 if quick else 500
    smeared = OracleConfig(prefix_len=2000, burn_in=200, tolerance=Fraction(1, 50), min_recurrence=3)
    for i in range(cases):
        rng = case_rng(seed, "oracle", i)
        x = random_step_sequence(rng, max_modulus=60, max_parts=8, exceptions=rng.random() < 0.5)
        cfg = adequate_config(x)
        tally.check(check_against_symbolic(x, cfg), "case " + str(i) + ": exact clusters differ")
        comparison = compare_with_symbolic(perturb_c0(x, 1), smeared.model_copy(update={"prefix_len": cfg.prefix_len}))
        tally.check(
            len(comparison.observed) == accumulation_count(x) and comparison.agrees,
            "case " + str(i) + ": perturbed clusters differ",
        )
    return tally.outcome(cases)


def run_determinism(seed: int, quick: bool) -> SuiteOutcome:
    tally = _Tally("determinism")
    for name in ("spectrum", "gates"):
        first = canonical_json(SUITES[name](seed, True).to_json())
        second = canonical_json(SUITES[name](seed, True).to_json())
        tally.check(first == second, name + " produced different reports for seed " + str(seed))
    return tally.outcome(2)


SUITES: dict[str, Callable[[int, bool], SuiteOutcome]] = {
    "spectrum": run_spectrum,
    "gap": run_gap,
    "decrement": run_decrement,
    "estimate": run_estimate,
    "gates": run_gates,
    "basis": run_basis,
    "overflow": run_overflow,
    "nonsep": run_nonsep,
    "oracle": run_oracle,
    "determinism": run_determinism,
}


def run_suite(name: str, seed: int, quick: bool) -> SuiteOutcome:
    """Run one suite; a domain error inside a suite counts as a single failed check."""
    try:
        return SUITES[name](seed, quick)
    except AccumLabError as e:
        logger.warning("suite %s aborted: %s", name, e)
        return SuiteOutcome(name=name, cases=0, passed=0, failed=1, failures=(name + ": " + str(e),))


# Nodes

def _suite_node(name: str) -> Callable[[VerificationState], dict]:
    def node(state: VerificationState) -> dict:
        outcome = run_suite(name, state["seed"], state.get("quick", False))
        logger.info("suite %s: %d passed, %d failed", name, outcome.passed, outcome.failed)
        return {
            "pending": [p for p in state.get("pending", []) if p != name],
            "completed": [name],
            "checks_passed": outcome.passed,
            "checks_failed": outcome.failed,
            "failures": list(outcome.failures),
            "suite_results": {
                name: {"cases": outcome.cases, "passed": outcome.passed, "failed": outcome.failed, **outcome.details}
            },
        }

    node.__name__ = name + "_node"
    return node


SUITE_NODES = {name: _suite_node(name) for name in SUITE_ORDER}


def next_suite(state: VerificationState) -> str:
    """Route to the next selected suite, or to the summary once none are left."""
    pending = state.get("pending", [])
    return pending[0] if pending else "summarize_checks"


def summarize_checks(state: VerificationState) -> dict:
    return {
        "summary": {
            "suites": list(state.get("completed", [])),
            "checks_passed": state.get("checks_passed", 0),
            "checks_failed": state.get("checks_failed", 0),
        }
    }
