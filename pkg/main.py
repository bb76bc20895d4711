"""
accum-lab command line: constructions, gates and seeded verification with JSON reports.

JSON goes to stdout (or --out), human summaries and logs to stderr.
Exit codes: 0 success, 1 failed checks, 2 parse or precondition errors.
"""
import argparse
import sys
from fractions import Fraction
from itertools import combinations

from pydantic import ValidationError

from constructors import build_nk_basis, certificates_hold, corollary_scenario, verify_nk_membership
from errors import AccumLabError
from models import RunReport, WitnessReport
from omega_constructors import OmegaCombination, almost_disjoint_family, omega_combination_limits, omega_vector, pairwise_distance
from oracle_harness import OracleConfig, adequate_config, compare_with_symbolic
from set_gates import dense_gate, lineable_gate, parse_rule, parse_set_expression
from span_geometry import (
    decrement_witness,
    gap_witness,
    generic_ratio,
    interaction,
    is_dependent_mod_c0,
    overflow_peel,
    spectrum,
    witness_max_and_submax,
)
from step_sequences import StepSequence
from terminal_ui import (
    console,
    print_banner,
    print_error,
    print_info,
    print_status_panel,
    print_step,
    print_success,
    print_table,
    print_warning,
    setup_logging,
)
from utils import canonical_json, format_fraction, get_default_seed, get_log_level, load_json_file, parse_fraction
from verification_suites import SUITE_ORDER
from verification_workflow import run_verification


class CheckCounter:
    """Oracle and certificate checks made while building a report."""

    def __init__(self):
        self.passed = 0
        self.failed = 0

    def record(self, ok: bool, what: str) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            print_warning("check failed: " + what)


def _load_sequence(path: str) -> StepSequence:
    return StepSequence.from_json(load_json_file(path))


def _confirm_witness(report: WitnessReport, checks: CheckCounter, label: str) -> dict:
    comparison = compare_with_symbolic(report.witness, adequate_config(report.witness))
    checks.record(comparison.agrees, label + ": oracle clusters differ from the symbolic set")
    checks.record(report.in_target(), label + ": cardinality " + str(report.cardinality) + " outside the target interval")
    payload = report.to_json()
    payload["oracle"] = comparison.to_json()
    return payload


# Subcommands

def cmd_spectrum(args, checks: CheckCounter) -> tuple[dict, dict]:
    x, y = _load_sequence(args.x), _load_sequence(args.y)
    si = interaction(x, y)
    values = sorted(spectrum(si))
    print_table(
        "𝓟_{x,y}",
        ["i", "j", "ξ", "η"],
        [[i, j, format_fraction(xi), format_fraction(eta)] for (i, j), (xi, eta) in zip(si.e_pairs, si.points)],
    )
    print_info("spectrum: " + ", ".join(str(v) for v in values))
    checks.record(not values or max(values) == si.size, "spectrum maximum equals |𝓔|")
    outputs = {
        "e_pairs": [list(p) for p in si.e_pairs],
        "points": [[format_fraction(a), format_fraction(b)] for a, b in si.points],
        "size": si.size,
        "spectrum": values,
        "generic_mu": format_fraction(generic_ratio(si)),
        "slope_candidates": [format_fraction(t) for t in sorted(si.slope_candidates)],
        "dependent_mod_c0": is_dependent_mod_c0(si),
    }
    return {"x": x.to_json(), "y": y.to_json()}, outputs


def cmd_witness(args, checks: CheckCounter) -> tuple[dict, dict]:
    if args.kind == "maxsub":
        x, y = _load_sequence(args.x), _load_sequence(args.y)
        top, below = witness_max_and_submax(x, y)
        outputs = {"max": _confirm_witness(top, checks, "max"), "submax": _confirm_witness(below, checks, "submax")}
        return {"x": x.to_json(), "y": y.to_json()}, outputs
    if args.kind == "gap":
        x, y = _load_sequence(args.x), _load_sequence(args.y)
        report = gap_witness(x, y)
        return {"x": x.to_json(), "y": y.to_json()}, _confirm_witness(report, checks, "gap")
    if args.kind == "decrement":
        y = _load_sequence(args.y)
        x = _load_sequence(args.x) if args.x else None
        report = decrement_witness(y, parse_fraction(args.eps), x=x)
        inputs = {"y": y.to_json(), "eps": format_fraction(parse_fraction(args.eps))}
        if x is not None:
            inputs["x"] = x.to_json()
        return inputs, _confirm_witness(report, checks, "decrement")

    payload = load_json_file(args.family)
    family = [StepSequence.from_json(item) for item in payload["family"]]
    coefs = [parse_fraction(c) for c in payload["coefs"]]
    n = int(payload["n"])
    report = overflow_peel(family, coefs, n)
    inputs = {"family": [x.to_json() for x in family], "coefs": [format_fraction(c) for c in coefs], "n": n}
    return inputs, _confirm_witness(report, checks, "peel")


def cmd_gate(args, checks: CheckCounter) -> tuple[dict, dict]:
    a = parse_set_expression(args.expression)
    verdicts = [lineable_gate(a, args.kmax), dense_gate(a)]
    print_table(
        "gates for " + a.describe(),
        ["gate", "holds", "k", "reason", "conclusion"],
        [[v.gate, v.holds, v.witness_k, v.reason, v.conclusion] for v in verdicts],
    )
    return {"expression": args.expression, "kmax": args.kmax}, {"verdicts": [v.to_json() for v in verdicts]}


def cmd_basis(args, checks: CheckCounter) -> tuple[dict, dict]:
    rule = parse_rule(args.nk)
    report = build_nk_basis(rule, args.r)
    checks.record(certificates_hold(report, rule), "basis certificates")
    # every single basis vector lies in the right slot
    for j in range(len(report.basis)):
        coefs = [Fraction(0)] * j + [Fraction(1)]
        checks.record(verify_nk_membership(report, coefs, rule), "x_" + str(j + 1) + " lies in its sandwich")
    print_table(
        "basis for n_k = " + rule.describe(),
        ["j", "l_j", "k_j", "modulus"],
        [[j + 1, l, k, q] for j, (l, k, q) in enumerate(zip(report.l_values, report.k_indices, report.moduli))],
    )
    return {"nk": rule.describe(), "r": args.r}, report.to_json()


def cmd_nonsep(args, checks: CheckCounter) -> tuple[dict, dict]:
    family = almost_disjoint_family(args.labels)
    ratio = parse_fraction(args.ratio)
    vectors = [omega_vector(family, label, ratio) for label in family.labels()]
    distances = []
    for (a, x), (b, y) in combinations(enumerate(vectors), 2):
        d, witness = pairwise_distance(x, y)
        checks.record(d == 1, family.labels()[a] + " and " + family.labels()[b] + " at distance 1")
        distances.append({"pair": [family.labels()[a], family.labels()[b]], "distance": format_fraction(d), "witness": witness})

    coefs = [parse_fraction(c) for c in args.coefs] if args.coefs else [Fraction(1)] * len(vectors)
    if len(coefs) != len(vectors):
        raise AccumLabError("need one coefficient per label", code="bad-family")
    combo = OmegaCombination(terms=tuple((a, x) for a, x in zip(coefs, vectors) if a != 0))
    cfg = OracleConfig(prefix_len=args.prefix, burn_in=args.burn_in)
    comparison = compare_with_symbolic(combo, cfg, args.M)
    checks.record(comparison.agrees, "oracle clusters match the truncated ladder")
    outputs = {
        "distances": distances,
        "predicted": [format_fraction(v) for v in sorted(omega_combination_limits(combo, args.M))],
        "oracle": comparison.to_json(),
    }
    inputs = {
        "labels": family.labels(),
        "coefs": [format_fraction(c) for c in coefs],
        "ratio": format_fraction(ratio),
        "M": args.M,
        "prefix": args.prefix,
        "burn_in": args.burn_in,
    }
    return inputs, outputs


def cmd_verify(args, checks: CheckCounter) -> tuple[dict, dict]:
    selected = list(SUITE_ORDER) if "all" in args.suite else args.suite
    print_step("running " + str(len(selected)) + " suites", "🧪")
    final = run_verification(selected, args.seed, args.quick)
    checks.passed += final["checks_passed"]
    checks.failed += final["checks_failed"]
    results = final["suite_results"]
    print_table(
        "verification",
        ["suite", "cases", "passed", "failed"],
        [[name, results[name]["cases"], results[name]["passed"], results[name]["failed"]] for name in final["completed"]],
    )
    for line in final["failures"][:20]:
        print_error(line)
    outputs = {"suites": results, "failures": list(final["failures"]), "order": list(final["completed"])}
    return {"suite": selected, "quick": args.quick}, outputs


def cmd_scenario(args, checks: CheckCounter) -> tuple[dict, dict]:
    rule = parse_rule(args.nk)
    report = corollary_scenario(rule, args.r)
    checks.record(report.square_growth, "n_{k+1} > n_k² on the checked range")
    checks.record(report.obstruction_in_gap, "peeled cardinality lies in a removed interval")
    checks.record(certificates_hold(report.basis, rule), "basis certificates")
    print_status_panel(
        "lineable, not densely lineable",
        {
            "A": report.prescribed_set,
            "K": ", ".join(str(k) for k in report.basis.k_indices),
            "obstruction": str(report.obstruction.cardinality) + " accumulation points from n_k = " + str(rule.value(report.obstruction_k)),
        },
    )
    outputs = report.to_json()
    outputs["obstruction"] = _confirm_witness(report.obstruction, checks, "obstruction")
    return {"nk": rule.describe(), "r": args.r}, outputs


COMMANDS = {
    "spectrum": cmd_spectrum,
    "witness": cmd_witness,
    "gate": cmd_gate,
    "basis": cmd_basis,
    "nonsep": cmd_nonsep,
    "verify": cmd_verify,
    "scenario": cmd_scenario,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="Write the JSON report here instead of stdout")
    common.add_argument("--seed", type=int, default=None, help="Seed for randomized trials (default: ACCUM_LAB_SEED)")
    common.add_argument("--log-level", default=None, help="Logging level (default: ACCUM_LAB_LOG_LEVEL)")

    parser = argparse.ArgumentParser(prog="accum-lab", description="Accumulation points of step sequences")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="Spectrum of |L_z| over span{x, y}")
    p.add_argument("x")
    p.add_argument("y")

    p = sub.add_parser("witness", help="Explicit combinations with a prescribed number of accumulation points")
    kinds = p.add_subparsers(dest="kind", required=True)
    for kind in ("maxsub", "gap"):
        q = kinds.add_parser(kind, parents=[common])
        q.add_argument("x")
        q.add_argument("y")
    q = kinds.add_parser("decrement", parents=[common])
    q.add_argument("y")
    q.add_argument("--eps", default="0")
    q.add_argument("--x", default=None, help="Optional near-±1 sequence to use instead of the built one")
    q = kinds.add_parser("peel", parents=[common])
    q.add_argument("family", help='JSON file {"family": [...], "coefs": [...], "n": n}')

    p = sub.add_parser("gate", parents=[common], help="Necessary-condition gates for L(A)")
    p.add_argument("expression")
    p.add_argument("--kmax", type=int, default=10)

    p = sub.add_parser("basis", parents=[common], help="Initial segment of the inductive basis for a rule n_k")
    p.add_argument("--nk", required=True)
    p.add_argument("--r", type=int, default=3)

    p = sub.add_parser("nonsep", parents=[common], help="Almost-disjoint family at mutual distance 1")
    p.add_argument("--labels", nargs="+", required=True)
    p.add_argument("--coefs", nargs="+", default=None)
    p.add_argument("--ratio", default="1/2")
    p.add_argument("--M", type=int, default=4)
    p.add_argument("--prefix", type=int, default=20000)
    p.add_argument("--burn-in", type=int, default=200)

    p = sub.add_parser("verify", parents=[common], help="Seeded verification suites")
    p.add_argument("--suite", nargs="+", default=["all"], choices=["all", *SUITE_ORDER])
    p.add_argument("--quick", action="store_true", help="Reduced case counts")

    p = sub.add_parser("scenario", parents=[common], help="A rule with square growth: lineable but not densely lineable")
    p.add_argument("--nk", default="2^(3^k)")
    p.add_argument("--r", type=int, default=2)
    return parser


def emit_report(report: RunReport, out: str | None) -> None:
    text = canonical_json(report.to_json())
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise AccumLabError("cannot write report to " + out + ": " + str(e), code="unwritable-path") from e
    print_success("report written to " + out)


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level or get_log_level())
    args.seed = get_default_seed() if args.seed is None else args.seed
    print_banner(subtitle=args.command, description="seed " + str(args.seed))

    checks = CheckCounter()
    try:
        inputs, outputs = COMMANDS[args.command](args, checks)
        report = RunReport(
            command=args.command if args.command != "witness" else "witness " + args.kind,
            inputs=inputs,
            outputs=outputs,
            checks_passed=checks.passed,
            checks_failed=checks.failed,
            seed=args.seed,
        )
        emit_report(report, args.out)
    except AccumLabError as e:
        print_error("[" + e.code + "] " + str(e))
        return 2
    except (ValidationError, ValueError, KeyError) as e:
        print_error("invalid input: " + str(e))
        return 2

    if not report.succeeded:
        print_error(str(report.checks_failed) + " checks failed")
        return 1
    print_success(str(report.checks_passed) + " checks passed")
    return 0


def main():
    try:
        sys.exit(run())
    except KeyboardInterrupt:
        console.print("\n[yellow]interrupted[/yellow]")
        sys.exit(130)


if __name__ == "__main__":
    main()
