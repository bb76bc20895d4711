import pytest

from utils import case_rng
from verification_suites import SUITE_ORDER, next_suite, random_step_sequence, run_suite
from verification_workflow import run_verification


@pytest.mark.parametrize("name", ["spectrum", "gap", "decrement", "estimate", "gates", "basis", "overflow"])
def test_quick_suite_passes(name):
    outcome = run_suite(name, seed=0, quick=True)
    assert outcome.name == name
    assert outcome.cases > 0
    assert outcome.failed == 0, outcome.failures


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope", seed=0, quick=True)


def test_case_rng_is_reproducible():
    first = random_step_sequence(case_rng(5, "spectrum", 3))
    second = random_step_sequence(case_rng(5, "spectrum", 3))
    assert first == second


def test_router():
    assert next_suite({"pending": ["gates", "basis"]}) == "gates"
    assert next_suite({"pending": []}) == "summarize_checks"


class TestWorkflow:
    def test_runs_suites_in_canonical_order(self):
        final = run_verification(["gates", "estimate"], seed=3, quick=True)
        assert final["completed"] == ["estimate", "gates"]
        assert final["pending"] == []
        assert set(final["suite_results"]) == {"estimate", "gates"}
        assert final["summary"]["suites"] == ["estimate", "gates"]
        assert final["checks_failed"] == 0
        assert final["checks_passed"] == sum(r["passed"] for r in final["suite_results"].values())

    def test_same_seed_same_results(self):
        first = run_verification(["spectrum", "determinism"], seed=11, quick=True)
        second = run_verification(["spectrum", "determinism"], seed=11, quick=True)
        assert first["suite_results"] == second["suite_results"]
        assert first["suite_results"]["determinism"]["failed"] == 0

    def test_every_suite_is_routed(self):
        assert len(SUITE_ORDER) == len(set(SUITE_ORDER)) == 10
