import operator
from typing import Annotated, Optional, TypedDict


def merge_dicts(left: dict, right: dict) -> dict:
    """Reducer: later suites add their entries next to earlier ones."""
    merged = dict(left or {})
    merged.update(right or {})
    return merged


class VerificationState(TypedDict):
    """State for the verify workflow"""
    seed: int
    quick: bool
    pending: list[str]
    completed: Annotated[list[str], operator.add]
    checks_passed: Annotated[int, operator.add]
    checks_failed: Annotated[int, operator.add]
    failures: Annotated[list[str], operator.add]
    suite_results: Annotated[dict, merge_dicts]
    summary: Optional[dict]


class VerificationInputState(TypedDict):
    """Input state for starting the verify workflow"""
    seed: int
    quick: bool
    pending: list[str]
