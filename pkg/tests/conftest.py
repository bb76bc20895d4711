import pytest

from index_sets import make_ap
from step_sequences import StepSequence


@pytest.fixture
def alternating() -> StepSequence:
    """−1 on the odds, 1 on the evens."""
    return StepSequence(parts=[(-1, make_ap({1}, 2)), (1, make_ap({0}, 2))])


@pytest.fixture
def mod4_y() -> StepSequence:
    """0 on {0 mod 4}, 1 on {1 mod 4}, 2 on {2, 3 mod 4}."""
    return StepSequence(parts=[(0, make_ap({0}, 4)), (1, make_ap({1}, 4)), (2, make_ap({2, 3}, 4))])


@pytest.fixture
def two_valued_y() -> StepSequence:
    """0 on {0, 1 mod 4}, 1 on {2, 3 mod 4}."""
    return StepSequence(parts=[(0, make_ap({0, 1}, 4)), (1, make_ap({2, 3}, 4))])
