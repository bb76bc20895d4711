"""
accum-lab - LangGraph workflow for the verify subcommand
"""
from langgraph.graph import StateGraph, START, END

from verification_state import VerificationState, VerificationInputState
from verification_suites import SUITE_NODES, SUITE_ORDER, next_suite, summarize_checks

# Build the verification workflow
verify_builder = StateGraph(VerificationState, input_schema=VerificationInputState)

# One node per suite, plus the summary
for name, node in SUITE_NODES.items():
    verify_builder.add_node(name, node)
verify_builder.add_node("summarize_checks", summarize_checks)

# Every step routes to the next pending suite, or to the summary when none are left
routes = {name: name for name in SUITE_ORDER}
routes["summarize_checks"] = "summarize_checks"
verify_builder.add_conditional_edges(START, next_suite, routes)
for name in SUITE_ORDER:
    verify_builder.add_conditional_edges(name, next_suite, routes)

verify_builder.add_edge("summarize_checks", END)

verify_agent = verify_builder.compile()


def run_verification(suites: list[str], seed: int, quick: bool = False) -> dict:
    """Run the selected suites in the given order and return the final state."""
    ordered = [name for name in SUITE_ORDER if name in suites]
    return verify_agent.invoke(
        {"seed": seed, "quick": quick, "pending": ordered},
        config={"recursion_limit": 2 * len(SUITE_ORDER) + 5},
    )
