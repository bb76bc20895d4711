from typing import Any, Literal, Optional

from pydantic import Field, model_validator

from step_sequences import StepSequence
from utils import FrozenModel, Rational, format_fraction


class WitnessReport(FrozenModel):
    """A linear combination of the inputs together with its exact accumulation count."""
    coefficients: tuple[Rational, ...] = Field(description="Coefficients of the combination, in input order")
    witness: StepSequence = Field(description="The combination itself")
    cardinality: int = Field(ge=1, description="|L| of the witness")
    target_interval: Optional[tuple[int, int]] = Field(default=None, description="Open bounds (lo, hi) the cardinality must fall in")
    slope: Optional[Rational] = Field(default=None, description="Extremal slope C used by the construction")
    multiplicity: Optional[int] = Field(default=None, description="How many times the extremal slope occurs")
    flipped: bool = Field(default=False, description="True when y was replaced by -y")
    surrogate: Optional[StepSequence] = Field(default=None, description="Constructed x for the decrement witness")
    peel_steps: Optional[int] = Field(default=None, description="Terms dropped by the overflow peel")

    def in_target(self) -> bool:
        if self.target_interval is None:
            return True
        lo, hi = self.target_interval
        return lo < self.cardinality < hi

    def to_json(self) -> dict:
        payload: dict[str, Any] = {
            "card": self.cardinality,
            "interval": list(self.target_interval) if self.target_interval else None,
            "witness": self.witness.to_json(),
        }
        if len(self.coefficients) == 2:
            payload["lambda"] = format_fraction(self.coefficients[0])
            payload["mu"] = format_fraction(self.coefficients[1])
        else:
            payload["coefficients"] = [format_fraction(c) for c in self.coefficients]
        if self.slope is not None:
            payload["slope"] = format_fraction(self.slope)
        if self.multiplicity is not None:
            payload["multiplicity"] = self.multiplicity
        if self.flipped:
            payload["flipped"] = True
        if self.surrogate is not None:
            payload["x"] = self.surrogate.to_json()
        if self.peel_steps is not None:
            payload["peel_steps"] = self.peel_steps
        return payload


class GateVerdict(FrozenModel):
    """Outcome of a necessary-condition gate on a prescribed set A."""
    gate: Literal["lineable-necessary", "densely-lineable-necessary"] = Field(description="Which gate was evaluated")
    set_description: str = Field(description="The prescribed set, as parsed")
    holds: bool = Field(description="Whether the necessary condition holds")
    witness_k: Optional[int] = Field(default=None, description="Shift k with |A ∩ (A-k)| infinite")
    evidence: tuple[int, ...] = Field(default=(), description="Members of A ∩ (A-k) demonstrating infiniteness")
    reason: Optional[Literal["gap-divergence", "parity", "periodicity", "finite-support", "search-bound"]] = Field(
        default=None, description="Decidable reason tag for a failed gate"
    )
    conclusion: str = Field(description="What the verdict proves about L(A)")
    note: Literal["necessary-condition"] = "necessary-condition"

    @model_validator(mode="after")
    def _check_support(self) -> "GateVerdict":
        if self.holds and (self.witness_k is None or not self.evidence):
            raise ValueError("a holding gate needs a shift and evidence")
        if not self.holds and self.reason is None:
            raise ValueError("a failing gate needs a reason tag")
        return self


class NkBasisReport(FrozenModel):
    """Finite initial segment of the inductive basis avoiding ∪_{k∈K} [n_k, n_{k+1})."""
    rule: str = Field(description="Description of the rule k ↦ n_k")
    basis: tuple[StepSequence, ...] = Field(description="x_1, ..., x_r")
    l_values: tuple[int, ...] = Field(description="|L_{x_r}| for each basis vector")
    k_indices: tuple[int, ...] = Field(description="k_1 < k_2 < ... forming K")
    moduli: tuple[int, ...] = Field(description="Pairwise coprime cell moduli of the basis vectors")
    certificates: tuple[str, ...] = Field(description="Exact inequalities established at each step")

    def to_json(self) -> dict:
        payload = super().to_json()
        payload["basis"] = [x.to_json() for x in self.basis]
        return payload


class RunReport(FrozenModel):
    """Top-level JSON document written by every CLI subcommand."""
    schema_version: Literal["1"] = Field(default="1", alias="schema")
    command: str = Field(description="Subcommand that produced the report")
    inputs: dict[str, Any] = Field(default_factory=dict, description="Normalised inputs")
    outputs: dict[str, Any] = Field(default_factory=dict, description="Results")
    checks_passed: int = Field(default=0, ge=0)
    checks_failed: int = Field(default=0, ge=0)
    seed: int = Field(default=0, ge=0, description="Seed that determines every randomized trial")

    @property
    def succeeded(self) -> bool:
        return self.checks_failed == 0


class CorollaryReport(FrozenModel):
    """Lineable but not densely lineable: the basis and the overflow obstruction for one rule."""
    rule: str = Field(description="Description of the rule k ↦ n_k")
    square_growth: bool = Field(description="n_{k+1} > n_k² on the checked range")
    prescribed_set: str = Field(description="The gap complement built from K")
    basis: NkBasisReport = Field(description="Initial segment of a basis of a subspace of L(A) ∪ {0}")
    obstruction_k: int = Field(description="The k ∈ K whose removed interval catches the peeled combination")
    obstruction: WitnessReport = Field(description="Combination of n_k sequences in L([2, n_k]) landing in [n_k+1, n_k²]")
    obstruction_in_gap: bool = Field(description="The peeled cardinality lies in a removed interval")

    def to_json(self) -> dict:
        payload = super().to_json()
        payload["basis"] = self.basis.to_json()
        payload["obstruction"] = self.obstruction.to_json()
        return payload
