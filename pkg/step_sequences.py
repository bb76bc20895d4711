"""
Finite step sequences x ~ ξ₁·1_{S₁} + ... + ξ_n·1_{S_n} over eventually periodic cells.

A StepSequence is a partition of ℕ into eventually periodic cells, each carrying
an exact rational value. Infinite cells carry the accumulation points; finite
cells carry values that are taken only finitely often.
"""
import logging
from collections import defaultdict
from collections.abc import Iterable, Sequence
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Any, Literal

from pydantic import Field, model_validator

from errors import AccumLabError, InvalidArgumentError, InvalidPartitionError
from index_sets import (
    EventuallyPeriodicSet,
    _from_rule,
    crt_pair,
    is_empty,
    is_infinite,
    naturals,
    union,
)
from utils import FrozenModel, Rational, parse_fraction

logger = logging.getLogger(__name__)


class CardinalityClass(FrozenModel):
    """Cardinality tag: Finite(n), ω or 𝔠."""

    kind: Literal["finite", "countable", "continuum"] = Field(description="Cardinality family")
    count: int | None = Field(default=None, description="Number of elements for the finite kind")

    @model_validator(mode="after")
    def _check_count(self) -> "CardinalityClass":
        if self.kind == "finite" and (self.count is None or self.count < 0):
            raise ValueError("finite cardinality needs a count >= 0")
        if self.kind != "finite" and self.count is not None:
            raise ValueError("only finite cardinalities carry a count")
        return self

    @classmethod
    def finite(cls, n: int) -> "CardinalityClass":
        return cls(kind="finite", count=n)

    @classmethod
    def countably_infinite(cls) -> "CardinalityClass":
        return cls(kind="countable")

    @classmethod
    def continuum(cls) -> "CardinalityClass":
        return cls(kind="continuum")

    @property
    def is_infinite(self) -> bool:
        return self.kind != "finite"

    def __str__(self) -> str:
        if self.kind == "finite":
            return str(self.count)
        return "ω" if self.kind == "countable" else "𝔠"


class StepPart(FrozenModel):
    value: Rational = Field(alias="val", description="Value taken on the cell")
    cell: EventuallyPeriodicSet = Field(description="Indices carrying the value")


def _as_part(raw: Any) -> StepPart:
    if isinstance(raw, StepPart):
        return raw
    if isinstance(raw, (tuple, list)) and len(raw) == 2:
        value, cell = raw
        if not isinstance(cell, EventuallyPeriodicSet):
            cell = EventuallyPeriodicSet.model_validate(cell)
        return StepPart(value=parse_fraction(value), cell=cell)
    return StepPart.model_validate(raw)


def _check_partition(parts: Sequence[StepPart]) -> None:
    period = lcm(*(p.cell.modulus for p in parts))
    owner = [-1] * period
    for index, part in enumerate(parts):
        for r in part.cell.residues:
            for rho in range(r, period, part.cell.modulus):
                if owner[rho] != -1:
                    raise InvalidPartitionError(
                        "cells overlap on the residue class " + str(rho) + " mod " + str(period)
                    )
                owner[rho] = index
    if -1 in owner:
        rho = owner.index(-1)
        raise InvalidPartitionError("no cell covers the residue class " + str(rho) + " mod " + str(period))
    threshold = max(p.cell.threshold for p in parts)
    for n in range(1, threshold):
        holders = sum(1 for p in parts if p.cell.contains(n))
        if holders != 1:
            raise InvalidPartitionError(str(n) + " lies in " + str(holders) + " cells")


def _canonical_parts(raw_parts: Iterable[Any]) -> tuple[StepPart, ...]:
    parts = [_as_part(p) for p in raw_parts]
    parts = [p for p in parts if not is_empty(p.cell)]
    if not parts:
        raise InvalidPartitionError("a step sequence needs at least one nonempty cell")
    _check_partition(parts)
    merged: dict[Fraction, EventuallyPeriodicSet] = {}
    for part in parts:
        merged[part.value] = union(merged[part.value], part.cell) if part.value in merged else part.cell
    return tuple(StepPart(value=v, cell=merged[v]) for v in sorted(merged))


class StepSequence(FrozenModel):
    """Canonical step sequence: disjoint cells covering ℕ, distinct values, ascending."""

    parts: tuple[StepPart, ...] = Field(description="(value, cell) pairs sorted by value")

    @model_validator(mode="before")
    @classmethod
    def _canonicalize(cls, data: Any) -> Any:
        if isinstance(data, dict) and "parts" in data:
            return {"parts": _canonical_parts(data["parts"])}
        return data

    @property
    def values(self) -> list[Fraction]:
        return [p.value for p in self.parts]

    @property
    def threshold(self) -> int:
        return max(p.cell.threshold for p in self.parts)

    def infinite_parts(self) -> list[StepPart]:
        return [p for p in self.parts if is_infinite(p.cell)]

    def value_at(self, n: int) -> Fraction:
        return value_at(self, n)

    @classmethod
    def from_json(cls, payload: dict) -> "StepSequence":
        return cls.model_validate(payload)


def canonicalize(x: StepSequence | Iterable[Any]) -> StepSequence:
    """Canonical form of a partition given as (value, cell) pairs.

    Equal values are merged, empty cells dropped and parts sorted ascending;
    overlapping or non-covering cells raise invalid-partition.
    """
    parts = x.parts if isinstance(x, StepSequence) else list(x)
    return StepSequence(parts=parts)


def constant(value: Fraction | int | str) -> StepSequence:
    return StepSequence(parts=[(parse_fraction(value), naturals())])


@lru_cache(maxsize=512)
def residue_values(x: StepSequence) -> tuple[int, tuple[Fraction, ...]]:
    """Periodic value table (period, values by residue) of the infinite cells."""
    period = lcm(*(p.cell.modulus for p in x.parts))
    table: list[Fraction | None] = [None] * period
    for part in x.parts:
        for r in part.cell.residues:
            for rho in range(r, period, part.cell.modulus):
                table[rho] = part.value
    return period, tuple(table)


@lru_cache(maxsize=512)
def _lookup(x: StepSequence) -> tuple[int, dict[int, Fraction]]:
    threshold = x.threshold
    explicit = {}
    for n in range(1, threshold):
        explicit[n] = next(p.value for p in x.parts if p.cell.contains(n))
    return threshold, explicit


def value_at(x: StepSequence, n: int) -> Fraction:
    if n < 1:
        raise InvalidArgumentError("sequences are indexed from 1, got " + str(n))
    threshold, explicit = _lookup(x)
    if n < threshold:
        return explicit[n]
    period, table = residue_values(x)
    return table[n % period]


def eval_prefix(x: StepSequence, count: int) -> list[Fraction]:
    """[x_1, ..., x_count]."""
    return [value_at(x, n) for n in range(1, count + 1)]


def accumulation_set(x: StepSequence) -> tuple[frozenset[Fraction], CardinalityClass]:
    values = frozenset(p.value for p in x.parts if is_infinite(p.cell))
    return values, CardinalityClass.finite(len(values))


def accumulation_count(x: StepSequence) -> int:
    return sum(1 for p in x.parts if is_infinite(p.cell))


def sup_norm(x: StepSequence) -> Fraction:
    # every canonical cell is nonempty, so each value is attained
    return max(abs(p.value) for p in x.parts)


def linear_combine(terms: Sequence[tuple[Fraction | int | str, StepSequence]]) -> StepSequence:
    """Σ coef·seq, built on the common refinement of all cells."""
    if not terms:
        raise AccumLabError("a linear combination needs at least one term", code="empty-combination")
    active = [(parse_fraction(c), s) for c, s in terms]
    active = [(c, s) for c, s in active if c != 0]
    if not active:
        return constant(0)
    coefs = [c for c, _ in active]
    seqs = [s for _, s in active]
    tables = [residue_values(s) for s in seqs]
    period = lcm(*(p for p, _ in tables))
    threshold = max(s.threshold for s in seqs)

    scaled = [(p, [c * v for v in table]) for c, (p, table) in zip(coefs, tables)]
    residues_by_value: dict[Fraction, list[int]] = defaultdict(list)
    for rho in range(period):
        total = sum(table[rho % p] for p, table in scaled)
        residues_by_value[total].append(rho)

    explicit = {n: sum(c * value_at(s, n) for c, s in zip(coefs, seqs)) for n in range(1, threshold)}
    parts = []
    for value in set(residues_by_value) | set(explicit.values()):
        cell = _from_rule(period, residues_by_value.get(value, ()), threshold, lambda n, v=value: explicit[n] == v)
        parts.append((value, cell))
    logger.debug("combined %d sequences on period %d into %d parts", len(seqs), period, len(parts))
    return StepSequence(parts=parts)


def sup_distance(x: StepSequence, y: StepSequence) -> Fraction:
    """sup_n |x_n − y_n|, exact on the common refinement."""
    return sup_norm(linear_combine([(1, x), (-1, y)]))


def combination_accumulation(terms: Sequence[tuple[Fraction | int | str, StepSequence]]) -> frozenset[Fraction]:
    """Accumulation set of Σ coef·seq without building the common refinement.

    Only periodic tails matter. Terms are folded one at a time; the state maps a
    residue modulo gcd(lcm of folded periods, lcm of pending periods) to the set
    of partial sums realised on that class, so coprime periods never multiply
    out. Arithmetic is done on integers after clearing denominators.
    """
    active = [(parse_fraction(c), residue_values(s)) for c, s in terms]
    active = [(c, table) for c, table in active if c != 0]
    if not active:
        return frozenset({Fraction(0)})

    denominator = 1
    for c, (_, table) in active:
        for v in set(table):
            denominator = lcm(denominator, (c * v).denominator)
    int_tables = [
        (period, [int(c * v * denominator) for v in table]) for c, (period, table) in active
    ]

    pending = [1] * (len(int_tables) + 1)
    for i in range(len(int_tables) - 1, -1, -1):
        pending[i] = lcm(pending[i + 1], int_tables[i][0])

    folded, key_modulus = 1, 1
    state: dict[int, set[int]] = {0: {0}}
    for i, (period, table) in enumerate(int_tables):
        compat = gcd(key_modulus, period)
        folded = lcm(folded, period)
        next_key = gcd(folded, pending[i + 1])
        new_state: dict[int, set[int]] = defaultdict(set)
        for rho, sums in state.items():
            reachable: set[tuple[int, int]] = set()
            for beta in range(rho % compat, period, compat):
                if next_key == 1:
                    target = 0
                else:
                    target = crt_pair(rho, key_modulus, beta, period)[0] % next_key
                reachable.add((target, table[beta]))
            for target, v in reachable:
                new_state[target].update(s + v for s in sums)
        state, key_modulus = new_state, next_key

    totals = set().union(*state.values())
    return frozenset(Fraction(t, denominator) for t in totals)
