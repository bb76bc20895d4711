"""
Eventually periodic subsets of ℕ = {1, 2, 3, ...}.

A set is stored as a periodic rule (``residues`` modulo ``modulus``) corrected by
finitely many exceptions: ``added`` members whose residue is not in the rule and
``removed`` non-members whose residue is. Every instance is canonical: the
modulus is the minimal period of the eventual pattern and the exceptions are
exactly the points where the set disagrees with it, so ``==`` is set equality.

Intersections, unions, complements and shifts stay in the class and
infiniteness is decided by ``residues != ∅``.
"""
import logging
from collections.abc import Iterable, Iterator
from math import gcd, lcm
from typing import Any, Callable

from pydantic import Field, computed_field, field_serializer, model_validator

from errors import InsufficientElementsError, InvalidModulusError, InvalidSetError, NotInfiniteError
from utils import FrozenModel

logger = logging.getLogger(__name__)


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _minimal_period(modulus: int, residues: frozenset[int]) -> int:
    # d is a period iff the residue set is invariant under the shift by d
    for d in _divisors(modulus):
        if d == modulus or all((r + d) % modulus in residues for r in residues):
            return d
    return modulus


def _as_int_set(values: Iterable[Any], what: str) -> frozenset[int]:
    out = set()
    for v in values:
        if isinstance(v, bool) or not isinstance(v, int):
            raise InvalidSetError(what + " must contain integers, got " + repr(v))
        out.add(v)
    return frozenset(out)


def _canonical_fields(modulus: Any, residues: Any, added: Any, removed: Any) -> dict:
    if isinstance(modulus, bool) or not isinstance(modulus, int) or modulus < 1:
        raise InvalidModulusError("modulus must be a positive integer, got " + repr(modulus))
    residues = _as_int_set(residues, "residues")
    added = _as_int_set(added, "added")
    removed = _as_int_set(removed, "removed")
    if any(r < 0 or r >= modulus for r in residues):
        raise InvalidSetError("residues must lie in [0, " + str(modulus - 1) + "]")
    if any(n < 1 for n in added | removed):
        raise InvalidSetError("exceptions must be natural numbers (ℕ starts at 1)")
    if added & removed:
        raise InvalidSetError("added and removed overlap: " + str(sorted(added & removed)))

    period = _minimal_period(modulus, residues)
    rule = frozenset(r % period for r in residues)
    return {
        "modulus": period,
        "residues": rule,
        "added": frozenset(n for n in added if n % period not in rule),
        "removed": frozenset(n for n in removed if n % period in rule),
    }


class EventuallyPeriodicSet(FrozenModel):
    """Canonical eventually periodic subset of ℕ."""

    modulus: int = Field(alias="mod", description="Minimal period of the eventual pattern")
    residues: frozenset[int] = Field(alias="res", description="Residues mod modulus in the periodic rule")
    added: frozenset[int] = Field(default=frozenset(), alias="add", description="Members outside the rule")
    removed: frozenset[int] = Field(default=frozenset(), alias="rem", description="Non-members inside the rule")

    @model_validator(mode="before")
    @classmethod
    def _canonicalize(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data

        def pick(name: str, alias: str, default: Any) -> Any:
            return data[alias] if alias in data else data.get(name, default)

        return _canonical_fields(
            pick("modulus", "mod", None),
            pick("residues", "res", ()),
            pick("added", "add", ()),
            pick("removed", "rem", ()),
        )

    @field_serializer("residues", "added", "removed")
    def _sorted(self, values: frozenset[int]) -> list[int]:
        return sorted(values)

    @computed_field(alias="thr")
    @property
    def threshold(self) -> int:
        """The periodic rule alone decides membership for every n >= threshold."""
        exceptions = self.added | self.removed
        return max(exceptions) + 1 if exceptions else 1

    def contains(self, n: int) -> bool:
        if n < 1:
            return False
        if n in self.added:
            return True
        if n in self.removed:
            return False
        return n % self.modulus in self.residues

    def __contains__(self, n: int) -> bool:
        return self.contains(n)

    def periodic_contains(self, n: int) -> bool:
        return n % self.modulus in self.residues

    def describe(self) -> str:
        if not self.residues:
            text = "{" + ", ".join(str(n) for n in sorted(self.added)) + "}"
            return text
        if len(self.residues) == self.modulus:
            text = "ℕ"
        else:
            text = "{n ≡ " + ",".join(str(r) for r in sorted(self.residues)) + " mod " + str(self.modulus) + "}"
        if self.added:
            text += " ∪ {" + ", ".join(str(n) for n in sorted(self.added)) + "}"
        if self.removed:
            text += " \\ {" + ", ".join(str(n) for n in sorted(self.removed)) + "}"
        return text

    @classmethod
    def from_json(cls, payload: dict) -> "EventuallyPeriodicSet":
        return cls.model_validate(payload)


# Construction

def make_ap(
    residues: Iterable[int],
    modulus: int,
    added: Iterable[int] = (),
    removed: Iterable[int] = (),
) -> EventuallyPeriodicSet:
    """Build the canonical set {n : n mod modulus ∈ residues} ∪ added \\ removed."""
    return EventuallyPeriodicSet(modulus=modulus, residues=residues, added=added, removed=removed)


def naturals() -> EventuallyPeriodicSet:
    return make_ap({0}, 1)


def empty_set() -> EventuallyPeriodicSet:
    return make_ap((), 1)


def finite_set(elements: Iterable[int]) -> EventuallyPeriodicSet:
    return make_ap((), 1, added=elements)


def residue_class(residue: int, modulus: int) -> EventuallyPeriodicSet:
    if modulus < 1:
        raise InvalidModulusError("modulus must be a positive integer, got " + repr(modulus))
    return make_ap({residue % modulus}, modulus)


def _from_rule(
    modulus: int,
    residues: Iterable[int],
    limit: int,
    predicate: Callable[[int], bool],
) -> EventuallyPeriodicSet:
    """Canonical set equal to ``predicate`` on [1, limit) and to the rule beyond."""
    residues = frozenset(residues)
    added, removed = set(), set()
    for n in range(1, limit):
        inside = predicate(n)
        periodic = n % modulus in residues
        if inside and not periodic:
            added.add(n)
        elif periodic and not inside:
            removed.add(n)
    return make_ap(residues, modulus, added, removed)


def _combine(
    a: EventuallyPeriodicSet,
    b: EventuallyPeriodicSet,
    op: Callable[[bool, bool], bool],
) -> EventuallyPeriodicSet:
    modulus = lcm(a.modulus, b.modulus)
    residues = [
        rho for rho in range(modulus)
        if op(rho % a.modulus in a.residues, rho % b.modulus in b.residues)
    ]
    limit = max(a.threshold, b.threshold)
    return _from_rule(modulus, residues, limit, lambda n: op(a.contains(n), b.contains(n)))


# Boolean algebra

def intersect(a: EventuallyPeriodicSet, b: EventuallyPeriodicSet) -> EventuallyPeriodicSet:
    return _combine(a, b, lambda p, q: p and q)


def union(a: EventuallyPeriodicSet, b: EventuallyPeriodicSet) -> EventuallyPeriodicSet:
    return _combine(a, b, lambda p, q: p or q)


def difference(a: EventuallyPeriodicSet, b: EventuallyPeriodicSet) -> EventuallyPeriodicSet:
    return _combine(a, b, lambda p, q: p and not q)


def complement(a: EventuallyPeriodicSet) -> EventuallyPeriodicSet:
    rule = frozenset(range(a.modulus)) - a.residues
    return make_ap(rule, a.modulus, added=a.removed, removed=a.added)


def union_all(sets: Iterable[EventuallyPeriodicSet]) -> EventuallyPeriodicSet:
    result = empty_set()
    for s in sets:
        result = union(result, s)
    return result


def shift_down(a: EventuallyPeriodicSet, k: int) -> EventuallyPeriodicSet:
    """The set a − k = {n − k : n ∈ a, n − k >= 1}."""
    return make_ap(
        {(r - k) % a.modulus for r in a.residues},
        a.modulus,
        added={n - k for n in a.added if n - k >= 1},
        removed={n - k for n in a.removed if n - k >= 1},
    )


def is_infinite(a: EventuallyPeriodicSet) -> bool:
    return bool(a.residues)


def is_empty(a: EventuallyPeriodicSet) -> bool:
    return not a.residues and not a.added


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int] | None:
    """Solve n ≡ r1 (mod m1), n ≡ r2 (mod m2).

    Returns (n mod lcm, lcm), or None when the congruences are incompatible.
    """
    g = gcd(m1, m2)
    if (r2 - r1) % g:
        return None
    m1g, m2g = m1 // g, m2 // g
    t = ((r2 - r1) // g) * pow(m1g, -1, m2g) % m2g if m2g > 1 else 0
    modulus = m1 * m2g
    return (r1 + m1 * t) % modulus, modulus


def meets_infinitely(a: EventuallyPeriodicSet, b: EventuallyPeriodicSet) -> bool:
    """Equivalent to is_infinite(intersect(a, b)) without building the intersection."""
    g = gcd(a.modulus, b.modulus)
    return not {r % g for r in a.residues}.isdisjoint({r % g for r in b.residues})


# Enumeration

def iter_members(a: EventuallyPeriodicSet) -> Iterator[int]:
    """Members of ``a`` in increasing order (infinite iterator when ``a`` is infinite)."""
    threshold = a.threshold
    for n in range(1, threshold):
        if a.contains(n):
            yield n
    if not a.residues:
        return
    rule = sorted(a.residues)
    base = threshold - threshold % a.modulus
    while True:
        for r in rule:
            n = base + r
            if n >= threshold:
                yield n
        base += a.modulus


def cardinality(a: EventuallyPeriodicSet) -> int | None:
    """Number of members, or None for an infinite set."""
    return None if a.residues else len(a.added)


def enumerate_members(a: EventuallyPeriodicSet, count: int) -> list[int]:
    """First ``count`` members of ``a`` in increasing order."""
    size = cardinality(a)
    if size is not None and count > size:
        raise InsufficientElementsError(
            "requested " + str(count) + " elements from a set with " + str(size)
        )
    out = []
    for n in iter_members(a):
        if len(out) >= count:
            break
        out.append(n)
    return out


def count_upto(a: EventuallyPeriodicSet, bound: int) -> int:
    """|a ∩ [1, bound]| in closed form."""
    if bound < 1:
        return 0
    total = 0
    for r in a.residues:
        first = r if r >= 1 else a.modulus
        if first <= bound:
            total += (bound - first) // a.modulus + 1
    total += sum(1 for n in a.added if n <= bound)
    total -= sum(1 for n in a.removed if n <= bound)
    return total


def two_adic_valuation(n: int) -> int:
    return (n & -n).bit_length() - 1


def dyadic_cell(a: EventuallyPeriodicSet, m: int) -> EventuallyPeriodicSet:
    """Members of ``a`` whose 1-based enumeration index has 2-adic valuation ``m``.

    The cells for m = 0, 1, 2, ... partition ``a`` into infinite sets, and each
    cell is eventually periodic with modulus dividing a.modulus · 2^(m+1).
    """
    if not is_infinite(a):
        raise NotInfiniteError("dyadic cells need an infinite set, got " + a.describe())
    if m < 0:
        raise InvalidSetError("cell level must be a natural number, got " + str(m))
    threshold = a.threshold
    period = a.modulus * 2 ** (m + 1)

    members_in_cell = set()
    index = 0
    for n in range(1, threshold + period):
        if a.contains(n):
            index += 1
            if two_adic_valuation(index) == m:
                members_in_cell.add(n)
    rule = {n % period for n in members_in_cell if n >= threshold}
    cell = _from_rule(period, rule, threshold, lambda n: n in members_in_cell)
    logger.debug("dyadic cell %d of %s has modulus %d", m, a.describe(), cell.modulus)
    return cell
