"""Core data model: instances, ordered instances, allocations, thresholds.

All values are exact rationals (`fractions.Fraction`); every comparison in the
package is exact, so instances sitting precisely on a threshold boundary behave
deterministically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping


class AllocationError(ValueError):
    """An allocation violates structural constraints (overlap, bad ids, ...)."""


def to_fraction(x) -> Fraction:
    """Coerce ints, Fractions, "p/q" / decimal strings, and floats to Fraction.

    Floats are read through their shortest decimal repr, so 0.1 means 1/10.
    """
    if isinstance(x, bool):
        raise ValueError(f"not a rational value: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(str(x))
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational value: {x!r}") from exc
    raise ValueError(f"not a rational value: {x!r}")


def rational_to_json(x: Fraction):
    """Render a rational for JSON: plain int when integral, else "p/q"."""
    return int(x) if x.denominator == 1 else str(x)


@dataclass(frozen=True)
class Instance:
    """A fair-division instance: n agents, m goods, additive valuations.

    ``valuations[i][j]`` is agent i's value for item j; entries are
    non-negative rationals and the matrix is rectangular.
    """

    valuations: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.valuations) < 1:
            raise ValueError("an instance needs at least one agent")
        m = len(self.valuations[0])
        for row in self.valuations:
            if len(row) != m:
                raise ValueError("valuation matrix is not rectangular")
            for v in row:
                if not isinstance(v, Fraction):
                    raise ValueError(f"valuations must be Fractions, got {v!r}")
                if v < 0:
                    raise ValueError("valuations must be non-negative")

    @property
    def n(self) -> int:
        return len(self.valuations)

    @property
    def m(self) -> int:
        return len(self.valuations[0])

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "Instance":
        return cls(tuple(tuple(to_fraction(v) for v in row) for row in rows))

    def value(self, agent: int, items: Iterable[int]) -> Fraction:
        row = self.valuations[agent]
        return sum((row[j] for j in items), Fraction(0))

    def agent_total(self, agent: int) -> Fraction:
        return sum(self.valuations[agent], Fraction(0))

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "valuations": [[rational_to_json(v) for v in row] for row in self.valuations],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "Instance":
        inst = cls.from_rows(data["valuations"])
        if "n" in data and data["n"] != inst.n:
            raise ValueError(f"declared n={data['n']} but matrix has {inst.n} rows")
        if "m" in data and data["m"] != inst.m:
            raise ValueError(f"declared m={data['m']} but matrix has {inst.m} columns")
        return inst


def load_instance(path) -> Instance:
    with open(path) as fh:
        return Instance.from_json_dict(json.load(fh))


def save_instance(inst: Instance, path) -> None:
    with open(path, "w") as fh:
        json.dump(inst.to_json_dict(), fh, indent=2)
        fh.write("\n")


@dataclass(frozen=True)
class OrderedInstance:
    """An instance whose items are in a common descending order for everyone.

    ``base`` holds each agent's values sorted descending, so synthetic item r
    is every agent's (r+1)-th favourite.  ``rank_maps[i][j]`` is the rank that
    agent i's original item j occupies (ties broken by lower original index).
    """

    base: Instance
    rank_maps: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = self.base.m
        if len(self.rank_maps) != self.base.n:
            raise ValueError("one rank map per agent required")
        for i, row in enumerate(self.base.valuations):
            for r in range(m - 1):
                if row[r] < row[r + 1]:
                    raise ValueError(f"agent {i}: row not descending at rank {r}")
        for i, perm in enumerate(self.rank_maps):
            if sorted(perm) != list(range(m)):
                raise ValueError(f"agent {i}: rank map is not a permutation of [{m}]")

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def m(self) -> int:
        return self.base.m

    def original_value(self, agent: int, item: int) -> Fraction:
        """Value the original item had before reordering."""
        return self.base.valuations[agent][self.rank_maps[agent][item]]

    def original_instance(self) -> Instance:
        rows = [
            tuple(self.original_value(i, j) for j in range(self.m))
            for i in range(self.n)
        ]
        return Instance(tuple(rows))


def order_instance(inst: Instance) -> OrderedInstance:
    """Sort every agent's row descending and record her rank permutation."""
    rows = []
    rank_maps = []
    for row in inst.valuations:
        order = sorted(range(inst.m), key=lambda j: (-row[j], j))
        rows.append(tuple(row[j] for j in order))
        ranks = [0] * inst.m
        for r, j in enumerate(order):
            ranks[j] = r
        rank_maps.append(tuple(ranks))
    return OrderedInstance(base=Instance(tuple(rows)), rank_maps=tuple(rank_maps))


@dataclass
class Allocation:
    """A (possibly partial) partition of items into per-agent bundles."""

    bundles: dict[int, frozenset[int]]
    unallocated: frozenset[int] = frozenset()
    satisfied: frozenset[int] = frozenset()

    def bundle(self, agent: int) -> frozenset[int]:
        return self.bundles.get(agent, frozenset())

    def validate(self, n: int, m: int) -> None:
        seen: set[int] = set()
        for agent, items in self.bundles.items():
            if not (0 <= agent < n):
                raise AllocationError(f"unknown agent {agent}")
            for j in items:
                if not (0 <= j < m):
                    raise AllocationError(f"unknown item {j}")
                if j in seen:
                    raise AllocationError(f"item {j} allocated twice")
                seen.add(j)
        if seen & self.unallocated:
            raise AllocationError("allocated items listed as unallocated")
        if seen | self.unallocated != set(range(m)):
            missing = set(range(m)) - seen - self.unallocated
            raise AllocationError(f"items unaccounted for: {sorted(missing)}")
        if not self.satisfied <= set(self.bundles):
            raise AllocationError("satisfied agents must own a bundle")

    def to_json_dict(self) -> dict:
        return {
            "bundles": {str(a): sorted(items) for a, items in sorted(self.bundles.items())},
            "satisfied": sorted(self.satisfied),
            "unallocated": sorted(self.unallocated),
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "Allocation":
        bundles = {
            int(agent): frozenset(int(j) for j in items)
            for agent, items in data.get("bundles", {}).items()
        }
        return cls(
            bundles=bundles,
            unallocated=frozenset(int(j) for j in data.get("unallocated", ())),
            satisfied=frozenset(int(a) for a in data.get("satisfied", ())),
        )


def load_allocation(path) -> Allocation:
    with open(path) as fh:
        return Allocation.from_json_dict(json.load(fh))


@dataclass(frozen=True)
class ThresholdVector:
    """Per-agent target values driven by the solver / FPTAS."""

    alpha: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.alpha) < 1:
            raise ValueError("threshold vector must not be empty")
        for a in self.alpha:
            if a < 0:
                raise ValueError("thresholds must be non-negative")

    @classmethod
    def from_values(cls, values: Iterable) -> "ThresholdVector":
        return cls(tuple(to_fraction(v) for v in values))

    def __len__(self) -> int:
        return len(self.alpha)

    def __getitem__(self, i: int) -> Fraction:
        return self.alpha[i]

    def __iter__(self):
        return iter(self.alpha)


def as_thresholds(alpha, n: int) -> ThresholdVector:
    """Coerce a sequence (or ThresholdVector) and check its length against n."""
    tv = alpha if isinstance(alpha, ThresholdVector) else ThresholdVector.from_values(alpha)
    if len(tv) != n:
        raise ValueError(f"threshold vector has length {len(tv)}, expected {n}")
    return tv


def scale_agent(inst: Instance, agent: int, c) -> Instance:
    """Multiply one agent's row by a positive constant; others untouched."""
    factor = to_fraction(c)
    if factor <= 0:
        raise ValueError("scale factor must be positive")
    if not (0 <= agent < inst.n):
        raise ValueError(f"unknown agent {agent}")
    rows = tuple(
        tuple(v * factor for v in row) if i == agent else row
        for i, row in enumerate(inst.valuations)
    )
    return Instance(rows)


def lift_allocation(ordered_alloc: Allocation, ordered: OrderedInstance) -> Allocation:
    """Convert an allocation of ordered ranks back to the original items.

    Ranks are processed smallest first: the owner of a rank picks her
    most-valued remaining original item (ties: lowest index), and an unowned
    rank discards the remaining item with the least total value across agents.
    The picked bundle is worth at least the ordered bundle to its owner.
    """
    n, m = ordered.n, ordered.m
    ordered_alloc.validate(n, m)
    owner: list[int | None] = [None] * m
    for agent, ranks in ordered_alloc.bundles.items():
        for r in ranks:
            owner[r] = agent

    remaining = set(range(m))
    bundles: dict[int, set[int]] = {agent: set() for agent in ordered_alloc.bundles}
    discarded: set[int] = set()
    for r in range(m):
        agent = owner[r]
        if agent is not None:
            pick = min(remaining, key=lambda j: (-ordered.original_value(agent, j), j))
            bundles[agent].add(pick)
        else:
            pick = min(
                remaining,
                key=lambda j: (sum(ordered.original_value(i, j) for i in range(n)), j),
            )
            discarded.add(pick)
        remaining.remove(pick)

    return Allocation(
        bundles={a: frozenset(items) for a, items in bundles.items()},
        unallocated=frozenset(discarded),
        satisfied=ordered_alloc.satisfied,
    )
