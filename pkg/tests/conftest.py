"""Shared strategies and helpers for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

import mmsalloc as M


@st.composite
def instances(draw, min_n=1, max_n=4, min_m=1, max_m=10, denominator=90, min_num=0):
    """Random instances with bounded-denominator rational values."""
    n = draw(st.integers(min_n, max_n))
    m = draw(st.integers(min_m, max_m))
    rows = tuple(
        tuple(Fraction(draw(st.integers(min_num, denominator)), denominator)
              for _ in range(m))
        for _ in range(n))
    return M.Instance(rows)


@st.composite
def value_vectors(draw, max_m=10, denominator=60, min_num=0):
    m = draw(st.integers(1, max_m))
    return [Fraction(draw(st.integers(min_num, denominator)), denominator)
            for _ in range(m)]


def random_rank_allocation(n: int, m: int, seed: int) -> M.Allocation:
    """A random partial allocation of ranks 0..m-1 (some ranks unowned)."""
    rng = random.Random(seed)
    bundles: dict[int, set[int]] = {}
    unallocated = set()
    for r in range(m):
        owner = rng.randrange(-1, n)
        if owner < 0:
            unallocated.add(r)
        else:
            bundles.setdefault(owner, set()).add(r)
    satisfied = frozenset(a for a in bundles if rng.random() < 0.5)
    return M.Allocation(
        bundles={a: frozenset(items) for a, items in bundles.items()},
        unallocated=frozenset(unallocated),
        satisfied=satisfied,
    )


def replay_trace(ordered: M.OrderedInstance, alpha, outcome: M.SolveOutcome):
    """Re-simulate the run from its trace, asserting per-round invariants:
    each round removes exactly one agent, allocated items are current, the
    winner's bundle meets 7/9 of her threshold, and stage-1 picks use the
    largest feasible index h.
    """
    tv = M.as_thresholds(alpha, ordered.n)
    vals = ordered.base.valuations
    unallocated = list(range(ordered.m))
    active = list(range(ordered.n))
    for event in outcome.trace:
        k = event["round"]
        assert k == len(active)
        if event["event"] == "fail":
            assert sorted(outcome.failed_agents) == event["agents"]
            break
        agent = event["agent"]
        items = event["items"]
        assert agent in active
        assert set(items) <= set(unallocated)
        target = Fraction(7, 9) * tv[agent]
        got = sum((vals[agent][j] for j in items), Fraction(0))
        assert got >= target
        if unallocated:
            assert items, "a round with items left must allocate at least one"
        if event["event"] == "stage1":
            h = event["h"]
            for h_prime in range(h + 1, len(unallocated) + 1):
                for i in active:
                    v = vals[i][unallocated[0]] + vals[i][unallocated[h_prime - 1]]
                    assert v < Fraction(7, 9) * tv[i], (
                        f"h={h} was not maximal: h'={h_prime} works for agent {i}")
        active.remove(agent)
        taken = set(items)
        unallocated = [j for j in unallocated if j not in taken]
    else:
        assert not outcome.failed_agents
        assert not active
