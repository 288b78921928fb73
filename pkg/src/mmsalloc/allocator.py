"""Round-based allocator: adaptive prefix reductions, two largest-index
searches, and a bag-filling fallback, all against per-agent 7/9 targets.

Each round works on the current unallocated ranks u_1 >= u_2 >= ... (common
order) with k = number of active agents.  Ranks beyond the current item count
are zero-valued phantoms and are never allocated.  A fired reduction ends the
round; the next round re-evaluates the stage gates with the new k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .model import Allocation, OrderedInstance, ThresholdVector, as_thresholds

TARGET_RATIO = Fraction(7, 9)
ZERO = Fraction(0)

REDUCTION_RULES = (0, 1, 2, 3)


def reduction_window(rule: int, k: int) -> tuple[int, ...]:
    """1-based ranks inspected by a reduction rule at active-agent count k."""
    if rule == 0:
        return (1,)
    if rule == 1:
        return (k, k + 1)
    if rule == 2:
        return (2 * k - 1, 2 * k, 2 * k + 1)
    if rule == 3:
        return (3 * k - 2, 3 * k - 1, 3 * k, 3 * k + 1)
    raise ValueError(f"unknown reduction rule {rule}")


def phantom_item(values: Sequence[Fraction], j: int) -> Fraction:
    """Value of the j-th largest item (1-based); zero beyond the sequence."""
    if j < 1:
        raise ValueError("ranks are 1-based")
    return values[j - 1] if j <= len(values) else ZERO


@dataclass
class AllocatorState:
    """Mutable run state: unallocated ranks, active agents, partial bundles."""

    ordered: OrderedInstance
    alpha: ThresholdVector
    unallocated: list[int] = field(default_factory=list)  # item ids, ascending = descending value
    active: list[int] = field(default_factory=list)
    bundles: dict[int, frozenset[int]] = field(default_factory=dict)
    satisfied: set[int] = field(default_factory=set)
    trace: list[dict] = field(default_factory=list)
    debug: bool = False
    failed: bool = False

    def value(self, agent: int, item: int) -> Fraction:
        return self.ordered.base.valuations[agent][item]

    def u_value(self, agent: int, j: int) -> Fraction:
        """Value of rank j in the current unallocated sequence (phantom zero)."""
        if j < 1:
            raise ValueError("ranks are 1-based")
        if j <= len(self.unallocated):
            return self.value(agent, self.unallocated[j - 1])
        return ZERO

    def target(self, agent: int) -> Fraction:
        return TARGET_RATIO * self.alpha[agent]


def new_state(ordered: OrderedInstance, alpha, *, debug: bool = False) -> AllocatorState:
    tv = as_thresholds(alpha, ordered.n)
    return AllocatorState(
        ordered=ordered,
        alpha=tv,
        unallocated=list(range(ordered.m)),
        active=list(range(ordered.n)),
        debug=debug,
    )


def _allocate(state: AllocatorState, agent: int, items: list[int], event: str,
              round_k: int, **extra) -> None:
    state.bundles[agent] = frozenset(items)
    state.satisfied.add(agent)
    state.active.remove(agent)
    taken = set(items)
    state.unallocated = [e for e in state.unallocated if e not in taken]
    record = {"round": round_k, "event": event, "agent": agent, "items": sorted(items)}
    record.update(extra)
    state.trace.append(record)


def _check_reduction_bound(state: AllocatorState, rule: int, k: int) -> None:
    # Inapplicability of R_r caps every item from rank r*k+1 on at
    # target/(r+1); the boundary rank suffices because ranks are descending.
    boundary = rule * k + 1
    for i in state.active:
        v = state.u_value(i, boundary)
        limit = state.target(i) / (rule + 1)
        assert v < limit, (
            f"R{rule} inapplicable at k={k} but rank {boundary} has value {v} "
            f">= {limit} for agent {i}")


def try_reduction(state: AllocatorState, rule: int) -> Optional[tuple[int, list[int]]]:
    """Fire one reduction rule if an active agent meets the target on its
    window; allocates the window's real items to the lowest such agent."""
    k = len(state.active)
    ranks = reduction_window(rule, k)
    for agent in state.active:
        window_value = sum(state.u_value(agent, j) for j in ranks)
        if window_value >= state.target(agent):
            items = [state.unallocated[j - 1] for j in ranks if j <= len(state.unallocated)]
            _allocate(state, agent, items, "reduction", k, rule=f"R{rule}")
            return agent, items
    if state.debug:
        _check_reduction_bound(state, rule, k)
    return None


def run_round(state: AllocatorState) -> AllocatorState:
    """Execute one round: at most one reduction, else a stage-1/2/3 bundle."""
    if not state.active:
        raise ValueError("no active agents left")
    k = len(state.active)
    U = state.unallocated

    def meets(agent: int, value: Fraction) -> bool:
        return value >= state.target(agent)

    def find_agent(value_of) -> Optional[int]:
        for agent in state.active:
            if meets(agent, value_of(agent)):
                return agent
        return None

    if find_agent(lambda i: state.u_value(i, 1) + state.u_value(i, k + 1)) is not None:
        # Stage 1: a pair suffices for someone.
        for rule in REDUCTION_RULES:
            if try_reduction(state, rule) is not None:
                return state
        for h in range(len(U), 1, -1):
            agent = find_agent(lambda i: state.u_value(i, 1) + state.u_value(i, h))
            if agent is not None:
                _allocate(state, agent, [U[0], U[h - 1]], "stage1", k, h=h)
                return state
        raise AssertionError("stage-1 gate held but the pair scan found nothing")

    if find_agent(lambda i: state.u_value(i, 1) + state.u_value(i, k + 1)
                  + state.u_value(i, 2 * k + 1)) is not None:
        # Stage 2: a triple suffices for someone.
        if try_reduction(state, 2) is not None:
            return state
        for h in range(len(U), 1, -1):
            t = max(h + 1, 2 * k + 1)
            agent = find_agent(lambda i: state.u_value(i, 1) + state.u_value(i, h)
                               + state.u_value(i, t))
            if agent is not None:
                items = [U[0], U[h - 1]]
                if t <= len(U):
                    items.append(U[t - 1])
                _allocate(state, agent, items, "stage2", k, h=h, t=t)
                return state
        raise AssertionError("stage-2 gate held but the triple scan found nothing")

    # Stage 3: bag filling.
    if try_reduction(state, 3) is not None:
        return state
    bundle = [U[j - 1] for j in (1, k + 1, 2 * k + 1) if j <= len(U)]
    totals = {i: sum(state.value(i, e) for e in bundle) for i in state.active}

    def winner() -> Optional[int]:
        for agent in state.active:
            if meets(agent, totals[agent]):
                return agent
        return None

    agent = winner()
    j = 3 * k + 1
    while agent is None and j <= len(U):
        item = U[j - 1]
        bundle.append(item)
        for i in state.active:
            totals[i] += state.value(i, item)
        j += 1
        agent = winner()

    if agent is None:
        state.failed = True
        state.trace.append({"round": k, "event": "fail", "agents": sorted(state.active)})
        return state
    _allocate(state, agent, bundle, "stage3", k)
    return state


@dataclass
class SolveOutcome:
    """Result of a full run: partial allocation, satisfied/failed split, trace."""

    allocation: Allocation
    satisfied: frozenset[int]
    failed_agents: frozenset[int]
    trace: list[dict]

    @property
    def succeeded(self) -> bool:
        return not self.failed_agents

    def to_json_dict(self) -> dict:
        return {
            "allocation": self.allocation.to_json_dict(),
            "satisfied": sorted(self.satisfied),
            "failed_agents": sorted(self.failed_agents),
            "trace": self.trace,
        }


def run_alg(ordered: OrderedInstance, alpha, *, debug: bool = False) -> SolveOutcome:
    """Run rounds until every agent holds a bundle or a round fails.

    On failure the remaining active agents are reported as failed and the
    partial allocation is returned; every satisfied agent's bundle is worth at
    least 7/9 of her threshold, exactly.
    """
    state = new_state(ordered, alpha, debug=debug)
    while state.active and not state.failed:
        run_round(state)
    allocation = Allocation(
        bundles=dict(state.bundles),
        unallocated=frozenset(state.unallocated),
        satisfied=frozenset(state.satisfied),
    )
    return SolveOutcome(
        allocation=allocation,
        satisfied=frozenset(state.satisfied),
        failed_agents=frozenset(state.active),
        trace=state.trace,
    )
