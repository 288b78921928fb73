"""Threshold descent: start every agent at her TPS and shave failed agents'
targets by (1 - eps) until the allocator succeeds.

No MMS values are ever computed here.  A failed run certifies (empirically,
per the allocator's guarantee) that every failed agent's current target
exceeded her MMS, so targets never fall below (1 - eps) * MMS and the final
allocation is a (7/9)(1 - eps) >= 7/9 - eps approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .allocator import SolveOutcome, run_alg
from .model import (
    Allocation,
    Instance,
    ThresholdVector,
    lift_allocation,
    order_instance,
    rational_to_json,
    to_fraction,
)
from .shares import tps


class IterationLimitError(RuntimeError):
    """Descent exceeded its iteration cap; indicates an internal bug."""


@dataclass(frozen=True)
class FptasConfig:
    epsilon: Fraction
    max_iterations: Optional[int] = None  # default: iteration_bound(n, epsilon)

    def __post_init__(self):
        object.__setattr__(self, "epsilon", to_fraction(self.epsilon))
        if not (0 < self.epsilon <= Fraction(1, 2)):
            raise ValueError("epsilon must lie in (0, 1/2]")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("iteration cap must be at least 1")


def iteration_bound(n: int, epsilon) -> int:
    """A provably sufficient cap: each agent needs at most ceil(ln2/eps) + 1
    shrink steps to fall from TPS (<= 2 MMS) below MMS, and every failed
    iteration shrinks at least one agent.
    """
    eps = to_fraction(epsilon)
    if n < 1 or eps <= 0:
        raise ValueError("need n >= 1 and epsilon > 0")
    # ln 2 is irrational, so the float quotient never sits on an integer.
    steps = math.ceil(math.log(2) * eps.denominator / eps.numerator)
    return n * (steps + 1)


@dataclass
class FptasOutcome:
    allocation: Allocation  # lifted back to the original items
    final_alpha: ThresholdVector
    iterations: int
    per_iteration_failures: list[list[int]] = field(default_factory=list)
    solve_outcome: Optional[SolveOutcome] = None  # final (successful) run

    def to_json_dict(self) -> dict:
        return {
            "allocation": self.allocation.to_json_dict(),
            "final_alpha": [rational_to_json(a) for a in self.final_alpha],
            "iterations": self.iterations,
            "per_iteration_failures": self.per_iteration_failures,
            "trace": self.solve_outcome.trace if self.solve_outcome else [],
        }


def run_fptas(inst: Instance, cfg: FptasConfig, *, debug: bool = False) -> FptasOutcome:
    """Descend thresholds until a run satisfies every agent, then lift."""
    ordered = order_instance(inst)
    alpha = [tps(row, inst.n) for row in inst.valuations]
    shrink = 1 - cfg.epsilon
    cap = cfg.max_iterations if cfg.max_iterations is not None else iteration_bound(inst.n, cfg.epsilon)

    failures: list[list[int]] = []
    for iteration in range(1, cap + 1):
        outcome = run_alg(ordered, alpha, debug=debug)
        if outcome.succeeded:
            lifted = lift_allocation(outcome.allocation, ordered)
            return FptasOutcome(
                allocation=lifted,
                final_alpha=ThresholdVector(tuple(alpha)),
                iterations=iteration,
                per_iteration_failures=failures,
                solve_outcome=outcome,
            )
        failed = sorted(outcome.failed_agents)
        failures.append(failed)
        for i in failed:
            alpha[i] *= shrink
    raise IterationLimitError(
        f"no success within {cap} iterations; thresholds should have crossed "
        f"every MMS by now")
