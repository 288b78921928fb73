"""Instance generators, allocation verifier, and the campaign runner."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .allocator import run_alg
from .fptas import FptasConfig, run_fptas
from .model import (
    Allocation,
    Instance,
    as_thresholds,
    lift_allocation,
    order_instance,
    rational_to_json,
    to_fraction,
)
from .shares import classify_item, mms_exact, tps

FAMILIES = ("uniform", "bimodal", "tightness", "identical")

# Canonical boundary profile: two 7/9 items, three 1/3 items, then water
# totalling 4/9 so every agent's MMS is exactly 1.
TIGHTNESS_HEAD = (Fraction(7, 9), Fraction(7, 9), Fraction(1, 3), Fraction(1, 3), Fraction(1, 3))
TIGHTNESS_WATER_TOTAL = Fraction(4, 9)


@dataclass(frozen=True)
class GeneratorSpec:
    """Deterministic instance recipe; equal specs produce identical instances."""

    family: str
    n: int
    m: int
    seed: int = 0
    low: Fraction = Fraction(0)
    high: Fraction = Fraction(1)
    denominator: int = 90
    high_prob: Fraction = Fraction(3, 10)  # bimodal: share of large items
    water_count: int = 4                   # tightness only
    value: Optional[Fraction] = None       # identical: constant value

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 1 or self.m < 1:
            raise ValueError("sizes must be positive")
        if self.low < 0 or self.high < self.low:
            raise ValueError("need 0 <= low <= high")
        if self.denominator < 1:
            raise ValueError("denominator must be positive")
        if self.family == "tightness":
            if self.n != 3:
                raise ValueError("tightness family is defined for exactly 3 agents")
            if self.water_count < 4 or self.water_count % 2 != 0:
                # An odd count cannot split the 4/9 of water evenly between the
                # two large bundles, which would push MMS strictly below 1.
                raise ValueError("water_count must be an even number >= 4")
            if self.m != len(TIGHTNESS_HEAD) + self.water_count:
                raise ValueError(
                    f"tightness with water_count={self.water_count} has "
                    f"m={len(TIGHTNESS_HEAD) + self.water_count} items")

    @classmethod
    def tightness(cls, water_count: int = 4, seed: int = 0) -> "GeneratorSpec":
        return cls(family="tightness", n=3, m=len(TIGHTNESS_HEAD) + water_count,
                   seed=seed, water_count=water_count)

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorSpec":
        kwargs = dict(data)
        if kwargs.get("family") == "tightness":
            kwargs.setdefault("water_count", 4)
            kwargs.setdefault("n", 3)
            kwargs.setdefault("m", len(TIGHTNESS_HEAD) + kwargs["water_count"])
        for key in ("low", "high", "high_prob", "value"):
            if key in kwargs and kwargs[key] is not None:
                kwargs[key] = to_fraction(kwargs[key])
        return cls(**kwargs)


def _rand_rational(rng: random.Random, low: Fraction, high: Fraction, den: int) -> Fraction:
    lo_num = -((-low.numerator * den) // low.denominator)   # ceil(low * den)
    hi_num = (high.numerator * den) // high.denominator     # floor(high * den)
    if hi_num < lo_num:
        raise ValueError("value range admits no rational with this denominator")
    return Fraction(rng.randint(lo_num, hi_num), den)


def gen_instance(spec: GeneratorSpec) -> Instance:
    """Build the instance described by ``spec`` (bit-identical per seed)."""
    rng = random.Random(spec.seed)

    if spec.family == "tightness":
        water = TIGHTNESS_WATER_TOTAL / spec.water_count
        row = TIGHTNESS_HEAD + (water,) * spec.water_count
        return Instance(tuple(row for _ in range(spec.n)))

    if spec.family == "identical":
        if spec.value is not None:
            row = tuple(spec.value for _ in range(spec.m))
        else:
            row = tuple(_rand_rational(rng, spec.low, spec.high, spec.denominator)
                        for _ in range(spec.m))
        return Instance(tuple(row for _ in range(spec.n)))

    if spec.family == "uniform":
        rows = tuple(
            tuple(_rand_rational(rng, spec.low, spec.high, spec.denominator)
                  for _ in range(spec.m))
            for _ in range(spec.n))
        return Instance(rows)

    # bimodal: a few large items, many small ones
    span = spec.high - spec.low
    big_low = spec.low + span * Fraction(3, 4)
    small_high = spec.low + span * Fraction(1, 5)
    rows = []
    for _ in range(spec.n):
        row = []
        for _ in range(spec.m):
            if rng.random() < spec.high_prob:
                row.append(_rand_rational(rng, big_low, spec.high, spec.denominator))
            else:
                row.append(_rand_rational(rng, spec.low, small_high, spec.denominator))
        rows.append(tuple(row))
    return Instance(tuple(rows))


@dataclass
class AgentReport:
    agent: int
    bundle: tuple[int, ...]
    value: Fraction
    ratio_vs_alpha: Optional[Fraction] = None
    mms: Optional[Fraction] = None
    ratio_vs_mms: Optional[Fraction] = None
    census: Optional[dict[str, int]] = None


@dataclass
class VerifyReport:
    agents: list[AgentReport]
    min_ratio: Optional[Fraction]  # vs MMS when the oracle ran, else vs alpha

    def to_json_dict(self) -> dict:
        def opt(x):
            return rational_to_json(x) if x is not None else None

        return {
            "agents": [
                {
                    "agent": a.agent,
                    "bundle": list(a.bundle),
                    "value": rational_to_json(a.value),
                    "ratio_vs_alpha": opt(a.ratio_vs_alpha),
                    "mms": opt(a.mms),
                    "ratio_vs_mms": opt(a.ratio_vs_mms),
                    "census": a.census,
                }
                for a in self.agents
            ],
            "min_ratio": opt(self.min_ratio),
        }


def verify_allocation(inst: Instance, alloc: Allocation, alpha=None,
                      with_oracle: bool = False, **oracle_limits) -> VerifyReport:
    """Exact per-agent values and ratios for an allocation of ``inst``."""
    alloc.validate(inst.n, inst.m)
    alphas = as_thresholds(alpha, inst.n) if alpha is not None else None

    reports = []
    for i in range(inst.n):
        bundle = tuple(sorted(alloc.bundle(i)))
        value = inst.value(i, bundle)
        ratio_alpha = None
        census = None
        if alphas is not None and alphas[i] > 0:
            ratio_alpha = value / alphas[i]
            census = {"pebble": 0, "ice": 0, "water": 0}
            for j in bundle:
                census[classify_item(inst.valuations[i][j], alphas[i])] += 1
        mms = ratio_mms = None
        if with_oracle:
            mms, _ = mms_exact(inst.valuations[i], inst.n, **oracle_limits)
            if mms > 0:
                ratio_mms = value / mms
        reports.append(AgentReport(agent=i, bundle=bundle, value=value,
                                   ratio_vs_alpha=ratio_alpha, mms=mms,
                                   ratio_vs_mms=ratio_mms, census=census))

    key = "ratio_vs_mms" if with_oracle else "ratio_vs_alpha"
    ratios = [getattr(r, key) for r in reports if getattr(r, key) is not None]
    return VerifyReport(agents=reports, min_ratio=min(ratios) if ratios else None)


@dataclass
class CampaignRow:
    """One solved instance; the allocation is kept so every figure in the CSV
    can be recomputed through verify_allocation."""

    spec: GeneratorSpec
    epsilon: Optional[Fraction]
    min_ratio: Optional[Fraction]
    iterations: int
    failures: int
    reductions_fired: int
    allocation: Allocation
    final_alpha: tuple[Fraction, ...]


def _run_campaign_task(task) -> CampaignRow:
    spec, epsilon, alpha_mode, with_oracle, debug, oracle_limits = task
    inst = gen_instance(spec)
    if epsilon is None:
        if alpha_mode == "oracle":
            alpha = [mms_exact(row, inst.n, **oracle_limits)[0]
                     for row in inst.valuations]
        else:
            alpha = [tps(row, inst.n) for row in inst.valuations]
        ordered = order_instance(inst)
        outcome = run_alg(ordered, alpha, debug=debug)
        allocation = lift_allocation(outcome.allocation, ordered)
        iterations = 1
        failures = len(outcome.failed_agents)
        trace = outcome.trace
        final_alpha = tuple(alpha)
    else:
        result = run_fptas(inst, FptasConfig(epsilon=epsilon), debug=debug)
        allocation = result.allocation
        iterations = result.iterations
        failures = result.iterations - 1  # failing runs before the success
        trace = result.solve_outcome.trace
        final_alpha = tuple(result.final_alpha)
    report = verify_allocation(inst, allocation,
                               alpha=final_alpha if epsilon is None else None,
                               with_oracle=with_oracle, **oracle_limits)
    reductions = sum(1 for ev in trace if ev["event"] == "reduction")
    return CampaignRow(spec=spec, epsilon=epsilon, min_ratio=report.min_ratio,
                       iterations=iterations, failures=failures,
                       reductions_fired=reductions, allocation=allocation,
                       final_alpha=final_alpha)


def campaign(specs: Sequence[GeneratorSpec], epsilons: Sequence = (),
             alpha_mode: str = "oracle", with_oracle: bool = True,
             debug: bool = False, workers: int = 1,
             oracle_max_items: Optional[int] = None) -> list[CampaignRow]:
    """Solve every spec (once per epsilon, or once with fixed thresholds when
    ``epsilons`` is empty) and collect one row per run.

    With no epsilon grid each run uses alpha from ``alpha_mode`` ("oracle":
    exact MMS, "tps": truncated proportional share); otherwise the FPTAS runs.
    ``oracle_max_items`` lifts the oracle's item cap, e.g. for the larger
    tightness instances.  Instances are independent, so rows may be computed
    in parallel.
    """
    if alpha_mode not in ("oracle", "tps"):
        raise ValueError("alpha_mode must be 'oracle' or 'tps'")
    eps_list = [to_fraction(e) for e in epsilons] if epsilons else [None]
    oracle_limits = {} if oracle_max_items is None else {"max_items": oracle_max_items}
    tasks = [(spec, eps, alpha_mode, with_oracle, debug, oracle_limits)
             for spec in specs for eps in eps_list]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_campaign_task, tasks, chunksize=8))
    return [_run_campaign_task(t) for t in tasks]


def summarize(rows: Sequence[CampaignRow]) -> dict:
    """Aggregate a campaign for display: ratio extremes, failures, firings."""
    ratios = [r.min_ratio for r in rows if r.min_ratio is not None]
    iteration_hist: dict[int, int] = {}
    for r in rows:
        iteration_hist[r.iterations] = iteration_hist.get(r.iterations, 0) + 1
    return {
        "rows": len(rows),
        "min_ratio": min(ratios) if ratios else None,
        "max_ratio": max(ratios) if ratios else None,
        "total_failures": sum(r.failures for r in rows),
        "total_reductions": sum(r.reductions_fired for r in rows),
        "iteration_histogram": dict(sorted(iteration_hist.items())),
    }
