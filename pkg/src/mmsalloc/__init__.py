"""Maximin-share fair division with exact rational arithmetic.

Solver for 7/9-approximate MMS allocations of indivisible goods under
additive valuations, a threshold-descent FPTAS converging to (7/9 - eps)-MMS
without computing MMS values, and a brute-force oracle for ground truth at
desk scale.
"""

from .allocator import (
    AllocatorState,
    SolveOutcome,
    new_state,
    phantom_item,
    reduction_window,
    run_alg,
    run_round,
    try_reduction,
    TARGET_RATIO,
)
from .fptas import FptasConfig, FptasOutcome, IterationLimitError, iteration_bound, run_fptas
from .harness import (
    CampaignRow,
    GeneratorSpec,
    VerifyReport,
    campaign,
    gen_instance,
    summarize,
    verify_allocation,
)
from .model import (
    Allocation,
    AllocationError,
    Instance,
    OrderedInstance,
    ThresholdVector,
    as_thresholds,
    lift_allocation,
    load_allocation,
    load_instance,
    order_instance,
    save_instance,
    scale_agent,
    to_fraction,
)
from .shares import (
    CapacityError,
    ShareResult,
    classify_item,
    compute_shares,
    is_dominance_bundle,
    mms_exact,
    mms_exhaustive,
    sandwich_check,
    tps,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "AllocationError",
    "AllocatorState",
    "CampaignRow",
    "CapacityError",
    "FptasConfig",
    "FptasOutcome",
    "GeneratorSpec",
    "Instance",
    "IterationLimitError",
    "OrderedInstance",
    "ShareResult",
    "SolveOutcome",
    "TARGET_RATIO",
    "ThresholdVector",
    "VerifyReport",
    "as_thresholds",
    "campaign",
    "classify_item",
    "compute_shares",
    "gen_instance",
    "is_dominance_bundle",
    "iteration_bound",
    "lift_allocation",
    "load_allocation",
    "load_instance",
    "mms_exact",
    "mms_exhaustive",
    "new_state",
    "order_instance",
    "phantom_item",
    "reduction_window",
    "run_alg",
    "run_fptas",
    "run_round",
    "sandwich_check",
    "save_instance",
    "scale_agent",
    "summarize",
    "to_fraction",
    "tps",
    "try_reduction",
    "verify_allocation",
]
