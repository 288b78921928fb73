"""Exact share computations: truncated proportional share and the MMS oracle.

The oracle is deliberately brute-force (subset DP + binary search over bundle
values) and refuses instances above its size limits instead of approximating:
its only job is ground truth at desk scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

from .model import to_fraction

DEFAULT_MAX_ITEMS = 16
DEFAULT_MAX_AGENTS = 5

PEBBLE = "pebble"
ICE = "ice"
WATER = "water"

PEBBLE_FLOOR = Fraction(2, 9)
ICE_FLOOR = Fraction(4, 27)


class CapacityError(ValueError):
    """The exact oracle was asked for an instance above its size limits."""


def _clean_values(values: Sequence) -> list[Fraction]:
    vals = [to_fraction(v) for v in values]
    for v in vals:
        if v < 0:
            raise ValueError("item values must be non-negative")
    return vals


def tps(values: Sequence, n: int) -> Fraction:
    """Truncated proportional share: the largest beta with
    beta = (1/n) * sum(min(v, beta)).

    Computed exactly by enumerating the truncation count t (number of items
    strictly above beta): beta_t = (total - top_t) / (n - t), accepted when
    the item at rank t exceeds beta_t and the next one does not.
    """
    if n < 1:
        raise ValueError("agent count must be at least 1")
    vals = sorted(_clean_values(values), reverse=True)
    m = len(vals)
    total = sum(vals, Fraction(0))

    consistent: list[Fraction] = []
    prefix = Fraction(0)
    for t in range(min(m, n - 1) + 1):
        beta = (total - prefix) / (n - t)
        left_ok = t == 0 or vals[t - 1] > beta
        right_ok = t >= m or vals[t] <= beta
        if left_ok and right_ok:
            consistent.append(beta)
        if t < m:
            prefix += vals[t]
    assert len(consistent) == 1, f"truncation counts consistent: {len(consistent)}"
    beta = consistent[0]
    assert beta * n == sum(min(v, beta) for v in vals), "fixed point violated"
    return beta


def _cover(bundles_needed: int, mask: int, avail: int, tau: int, w: list[int],
           fail: set) -> Optional[list[int]]:
    """Find ``bundles_needed`` disjoint bundles inside ``mask``, each of weight
    >= tau (``avail`` is the total weight in ``mask``).  Items are sorted
    descending, so the lowest set bit is the largest remaining item; it can
    always serve the next bundle, since swapping it in for a smaller item
    never hurts a cover.
    """
    if bundles_needed == 0:
        return []
    if avail < tau * bundles_needed:
        return None
    key = (mask, bundles_needed)
    if key in fail:
        return None

    low = mask & -mask
    e = low.bit_length() - 1
    if w[e] >= tau:
        rest = _cover(bundles_needed - 1, mask ^ low, avail - w[e], tau, w, fail)
        if rest is not None:
            return [low] + rest
        fail.add(key)
        return None

    others = []
    rem = mask ^ low
    while rem:
        b = rem & -rem
        others.append(b.bit_length() - 1)
        rem ^= b
    suffix = [0] * (len(others) + 1)
    for idx in range(len(others) - 1, -1, -1):
        suffix[idx] = suffix[idx + 1] + w[others[idx]]

    # Depth-first over bundles containing the largest item, growing while the
    # sum is short of tau, so every minimal bundle is visited.  Equal weights
    # at the same level would rebuild the same multiset; skip them.
    def grow(bundle: int, bsum: int, start: int) -> Optional[list[int]]:
        if bsum >= tau:
            rest = _cover(bundles_needed - 1, mask & ~bundle, avail - bsum,
                          tau, w, fail)
            if rest is not None:
                return [bundle] + rest
            return None
        prev_weight = None
        for idx in range(start, len(others)):
            if bsum + suffix[idx] < tau:
                break
            item = others[idx]
            if w[item] == prev_weight:
                continue
            prev_weight = w[item]
            found = grow(bundle | (1 << item), bsum + w[item], idx + 1)
            if found is not None:
                return found
        return None

    found = grow(low, w[e], 0)
    if found is None:
        fail.add(key)
    return found


def mms_exact(values: Sequence, n: int, *, max_items: int = DEFAULT_MAX_ITEMS,
              max_agents: int = DEFAULT_MAX_AGENTS) -> tuple[Fraction, tuple[tuple[int, ...], ...]]:
    """Exact maximin share of one agent plus a witnessing n-partition.

    Binary-searches the sorted distinct subset sums (the optimum is always a
    bundle value) with a recursive cover-feasibility check.  Raises
    CapacityError above the configured limits rather than degrading.
    """
    if n < 1:
        raise ValueError("agent count must be at least 1")
    vals = _clean_values(values)
    m = len(vals)
    if m > max_items or n > max_agents:
        raise CapacityError(
            f"oracle limited to {max_items} items / {max_agents} agents, got m={m}, n={n}")

    if n == 1:
        return sum(vals, Fraction(0)), (tuple(range(m)),)

    scale = lcm(*(v.denominator for v in vals)) if vals else 1
    order = sorted(range(m), key=lambda j: (-vals[j], j))
    w = [int(vals[j] * scale) for j in order]
    total = sum(w)

    distinct = {0}
    for weight in w:
        distinct |= {s + weight for s in distinct}
    candidates = sorted(distinct)

    def feasible(tau: int) -> Optional[list[int]]:
        if tau == 0:
            return [((1 << m) - 1)] + [0] * (n - 1)
        return _cover(n, (1 << m) - 1, total, tau, w, set())

    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if feasible(candidates[mid]) is not None:
            lo = mid
        else:
            hi = mid - 1
    best = candidates[lo]
    masks = feasible(best)
    assert masks is not None

    used = 0
    bundles = []
    for bmask in masks:
        bundles.append({order[b] for b in _bits(bmask)})
        used |= bmask
    leftover = ((1 << m) - 1) & ~used
    bundles[0] |= {order[b] for b in _bits(leftover)}
    partition = tuple(tuple(sorted(b)) for b in bundles)
    return Fraction(best, scale), partition


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mms_exhaustive(values: Sequence, n: int, *, max_assignments: int = 2_000_000
                   ) -> tuple[Fraction, tuple[tuple[int, ...], ...]]:
    """Second, independent oracle: enumerate all n**m item-to-bundle maps."""
    if n < 1:
        raise ValueError("agent count must be at least 1")
    vals = _clean_values(values)
    m = len(vals)
    if n ** m > max_assignments:
        raise CapacityError(f"{n}**{m} assignments exceed the enumeration cap")
    best = Fraction(-1)
    best_assignment = (0,) * m
    for assignment in itertools.product(range(n), repeat=m):
        totals = [Fraction(0)] * n
        for j, b in enumerate(assignment):
            totals[b] += vals[j]
        low = min(totals)
        if low > best:
            best, best_assignment = low, assignment
    partition = tuple(
        tuple(j for j in range(m) if best_assignment[j] == b) for b in range(n))
    return best, partition


def sandwich_check(values: Sequence, n: int, **oracle_limits) -> bool:
    """True iff TPS >= MMS >= n/(2n-1) * TPS holds exactly."""
    t = tps(values, n)
    mms, _ = mms_exact(values, n, **oracle_limits)
    return t >= mms >= Fraction(n, 2 * n - 1) * t


@dataclass(frozen=True)
class ShareResult:
    """Shares of one agent; mms/partition are present only when the oracle ran."""

    agent: int
    tps: Fraction
    mms: Optional[Fraction] = None
    feasible_partition: Optional[tuple[tuple[int, ...], ...]] = None


def compute_shares(values: Sequence, n: int, *, agent: int = 0,
                   with_mms: bool = False, **oracle_limits) -> ShareResult:
    t = tps(values, n)
    if not with_mms:
        return ShareResult(agent=agent, tps=t)
    mms, partition = mms_exact(values, n, **oracle_limits)
    assert t >= mms >= Fraction(n, 2 * n - 1) * t
    return ShareResult(agent=agent, tps=t, mms=mms, feasible_partition=partition)


def is_dominance_bundle(t_indices: Sequence[int], x_indices: Sequence[int]) -> bool:
    """Can every rank in T be matched injectively to a rank in X that is at
    least as high (i.e. numerically no larger)?

    Both sequences must be strictly increasing.  Matching the i-th smallest
    ranks against each other is optimal because each constraint admits a
    downward-closed interval of partners.
    """
    for name, seq in (("t_indices", t_indices), ("x_indices", x_indices)):
        for a, b in zip(seq, seq[1:]):
            if a >= b:
                raise ValueError(f"{name} must be strictly increasing")
    if len(x_indices) < len(t_indices):
        return False
    return all(x <= t for x, t in zip(x_indices, t_indices))


def classify_item(value, alpha) -> str:
    """Bucket an item value relative to a positive per-agent target."""
    v = to_fraction(value)
    a = to_fraction(alpha)
    if a <= 0:
        raise ValueError("alpha must be positive")
    if v >= PEBBLE_FLOOR * a:
        return PEBBLE
    if v >= ICE_FLOOR * a:
        return ICE
    return WATER
