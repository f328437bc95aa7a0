"""Resident-proposing deferred acceptance and stability verification.

``run_da`` is pure and deterministic: free residents propose down their
lists, hospitals tentatively hold the best proposers within capacity and
reject the worst on overflow.  The proposal schedule is a work stack that
follows each rejection chain immediately; the outcome is unaffected because
the resident-optimal stable matching is unique regardless of proposal order.

The inner loop is JIT-compiled (hot path: searches evaluate it hundreds of
thousands of times on thousand-resident instances).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .instance import ExpansionVector, Matching, MatchingInstance

__all__ = [
    "StabilityReport",
    "run_da",
    "expansion_cost",
    "total_cost",
    "per_resident_ranks",
    "find_blocking_pairs",
]


@njit(cache=True)
def _heap_push(heap, size, value):
    # max-heap of hospital-side ranks; the root is the worst held resident
    heap[size] = value
    i = size
    while i > 0:
        parent = (i - 1) // 2
        if heap[parent] < heap[i]:
            heap[parent], heap[i] = heap[i], heap[parent]
            i = parent
        else:
            break
    return size + 1


@njit(cache=True)
def _heap_replace_max(heap, size, value):
    old = heap[0]
    heap[0] = value
    i = 0
    while True:
        left = 2 * i + 1
        right = left + 1
        largest = i
        if left < size and heap[left] > heap[largest]:
            largest = left
        if right < size and heap[right] > heap[largest]:
            largest = right
        if largest == i:
            break
        heap[largest], heap[i] = heap[i], heap[largest]
        i = largest
    return old


@njit(cache=True)
def _da_core(prefs, pref_len, hosp_rank, hosp_pref, caps, rank_of, penalty):
    num_residents = prefs.shape[0]
    num_hospitals = caps.shape[0]
    assignment = np.full(num_residents, -1, dtype=np.int64)
    next_choice = np.zeros(num_residents, dtype=np.int64)

    max_cap = 1
    for h in range(num_hospitals):
        if caps[h] > max_cap:
            max_cap = caps[h]
    heaps = np.empty((num_hospitals, max_cap), dtype=np.int64)
    heap_size = np.zeros(num_hospitals, dtype=np.int64)

    # each resident is free at most once at a time, so D slots suffice
    stack = np.empty(num_residents, dtype=np.int64)
    top = 0
    for d in range(num_residents - 1, -1, -1):
        stack[top] = d
        top += 1

    while top > 0:
        top -= 1
        d = stack[top]
        while True:
            if next_choice[d] >= pref_len[d]:
                break  # exhausted: stays unassigned
            h = prefs[d, next_choice[d]]
            next_choice[d] += 1
            if caps[h] == 0:
                continue
            rank = hosp_rank[h, d]
            if heap_size[h] < caps[h]:
                heap_size[h] = _heap_push(heaps[h], heap_size[h], rank)
                assignment[d] = h
                break
            if rank < heaps[h, 0]:
                worst = _heap_replace_max(heaps[h], heap_size[h], rank)
                assignment[d] = h
                rejected = hosp_pref[h, worst]
                assignment[rejected] = -1
                d = rejected
                continue
            # h is full and prefers everyone it holds; try the next hospital

    cost = 0
    for d in range(num_residents):
        if assignment[d] >= 0:
            cost += rank_of[d, assignment[d]]
        else:
            cost += penalty
    return assignment, cost


def _check_expansion(inst: MatchingInstance, t: ExpansionVector) -> None:
    if len(t.extras) != inst.total_hospitals:
        raise ValueError(
            f"expansion vector has length {len(t.extras)}, "
            f"expected {inst.total_hospitals}"
        )
    if not inst.is_feasible_expansion(t):
        raise ValueError(f"expansion {t.extras} violates the limits or the budget")


def _solve(inst: MatchingInstance, extras: tuple[int, ...]):
    arr = inst.arrays
    caps = arr.quotas + np.asarray(extras, dtype=np.int64)
    return _da_core(
        arr.prefs,
        arr.pref_len,
        arr.hosp_rank,
        arr.hosp_pref,
        caps,
        arr.rank_of,
        inst.unassigned_cost,
    )


def expansion_cost(inst: MatchingInstance, extras: tuple[int, ...]) -> int:
    """Total rank cost of the deferred-acceptance outcome under ``extras``.

    Fast path for solvers: skips feasibility checks and does not materialize
    the matching.
    """
    return int(_solve(inst, extras)[1])


def run_da(inst: MatchingInstance, t: ExpansionVector) -> Matching:
    """Resident-optimal stable matching under capacities quota + t."""
    _check_expansion(inst, t)
    assignment, _ = _solve(inst, t.extras)
    return Matching.from_assignment(assignment, inst.total_hospitals)


def total_cost(inst: MatchingInstance, matching: Matching) -> int:
    """Sum of matched ranks, charging unassigned residents one past the worst."""
    arr = inst.arrays
    cost = 0
    for d, h in enumerate(matching.assignment):
        cost += int(arr.rank_of[d, h]) if h >= 0 else inst.unassigned_cost
    return cost


def per_resident_ranks(inst: MatchingInstance, matching: Matching) -> list[int]:
    """Rank each resident got (unassigned residents get the penalty rank)."""
    arr = inst.arrays
    return [
        int(arr.rank_of[d, h]) if h >= 0 else inst.unassigned_cost
        for d, h in enumerate(matching.assignment)
    ]


@dataclass(frozen=True)
class StabilityReport:
    """All blocking pairs of a matching; empty means stable."""

    blocking_pairs: tuple[tuple[int, int], ...]

    @property
    def stable(self) -> bool:
        return not self.blocking_pairs


def find_blocking_pairs(
    inst: MatchingInstance, t: ExpansionVector, matching: Matching
) -> StabilityReport:
    """Enumerate every resident-hospital pair that would jointly deviate.

    A pair (d, h) with d applying to h blocks when d is unassigned or ranks h
    above its match, and h is under capacity or ranks d above someone it
    holds.
    """
    _check_expansion(inst, t)
    arr = inst.arrays
    caps = arr.quotas + np.asarray(t.extras, dtype=np.int64)
    worst_rank = np.full(inst.total_hospitals, -1, dtype=np.int64)
    load = np.zeros(inst.total_hospitals, dtype=np.int64)
    for h, roster in enumerate(matching.rosters):
        load[h] = len(roster)
        for d in roster:
            if arr.hosp_rank[h, d] > worst_rank[h]:
                worst_rank[h] = arr.hosp_rank[h, d]

    pairs: list[tuple[int, int]] = []
    for d in range(inst.num_residents):
        matched = matching.assignment[d]
        matched_rank = arr.rank_of[d, matched] if matched >= 0 else np.iinfo(np.int64).max
        for r in range(int(arr.pref_len[d])):
            h = int(arr.prefs[d, r])
            if r + 1 >= matched_rank:
                break  # h and everything after are no better than the match
            if load[h] < caps[h] or arr.hosp_rank[h, d] < worst_rank[h]:
                pairs.append((d, h))
    return StabilityReport(tuple(pairs))
