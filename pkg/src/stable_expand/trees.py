"""Tree representations of the extra-seat search space.

Three path encodings map tree nodes to expansion vectors over hospitals that
have been reordered most-important-first:

  * ``iterative``: every edge grants one seat to one ordered hospital;
    leaves sit at depth B.  Different label orders can reach the same vector.
  * ``ipt``: like ``iterative`` but edge labels along a path must be
    nonincreasing, so each budget-exhausting vector has exactly one leaf.
  * ``bt``: the edge at depth k fixes the full seat count for the
    k-th ordered hospital; a path stops once the seat sum hits B or every
    hospital has been assigned.

Orderings may be random (seeded), by popularity (total rank received, lower
first), or by envy (count of residents preferring the hospital to their
no-expansion match, higher first).  A dummy hospital always sorts last.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random

from . import da
from .instance import ExpansionVector, MatchingInstance

__all__ = [
    "REPRESENTATIONS",
    "ORDERING_KINDS",
    "HospitalOrdering",
    "TreePath",
    "popularity_scores",
    "envy_scores",
    "make_ordering",
    "children",
    "node_to_expansion",
    "enumerate_leaves",
    "count_expansions",
]

REPRESENTATIONS = ("iterative", "ipt", "bt")
ORDERING_KINDS = ("random", "popularity", "envy")

LEAF_GUARD = 10**6


def popularity_scores(inst: MatchingInstance) -> list[int]:
    """Total rank each hospital receives across residents (lower = hotter).

    Residents who did not apply to a hospital contribute one rank past the
    worst possible, keeping scores comparable on partial lists.
    """
    miss = inst.total_hospitals + 1
    scores = [0] * inst.total_hospitals
    rank_of = inst.arrays.rank_of
    for d in range(inst.num_residents):
        row = rank_of[d]
        for h in range(inst.total_hospitals):
            r = int(row[h])
            scores[h] += r if r > 0 else miss
    return scores


def envy_scores(inst: MatchingInstance) -> list[int]:
    """Residents who would rather be at each hospital than where the
    no-expansion matching puts them (higher = more contested)."""
    base = da.run_da(inst, ExpansionVector.zero(inst.total_hospitals))
    rank_of = inst.arrays.rank_of
    scores = [0] * inst.total_hospitals
    for d, matched in enumerate(base.assignment):
        own = int(rank_of[d, matched]) if matched >= 0 else inst.unassigned_cost
        for h in range(inst.total_hospitals):
            r = int(rank_of[d, h])
            if 0 < r < own:
                scores[h] += 1
    return scores


@dataclass(frozen=True)
class HospitalOrdering:
    """Hospitals arranged most-important-first for ipt/bt label positions."""

    kind: str
    permutation: tuple[int, ...]
    seed: int | None = None


def make_ordering(
    inst: MatchingInstance, kind: str, seed: int | None = None
) -> HospitalOrdering:
    """Build the hospital ordering of the given kind (dummy forced last).

    Ties break toward the smaller hospital id.  ``seed`` matters only for
    the random kind.
    """
    if kind not in ORDERING_KINDS:
        raise ValueError(f"unknown ordering kind: {kind!r}")
    real = list(range(inst.num_hospitals))
    if kind == "random":
        Random(seed).shuffle(real)
    elif kind == "popularity":
        scores = popularity_scores(inst)
        real.sort(key=lambda h: (scores[h], h))
    else:
        scores = envy_scores(inst)
        real.sort(key=lambda h: (-scores[h], h))
    if inst.dummy_hospital:
        real.append(inst.num_hospitals)
    return HospitalOrdering(kind, tuple(real), seed if kind == "random" else None)


@dataclass(frozen=True)
class TreePath:
    """A node identity: representation plus edge labels from the root."""

    representation: str
    labels: tuple[int, ...]

    def __post_init__(self):
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"unknown representation: {self.representation!r}")
        object.__setattr__(self, "labels", tuple(int(x) for x in self.labels))


class TreeKernel:
    """Incremental path walker shared by the public API and the search.

    A state is ``(labels, aux)`` where aux caches per-position seat counts
    (iterative/ipt) or the running seat sum (bt) so children can be listed
    in O(H).
    """

    def __init__(
        self, representation: str, limits_ordered: tuple[int, ...], budget: int
    ):
        if representation not in REPRESENTATIONS:
            raise ValueError(f"unknown representation: {representation!r}")
        self.representation = representation
        self.limits = limits_ordered
        self.budget = budget
        self.width = len(limits_ordered)

    def root(self):
        if self.representation == "bt":
            return (), 0
        return (), (0,) * self.width

    def step(self, state, label: int):
        labels, aux = state
        if self.representation == "bt":
            return labels + (label,), aux + label
        counts = list(aux)
        counts[label] += 1
        return labels + (label,), tuple(counts)

    def child_labels(self, state) -> list[int]:
        labels, aux = state
        if self.representation == "bt":
            depth = len(labels)
            if aux >= self.budget or depth >= self.width:
                return []
            return list(range(min(self.limits[depth], self.budget - aux) + 1))
        if len(labels) >= self.budget:
            return []
        counts = aux
        if self.representation == "iterative":
            return [p for p in range(self.width) if counts[p] < self.limits[p]]
        # ipt: nonincreasing labels, and keep only children whose prefix
        # of spare seats can still absorb the remaining budget
        last = labels[-1] if labels else self.width - 1
        need = self.budget - len(labels)
        out = []
        spare = 0
        for p in range(last + 1):
            spare += self.limits[p] - counts[p]
            if counts[p] < self.limits[p] and spare >= need:
                out.append(p)
        return out

    def is_leaf(self, state) -> bool:
        return not self.child_labels(state)

    def state_for(self, labels: tuple[int, ...]):
        """Replay a label sequence from the root, validating each edge."""
        state = self.root()
        for label in labels:
            if label not in self.child_labels(state):
                raise ValueError(f"invalid path: label {label} not reachable")
            state = self.step(state, label)
        return state

    def expansion_ordered(self, state) -> tuple[int, ...]:
        labels, aux = state
        if self.representation == "bt":
            return labels + (0,) * (self.width - len(labels))
        return aux


def _kernel_for(
    inst: MatchingInstance, ordering: HospitalOrdering, representation: str
) -> TreeKernel:
    limits = tuple(inst.expansion_limits[h] for h in ordering.permutation)
    return TreeKernel(representation, limits, inst.budget)


def children(
    inst: MatchingInstance, ordering: HospitalOrdering, path: TreePath
) -> list[TreePath]:
    """Child paths of a node; empty exactly at the leaves."""
    kernel = _kernel_for(inst, ordering, path.representation)
    state = kernel.state_for(path.labels)
    return [
        TreePath(path.representation, path.labels + (label,))
        for label in kernel.child_labels(state)
    ]


def node_to_expansion(ordering: HospitalOrdering, path: TreePath) -> ExpansionVector:
    """Expansion vector (original hospital ids) encoded by a path."""
    width = len(ordering.permutation)
    extras = [0] * width
    if path.representation == "bt":
        for pos, seats in enumerate(path.labels):
            extras[ordering.permutation[pos]] = seats
    else:
        for pos in path.labels:
            extras[ordering.permutation[pos]] += 1
    return ExpansionVector(tuple(extras))


def count_expansions(inst: MatchingInstance) -> int:
    """Number of feasible expansion vectors (limits + budget respected)."""
    ways = [0] * (inst.budget + 1)
    ways[0] = 1
    for b in inst.expansion_limits:
        nxt = [0] * (inst.budget + 1)
        for total, w in enumerate(ways):
            if w:
                for x in range(min(b, inst.budget - total) + 1):
                    nxt[total + x] += w
        ways = nxt
    return sum(ways)


def enumerate_leaves(
    inst: MatchingInstance, ordering: HospitalOrdering, representation: str
) -> list[ExpansionVector]:
    """Expansions of every leaf, depth-first with labels ascending.

    Intended for verification at desk scale; refuses instances whose
    expansion space exceeds the guard.
    """
    if count_expansions(inst) > LEAF_GUARD:
        raise ValueError(f"expansion space exceeds the {LEAF_GUARD} guard")
    kernel = _kernel_for(inst, ordering, representation)
    perm = ordering.permutation
    width = len(perm)
    out: list[ExpansionVector] = []

    def visit(state):
        labels = kernel.child_labels(state)
        if not labels:
            ordered = kernel.expansion_ordered(state)
            extras = [0] * width
            for pos, seats in enumerate(ordered):
                extras[perm[pos]] = seats
            out.append(ExpansionVector(tuple(extras)))
            return
        for label in labels:
            visit(kernel.step(state, label))

    visit(kernel.root())
    return out
