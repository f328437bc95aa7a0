"""Anytime upper-confidence tree search over the expansion space.

Each round selects a path by maximum UCB among non-evaluated children,
develops the first node outside the current tree, rolls out uniformly at
random to a leaf, evaluates that leaf's expansion with deferred acceptance,
and backpropagates the reward along the selected path.

Leaves are marked evaluated as soon as their cost is known (including
rollout leaves), a node becomes evaluated once all its children are, and
evaluated nodes are never visited again.  Because every round therefore
evaluates a fresh leaf path, a run whose round budget reaches the leaf count
provably exhausts the tree; the search then reports the exact optimum.

A per-search transposition cache keyed by expansion vector guarantees no
expansion is ever solved twice, and the incumbent never worsens, so the
search can be stopped at any round.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from random import Random

from . import da, trees
from .instance import ExpansionVector, Matching, MatchingInstance

__all__ = [
    "CP_DEFAULT",
    "SearchConfig",
    "SearchNode",
    "SearchResult",
    "ucb_value",
    "reward",
    "search",
    "write_trajectory_csv",
]

CP_DEFAULT = math.sqrt(0.002)


def ucb_value(
    child_value_sum: float, child_visits: int, parent_visits: int, exploration: float
) -> float:
    """Mean reward plus exploration bonus; unvisited children get +inf."""
    if child_visits == 0:
        return math.inf
    return child_value_sum / child_visits + exploration * math.sqrt(
        math.log(parent_visits) / child_visits
    )


def reward(cost: int, baseline_cost: int) -> float:
    """Relative improvement over the no-expansion cost, in [0, 1).

    Keeps rewards on a scale-free range so one exploration constant works
    across instances.
    """
    if baseline_cost == 0:
        raise ValueError("baseline cost must be positive")
    return (baseline_cost - cost) / baseline_cost


class SearchNode:
    """Per-path statistics: reward sum, visit count, and status flags."""

    __slots__ = ("value_sum", "visits", "evaluated", "in_tree", "child_labels")

    def __init__(self):
        self.value_sum = 0.0
        self.visits = 0
        self.evaluated = False
        self.in_tree = False
        self.child_labels: list[int] | None = None


@dataclass
class SearchConfig:
    """Knobs for one search run.

    ``rounds`` is the selection/development/simulation/backpropagation cycle
    count; ``time_limit`` (seconds), when set, stops the loop early.
    """

    rounds: int
    exploration: float = CP_DEFAULT
    representation: str = "bt"
    ordering: str = "envy"
    seed: int = 0
    time_limit: float | None = None


@dataclass
class SearchResult:
    best_expansion: ExpansionVector
    best_cost: int
    best_matching: Matching
    trajectory: list[tuple[int, int, int]] = field(repr=False)
    terminated_exhaustively: bool = False


def write_trajectory_csv(trajectory: list[tuple[int, int, int]], path_or_file) -> None:
    """Write per-round incumbent rows: round,incumbent_cost,da_evaluations."""
    if hasattr(path_or_file, "write"):
        writer = csv.writer(path_or_file)
        writer.writerow(["round", "incumbent_cost", "da_evaluations"])
        writer.writerows(trajectory)
        return
    with open(path_or_file, "w", newline="", encoding="utf-8") as f:
        write_trajectory_csv(trajectory, f)


class _Engine:
    """One search run; kept as a class so tests can inspect the tree."""

    def __init__(self, inst: MatchingInstance, config: SearchConfig):
        if config.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if config.exploration < 0:
            raise ValueError("exploration constant must be >= 0")
        if config.representation not in trees.REPRESENTATIONS:
            raise ValueError(f"unknown representation: {config.representation!r}")
        if sum(inst.expansion_limits) < inst.budget:
            raise ValueError(
                "infeasible budget: expansion limits sum below the budget"
            )
        self.inst = inst
        self.config = config
        self.rng = Random(config.seed)
        if config.ordering == "random":
            perm_seed = self.rng.randrange(2**32)
            self.ordering = trees.make_ordering(inst, "random", perm_seed)
        else:
            self.ordering = trees.make_ordering(inst, config.ordering)
        self.kernel = trees._kernel_for(inst, self.ordering, config.representation)
        self.perm = self.ordering.permutation
        self.nodes: dict[tuple[int, ...], SearchNode] = {}
        self.cache: dict[tuple[int, ...], int] = {}
        self.da_evaluations = 0
        self.round_log: list[tuple[tuple[int, ...], float]] = []

        zero = (0,) * inst.total_hospitals
        self.best_cost = math.inf
        self.best_extras = zero
        self.baseline_cost = self._evaluate(zero)

    def _evaluate(self, extras: tuple[int, ...]) -> int:
        """Cached deferred-acceptance cost; fresh runs update the incumbent."""
        cost = self.cache.get(extras)
        if cost is None:
            cost = da.expansion_cost(self.inst, extras)
            self.cache[extras] = cost
            self.da_evaluations += 1
            if cost < self.best_cost:
                self.best_cost = cost
                self.best_extras = extras
        return cost

    def _extras_of(self, state) -> tuple[int, ...]:
        ordered = self.kernel.expansion_ordered(state)
        extras = [0] * len(self.perm)
        for pos, seats in enumerate(ordered):
            extras[self.perm[pos]] = seats
        return tuple(extras)

    def _labels_of(self, state, record: SearchNode | None) -> list[int]:
        if record is not None:
            if record.child_labels is None:
                record.child_labels = self.kernel.child_labels(state)
            return record.child_labels
        return self.kernel.child_labels(state)

    def _is_evaluated(self, key) -> bool:
        record = self.nodes.get(key)
        return record is not None and record.evaluated

    def _mark_upward(self, chain: list[tuple[tuple[int, ...], list[int]]]) -> None:
        """Mark the chain's leaf evaluated, then complete ancestors bottom-up."""
        leaf_key = chain[-1][0]
        record = self.nodes.get(leaf_key)
        if record is None:
            record = SearchNode()
            self.nodes[leaf_key] = record
        record.evaluated = True
        for key, labels in reversed(chain[:-1]):
            if not all(self._is_evaluated(key + (lab,)) for lab in labels):
                break
            record = self.nodes.get(key)
            if record is None:
                record = SearchNode()
                self.nodes[key] = record
            record.evaluated = True

    def run(self) -> SearchResult:
        inst = self.inst
        cp = self.config.exploration
        trajectory: list[tuple[int, int, int]] = []
        exhausted = False

        root = SearchNode()
        root.in_tree = True
        self.nodes[()] = root
        root_state = self.kernel.root()

        if self.kernel.is_leaf(root_state):
            # the whole space is the zero vector (budget 0)
            root.evaluated = True
            trajectory.append((1, self.best_cost, self.da_evaluations))
            return self._result(trajectory, True)

        started = time.perf_counter()
        for n in range(1, self.config.rounds + 1):
            if root.evaluated:
                exhausted = True
                break
            if (
                self.config.time_limit is not None
                and time.perf_counter() - started >= self.config.time_limit
            ):
                break

            # Selection: descend by max UCB among non-evaluated children
            # until stepping outside the current tree.
            key: tuple[int, ...] = ()
            state = root_state
            selected: list[SearchNode] = [root]
            chain: list[tuple[tuple[int, ...], list[int]]] = []
            developed: SearchNode
            while True:
                record = self.nodes[key]
                labels = self._labels_of(state, record)
                chain.append((key, labels))
                fresh: list[int] = []
                seen: list[tuple[int, SearchNode]] = []
                for lab in labels:
                    child = self.nodes.get(key + (lab,))
                    if child is None:
                        fresh.append(lab)
                    elif not child.evaluated:
                        seen.append((lab, child))
                if not fresh and not seen:
                    raise AssertionError(
                        "non-evaluated node with only evaluated children"
                    )
                if fresh:
                    lab = self.rng.choice(fresh)
                    key = key + (lab,)
                    state = self.kernel.step(state, lab)
                    developed = SearchNode()
                    developed.in_tree = True
                    self.nodes[key] = developed
                    selected.append(developed)
                    break
                best_value = -math.inf
                ties: list[tuple[int, SearchNode]] = []
                log_parent = math.log(record.visits)
                for lab, child in seen:
                    u = child.value_sum / child.visits + cp * math.sqrt(
                        log_parent / child.visits
                    )
                    if u > best_value:
                        best_value = u
                        ties = [(lab, child)]
                    elif u == best_value:
                        ties.append((lab, child))
                lab, child = self.rng.choice(ties)
                key = key + (lab,)
                state = self.kernel.step(state, lab)
                selected.append(child)
            developed_key = key

            # Simulation: uniform random descent through non-evaluated
            # children down to a leaf of the full tree.
            labels = self._labels_of(state, developed)
            while labels:
                chain.append((key, labels))
                open_labels = [
                    lab for lab in labels if not self._is_evaluated(key + (lab,))
                ]
                lab = self.rng.choice(open_labels)
                key = key + (lab,)
                state = self.kernel.step(state, lab)
                labels = self.kernel.child_labels(state)
            chain.append((key, []))

            cost = self._evaluate(self._extras_of(state))
            self._mark_upward(chain)

            # Backpropagation along the selected path only.
            value = reward(cost, self.baseline_cost)
            for record in selected:
                record.value_sum += value
                record.visits += 1
            self.round_log.append((developed_key, value))
            trajectory.append((n, self.best_cost, self.da_evaluations))
            if root.evaluated:
                exhausted = True
                break

        return self._result(trajectory, exhausted)

    def _result(self, trajectory, exhausted: bool) -> SearchResult:
        best = ExpansionVector(self.best_extras)
        return SearchResult(
            best_expansion=best,
            best_cost=self.best_cost,
            best_matching=da.run_da(self.inst, best),
            trajectory=trajectory,
            terminated_exhaustively=exhausted,
        )


def search(inst: MatchingInstance, config: SearchConfig) -> SearchResult:
    """Run the tree search and report the incumbent plus its trajectory.

    Deterministic for a fixed (instance, config): every stochastic choice
    (random ordering draw, selection tie-breaks, rollout steps) comes from
    one generator seeded with ``config.seed``, consumed in that order.
    """
    return _Engine(inst, config).run()
