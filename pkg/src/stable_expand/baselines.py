"""Greedy and flow-based baselines plus exact brute-force oracles.

The greedy baseline spends the budget one seat at a time, always at the
hospital whose extra seat lowers the deferred-acceptance cost most.  The
flow heuristic drops the stability constraints, routes all residents by
minimum-cost flow through base plus pooled budget seats, reads the
expansion off the budget arcs, and reruns deferred acceptance with it.

``brute_force_optimal`` and ``enumerate_stable_matchings`` are exhaustive
reference solvers for verification at desk scale.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from . import da
from .instance import ExpansionVector, Matching, MatchingInstance
from .trees import count_expansions

__all__ = [
    "FlowNetwork",
    "InfeasibleFlowError",
    "min_cost_flow",
    "greedy_expansion",
    "flow_relaxation",
    "lp_heuristic",
    "enumerate_theta",
    "brute_force_optimal",
    "enumerate_stable_matchings",
]

THETA_GUARD = 10**7


class InfeasibleFlowError(Exception):
    """The requested flow value cannot be routed."""


@dataclass(frozen=True)
class Arc:
    src: int
    dst: int
    capacity: int
    cost: int


class FlowNetwork:
    """Directed network with integer capacities and unit costs."""

    def __init__(self, num_nodes: int, source: int, sink: int):
        if not (0 <= source < num_nodes and 0 <= sink < num_nodes):
            raise ValueError("source/sink out of range")
        self.num_nodes = num_nodes
        self.source = source
        self.sink = sink
        self.arcs: list[Arc] = []

    def add_arc(self, src: int, dst: int, capacity: int, cost: int) -> int:
        if capacity < 0:
            raise ValueError("arc capacity must be non-negative")
        self.arcs.append(Arc(src, dst, capacity, cost))
        return len(self.arcs) - 1


class ResidualGraph:
    """Paired forward/backward arc lists backing the flow solver."""

    def __init__(self, net: FlowNetwork):
        self.net = net
        n = net.num_nodes
        self.adj: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []
        self.cost: list[int] = []
        for arc in net.arcs:
            self._add(arc.src, arc.dst, arc.capacity, arc.cost)

    def _add(self, u: int, v: int, capacity: int, cost: int) -> None:
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(capacity)
        self.cost.append(cost)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)
        self.cost.append(-cost)

    def flows(self) -> list[int]:
        """Flow on each original arc (capacity consumed so far)."""
        return [
            self.net.arcs[i].capacity - self.cap[2 * i]
            for i in range(len(self.net.arcs))
        ]


def min_cost_flow(
    net: FlowNetwork, required_flow: int
) -> tuple[list[int], int]:
    """Integral min-cost flow of the required value.

    Successive shortest augmenting paths with node potentials; Dijkstra on
    reduced costs after a one-off Bellman-Ford pass that absorbs any
    negative arc costs.  Raises InfeasibleFlowError when the value cannot
    be met.
    """
    graph = ResidualGraph(net)
    n = net.num_nodes
    source, sink = net.source, net.sink
    inf = float("inf")

    potential = [0] * n
    if any(arc.cost < 0 for arc in net.arcs):
        dist = [inf] * n
        dist[source] = 0
        for _ in range(n - 1):
            changed = False
            for u in range(n):
                if dist[u] == inf:
                    continue
                for e in graph.adj[u]:
                    if graph.cap[e] > 0 and dist[u] + graph.cost[e] < dist[graph.to[e]]:
                        dist[graph.to[e]] = dist[u] + graph.cost[e]
                        changed = True
            if not changed:
                break
        potential = [0 if d == inf else d for d in dist]

    sent = 0
    total_cost = 0
    while sent < required_flow:
        dist = [inf] * n
        dist[source] = 0
        parent_edge = [-1] * n
        heap = [(0, source)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for e in graph.adj[u]:
                if graph.cap[e] <= 0:
                    continue
                v = graph.to[e]
                nd = d + graph.cost[e] + potential[u] - potential[v]
                if nd < dist[v]:
                    dist[v] = nd
                    parent_edge[v] = e
                    heapq.heappush(heap, (nd, v))
        if dist[sink] == inf:
            raise InfeasibleFlowError(
                f"only {sent} of {required_flow} units can be routed"
            )
        for v in range(n):
            if dist[v] < inf:
                potential[v] += dist[v]
        bottleneck = required_flow - sent
        v = sink
        while v != source:
            e = parent_edge[v]
            bottleneck = min(bottleneck, graph.cap[e])
            v = graph.to[e ^ 1]
        v = sink
        while v != source:
            e = parent_edge[v]
            graph.cap[e] -= bottleneck
            graph.cap[e ^ 1] += bottleneck
            v = graph.to[e ^ 1]
        sent += bottleneck
        total_cost += bottleneck * (potential[sink] - potential[source])
    return graph.flows(), total_cost


def greedy_expansion(
    inst: MatchingInstance,
) -> tuple[ExpansionVector, Matching, int]:
    """Spend the budget seat by seat, each time where it cuts cost most.

    Ties go to the smaller hospital id and every seat is spent even when no
    improvement remains, so the returned vector always sums to the budget.
    """
    if sum(inst.expansion_limits) < inst.budget:
        raise ValueError("infeasible budget: expansion limits sum below the budget")
    h_count = inst.total_hospitals
    extras = [0] * h_count
    for _ in range(inst.budget):
        best_h = -1
        best_cost = None
        for h in range(h_count):
            if extras[h] >= inst.expansion_limits[h]:
                continue
            extras[h] += 1
            cost = da.expansion_cost(inst, tuple(extras))
            extras[h] -= 1
            if best_cost is None or cost < best_cost:
                best_cost = cost
                best_h = h
        extras[best_h] += 1
    t = ExpansionVector(tuple(extras))
    matching = da.run_da(inst, t)
    return t, matching, da.total_cost(inst, matching)


def _build_lph_network(inst: MatchingInstance) -> tuple[FlowNetwork, list[int]]:
    """Source -> residents -> applied hospitals -> sink, with a shared
    budget pool behind every hospital's expansion arc."""
    d_count = inst.num_residents
    h_count = inst.total_hospitals
    source = 0
    hospital0 = 1 + d_count
    pool = hospital0 + h_count
    sink = pool + 1
    net = FlowNetwork(sink + 1, source, sink)
    for d in range(d_count):
        net.add_arc(source, 1 + d, 1, 0)
    for d, prefs in enumerate(inst.resident_prefs):
        for rank0, h in enumerate(prefs):
            net.add_arc(1 + d, hospital0 + h, 1, rank0 + 1)
    budget_arcs = []
    for h in range(h_count):
        net.add_arc(hospital0 + h, sink, inst.quotas[h], 0)
        budget_arcs.append(net.add_arc(hospital0 + h, pool, inst.expansion_limits[h], 0))
    net.add_arc(pool, sink, inst.budget, 0)
    return net, budget_arcs


def flow_relaxation(inst: MatchingInstance) -> tuple[ExpansionVector, int]:
    """Stability-free optimum: route everyone at min cost, read off the
    expansion used.  The returned cost lower-bounds any stable outcome that
    assigns all residents."""
    net, budget_arcs = _build_lph_network(inst)
    flows, flow_cost = min_cost_flow(net, inst.num_residents)
    extras = tuple(flows[a] for a in budget_arcs)
    return ExpansionVector(extras), flow_cost


def lp_heuristic(
    inst: MatchingInstance,
) -> tuple[ExpansionVector, Matching, int]:
    """Fix the expansion by min-cost flow, then restore stability with
    deferred acceptance."""
    if sum(inst.expansion_limits) < inst.budget:
        raise ValueError("infeasible budget: expansion limits sum below the budget")
    t, _ = flow_relaxation(inst)
    matching = da.run_da(inst, t)
    return t, matching, da.total_cost(inst, matching)


def enumerate_theta(inst: MatchingInstance) -> list[ExpansionVector]:
    """All feasible expansions in lexicographic order (guarded)."""
    if count_expansions(inst) > THETA_GUARD:
        raise ValueError(f"expansion space exceeds the {THETA_GUARD} guard")
    limits = inst.expansion_limits
    h_count = inst.total_hospitals
    out: list[ExpansionVector] = []
    current = [0] * h_count

    def fill(pos: int, remaining: int):
        if pos == h_count:
            out.append(ExpansionVector(tuple(current)))
            return
        for x in range(min(limits[pos], remaining) + 1):
            current[pos] = x
            fill(pos + 1, remaining - x)
        current[pos] = 0

    fill(0, inst.budget)
    return out


def brute_force_optimal(inst: MatchingInstance) -> tuple[ExpansionVector, int]:
    """Exact optimum by trying every feasible expansion (ties: lexicographic)."""
    best_t = None
    best_cost = None
    for t in enumerate_theta(inst):
        cost = da.expansion_cost(inst, t.extras)
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best_t = t
    assert best_t is not None and best_cost is not None
    return best_t, best_cost


def enumerate_stable_matchings(
    inst: MatchingInstance, t: ExpansionVector
) -> list[Matching]:
    """Every stable matching under quotas + t, by filtered enumeration.

    Exponential; guarded to tiny instances.  Used to certify that deferred
    acceptance returns the cost-minimal stable matching.
    """
    if inst.num_residents > 6 or inst.total_hospitals > 3:
        raise ValueError("guarded to instances with at most 6 residents, 3 hospitals")
    if not inst.is_feasible_expansion(t):
        raise ValueError("expansion violates the limits or the budget")
    caps = [q + x for q, x in zip(inst.quotas, t.extras)]
    d_count = inst.num_residents
    load = [0] * inst.total_hospitals
    assignment = [-1] * d_count
    stable: list[Matching] = []

    def assign(d: int):
        if d == d_count:
            m = Matching.from_assignment(tuple(assignment), inst.total_hospitals)
            if da.find_blocking_pairs(inst, t, m).stable:
                stable.append(m)
            return
        assign(d + 1)  # leave d unassigned
        for h in inst.resident_prefs[d]:
            if load[h] < caps[h]:
                assignment[d] = h
                load[h] += 1
                assign(d + 1)
                load[h] -= 1
                assignment[d] = -1

    assign(0)
    return stable
