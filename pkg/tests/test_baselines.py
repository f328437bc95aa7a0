from __future__ import annotations

import itertools
from random import Random

import pytest

from stable_expand import (
    ExpansionVector,
    FlowNetwork,
    InfeasibleFlowError,
    brute_force_optimal,
    enumerate_stable_matchings,
    enumerate_theta,
    expansion_cost,
    flow_relaxation,
    greedy_expansion,
    lp_heuristic,
    min_cost_flow,
    run_da,
    total_cost,
)
from stable_expand.datagen import generate_set1

from conftest import random_instance


# ---------------------------------------------------------------- flow


def parallel_net():
    net = FlowNetwork(2, 0, 1)
    net.add_arc(0, 1, 1, 5)
    net.add_arc(0, 1, 1, 7)
    return net


def test_flow_forced_to_use_both_arcs():
    flows, cost = min_cost_flow(parallel_net(), 2)
    assert flows == [1, 1] and cost == 12


def test_flow_prefers_cheaper_arc():
    flows, cost = min_cost_flow(parallel_net(), 1)
    assert flows == [1, 0] and cost == 5


def test_flow_infeasible_value():
    with pytest.raises(InfeasibleFlowError):
        min_cost_flow(parallel_net(), 3)


def test_flow_zero_value():
    flows, cost = min_cost_flow(parallel_net(), 0)
    assert flows == [0, 0] and cost == 0


def brute_force_flow(net, value):
    """Minimum cost over every integral arc-flow vector (tiny nets only)."""
    best = None
    ranges = [range(arc.capacity + 1) for arc in net.arcs]
    for combo in itertools.product(*ranges):
        balance = [0] * net.num_nodes
        for arc, f in zip(net.arcs, combo):
            balance[arc.src] -= f
            balance[arc.dst] += f
        ok = all(
            balance[v] == 0
            for v in range(net.num_nodes)
            if v not in (net.source, net.sink)
        )
        if ok and balance[net.sink] == value:
            cost = sum(arc.cost * f for arc, f in zip(net.arcs, combo))
            best = cost if best is None else min(best, cost)
    return best


def random_net(rng):
    n = rng.randint(3, 5)
    net = FlowNetwork(n, 0, n - 1)
    for _ in range(rng.randint(3, 7)):
        u, v = rng.sample(range(n), 2)
        net.add_arc(u, v, rng.randint(0, 2), rng.randint(0, 6))
    return net


def test_flow_matches_brute_force_on_random_networks():
    rng = Random(8)
    done = 0
    while done < 25:
        net = random_net(rng)
        for value in (1, 2):
            expected = brute_force_flow(net, value)
            if expected is None:
                with pytest.raises(InfeasibleFlowError):
                    min_cost_flow(net, value)
            else:
                _, cost = min_cost_flow(net, value)
                assert cost == expected
                done += 1


def residual_has_negative_cycle(net, flows):
    """Bellman-Ford negative-cycle detector over the residual network."""
    arcs = []
    for arc, f in zip(net.arcs, flows):
        if f < arc.capacity:
            arcs.append((arc.src, arc.dst, arc.cost))
        if f > 0:
            arcs.append((arc.dst, arc.src, -arc.cost))
    dist = [0] * net.num_nodes
    for _ in range(net.num_nodes - 1):
        changed = False
        for u, v, w in arcs:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
        if not changed:
            return False
    return any(dist[u] + w < dist[v] for u, v, w in arcs)


def test_flow_optimality_via_residual_cycles():
    rng = Random(9)
    done = 0
    while done < 20:
        net = random_net(rng)
        try:
            flows, _ = min_cost_flow(net, 2)
        except InfeasibleFlowError:
            continue
        assert not residual_has_negative_cycle(net, flows)
        done += 1


# ---------------------------------------------------------------- greedy


def test_greedy_on_i2(i2):
    t, matching, cost = greedy_expansion(i2)
    assert t.extras == (1, 0)
    assert cost == 2
    assert total_cost(i2, matching) == 2


def test_greedy_spends_the_whole_budget_even_without_gain():
    # a single hospital with room for everyone: extra seats change nothing
    inst = generate_set1(6, 1, 3, 0.0, 2)
    t, _, cost = greedy_expansion(inst)
    assert t.total == 3
    assert cost == expansion_cost(inst, (0,))


def test_greedy_tie_goes_to_smaller_hospital_id():
    inst = generate_set1(8, 4, 1, 1.0, 0)
    roomy = type(inst)(
        inst.num_residents,
        inst.num_hospitals,
        inst.resident_prefs,
        inst.hospital_prefs,
        (8, 8, 8, 8),  # nobody is ever rejected, every seat is cost-neutral
        inst.expansion_limits,
        inst.budget,
    )
    t, _, _ = greedy_expansion(roomy)
    assert t.extras == (1, 0, 0, 0)


def test_greedy_zero_budget(i2):
    inst = generate_set1(5, 2, 0, 0.0, 1)
    t, _, cost = greedy_expansion(inst)
    assert t.extras == (0, 0)
    assert cost == expansion_cost(inst, (0, 0))


def test_greedy_rejects_infeasible_budget(i2):
    bad = type(i2)(
        2, 2, i2.resident_prefs, i2.hospital_prefs, (1, 1), (0, 0), 1
    )
    with pytest.raises(ValueError, match="infeasible budget"):
        greedy_expansion(bad)


# ---------------------------------------------------------------- lph


def test_lph_on_i2(i2):
    t, matching, cost = lp_heuristic(i2)
    assert t.extras == (1, 0)
    assert cost == 2
    assert total_cost(i2, matching) == 2


def test_lph_flow_cost_lower_bounds_the_stable_optimum():
    rng = Random(31)
    for _ in range(15):
        inst = random_instance(rng, max_d=20, max_h=4)
        t, flow_cost = flow_relaxation(inst)
        assert inst.is_feasible_expansion(t)
        _, oracle_cost = brute_force_optimal(inst)
        assert flow_cost <= oracle_cost
        _, _, lph_cost = lp_heuristic(inst)
        assert lph_cost >= oracle_cost


def test_lph_when_everyone_already_gets_first_choice():
    inst = generate_set1(6, 2, 2, 0.0, 7)
    roomy = type(inst)(
        inst.num_residents,
        inst.num_hospitals,
        inst.resident_prefs,
        inst.hospital_prefs,
        (6, 6),
        inst.expansion_limits,
        inst.budget,
    )
    zero_cost = expansion_cost(roomy, (0, 0))
    assert zero_cost == roomy.num_residents
    _, _, cost = lp_heuristic(roomy)
    assert cost == zero_cost


def test_lph_infeasible_without_enough_capacity():
    inst = type(generate_set1(2, 1, 0, 0.0, 0))(
        2, 1, ((0,), (0,)), ((0, 1),), (1,), (0,), 0
    )
    with pytest.raises(InfeasibleFlowError):
        lp_heuristic(inst)


# ---------------------------------------------------------------- oracles


def test_enumerate_theta_i2(i2):
    assert [t.extras for t in enumerate_theta(i2)] == [(0, 0), (0, 1), (1, 0)]


def test_enumerate_theta_zero_budget():
    inst = generate_set1(5, 3, 0, 0.0, 4)
    assert [t.extras for t in enumerate_theta(inst)] == [(0, 0, 0)]


def test_enumerate_theta_count_and_order():
    inst = type(generate_set1(3, 3, 2, 0.0, 0))(
        3, 3, ((0, 1, 2),) * 3, (tuple(range(3)),) * 3, (1, 1, 1), (2, 2, 2), 2
    )
    vectors = [t.extras for t in enumerate_theta(inst)]
    assert len(vectors) == 10
    assert vectors == sorted(vectors)


def test_brute_force_on_i2(i2):
    assert brute_force_optimal(i2) == (ExpansionVector((1, 0)), 2)


def test_brute_force_zero_budget():
    inst = generate_set1(7, 3, 0, 0.2, 9)
    t, cost = brute_force_optimal(inst)
    assert t.extras == (0, 0, 0)
    assert cost == expansion_cost(inst, t.extras)


def test_oracle_never_beaten_by_heuristics():
    rng = Random(32)
    for _ in range(10):
        inst = random_instance(rng, max_d=18, max_h=4)
        _, oracle_cost = brute_force_optimal(inst)
        greedy_t, _, greedy_cost = greedy_expansion(inst)
        lph_t, _, lph_cost = lp_heuristic(inst)
        assert inst.is_feasible_expansion(greedy_t)
        assert inst.is_feasible_expansion(lph_t)
        assert greedy_cost >= oracle_cost
        assert lph_cost >= oracle_cost


def test_stable_enumeration_on_i2(i2):
    only = enumerate_stable_matchings(i2, ExpansionVector((0, 0)))
    assert [m.assignment for m in only] == [(0, 1)]

    widened = enumerate_stable_matchings(i2, ExpansionVector((1, 0)))
    assignments = [m.assignment for m in widened]
    assert (0, 0) in assignments
    assert min(total_cost(i2, m) for m in widened) == 2


def test_stable_enumeration_contains_da_output():
    rng = Random(33)
    for _ in range(10):
        h = rng.randint(1, 3)
        inst = generate_set1(rng.randint(h, 6), h, 1, 0.5, rng.randrange(10**6))
        t = ExpansionVector.zero(inst.total_hospitals)
        assert run_da(inst, t) in enumerate_stable_matchings(inst, t)


def test_stable_enumeration_guard():
    inst = generate_set1(12, 4, 1, 0.0, 0)
    with pytest.raises(ValueError, match="guard"):
        enumerate_stable_matchings(inst, ExpansionVector.zero(4))
