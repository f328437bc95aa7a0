from __future__ import annotations

from random import Random

import pytest

from stable_expand import (
    ExpansionVector,
    Matching,
    enumerate_stable_matchings,
    find_blocking_pairs,
    per_resident_ranks,
    run_da,
    total_cost,
)
from stable_expand.datagen import generate_set1

from conftest import random_instance, random_theta_point


def test_da_no_expansion(i2):
    m = run_da(i2, ExpansionVector((0, 0)))
    # d1's proposal to h0 is rejected in favour of d0
    assert m.assignment == (0, 1)
    assert m.rosters == ((0,), (1,))
    assert total_cost(i2, m) == 3


def test_da_one_extra_seat(i2):
    m = run_da(i2, ExpansionVector((1, 0)))
    assert m.assignment == (0, 0)
    assert total_cost(i2, m) == 2


def test_da_rejects_infeasible_expansion(i2):
    with pytest.raises(ValueError, match="limits or the budget"):
        run_da(i2, ExpansionVector((2, 0)))
    with pytest.raises(ValueError, match="length"):
        run_da(i2, ExpansionVector((1, 0, 0)))


def test_everyone_assigned_with_enough_seats():
    rng = Random(1)
    for _ in range(10):
        inst = generate_set1(rng.randint(3, 30), rng.randint(1, 5), 2, 0.3, rng.randrange(10**6))
        m = run_da(inst, ExpansionVector.zero(inst.total_hospitals))
        assert all(h >= 0 for h in m.assignment)


def test_total_cost_of_empty_matching(i2):
    assert total_cost(i2, Matching.empty(2, 2)) == 6


def test_per_resident_ranks(i2):
    assert per_resident_ranks(i2, run_da(i2, ExpansionVector((0, 0)))) == [1, 2]
    assert per_resident_ranks(i2, run_da(i2, ExpansionVector((1, 0)))) == [1, 1]
    assert per_resident_ranks(i2, Matching.empty(2, 2)) == [3, 3]


def test_da_output_is_stable(i2):
    t = ExpansionVector((0, 0))
    report = find_blocking_pairs(i2, t, run_da(i2, t))
    assert report.stable and report.blocking_pairs == ()


def test_blocking_pair_on_swapped_matching(i2):
    swapped = Matching.from_assignment((1, 0), 2)
    report = find_blocking_pairs(i2, ExpansionVector((0, 0)), swapped)
    assert report.blocking_pairs == ((0, 0),)
    assert not report.stable


def test_blocking_pairs_with_unassigned_resident(i2):
    partial = Matching.from_assignment((0, -1), 2)
    report = find_blocking_pairs(i2, ExpansionVector((1, 0)), partial)
    # d1 blocks with the under-capacity h0 and with the empty h1
    assert (1, 0) in report.blocking_pairs
    assert set(report.blocking_pairs) == {(1, 0), (1, 1)}


def test_stability_on_random_instances():
    rng = Random(20)
    for _ in range(30):
        inst = random_instance(rng)
        for _ in range(3):
            t = random_theta_point(rng, inst)
            assert find_blocking_pairs(inst, t, run_da(inst, t)).stable


def test_da_minimizes_cost_among_stable_matchings():
    rng = Random(21)
    for _ in range(25):
        h = rng.randint(1, 3)
        d = rng.randint(h, 6)
        inst = generate_set1(d, h, rng.randint(0, 3), rng.random(), rng.randrange(10**6))
        t = random_theta_point(rng, inst)
        stable = enumerate_stable_matchings(inst, t)
        da_matching = run_da(inst, t)
        assert da_matching in stable
        assert total_cost(inst, da_matching) == min(total_cost(inst, m) for m in stable)


def test_welfare_weakly_improves_with_more_seats():
    rng = Random(22)
    for _ in range(30):
        inst = random_instance(rng, max_d=25, max_h=5)
        t_big = random_theta_point(rng, inst)
        t_small = ExpansionVector(tuple(rng.randint(0, x) for x in t_big.extras))
        small_ranks = per_resident_ranks(inst, run_da(inst, t_small))
        big_ranks = per_resident_ranks(inst, run_da(inst, t_big))
        assert all(b <= s for b, s in zip(big_ranks, small_ranks))
        assert total_cost(inst, run_da(inst, t_big)) <= total_cost(
            inst, run_da(inst, t_small)
        )


def test_da_is_deterministic():
    rng = Random(23)
    inst = random_instance(rng)
    t = random_theta_point(rng, inst)
    assert run_da(inst, t) == run_da(inst, t)
