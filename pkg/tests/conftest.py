from __future__ import annotations

from random import Random

import pytest

from stable_expand import (
    ExpansionVector,
    MatchingInstance,
    expansion_cost,
    generate_set1,
    generate_set2,
)


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    # trigger the one-off JIT compile before any timed test
    inst = MatchingInstance(
        2, 2, ((0, 1), (0, 1)), ((0, 1), (0, 1)), (1, 1), (1, 1), 1
    )
    expansion_cost(inst, (0, 0))


@pytest.fixture
def i2() -> MatchingInstance:
    """Two residents, two hospitals, everyone agrees h0 > h1 and d0 > d1."""
    return MatchingInstance(
        num_residents=2,
        num_hospitals=2,
        resident_prefs=((0, 1), (0, 1)),
        hospital_prefs=((0, 1), (0, 1)),
        quotas=(1, 1),
        expansion_limits=(1, 1),
        budget=1,
    )


def random_instance(rng: Random, max_d: int = 40, max_h: int = 6) -> MatchingInstance:
    h = rng.randint(1, max_h)
    d = rng.randint(h, max_d)
    alpha = rng.choice([0.0, 0.2, 0.5, 1.0])
    if h == 1 or rng.random() < 0.5:
        b = rng.randint(0, 6)
        return generate_set1(d, h, b, alpha, rng.randrange(2**31))
    b = rng.randint(2, 6)
    return generate_set2(d, h, b, alpha, rng.randrange(2**31))


def random_theta_point(rng: Random, inst: MatchingInstance) -> ExpansionVector:
    extras = [rng.randint(0, b) for b in inst.expansion_limits]
    over = sum(extras) - inst.budget
    while over > 0:
        h = rng.choice([i for i, x in enumerate(extras) if x > 0])
        extras[h] -= 1
        over -= 1
    return ExpansionVector(tuple(extras))
