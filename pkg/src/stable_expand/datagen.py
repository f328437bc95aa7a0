"""Synthetic instance generators.

Two complete-preference families share one recipe: quotas are a uniform
composition of the resident count, hospital lists are independent uniform
permutations, and each resident ranks hospitals by a blend of a private and
a shared uniform score vector (the blend weight controls preference
correlation).  The first family leaves every hospital's expansion limit at
the full budget; the second draws per-hospital limits.  A third generator
produces short application lists plus an absorbing dummy hospital, shaped
like real residency-program data.

All generators are pure functions of their parameters and seed.
"""

from __future__ import annotations

from random import Random

from .instance import MatchingInstance, complete_with_dummy, validate

__all__ = ["generate_set1", "generate_set2", "generate_partial"]

_REJECTION_LIMIT = 10**5


def _composition(rng: Random, total: int, parts: int) -> list[int]:
    """Uniform random composition of ``total`` into ``parts`` positive parts."""
    if parts > total:
        raise ValueError(f"cannot split {total} into {parts} positive parts")
    if parts == 1:
        return [total]
    cuts = sorted(rng.sample(range(1, total), parts - 1))
    bounds = [0] + cuts + [total]
    return [bounds[i + 1] - bounds[i] for i in range(parts)]


def _blended_prefs(
    rng: Random, num_residents: int, num_hospitals: int, alpha: float
) -> list[tuple[int, ...]]:
    common = [rng.random() for _ in range(num_hospitals)]
    prefs = []
    for _ in range(num_residents):
        own = [rng.random() for _ in range(num_hospitals)]
        score = [(1.0 - alpha) * own[h] + alpha * common[h] for h in range(num_hospitals)]
        # higher blended score = more preferred; ties to the smaller id
        order = sorted(range(num_hospitals), key=lambda h: (-score[h], h))
        prefs.append(tuple(order))
    return prefs


def _check_params(num_residents: int, num_hospitals: int, budget: int, alpha: float):
    if num_hospitals < 1 or num_residents < num_hospitals:
        raise ValueError("need at least one hospital and residents >= hospitals")
    if budget < 0:
        raise ValueError("budget must be non-negative")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha out of range [0, 1]")


def _base_instance(
    rng: Random,
    num_residents: int,
    num_hospitals: int,
    budget: int,
    alpha: float,
    limits: tuple[int, ...],
    seed: int,
) -> MatchingInstance:
    quotas = tuple(_composition(rng, num_residents, num_hospitals))
    hospital_prefs = tuple(
        tuple(rng.sample(range(num_residents), num_residents))
        for _ in range(num_hospitals)
    )
    resident_prefs = tuple(_blended_prefs(rng, num_residents, num_hospitals, alpha))
    inst = MatchingInstance(
        num_residents=num_residents,
        num_hospitals=num_hospitals,
        resident_prefs=resident_prefs,
        hospital_prefs=hospital_prefs,
        quotas=quotas,
        expansion_limits=limits,
        budget=budget,
        seed=seed,
    )
    violations = validate(inst)
    assert not violations, violations
    return inst


def generate_set1(
    num_residents: int, num_hospitals: int, budget: int, alpha: float, seed: int
) -> MatchingInstance:
    """Complete-preference instance with unconstrained per-hospital limits
    (every hospital may absorb the whole budget)."""
    _check_params(num_residents, num_hospitals, budget, alpha)
    rng = Random(seed)
    return _base_instance(
        rng,
        num_residents,
        num_hospitals,
        budget,
        alpha,
        (budget,) * num_hospitals,
        seed,
    )


def generate_set2(
    num_residents: int, num_hospitals: int, budget: int, alpha: float, seed: int
) -> MatchingInstance:
    """Like the first family, plus per-hospital expansion limits drawn
    uniformly below the budget and rejection-sampled until their sum lands
    in [budget, budget * num_hospitals)."""
    _check_params(num_residents, num_hospitals, budget, alpha)
    if budget < 2:
        raise ValueError("per-hospital limits below the budget need budget >= 2")
    rng = Random(seed)
    for _ in range(_REJECTION_LIMIT):
        limits = tuple(rng.randrange(budget) for _ in range(num_hospitals))
        if budget <= sum(limits) < budget * num_hospitals:
            return _base_instance(
                rng, num_residents, num_hospitals, budget, alpha, limits, seed
            )
    raise ValueError(
        "could not draw feasible expansion limits; parameters look infeasible"
    )


def generate_partial(
    num_residents: int,
    num_hospitals: int,
    applications_per_resident: int,
    capacities,
    budget: int,
    seed: int,
) -> MatchingInstance:
    """Short-application-list instance completed with a dummy hospital.

    ``capacities[h]`` is the total admissions hospital h could take; it is
    split into a base quota (proportional share of the residents, summing
    exactly to the resident count, at least one each) plus the remainder as
    the expansion limit.
    """
    capacities = tuple(int(a) for a in capacities)
    if len(capacities) != num_hospitals:
        raise ValueError("capacities length must equal num_hospitals")
    if not 1 <= applications_per_resident <= num_hospitals:
        raise ValueError("applications_per_resident out of range")
    if num_residents < num_hospitals:
        raise ValueError("need residents >= hospitals to give each a quota")
    if budget < 0:
        raise ValueError("budget must be non-negative")
    total_cap = sum(capacities)
    if total_cap < num_residents:
        raise ValueError("capacities sum below the resident count")

    # largest-remainder split of D seats, keeping every quota >= 1
    shares = [a * num_residents / total_cap for a in capacities]
    quotas = [max(1, int(s)) for s in shares]
    remainders = sorted(
        range(num_hospitals), key=lambda h: (-(shares[h] - int(shares[h])), h)
    )
    idx = 0
    while sum(quotas) < num_residents:
        h = remainders[idx % num_hospitals]
        if quotas[h] < capacities[h]:
            quotas[h] += 1
        idx += 1
    while sum(quotas) > num_residents:
        h = max(range(num_hospitals), key=lambda i: (quotas[i], -i))
        if quotas[h] <= 1:
            raise ValueError("cannot keep all quotas positive at this size")
        quotas[h] -= 1
    limits = [a - q for a, q in zip(capacities, quotas)]
    if any(b < 0 for b in limits):
        raise ValueError("capacities too small for a proportional quota split")

    rng = Random(seed)
    resident_prefs = []
    for _ in range(num_residents):
        applied = rng.sample(range(num_hospitals), applications_per_resident)
        resident_prefs.append(tuple(applied))
    hospital_prefs = tuple(
        tuple(rng.sample(range(num_residents), num_residents))
        for _ in range(num_hospitals)
    )
    inst = MatchingInstance(
        num_residents=num_residents,
        num_hospitals=num_hospitals,
        resident_prefs=tuple(resident_prefs),
        hospital_prefs=hospital_prefs,
        quotas=tuple(quotas),
        expansion_limits=tuple(limits),
        budget=budget,
        seed=seed,
    )
    inst = complete_with_dummy(inst)
    violations = validate(inst)
    if violations:
        raise ValueError(f"generated instance is invalid: {violations}")
    return inst
