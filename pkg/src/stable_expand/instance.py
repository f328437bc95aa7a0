"""Problem instances for capacity-expandable hospital-resident matching.

An instance couples strict preferences on both sides with per-hospital base
quotas, per-hospital expansion limits, and a global budget of extra seats.
Instances are immutable after construction and safe to share across
concurrently running searches.

Conventions:
  * hospital and resident ids are 0-based in memory, 1-based in files/logs;
  * rank 1 is a resident's most preferred hospital, so smaller rank totals
    are better;
  * when ``dummy_hospital`` is set, the per-hospital arrays carry one extra
    trailing entry for the dummy and ``num_hospitals`` still counts only the
    real hospitals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "InstanceError",
    "InstanceParseError",
    "InstanceValidationError",
    "MatchingInstance",
    "ExpansionVector",
    "Matching",
    "validate",
    "load_instance",
    "save_instance",
    "complete_with_dummy",
]


class InstanceError(Exception):
    """Base class for instance-related failures."""


class InstanceParseError(InstanceError):
    """A document could not be parsed into an instance."""


class InstanceValidationError(InstanceError):
    """An instance violates one or more structural invariants."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


def _as_tuple2(rows) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in row) for row in rows)


@dataclass(frozen=True)
class MatchingInstance:
    """One matching market: residents, hospitals, preferences, capacities.

    ``resident_prefs[d]`` lists hospital ids most-preferred first and may be
    partial; ``hospital_prefs[h]`` must be a permutation of all residents.
    ``expansion_limits[h]`` caps the extra seats hospital h may receive and
    ``budget`` caps the total extra seats.
    """

    num_residents: int
    num_hospitals: int
    resident_prefs: tuple[tuple[int, ...], ...]
    hospital_prefs: tuple[tuple[int, ...], ...]
    quotas: tuple[int, ...]
    expansion_limits: tuple[int, ...]
    budget: int
    dummy_hospital: bool = False
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "resident_prefs", _as_tuple2(self.resident_prefs))
        object.__setattr__(self, "hospital_prefs", _as_tuple2(self.hospital_prefs))
        object.__setattr__(self, "quotas", tuple(int(q) for q in self.quotas))
        object.__setattr__(
            self, "expansion_limits", tuple(int(b) for b in self.expansion_limits)
        )
        object.__setattr__(self, "num_residents", int(self.num_residents))
        object.__setattr__(self, "num_hospitals", int(self.num_hospitals))
        object.__setattr__(self, "budget", int(self.budget))

    @property
    def total_hospitals(self) -> int:
        """Hospital count including the dummy, if present."""
        return self.num_hospitals + (1 if self.dummy_hospital else 0)

    @property
    def dummy_id(self) -> int | None:
        return self.num_hospitals if self.dummy_hospital else None

    @property
    def unassigned_cost(self) -> int:
        """Rank charged for an unassigned resident: one worse than any hospital."""
        return self.total_hospitals + 1

    def resident_rank(self, d: int, h: int) -> int | None:
        """1-based rank of hospital h for resident d, or None if not applied."""
        r = int(self.arrays.rank_of[d, h])
        return r if r > 0 else None

    def is_feasible_expansion(self, t: "ExpansionVector") -> bool:
        """Whether t respects the per-hospital limits and the budget."""
        if len(t.extras) != self.total_hospitals:
            return False
        if any(x < 0 or x > b for x, b in zip(t.extras, self.expansion_limits)):
            return False
        return sum(t.extras) <= self.budget

    @property
    def arrays(self) -> "_InstanceArrays":
        """Numeric views used by the solvers.

        Built lazily after validation can have run (invalid ids would not
        index), then reused.  A concurrent first touch at worst builds the
        tables twice; they are equal and the instance stays logically
        immutable.
        """
        cached = self.__dict__.get("_arrays")
        if cached is None:
            cached = _InstanceArrays(self)
            object.__setattr__(self, "_arrays", cached)
        return cached


class _InstanceArrays:
    """Dense integer tables derived from an instance (assumed valid)."""

    def __init__(self, inst: MatchingInstance):
        d_count = inst.num_residents
        h_count = inst.total_hospitals
        max_len = max(len(p) for p in inst.resident_prefs)
        self.prefs = np.full((d_count, max_len), -1, dtype=np.int64)
        self.pref_len = np.zeros(d_count, dtype=np.int64)
        # rank_of[d, h]: 1-based rank, 0 when d did not apply to h
        self.rank_of = np.zeros((d_count, h_count), dtype=np.int64)
        for d, prefs in enumerate(inst.resident_prefs):
            self.pref_len[d] = len(prefs)
            for r, h in enumerate(prefs):
                self.prefs[d, r] = h
                self.rank_of[d, h] = r + 1
        self.hosp_pref = np.array(inst.hospital_prefs, dtype=np.int64)
        self.hosp_rank = np.empty((h_count, d_count), dtype=np.int64)
        for h in range(h_count):
            self.hosp_rank[h, self.hosp_pref[h]] = np.arange(d_count)
        self.quotas = np.array(inst.quotas, dtype=np.int64)
        self.limits = np.array(inst.expansion_limits, dtype=np.int64)
        self.resident_index = np.arange(d_count)


@dataclass(frozen=True)
class ExpansionVector:
    """Per-hospital extra seats; the decision variable of the search."""

    extras: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "extras", tuple(int(x) for x in self.extras))

    @classmethod
    def zero(cls, num_hospitals: int) -> "ExpansionVector":
        return cls((0,) * num_hospitals)

    @property
    def total(self) -> int:
        return sum(self.extras)


@dataclass(frozen=True)
class Matching:
    """An assignment: hospital per resident (-1 = unassigned) plus rosters."""

    assignment: tuple[int, ...]
    rosters: tuple[tuple[int, ...], ...]

    @classmethod
    def from_assignment(cls, assignment, num_hospitals: int) -> "Matching":
        assignment = tuple(int(h) for h in assignment)
        rosters: list[list[int]] = [[] for _ in range(num_hospitals)]
        for d, h in enumerate(assignment):
            if h >= 0:
                rosters[h].append(d)
        return cls(assignment, tuple(tuple(r) for r in rosters))

    @classmethod
    def empty(cls, num_residents: int, num_hospitals: int) -> "Matching":
        return cls((-1,) * num_residents, ((),) * num_hospitals)

    def is_consistent_with(self, inst: MatchingInstance) -> bool:
        """Assignment/roster agreement plus applicability of every match."""
        if len(self.assignment) != inst.num_residents:
            return False
        if len(self.rosters) != inst.total_hospitals:
            return False
        for h, roster in enumerate(self.rosters):
            for d in roster:
                if self.assignment[d] != h:
                    return False
        for d, h in enumerate(self.assignment):
            if h < 0:
                continue
            if h >= inst.total_hospitals or d not in self.rosters[h]:
                return False
            if inst.resident_rank(d, h) is None:
                return False
        return True


def validate(inst: MatchingInstance) -> list[str]:
    """Check every structural invariant; return the violations (empty = valid)."""
    bad: list[str] = []
    d_count = inst.num_residents
    h_count = inst.total_hospitals
    if d_count <= 0:
        bad.append("num_residents must be positive")
    if inst.num_hospitals <= 0:
        bad.append("num_hospitals must be positive")
    if len(inst.quotas) != h_count:
        bad.append(f"quotas has length {len(inst.quotas)}, expected {h_count}")
    if len(inst.expansion_limits) != h_count:
        bad.append(
            f"expansion_limits has length {len(inst.expansion_limits)}, "
            f"expected {h_count}"
        )
    if len(inst.resident_prefs) != d_count:
        bad.append(
            f"resident_prefs has length {len(inst.resident_prefs)}, expected {d_count}"
        )
    if len(inst.hospital_prefs) != h_count:
        bad.append(
            f"hospital_prefs has length {len(inst.hospital_prefs)}, expected {h_count}"
        )
    if bad:
        return bad

    for q in inst.quotas:
        if q < 0:
            bad.append("quotas must be non-negative")
            break
    for b in inst.expansion_limits:
        if b < 0:
            bad.append("expansion limits must be non-negative")
            break
    if inst.budget < 0:
        bad.append("budget must be non-negative")

    for d, prefs in enumerate(inst.resident_prefs):
        if not prefs:
            bad.append(f"resident {d}: ranks no hospital")
            continue
        seen: set[int] = set()
        for h in prefs:
            if h < 0 or h >= h_count:
                bad.append(f"resident {d}: hospital id {h} out of range")
            elif h in seen:
                bad.append(f"resident {d}: duplicate rank entry for hospital {h}")
            seen.add(h)

    everyone = frozenset(range(d_count))
    for h, order in enumerate(inst.hospital_prefs):
        if len(order) != d_count or set(order) != everyone:
            bad.append(f"hospital {h}: order is not a permutation of all residents")

    for h in range(inst.num_hospitals):
        if inst.quotas[h] == 0:
            bad.append(f"hospital {h}: zero quota")

    if inst.dummy_hospital:
        dummy = inst.num_hospitals
        if inst.quotas[dummy] < d_count:
            bad.append(
                f"dummy hospital quota {inst.quotas[dummy]} is below "
                f"num_residents {d_count}"
            )
        if inst.expansion_limits[dummy] != 0:
            bad.append("dummy hospital must have expansion limit 0")

    if inst.budget > sum(inst.expansion_limits):
        bad.append(
            f"B > sum of expansion limits "
            f"({inst.budget} > {sum(inst.expansion_limits)})"
        )
    return bad


_REQUIRED_FIELDS = (
    "num_residents",
    "num_hospitals",
    "quotas",
    "expansion_limits",
    "budget",
    "resident_prefs",
    "hospital_prefs",
)


def load_instance(document: str) -> MatchingInstance:
    """Parse an instance from JSON text (1-based ids on disk).

    Raises InstanceParseError on malformed documents and
    InstanceValidationError when the parsed instance violates an invariant.
    """
    try:
        data = json.loads(document)
    except json.JSONDecodeError as e:
        raise InstanceParseError(
            f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(data, dict):
        raise InstanceParseError("top-level value must be an object")
    for name in _REQUIRED_FIELDS:
        if name not in data:
            raise InstanceParseError(f"missing required field: {name}")
    try:
        inst = MatchingInstance(
            num_residents=int(data["num_residents"]),
            num_hospitals=int(data["num_hospitals"]),
            resident_prefs=tuple(
                tuple(int(h) - 1 for h in row) for row in data["resident_prefs"]
            ),
            hospital_prefs=tuple(
                tuple(int(d) - 1 for d in row) for row in data["hospital_prefs"]
            ),
            quotas=tuple(int(q) for q in data["quotas"]),
            expansion_limits=tuple(int(b) for b in data["expansion_limits"]),
            budget=int(data["budget"]),
            dummy_hospital=bool(data.get("dummy_hospital", False)),
            seed=None if data.get("seed") is None else int(data["seed"]),
        )
    except (TypeError, ValueError) as e:
        raise InstanceParseError(f"malformed field value: {e}") from e
    violations = validate(inst)
    if violations:
        raise InstanceValidationError(violations)
    return inst


def save_instance(inst: MatchingInstance) -> str:
    """Serialize to canonical JSON text (sorted keys, 1-based ids)."""
    data: dict = {
        "num_residents": inst.num_residents,
        "num_hospitals": inst.num_hospitals,
        "quotas": list(inst.quotas),
        "expansion_limits": list(inst.expansion_limits),
        "budget": inst.budget,
        "resident_prefs": [[h + 1 for h in row] for row in inst.resident_prefs],
        "hospital_prefs": [[d + 1 for d in row] for row in inst.hospital_prefs],
    }
    if inst.dummy_hospital:
        data["dummy_hospital"] = True
    if inst.seed is not None:
        data["seed"] = inst.seed
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def complete_with_dummy(inst: MatchingInstance) -> MatchingInstance:
    """Append an absorbing hospital ranked right after each resident's list.

    The new hospital has quota num_residents and expansion limit 0, so it can
    hold everyone but never receives extra seats.  Hospitals a resident did
    not apply to stay outside the resident's list.  The dummy orders
    residents by id; it never rejects anyone, so that order is inert.
    """
    if inst.dummy_hospital:
        raise ValueError("instance already contains a dummy hospital")
    dummy = inst.num_hospitals
    return MatchingInstance(
        num_residents=inst.num_residents,
        num_hospitals=inst.num_hospitals,
        resident_prefs=tuple(p + (dummy,) for p in inst.resident_prefs),
        hospital_prefs=inst.hospital_prefs + (tuple(range(inst.num_residents)),),
        quotas=inst.quotas + (inst.num_residents,),
        expansion_limits=inst.expansion_limits + (0,),
        budget=inst.budget,
        dummy_hospital=True,
        seed=inst.seed,
    )
