"""Capacity-expansion search for hospital-resident matching.

Given a matching market with base quotas, per-hospital expansion limits and
a global budget of extra seats, this package searches for the seat
allocation whose resident-optimal stable matching (found by deferred
acceptance) has the lowest total rank.  The main solver is an anytime
upper-confidence tree over three tree encodings of the allocation space;
greedy and min-cost-flow baselines and exhaustive oracles ship alongside.
"""

from .baselines import (
    FlowNetwork,
    InfeasibleFlowError,
    brute_force_optimal,
    enumerate_stable_matchings,
    enumerate_theta,
    flow_relaxation,
    greedy_expansion,
    lp_heuristic,
    min_cost_flow,
)
from .da import (
    StabilityReport,
    expansion_cost,
    find_blocking_pairs,
    per_resident_ranks,
    run_da,
    total_cost,
)
from .datagen import generate_partial, generate_set1, generate_set2
from .instance import (
    ExpansionVector,
    InstanceError,
    InstanceParseError,
    InstanceValidationError,
    Matching,
    MatchingInstance,
    complete_with_dummy,
    load_instance,
    save_instance,
    validate,
)
from .trees import (
    HospitalOrdering,
    TreePath,
    children,
    count_expansions,
    enumerate_leaves,
    envy_scores,
    make_ordering,
    node_to_expansion,
    popularity_scores,
)
from .uct import (
    CP_DEFAULT,
    SearchConfig,
    SearchNode,
    SearchResult,
    reward,
    search,
    ucb_value,
    write_trajectory_csv,
)

__version__ = "0.1.0"

__all__ = [
    "CP_DEFAULT",
    "ExpansionVector",
    "FlowNetwork",
    "HospitalOrdering",
    "InfeasibleFlowError",
    "InstanceError",
    "InstanceParseError",
    "InstanceValidationError",
    "Matching",
    "MatchingInstance",
    "SearchConfig",
    "SearchNode",
    "SearchResult",
    "StabilityReport",
    "TreePath",
    "brute_force_optimal",
    "children",
    "complete_with_dummy",
    "count_expansions",
    "enumerate_leaves",
    "enumerate_stable_matchings",
    "enumerate_theta",
    "envy_scores",
    "expansion_cost",
    "find_blocking_pairs",
    "flow_relaxation",
    "generate_partial",
    "generate_set1",
    "generate_set2",
    "greedy_expansion",
    "load_instance",
    "lp_heuristic",
    "make_ordering",
    "min_cost_flow",
    "node_to_expansion",
    "per_resident_ranks",
    "popularity_scores",
    "reward",
    "run_da",
    "save_instance",
    "search",
    "total_cost",
    "ucb_value",
    "validate",
    "write_trajectory_csv",
]
