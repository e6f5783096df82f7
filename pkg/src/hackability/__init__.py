"""Exact reward hackability and simplification analysis for finite MDPs."""

from .errors import HackabilityError
from .mdp import (
    MdpSpec,
    OccupancyVector,
    PotentialFunction,
    RewardTable,
    StationaryPolicy,
    ValidatedMdp,
    enumerate_deterministic_policies,
    occupancy,
    policy_return,
    shape_reward,
    validate_mdp,
)
from .ordering import (
    PolicyOrdering,
    PolicySet,
    check_hackable,
    check_simplification,
    is_equivalent,
    is_trivial,
    ordering_from_reward,
    parse_ordering,
)
from .representability import (
    check_representable,
    enumerate_representable_orderings,
    find_representable_simplifications,
    find_unhackable_noneq,
    simplification_exists,
)
from .witness import PolicyFilter, SearchBudget, equivalence_probe, search_hackability_witness
from .diagrams import build_simplification_digraph, build_unhackability_graph, emit_graph

__version__ = "0.1.0"
