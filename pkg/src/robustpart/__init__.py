"""Robust partitions of dense regular graphs."""

from .errors import (
    AnchoringError,
    AssemblyError,
    CapabilityError,
    ContractError,
    InputError,
    PreconditionError,
    RefinementError,
    RobustPartError,
)
from .expansion import (
    Certificate,
    Verdict,
    certify_bipartite_robust_expander,
    certify_robust_expander,
    find_nonexpanding_witness,
    validate_robust_partition,
    validate_weak_subpartition,
)
from .generators import PlantedSpec, gen_bestposs, gen_fig1i, gen_fig1ii, gen_planted, gen_random_regular
from .graph import DEFAULT_PARAMS, Digraph, Graph, Params, edge_counts, vertex_connectivity
from .hamilton import (
    assemble_hamilton,
    balanced_bipartite_hamilton,
    hamilton_p_linked,
    longest_cycle,
    m_auxiliary_digraph,
    short_path,
)
from .oracle import CycleResult, hamilton_oracle, verify_cycle
from .partition import (
    almost_regular_partition,
    bipartite_rebalance,
    refine_to_robust_partition,
    regularize_almost_regular,
    shuffle_partition,
    split_component,
)
from .paths import (
    balance_extend,
    bounded_matching,
    cycle_connector,
    menger_matching,
    path_cover_balance,
    prune_path_system,
    reduced_multigraph_euler,
    regular_partition_identity,
    subpartition_tour,
    three_part_connector,
    validate_tour,
)
from .pipelines import StabilityPartition, find_hamilton_pipeline, long_cycle_pipeline
from .structures import ComponentLabel, Kind, PathSystem, RobustPartition

__all__ = [
    "AnchoringError",
    "AssemblyError",
    "CapabilityError",
    "Certificate",
    "ComponentLabel",
    "ContractError",
    "CycleResult",
    "DEFAULT_PARAMS",
    "Digraph",
    "Graph",
    "InputError",
    "Kind",
    "Params",
    "PathSystem",
    "PlantedSpec",
    "PreconditionError",
    "RefinementError",
    "RobustPartError",
    "RobustPartition",
    "StabilityPartition",
    "Verdict",
    "almost_regular_partition",
    "assemble_hamilton",
    "balance_extend",
    "balanced_bipartite_hamilton",
    "bipartite_rebalance",
    "bounded_matching",
    "certify_bipartite_robust_expander",
    "certify_robust_expander",
    "cycle_connector",
    "edge_counts",
    "find_hamilton_pipeline",
    "find_nonexpanding_witness",
    "gen_bestposs",
    "gen_fig1i",
    "gen_fig1ii",
    "gen_planted",
    "gen_random_regular",
    "hamilton_oracle",
    "hamilton_p_linked",
    "long_cycle_pipeline",
    "longest_cycle",
    "m_auxiliary_digraph",
    "menger_matching",
    "path_cover_balance",
    "prune_path_system",
    "reduced_multigraph_euler",
    "refine_to_robust_partition",
    "regular_partition_identity",
    "regularize_almost_regular",
    "short_path",
    "shuffle_partition",
    "split_component",
    "subpartition_tour",
    "three_part_connector",
    "validate_robust_partition",
    "validate_tour",
    "validate_weak_subpartition",
    "verify_cycle",
    "vertex_connectivity",
]
