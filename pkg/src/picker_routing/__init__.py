"""Exact picker-routing solvers for rectangular warehouses."""

from .configs import (
    Resolution,
    Segment,
    VerticalConfig,
    config_edges,
    merge_segments,
    resolve_vertical,
    subaisle_options,
)
from .model import (
    AislePoint,
    DepotLocation,
    EdgeMultiset,
    Instance,
    InstanceError,
    PickLocation,
    Solution,
    WarehouseLayout,
    aisle_points,
    generate_instance,
    mirror_edges,
    mirror_instance,
    parse_instance,
    parse_solution,
    scale_instance,
    serialize_instance,
    serialize_solution,
    tour_length,
)
from .oracle import (
    Verdict,
    brute_force_config_opt,
    held_karp_opt,
    validate_tour_subgraph,
)
from .solver import (
    FrontierState,
    TransitionTable,
    derive_singleblock_table,
    enumerate_gap_choices,
    extract_walk,
    published_singleblock_table,
    solve_baseline,
    solve_reduced,
    transition,
    walk_edge_usage,
)

__all__ = [
    "AislePoint",
    "DepotLocation",
    "EdgeMultiset",
    "FrontierState",
    "Instance",
    "InstanceError",
    "PickLocation",
    "Resolution",
    "Segment",
    "Solution",
    "TransitionTable",
    "Verdict",
    "VerticalConfig",
    "WarehouseLayout",
    "aisle_points",
    "brute_force_config_opt",
    "config_edges",
    "derive_singleblock_table",
    "enumerate_gap_choices",
    "extract_walk",
    "generate_instance",
    "held_karp_opt",
    "merge_segments",
    "mirror_edges",
    "mirror_instance",
    "parse_instance",
    "parse_solution",
    "published_singleblock_table",
    "resolve_vertical",
    "scale_instance",
    "serialize_instance",
    "serialize_solution",
    "solve_baseline",
    "solve_reduced",
    "subaisle_options",
    "tour_length",
    "transition",
    "validate_tour_subgraph",
    "walk_edge_usage",
]
