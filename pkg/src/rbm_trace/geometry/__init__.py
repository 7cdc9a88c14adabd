from ._corridor import fat_cantor_intervals, fat_cantor_measure
from ._domain import (
    CLOSURE_TOL,
    DOMAIN_KINDS,
    KOCH_DIMENSION,
    DomainKind,
    DomainSpec,
    boundary_distances,
    box_bounds,
    contains,
    dist_to_boundary,
    domain_from_dict,
    domain_id,
    domain_to_dict,
    in_closure,
    interior_point,
    koch_snowflake_vertices,
    make_corridor_domain,
    make_koch_snowflake,
    make_polygon,
    make_product,
    make_square,
    nearest_boundary_point,
    reflect_step,
)
from ._edge_index import EdgeIndex, build_edge_index

__all__ = [
    "boundary_distances",
    "box_bounds",
    "build_edge_index",
    "CLOSURE_TOL",
    "contains",
    "dist_to_boundary",
    "DOMAIN_KINDS",
    "domain_from_dict",
    "domain_id",
    "domain_to_dict",
    "DomainKind",
    "DomainSpec",
    "EdgeIndex",
    "fat_cantor_intervals",
    "fat_cantor_measure",
    "in_closure",
    "interior_point",
    "koch_snowflake_vertices",
    "KOCH_DIMENSION",
    "make_corridor_domain",
    "make_koch_snowflake",
    "make_polygon",
    "make_product",
    "make_square",
    "nearest_boundary_point",
    "reflect_step",
]
