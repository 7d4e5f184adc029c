"""Weighted Szego, Garabedian and Bergman kernels of smooth multiply connected
planar domains, computed from the weighted Kerzman-Stein integral equation."""

from .boundary import (
    BoundaryField,
    WeightField,
    abs2_weight,
    cauchy_interior,
    constant_weight,
    exp_cos_weight,
    make_weight,
    weighted_inner,
)
from .geometry import DomainGeometry, boundary_distance, default_pole, make_preset, winding_number
from .kernels import ahlfors_eval, ahlfors_map, garabedian_from_szego, zero_count, zero_locate
from .kerzman_stein import SzegoSolution, assemble_ks, solve_szego_boundary, solver_for

__version__ = "0.1.0"

__all__ = [
    "BoundaryField",
    "DomainGeometry",
    "SzegoSolution",
    "WeightField",
    "abs2_weight",
    "ahlfors_eval",
    "ahlfors_map",
    "assemble_ks",
    "boundary_distance",
    "cauchy_interior",
    "constant_weight",
    "default_pole",
    "exp_cos_weight",
    "garabedian_from_szego",
    "make_preset",
    "make_weight",
    "solve_szego_boundary",
    "solver_for",
    "weighted_inner",
    "winding_number",
    "zero_count",
    "zero_locate",
]
