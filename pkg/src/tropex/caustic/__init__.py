"""Tropical series, level sets and caustics of Q-polygons in exact arithmetic."""
from .analysis import (Seed, balancing_defect, conservation_residual, dual_polygon_from_star,
                       edge_length_identity, integral_F, is_balanced, seed, star_multiplicity,
                       vertex_multiplicity)
from .io import curve_from_dict, curve_to_dict, dumps, loads
from .kinetic import CurveEdge, CurveVertex, TropicalCurve, compute_caustic
from .levels import level_set, max_locus
from .monomials import (TropicalMonomial, active_monomials, brute_force_F, brute_force_F_grid,
                        contributing_monomials, eval_F, sail)
from .polygon import Locus, QPolygon, convex_hull, lattice_length
from .surgery import (blowdown, corner_cut, is_delzant, random_delzant_polygon, removable_sides,
                      side_index)
from .svg import render_svg

__all__ = [
    "QPolygon", "Locus", "TropicalMonomial", "TropicalCurve", "CurveVertex", "CurveEdge", "Seed",
    "contributing_monomials", "eval_F", "active_monomials", "brute_force_F", "brute_force_F_grid", "sail",
    "level_set", "max_locus", "compute_caustic", "vertex_multiplicity", "star_multiplicity",
    "dual_polygon_from_star", "balancing_defect", "is_balanced", "edge_length_identity",
    "conservation_residual", "seed", "integral_F", "is_delzant", "removable_sides", "blowdown",
    "corner_cut", "side_index", "random_delzant_polygon", "curve_to_dict", "curve_from_dict",
    "dumps", "loads", "render_svg", "convex_hull", "lattice_length",
]
