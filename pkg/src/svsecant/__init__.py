"""Exact polyhedral and symbolic computations for secants of Segre-Veronese varieties."""

from .exact import LatticeBasis, hnf, snf, solve_affine, integer_solve, lattice_point_in_affine_set, primitive
from .polytope import Inequality, Label, LatticePolytope, Face, ConeData, InstanceTooLarge, enumerate_points
from .segre_veronese import SVParams, FacetReport, build_polytope, expected_facet_report, cross_check_facets

__version__ = "0.1.0"
