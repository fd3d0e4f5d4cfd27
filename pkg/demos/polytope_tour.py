"""
Lattice points, facets and normality of P(a, b)
================================================

Run with ``python3 demos/polytope_tour.py``.
"""

import numpy as np

from svsecant.segre_veronese import SVParams, build_polytope, expected_facet_report
from svsecant.normality import check_normality

# Two factors: a line with degree 1 and a plane with degree 2.
p = SVParams((1, 2), (1, 2))
P = build_polytope(p)

# Each lattice point is the exponent vector of a monomial of degree >= 2.
print(P.points)
print("dimension", P.dim, "in ambient", P.ambient_dim)

# Facets come from the candidate inequalities that are tight on a
# codimension-one set of points.  Z1,1 drops out here.
print(sorted(P.facet_label_set))
print(expected_facet_report(p).as_dict())

# Vertices of the polytope
print(np.array(P.vertices()))

# Every point of 2P and 3P is a sum of points of P.
print(check_normality(P, s_max=3))

# A lower-dimensional example: all points have the same total degree
Q = build_polytope(SVParams((2,), (3,)))
print(Q.dim, expected_facet_report(SVParams((2,), (3,))).dim_case)
