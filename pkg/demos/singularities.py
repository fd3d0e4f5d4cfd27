"""
Gorenstein points and singular components
=========================================

The status of the cone over P, and the minimal singular cones of its
normal fan.
"""

from svsecant.classify import cross_check
from svsecant.segre_veronese import SVParams, build_polytope
from svsecant.singular import describe_component, singular_components

# A Gorenstein case: beta pairs to one with every facet normal
c = cross_check(SVParams((1, 1), (2, 2)))
print(c.status, c.beta_json(), c.tag)

# Only a rational beta exists here
c = cross_check(SVParams((2, 2), (1, 1)))
print(c.status, c.beta_json(), c.tag)

for a, b in [((1, 1, 1, 1), (1, 1, 1, 2)), ((1, 2, 3), (1, 1, 1))]:
    p = SVParams(a, b)
    comps = singular_components(build_polytope(p), p)
    print(p, len(comps), "components")
    for comp in comps:
        # the face of P whose cone is a minimal singular cone
        print("  ", comp.kind, comp.indices, comp.face.point_list())
        print("   ", describe_component(comp, p))
