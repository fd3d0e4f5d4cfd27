"""
Cumulant coordinates on a labelled simplicial complex
=====================================================
"""

from svsecant.cumulants import (
    parse_complex,
    toric_binomials,
    verify_reparametrization,
    verify_secant_identity,
    y_transform,
)

# two generators sharing the vertex 2; the second complex identifies 4 with 3
cx = parse_complex("left: 1 2\nright: 2 3 4\n")
same = parse_complex("left: 1 2\nright: 2 3 4=3\n")

# y coordinates are alternating sums of products of x's
for s, y in y_transform(cx).items():
    if len(s) >= 2:
        print(cx.name(s), "->", y)

# on a mixture of two rank-one points the z coordinates factor
ok, _ = verify_secant_identity(cx)
print("secant identity:", ok)
print("reparametrization:", verify_reparametrization(cx)["convention"])

# binomials in the kernel of the monomial map, up to degree 4
for b in toric_binomials(cx, 4):
    print(b)
for b in toric_binomials(same, 4):
    print(b)
