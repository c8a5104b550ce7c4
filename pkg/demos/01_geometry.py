"""Polytopes: containment, projection, tightening and vertices.

Run with ``python3 demos/01_geometry.py``.
"""
import numpy as np

from ogdcontrol import geometry
from ogdcontrol.geometry import Polytope

# A box in the plane, stored as unit-normalized halfspaces C x <= d.
box = Polytope.box([2.0, 1.0])
print("rows:\n", box.C)
print("offsets:", box.d)

# Points outside are projected onto the nearest feasible point.
for x in ([3.0, 0.5], [3.0, 3.0], [0.2, -0.1]):
    p = geometry.project(box, np.array(x))
    print(f"project {x} -> {p}, inside: {geometry.contains(box, p, 1e-12)}")

# Tightening by delta pulls every facet inwards by the same distance.
tight = geometry.shrink(box, 0.1)
print("tightened offsets:", tight.d)

# Vertices by facet enumeration, and the diameter they induce.
print("vertices:\n", geometry.vertices(box))
print("diameter:", geometry.diameter(box))

# A triangle from raw halfspaces; rows are normalized on construction.
tri = Polytope([[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]], [0.0, 0.0, 1.0])
print("triangle vertices:\n", geometry.vertices(tri) + 0.0)
print("support in direction (1, 2):", geometry.support(tri, np.array([1.0, 2.0])))
