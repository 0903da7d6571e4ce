"""Small closed test solids with outward (counter-clockwise seen from outside) winding."""
from __future__ import annotations

import numpy as np

from .mesh import TriMesh


def prism(polygon, height=1.0, z0=0.0, caps=True):
    """Extrude a counter-clockwise xy polygon along +z.

    ``caps`` may be True, False, "top" or "bottom".  Caps are fans from the
    first polygon vertex.
    """
    poly = np.asarray(polygon, dtype=np.float64)
    n = len(poly)
    if n < 3:
        raise ValueError("polygon needs at least three vertices")
    bottom = np.column_stack([poly, np.full(n, z0)])
    top = np.column_stack([poly, np.full(n, z0 + height)])
    pos = np.vstack([bottom, top])
    faces = []
    for i in range(n):
        j = (i + 1) % n
        faces.append((i, j, n + j))
        faces.append((i, n + j, n + i))
    if caps in (True, "bottom"):
        faces += [(0, k + 1, k) for k in range(1, n - 1)]
    if caps in (True, "top"):
        faces += [(n, n + k, n + k + 1) for k in range(1, n - 1)]
    return TriMesh(pos, faces)


def box(size=(1.0, 1.0, 1.0), corner=(0.0, 0.0, 0.0)):
    """Axis-aligned box with 8 vertices and 12 triangles."""
    a, b, c = (float(s) for s in size)
    x, y, z = (float(t) for t in corner)
    rect = [(x, y), (x + a, y), (x + a, y + b), (x, y + b)]
    return prism(rect, c, z)


def unit_cube():
    return box()


def centered_cube(side=1.0):
    h = 0.5 * side
    return box((side, side, side), (-h, -h, -h))


def l_prism(height=1.0):
    """L-shaped solid: the union of boxes [0,2]x[0,1] and [0,1]x[1,2], extruded."""
    return prism([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)], height)


def cylinder(n=32, radius=1.0, height=1.0, caps=True):
    t = 2.0 * np.pi * np.arange(n) / n
    return prism(np.column_stack([radius * np.cos(t), radius * np.sin(t)]), height, -0.5 * height, caps)


def orient_outward(positions, faces, center=None):
    """Flip faces whose normal points towards ``center`` (valid for star-shaped solids)."""
    pos = np.asarray(positions, dtype=np.float64)
    f = np.array(faces, dtype=np.int64).reshape(-1, 3)
    c = pos.mean(axis=0) if center is None else np.asarray(center, dtype=np.float64)
    tri = pos[f]
    normal = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    inward = np.einsum("ij,ij->i", normal, tri.mean(axis=1) - c) < 0.0
    f[inward] = f[inward][:, ::-1]
    return f


def icosphere(level=2, radius=1.0):
    """Subdivided icosahedron projected to the sphere."""
    g = (1.0 + 5.0 ** 0.5) / 2.0
    verts = [(-1, g, 0), (1, g, 0), (-1, -g, 0), (1, -g, 0), (0, -1, g), (0, 1, g),
             (0, -1, -g), (0, 1, -g), (g, 0, -1), (g, 0, 1), (-g, 0, -1), (-g, 0, 1)]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
             (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
             (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    pos = [np.array(v, dtype=np.float64) / np.linalg.norm(v) for v in verts]
    for _ in range(level):
        cache = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = pos[i] + pos[j]
                pos.append(m / np.linalg.norm(m))
                cache[key] = len(pos) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    p = np.array(pos) * radius
    return TriMesh(p, orient_outward(p, faces, np.zeros(3)))


def tetrahedron(p0=(0, 0, 0), p1=(1, 0, 0), p2=(0, 1, 0), p3=(0, 0, 1)):
    pos = np.array([p0, p1, p2, p3], dtype=np.float64)
    return TriMesh(pos, orient_outward(pos, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]))


QUAD_CUBE_OBJ = """\
# unit cube with quad faces
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 4 3 2
f 5 6 7 8
f 1 2 6 5
f 2 3 7 6
f 3 4 8 7
f 4 1 5 8
"""
