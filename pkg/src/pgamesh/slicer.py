"""Volume and centre of mass of a closed mesh below a plane, without building the cap.

Faces entirely below the plane contribute their cached carriers, faces that
straddle it are split with the meet of edge and plane, and the missing cap is
accounted for by joining the accumulated carrier with a point ``o'`` on the
plane itself.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import List, NamedTuple

import numpy as np

from . import algebra as ga
from . import kernels
from .algebra import Multivector
from .errors import DegeneratePlaneError, NoIntersectionError
from .mesh import CenterOfMass, TriMesh, ZeroVolumeWarning, sum_face_carriers

DEFAULT_EPS = 1e-9


@dataclass(frozen=True)
class SlicePlane:
    """Plane ``ax+by+cz+d = 0``; the fluid side is where ``ax+by+cz+d <= 0``."""

    p: Multivector

    def __post_init__(self):
        p = ga.grade_select(self.p, 1)
        if ga.euclidean_norm(p) <= 1e-300 or not np.all(np.isfinite(p.coefficients)):
            raise DegeneratePlaneError("degenerate plane: zero normal")
        object.__setattr__(self, "p", p)

    @classmethod
    def from_coefficients(cls, a, b, c, d):
        return cls(ga.plane(a, b, c, d))

    @classmethod
    def from_point_normal(cls, point, normal):
        n = np.asarray(normal, dtype=np.float64)
        q = np.asarray(point, dtype=np.float64)
        return cls(ga.plane(n[0], n[1], n[2], -float(n @ q)))

    @property
    def normalized(self) -> Multivector:
        return ga.normalize(self.p)

    @property
    def o_prime(self) -> Multivector:
        """Foot of the perpendicular from the origin, ``(o . p) p^-1``."""
        return ga.normalize_point(ga.grade_select(ga.project(ga.origin(), self.p), 3))

    def coefficients(self):
        c = self.p.coefficients
        return float(c[ga.E1]), float(c[ga.E2]), float(c[ga.E3]), float(c[ga.E0])

    def flipped(self):
        return SlicePlane(-self.p)

    def transformed(self, versor):
        return SlicePlane(ga.sandwich(versor, self.p))


def axis_point(plane: SlicePlane, axis: int) -> Multivector:
    """Where coordinate axis ``axis`` (0, 1, 2) crosses the plane: a point with two zero coordinates."""
    a, b, c, d = plane.coefficients()
    n = (a, b, c)
    if abs(n[axis]) <= 1e-300:
        raise NoIntersectionError("no finite intersection: axis parallel to plane")
    xyz = [0.0, 0.0, 0.0]
    xyz[axis] = -d / n[axis]
    return ga.point(*xyz)


def side_of_plane(plane, v) -> float:
    """``p v v``, i.e. ``ax+by+cz+d`` for a normalized point."""
    p = plane.p if isinstance(plane, SlicePlane) else ga._coerce(plane)
    return float(ga.join(p, v)[0])


def edge_plane_intersection(edge, plane, tol=1e-12) -> Multivector:
    """Meet of an edge's carrier line with the plane, normalized to unit weight."""
    p = plane.p if isinstance(plane, SlicePlane) else ga._coerce(plane)
    x = ga.wedge(edge, p)
    scale = ga.euclidean_norm(edge) * ga.euclidean_norm(p)
    if abs(x[ga.E123]) <= tol * max(scale, 1e-300):
        raise NoIntersectionError("no finite intersection: edge parallel to plane")
    return ga.normalize_point(x)


class ClipResult(NamedTuple):
    f_sum_below: Multivector
    com_accumulator: Multivector  # homogeneous, already divided by 24
    triangles_below: int
    triangles_split: int
    used_complement: bool
    apex: Multivector


def _tol(m, plane, eps):
    return eps * max(m.bounding_radius(), 1.0) * ga.euclidean_norm(plane.p)


def clip_below(m: TriMesh, plane: SlicePlane, eps=DEFAULT_EPS, use_complement=False,
               apex=None, compensated=False) -> ClipResult:
    """Accumulate carriers and c.o.m. terms of the part of ``m`` below ``plane``.

    Vertices within ``eps * bounding_radius`` of the plane count as on it and
    are treated as below.  With ``use_complement`` the smaller side is
    integrated and subtracted from the precomputed totals.
    """
    if not isinstance(plane, SlicePlane):
        plane = SlicePlane(ga._coerce(plane))
    apex_mv = plane.o_prime if apex is None else ga.normalize_point(
        apex if isinstance(apex, Multivector) else ga.point(*apex))
    apex_xyz = ga.point_coordinates(apex_mv)
    tol = _tol(m, plane, eps)

    if m.n_faces == 0:
        return ClipResult(Multivector(), Multivector(), 0, 0, False, apex_mv)

    complement = False
    target = plane
    if use_complement:
        s = kernels.side_values(m.positions, plane.p.coefficients)
        s = np.where(np.abs(s) <= tol, 0.0, s)
        sf = s[m.faces]
        n_below = int(np.sum(np.all(sf <= 0.0, axis=1)))
        n_above = int(np.sum(np.all(sf >= 0.0, axis=1)))
        if n_below > n_above:
            complement = True
            target = plane.flipped()

    f_terms, com_terms, status = kernels.clip_terms(
        m.positions, m.faces, m.carriers, target.p.coefficients, apex_xyz, tol)
    f_sum = kernels.pairwise_sum(f_terms, compensated)
    com = kernels.pairwise_sum(com_terms, compensated) / 24.0
    n_full = int(np.sum(status == 1))
    n_split = int(np.sum(status >= 2))
    if complement:
        total = sum_face_carriers(m, compensated, with_com=True, apex=apex_xyz)
        f_sum = total.f_sum.coefficients - f_sum
        com = total.com_sum.coefficients - com
        n_full = int(np.sum(status == 0))
    return ClipResult(Multivector(f_sum), Multivector(com), n_full, n_split, complement, apex_mv)


def sliced_volume(r: ClipResult, plane: SlicePlane) -> float:
    """``(o' v F) / 6`` with ``o'`` on the plane, so the cap term vanishes."""
    return float(ga.join(plane.o_prime, r.f_sum_below)[0]) / 6.0


def sliced_volume_with_apex(r: ClipResult, apex) -> float:
    a = apex if isinstance(apex, Multivector) else ga.point(*apex)
    return float(ga.join(ga.normalize_point(a), r.f_sum_below)[0]) / 6.0


def sliced_volume_two_term(r: ClipResult, plane: SlicePlane, apex=None) -> float:
    """Volume with an arbitrary apex: open-mesh term plus the cone over the planar gap.

    ``(o v F + |F| (o v p_bar)) / 6``.
    """
    o = ga.origin() if apex is None else ga.point(*apex)
    f = r.f_sum_below
    first = float(ga.join(o, f)[0])
    second = ga.euclidean_norm(f) * float(ga.join(o, plane.normalized)[0])
    return (first + second) / 6.0


def sliced_com(r: ClipResult, tol=1e-15) -> CenterOfMass:
    """Homogeneous centroid of the region below the plane; its weight is the volume."""
    hom = r.com_accumulator
    volume = float(hom[ga.E123])
    if abs(volume) <= tol:
        warnings.warn("zero volume below plane: centroid undefined", ZeroVolumeWarning, stacklevel=2)
        return CenterOfMass(hom, None, volume)
    return CenterOfMass(hom, ga.normalize_point(hom), volume)


def triple_d(p1, p2, p3):
    """e0 coefficient of ``v1 v v2 v v3`` written out in coordinates."""
    x1, y1, z1 = p1[..., 0], p1[..., 1], p1[..., 2]
    x2, y2, z2 = p2[..., 0], p2[..., 1], p2[..., 2]
    x3, y3, z3 = p3[..., 0], p3[..., 1], p3[..., 2]
    return x3 * (y2 * z1 - y1 * z2) + x2 * (y1 * z3 - y3 * z1) + x1 * (y3 * z2 - y2 * z3)


def _meet_coords(pa, pb, plane):
    """Edge-plane intersection from the coefficient expansion of ``E ^ p``."""
    a, b, c, d = plane
    dirn = pb - pa
    mom = np.cross(pa, pb)
    x, y, z = dirn[:, 0], dirn[:, 1], dirn[:, 2]
    dx, dy, dz = mom[:, 0], mom[:, 1], mom[:, 2]
    e032 = b * dz - c * dy - d * x
    e013 = c * dx - a * dz - d * y
    e021 = a * dy - b * dx - d * z
    e123 = a * x + b * y + c * z
    return np.stack([e032, e013, e021], axis=1) / e123[:, None]


def sliced_volume_d_shortcut(m: TriMesh, plane: SlicePlane, eps=DEFAULT_EPS) -> float:
    """Volume below the plane accumulating only the ``d`` coefficient of each face.

    Coordinates are taken relative to ``o'``; with ``o'`` as origin the join
    ``o' v F`` is minus the e0 coefficient of ``F``.
    """
    if m.n_faces == 0:
        return 0.0
    o = ga.point_coordinates(plane.o_prime)
    pos = m.positions - o
    a, b, c, d = plane.coefficients()
    d = d + a * o[0] + b * o[1] + c * o[2]
    pl = (a, b, c, d)
    s = pos @ np.array([a, b, c]) + d
    s = np.where(np.abs(s) <= _tol(m, plane, eps), 0.0, s)
    sf = s[m.faces]
    below = sf <= 0.0
    nb = below.sum(axis=1)
    nzero = (sf == 0.0).sum(axis=1)
    tri = pos[m.faces]
    d_full = triple_d(tri[:, 0], tri[:, 1], tri[:, 2])
    total = np.zeros(m.n_faces)
    full = nb == 3
    total[full] = d_full[full]
    one_below = (nb == 1) & ~((nzero == 1) & (sf.min(axis=1) == 0.0))
    one_above = (nb == 2) & (nzero < 2)
    for mask, odd, keep_sub in ((one_below, below, True), (one_above, ~below, False)):
        rows = np.nonzero(mask)[0]
        if rows.size == 0:
            continue
        k = np.argmax(odd[rows], axis=1)
        ia = m.faces[rows, k]
        ib = m.faces[rows, (k + 1) % 3]
        ic = m.faces[rows, (k + 2) % 3]
        pa, pb, pc = pos[ia], pos[ib], pos[ic]
        x1 = _meet_coords(pa, pb, pl)
        x2 = _meet_coords(pa, pc, pl)
        x1 = np.where((s[ia] == 0.0)[:, None], pa, np.where((s[ib] == 0.0)[:, None], pb, x1))
        x2 = np.where((s[ia] == 0.0)[:, None], pa, np.where((s[ic] == 0.0)[:, None], pc, x2))
        d_sub = triple_d(pa, x1, x2)
        total[rows] = d_sub if keep_sub else d_full[rows] - d_sub
    return -float(kernels.pairwise_sum(total[:, None])[0]) / 6.0


class FillLevel(NamedTuple):
    level: float
    volume: float
    centroid: object  # (3,) array or None when empty


def fill_curve(m: TriMesh, axis=(0.0, 0.0, 1.0), n_levels=11, eps=DEFAULT_EPS,
               use_complement=True) -> List[FillLevel]:
    """Volume and centroid below planes ``axis . x = h`` for evenly spaced ``h``.

    Levels run from the lowest to the highest vertex along ``axis``.
    """
    if n_levels < 1:
        raise ValueError("n_levels must be positive")
    n = np.asarray(axis, dtype=np.float64)
    norm = np.linalg.norm(n)
    if norm == 0.0:
        raise DegeneratePlaneError("degenerate plane: zero axis")
    n = n / norm
    heights = m.positions @ n if m.n_vertices else np.zeros(1)
    levels = np.linspace(heights.min(), heights.max(), n_levels) if n_levels > 1 else np.array([heights.max()])
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ZeroVolumeWarning)
        for h in levels:
            plane = SlicePlane(ga.plane(n[0], n[1], n[2], -float(h)))
            r = clip_below(m, plane, eps=eps, use_complement=use_complement)
            com = sliced_com(r)
            out.append(FillLevel(float(h), sliced_volume(r, plane), com.position))
    return out
