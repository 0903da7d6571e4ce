"""Triangle meshes as 2-complexes: magnitudes, gaps, integration, centre of mass.

All volumes are taken with the reference point on the left of the join,
``o v F``, so a closed mesh wound counter-clockwise seen from outside has
positive volume.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import algebra as ga
from . import kernels
from .algebra import Multivector
from .errors import MalformedMeshError
from .simplex import Chain, Simplex, carrier

DEFAULT_TOL = 1e-9


class OpenMeshWarning(UserWarning):
    """The face carriers do not cancel; apex-dependent results follow."""


class ZeroVolumeWarning(UserWarning):
    pass


class TriMesh:
    """Indexed triangle mesh with lazily cached face carriers.

    Arrays are copied and made read-only; transformations return new meshes.
    """

    def __init__(self, positions, faces):
        pos = np.array(positions, dtype=np.float64).reshape(-1, 3)
        tri = np.array(faces, dtype=np.int64).reshape(-1, 3)
        if tri.size:
            if tri.min() < 0 or tri.max() >= len(pos):
                raise MalformedMeshError("malformed mesh: face index out of range")
            if np.any((tri[:, 0] == tri[:, 1]) | (tri[:, 1] == tri[:, 2]) | (tri[:, 0] == tri[:, 2])):
                raise MalformedMeshError("malformed mesh: repeated index within a face")
        if not np.all(np.isfinite(pos)):
            raise MalformedMeshError("malformed mesh: non-finite vertex coordinate")
        pos.setflags(write=False)
        tri.setflags(write=False)
        self.positions = pos
        self.faces = tri

    @property
    def n_vertices(self):
        return self.positions.shape[0]

    @property
    def n_faces(self):
        return self.faces.shape[0]

    @cached_property
    def carriers(self):
        """``v0 v v1 v v2`` per face, shape (F, 16)."""
        if self.n_faces == 0:
            c = np.zeros((0, 16))
        else:
            c = kernels.face_carriers(self.positions, self.faces)
        c.setflags(write=False)
        return c

    def face_carrier(self, i) -> Multivector:
        return Multivector(self.carriers[i])

    def simplices(self):
        for f in self.faces:
            yield Simplex.from_positions(self.positions[f])

    def bounding_radius(self):
        if self.n_vertices == 0:
            return 0.0
        lo, hi = self.positions.min(axis=0), self.positions.max(axis=0)
        return float(np.linalg.norm(self.positions - 0.5 * (lo + hi), axis=1).max())

    def flipped(self):
        return TriMesh(self.positions, self.faces[:, ::-1])

    def translated(self, t):
        return TriMesh(self.positions + np.asarray(t, dtype=np.float64), self.faces)

    def transformed(self, versor):
        """Sandwich every vertex by ``versor`` (a motor, typically)."""
        return TriMesh(transform_positions(versor, self.positions), self.faces)

    def without_faces(self, indices):
        keep = np.ones(self.n_faces, dtype=bool)
        keep[np.asarray(indices, dtype=np.int64)] = False
        return TriMesh(self.positions, self.faces[keep])

    def __repr__(self):
        return f"TriMesh(n_vertices={self.n_vertices}, n_faces={self.n_faces})"


def transform_positions(versor, positions):
    v = ga._coerce(versor)
    vinv = ga.versor_inverse(v)
    pts = kernels.embed_points(positions)
    if not np.any(v.coefficients[ga.GRADE % 2 == 0]):
        # odd versor acting on odd (grade-3) points picks up a sign
        left = ga.grade_involute(v).coefficients
    else:
        left = v.coefficients
    moved = kernels.product_batch(kernels.product_batch(left, pts, "gp"), vinv.coefficients, "gp")
    return moved[:, ga.POINT_SLICE][:, :3] / moved[:, ga.E123][:, None]


@dataclass
class AccumulatedCarrier:
    f_sum: Multivector
    com_sum: Optional[Multivector] = None
    count: int = 0


def sum_face_carriers(m: TriMesh, compensated=False, with_com=False, apex=(0.0, 0.0, 0.0)):
    """Sum of face carriers in fixed pairwise order; optionally the c.o.m. terms too."""
    if not isinstance(m, TriMesh):
        raise MalformedMeshError("malformed mesh: expected a TriMesh")
    f_sum = Multivector(kernels.pairwise_sum(m.carriers, compensated) if m.n_faces else np.zeros(16))
    com_sum = None
    if with_com:
        com_sum = _com_sum(m, apex, compensated)
    return AccumulatedCarrier(f_sum, com_sum, m.n_faces)


def _com_sum(m, apex, compensated):
    if m.n_faces == 0:
        return Multivector()
    _, com = kernels.cone_terms(m.positions, m.faces, m.carriers, np.asarray(apex, dtype=np.float64))
    return Multivector(kernels.pairwise_sum(com, compensated) / 24.0)


def mesh_area(m: TriMesh) -> float:
    """Half the sum of face carrier norms (sum of norms, not norm of sum)."""
    if m.n_faces == 0:
        return 0.0
    c = m.carriers
    norms = np.sqrt(np.einsum("ni,ni->n", c[:, ga.EUCLIDEAN_MASK], c[:, ga.EUCLIDEAN_MASK]))
    return 0.5 * float(kernels.pairwise_sum(norms[:, None])[0])


def _closedness_check(f_sum, m, tol, what):
    scale = max(m.bounding_radius(), 1.0) ** 2
    defect = ga.euclidean_norm(f_sum)
    if defect > tol * scale:
        warnings.warn(f"mesh is not closed (|sum F| = {defect:.3g}); {what} depends on the apex",
                      OpenMeshWarning, stacklevel=3)


def mesh_volume(m: TriMesh, signed=True, apex=(0.0, 0.0, 0.0), tol=DEFAULT_TOL, compensated=False):
    """Volume enclosed by the boundary mesh.

    signed: ``(o v sum F) / 6`` with ``o`` the apex point.
    unsigned: ``|sum F|_inf / 6``.
    """
    f_sum = sum_face_carriers(m, compensated).f_sum
    _closedness_check(f_sum, m, tol, "volume")
    if signed:
        return float(ga.join(ga.point(*apex), f_sum)[0]) / 6.0
    return ga.ideal_norm(f_sum) / 6.0


def gap_magnitude(m: TriMesh) -> float:
    """Half the Euclidean norm of the summed face carriers."""
    return 0.5 * ga.euclidean_norm(sum_face_carriers(m).f_sum)


def polygon_area(points, normal=None, apex=None):
    """Signed area of a closed planar polygon from its boundary edges.

    The edge carriers are summed first and then joined with the apex; the
    sign is measured against ``normal`` (default: the polygon's own unit
    normal, oriented so its largest coordinate is positive).
    """
    verts = [p if isinstance(p, Multivector) else ga.point(*map(float, p)) for p in points]
    if len(verts) < 3:
        raise ValueError("a polygon needs at least 3 points")
    verts = [ga.normalize_point(v) for v in verts]
    edge_sum = Multivector()
    for i, v in enumerate(verts):
        edge_sum = edge_sum + ga.join(v, verts[(i + 1) % len(verts)])
    o = ga.origin() if apex is None else (apex if isinstance(apex, Multivector) else ga.point(*apex))
    twice = ga.join(o, edge_sum).coefficients[[ga.E1, ga.E2, ga.E3]]
    if normal is None:
        norm = float(np.linalg.norm(twice))
        if norm == 0.0:
            return 0.0
        ref = twice / norm * np.sign(twice[int(np.argmax(np.abs(twice)))])
    else:
        ref = np.asarray(normal, dtype=np.float64)
        ref = ref / np.linalg.norm(ref)
    return 0.5 * float(twice @ ref)


def integrate(f: Callable[[Simplex], Multivector], complex_) -> Multivector:
    """``sum f(s) * S(s)`` over the simplices of a chain or mesh."""
    total = Multivector()
    if isinstance(complex_, TriMesh):
        items = ((1, s) for s in complex_.simplices())
    else:
        items = iter(complex_)
    for coef, s in items:
        total = total + coef * ga.geometric_product(ga._coerce(f(s)), carrier(s))
    return total


def integrate_cones(f: Callable[[Simplex], Multivector], m: TriMesh, apex=(0.0, 0.0, 0.0)) -> Multivector:
    """Boundary form of ``integrate``: each face is extended to ``[apex, v0, v1, v2]``."""
    a = ga.point(*apex)
    total = Multivector()
    for s in m.simplices():
        cone = Simplex((a,) + s.vertices)
        total = total + ga.geometric_product(ga._coerce(f(cone)), carrier(cone))
    return total


def centroid(s: Simplex) -> Multivector:
    total = Multivector()
    for v in s.vertices:
        total = total + v
    return total / len(s.vertices)


class CenterOfMass(NamedTuple):
    homogeneous: Multivector  # e123 weight == signed volume
    point: Optional[Multivector]
    volume: float

    @property
    def position(self):
        return None if self.point is None else ga.point_coordinates(self.point)


def center_of_mass(m: TriMesh, apex=(0.0, 0.0, 0.0), tol=DEFAULT_TOL, compensated=False) -> CenterOfMass:
    """Uniform-density centre of mass as a volume-weighted homogeneous point."""
    acc = sum_face_carriers(m, compensated, with_com=True, apex=apex)
    _closedness_check(acc.f_sum, m, tol, "centre of mass")
    return _finish_com(acc.com_sum, tol * 1e-3 * m.bounding_radius() ** 3)


def _finish_com(hom, vol_tol):
    volume = float(hom[ga.E123])
    if abs(volume) <= vol_tol:
        warnings.warn("zero volume: centre of mass is undefined", ZeroVolumeWarning, stacklevel=3)
        return CenterOfMass(hom, None, volume)
    return CenterOfMass(hom, ga.normalize_point(hom), volume)


@dataclass
class ValidationReport:
    n_vertices: int
    n_faces: int
    closedness_defect: float
    boundary_edges: int
    nonmanifold_edges: int
    inconsistent_edges: int
    degenerate_faces: int
    warnings: list = field(default_factory=list)

    @property
    def is_closed(self):
        return self.boundary_edges == 0

    @property
    def is_consistent(self):
        return self.inconsistent_edges == 0 and self.nonmanifold_edges == 0

    def as_dict(self):
        return {
            "n_vertices": self.n_vertices,
            "n_faces": self.n_faces,
            "closedness_defect": self.closedness_defect,
            "boundary_edges": self.boundary_edges,
            "nonmanifold_edges": self.nonmanifold_edges,
            "inconsistent_edges": self.inconsistent_edges,
            "degenerate_faces": self.degenerate_faces,
            "closed": self.is_closed,
            "consistent": self.is_consistent,
            "warnings": list(self.warnings),
        }


def validate(m: TriMesh, tol=DEFAULT_TOL) -> ValidationReport:
    """Closedness defect, edge orientation consistency and degenerate faces."""
    defect = ga.euclidean_norm(sum_face_carriers(m).f_sum)
    if m.n_faces == 0:
        return ValidationReport(m.n_vertices, 0, defect, 0, 0, 0, 0)
    f = m.faces
    a = np.concatenate([f[:, 0], f[:, 1], f[:, 2]])
    b = np.concatenate([f[:, 1], f[:, 2], f[:, 0]])
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    direction = np.where(a < b, 1, -1)
    keys = lo * m.n_vertices + hi
    uniq, inv, counts = np.unique(keys, return_inverse=True, return_counts=True)
    dir_sum = np.bincount(inv, weights=direction, minlength=uniq.size)
    boundary_edges = int(np.sum(counts == 1))
    nonmanifold = int(np.sum(counts > 2))
    inconsistent = int(np.sum((counts == 2) & (dir_sum != 0)))

    scale = max(m.bounding_radius(), 1.0) ** 2
    c = m.carriers
    norms = np.sqrt(np.einsum("ni,ni->n", c[:, ga.EUCLIDEAN_MASK], c[:, ga.EUCLIDEAN_MASK]))
    degenerate = int(np.sum(norms <= tol * scale))

    notes = []
    if boundary_edges:
        notes.append(f"{boundary_edges} boundary edges: mesh is open")
    if nonmanifold:
        notes.append(f"{nonmanifold} non-manifold edges")
    if inconsistent:
        notes.append(f"{inconsistent} edges with inconsistent orientation")
    if degenerate:
        notes.append(f"{degenerate} degenerate faces")
    if defect > tol * scale:
        notes.append(f"face carriers do not cancel (defect {defect:.3g})")
    return ValidationReport(m.n_vertices, m.n_faces, defect, boundary_edges, nonmanifold,
                            inconsistent, degenerate, notes)


def chain_from_mesh(m: TriMesh) -> Chain:
    return Chain([(1, s) for s in m.simplices()])
