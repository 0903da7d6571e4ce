"""Second moments of closed meshes as frames of three vectors, and their
diagonalization by a product of Givens rotors."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import algebra as ga
from . import kernels
from .algebra import Multivector
from .errors import ConvergenceError, NonSymmetricFrameError, NonUnitRotorError, ZeroVolumeError
from .mesh import OpenMeshWarning, TriMesh, center_of_mass, sum_face_carriers

_E = (Multivector.blade("e1"), Multivector.blade("e2"), Multivector.blade("e3"))
_VEC = [ga.E1, ga.E2, ga.E3]


def _vector(x, y, z):
    return ga.plane(x, y, z, 0.0)


def _dot(a, b):
    return float(ga.inner(a, b)[0])


@dataclass(frozen=True)
class InertiaFrame:
    """Symmetric 3x3 tensor stored as three Euclidean vectors (its columns)."""

    i1: Multivector
    i2: Multivector
    i3: Multivector

    @classmethod
    def from_matrix(cls, m):
        m = np.asarray(m, dtype=np.float64)
        return cls(*(_vector(*m[:, j]) for j in range(3)))

    @classmethod
    def zero(cls):
        return cls(Multivector(), Multivector(), Multivector())

    def vectors(self):
        return (self.i1, self.i2, self.i3)

    def matrix(self):
        return np.column_stack([v.coefficients[_VEC] for v in self.vectors()])

    def trace(self):
        return float(np.trace(self.matrix()))

    def det(self):
        return float(np.linalg.det(self.matrix()))

    def off_diagonal(self):
        m = self.matrix()
        return float(np.max(np.abs(m - np.diag(np.diag(m)))))

    def asymmetry(self):
        m = self.matrix()
        return float(np.max(np.abs(m - m.T)))

    def __add__(self, other):
        return InertiaFrame(self.i1 + other.i1, self.i2 + other.i2, self.i3 + other.i3)

    def scaled(self, s):
        return InertiaFrame(self.i1 * s, self.i2 * s, self.i3 * s)


def tet_inertia_frame(v1, v2, v3) -> InertiaFrame:
    """Unscaled frame of the tetrahedron ``[origin, v1, v2, v3]``.

    Multiply by ``6 * signed_volume / 60`` for the unit-density inertia about
    the origin.
    """
    xyz = np.array([ga.point_coordinates(v) for v in (v1, v2, v3)])
    X, Y, Z = (_vector(*xyz[:, k]) for k in range(3))
    Xs, Ys, Zs = (_vector(*np.roll(xyz[:, k], -1)) for k in range(3))

    def diag(U, Us):
        return _dot(U, U + Us)

    def off(U, V, Us, Vs):
        return -_dot(U, V) - 0.5 * (_dot(U, Vs) + _dot(V, Us))

    ix, iy, iz = diag(X, Xs), diag(Y, Ys), diag(Z, Zs)
    ixy, ixz, iyz = off(X, Y, Xs, Ys), off(X, Z, Xs, Zs), off(Y, Z, Ys, Zs)
    return InertiaFrame(
        _vector(iy + iz, ixy, ixz),
        _vector(ixy, iz + ix, iyz),
        _vector(ixz, iyz, ix + iy),
    )


def mesh_inertia(m: TriMesh, about=(0.0, 0.0, 0.0), per_unit_mass=True, density=1.0,
                 tol=1e-9, compensated=False) -> InertiaFrame:
    """Inertia tensor of the solid bounded by ``m`` about the point ``about``.

    Each face contributes its tetrahedron frame weighted by ``o v F`` (six
    times the signed cone volume).  ``per_unit_mass`` divides by the enclosed
    volume; otherwise the result is the raw tensor for the given density.
    """
    about = np.asarray(about, dtype=np.float64)
    acc = sum_face_carriers(m, compensated)
    scale = max(m.bounding_radius(), 1.0) ** 2
    if ga.euclidean_norm(acc.f_sum) > tol * scale:
        warnings.warn("mesh is not closed; inertia depends on the reference point",
                      OpenMeshWarning, stacklevel=2)
    if m.n_faces == 0:
        if per_unit_mass:
            raise ZeroVolumeError("zero enclosed volume: per-unit-mass inertia undefined")
        return InertiaFrame.zero()
    w, _ = kernels.cone_terms(m.positions, m.faces, m.carriers, about)
    terms = kernels.inertia_terms(m.positions, m.faces, w, about)
    raw = kernels.pairwise_sum(terms, compensated) / 60.0
    if per_unit_mass:
        volume = float(kernels.pairwise_sum(w[:, None], compensated)[0]) / 6.0
        if abs(volume) <= 1e-12 * m.bounding_radius() ** 3:
            raise ZeroVolumeError("zero enclosed volume: per-unit-mass inertia undefined")
        mat = raw / volume
    else:
        mat = raw * density
    # rows of the per-face blocks are the frame vectors; the block is symmetric
    return InertiaFrame.from_matrix(mat.T)


def body_inertia(m: TriMesh, per_unit_mass=True, density=1.0) -> InertiaFrame:
    """Inertia about the centre of mass."""
    com = center_of_mass(m)
    return mesh_inertia(m, about=com.position, per_unit_mass=per_unit_mass, density=density)


def _check_unit(r, tol=1e-9):
    r = ga._coerce(r)
    rr = ga.geometric_product(r, ga.reverse(r)).coefficients
    unit = np.zeros(16)
    unit[0] = 1.0
    if np.max(np.abs(rr - unit)) > tol:
        raise NonUnitRotorError("rotor is not unit: R ~R != 1")
    return r


def similarity(r, f: InertiaFrame, check=True) -> InertiaFrame:
    """Frame of ``Q M Q^T`` where ``Q`` is the rotation ``x -> R x ~R``.

    ``I'_i = sum_j (e_j . (~R e_i R)) R I_j ~R``.
    """
    r = _check_unit(r) if check else ga._coerce(r)
    rev = ga.reverse(r)
    moved = [ga.geometric_product(ga.geometric_product(r, v), rev) for v in f.vectors()]
    out = []
    for e_i in _E:
        back = ga.geometric_product(ga.geometric_product(rev, e_i), r)
        acc = Multivector()
        for e_j, mj in zip(_E, moved):
            acc = acc + mj * _dot(e_j, back)
        out.append(ga.grade_select(acc, 1))
    return InertiaFrame(*out)


class EigenResult(NamedTuple):
    rotor: Multivector
    moments: tuple
    sweeps: int
    frame: InertiaFrame  # similarity(rotor, input)

    def eigenvectors(self):
        """Unit eigenvectors of the input frame, ``~R e_i R``, as 3-arrays."""
        rev = ga.reverse(self.rotor)
        return [ga.geometric_product(ga.geometric_product(rev, e), self.rotor).coefficients[_VEC].copy()
                for e in _E]

    def rotor_even_coefficients(self):
        """The 8 even-grade coefficients (1, e01, e02, e03, e12, e31, e23, e0123)."""
        c = self.rotor.coefficients
        return [float(c[i]) for i in (0, 5, 6, 7, 8, 9, 10, 15)]


_PAIRS = ((0, 1), (0, 2), (1, 2))


def givens_rotor(p, q, angle):
    """``exp(-angle/2 e_p e_q)``: rotates ``e_p`` towards ``e_q`` by ``angle``."""
    bivector = ga.geometric_product(_E[p], _E[q])
    return ga.exp_euclidean_bivector(bivector * (-0.5 * angle))


def _renormalize(r):
    return r / ga.euclidean_norm(r)


def jacobi_diagonalize(f: InertiaFrame, threshold=None, max_sweeps=32, symmetry_tol=1e-9) -> EigenResult:
    """Cyclic Jacobi over e12, e13, e23 with Givens rotors.

    ``threshold`` defaults to 1e-12 times the largest absolute entry.  Moments
    are returned in descending order; the rotor includes the quarter-turn
    rotors that sort them.
    """
    mat = f.matrix()
    scale = float(np.max(np.abs(mat))) if mat.size else 0.0
    if f.asymmetry() > symmetry_tol * max(scale, 1.0):
        raise NonSymmetricFrameError(f"frame is not symmetric (asymmetry {f.asymmetry():.3g})")
    if threshold is None:
        threshold = 1e-12 * scale
    rotor = Multivector.scalar(1.0)
    frame = f
    sweeps = 0

    def off_ok(fr):
        m = fr.matrix()
        return all(abs(m[q, p]) <= threshold for p, q in _PAIRS)

    converged = off_ok(frame)
    while not converged and sweeps < max_sweeps:
        sweeps += 1
        for p, q in _PAIRS:
            vecs = frame.vectors()
            ipq = float(vecs[p][_VEC[q]])
            if abs(ipq) <= threshold:
                continue
            tau = (float(vecs[q][_VEC[q]]) - float(vecs[p][_VEC[p]])) / (2.0 * ipq)
            sign = 1.0 if tau >= 0.0 else -1.0
            phi = math.atan(sign / (abs(tau) + math.sqrt(1.0 + tau * tau)))
            step = givens_rotor(p, q, phi)
            frame = similarity(step, frame, check=False)
            rotor = _renormalize(ga.geometric_product(step, rotor))
        converged = off_ok(frame)

    rotor, frame = _sort_descending(rotor, f)
    result = EigenResult(rotor, tuple(float(v) for v in np.diag(frame.matrix())), sweeps, frame)
    if not converged:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps", partial=result)
    return result


def _sort_descending(rotor, f):
    frame = similarity(rotor, f, check=False)
    for _ in range(3):
        d = np.diag(frame.matrix())
        swapped = False
        for p, q in ((0, 1), (1, 2)):
            if d[p] < d[q]:
                rotor = _renormalize(ga.geometric_product(givens_rotor(p, q, math.pi / 2), rotor))
                frame = similarity(rotor, f, check=False)
                d = np.diag(frame.matrix())
                swapped = True
        if not swapped:
            break
    return rotor, frame


def align_to_eigenframe(m: TriMesh, e: EigenResult, about=None) -> TriMesh:
    """Rotate the mesh by the eigen rotor so its principal axes are e1, e2, e3.

    With ``about`` the mesh is first translated so that point is at the origin.
    """
    if about is not None:
        m = m.translated(-np.asarray(about, dtype=np.float64))
    return m.transformed(e.rotor)


class PrincipalAxes(NamedTuple):
    frame: InertiaFrame
    eigen: EigenResult
    about: Optional[np.ndarray]


def principal_axes(m: TriMesh, about_com=False, threshold=None, max_sweeps=32) -> PrincipalAxes:
    about = center_of_mass(m).position if about_com else np.zeros(3)
    frame = mesh_inertia(m, about=about)
    return PrincipalAxes(frame, jacobi_diagonalize(frame, threshold, max_sweeps), about)
