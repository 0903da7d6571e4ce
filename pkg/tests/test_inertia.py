import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_convex
from pgamesh import algebra as ga
from pgamesh import shapes
from pgamesh.errors import ConvergenceError, NonSymmetricFrameError, NonUnitRotorError, ZeroVolumeError
from pgamesh.inertia import (
    InertiaFrame,
    align_to_eigenframe,
    body_inertia,
    givens_rotor,
    jacobi_diagonalize,
    mesh_inertia,
    principal_axes,
    similarity,
    tet_inertia_frame,
)
from pgamesh.mesh import OpenMeshWarning, center_of_mass, mesh_volume


def symmetric_eigvals_closed_form(a):
    """Trigonometric solution of the 3x3 symmetric characteristic polynomial, descending."""
    a = np.asarray(a, float)
    p1 = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
    q = np.trace(a) / 3.0
    if p1 == 0.0:
        return np.sort(np.diag(a))[::-1]
    p2 = (a[0, 0] - q) ** 2 + (a[1, 1] - q) ** 2 + (a[2, 2] - q) ** 2 + 2 * p1
    p = math.sqrt(p2 / 6.0)
    b = (a - q * np.eye(3)) / p
    r = min(1.0, max(-1.0, np.linalg.det(b) / 2.0))
    phi = math.acos(r) / 3.0
    e1 = q + 2 * p * math.cos(phi)
    e3 = q + 2 * p * math.cos(phi + 2 * math.pi / 3)
    return np.array([e1, 3 * q - e1 - e3, e3])


def raw_inertia_monte_carlo(hull, n, rng):
    """Unit-density inertia integrals over a convex hull with their standard errors."""
    lo, hi = hull.min_bound, hull.max_bound
    box = float(np.prod(hi - lo))
    x = rng.uniform(lo, hi, size=(n, 3))
    inside = np.all(x @ hull.equations[:, :3].T + hull.equations[:, 3] <= 0, axis=1)
    px, py, pz = (x[:, k] * inside for k in range(3))
    samples = np.stack([
        py * py + pz * pz, -px * py, -px * pz,
        -px * py, pz * pz + px * px, -py * pz,
        -px * pz, -py * pz, px * px + py * py,
    ], axis=1) * box
    return samples.mean(axis=0).reshape(3, 3), samples.std(axis=0).reshape(3, 3) / math.sqrt(n)


def test_zero_frame_for_degenerate_points():
    o = ga.point(0, 0, 0)
    f = tet_inertia_frame(o, o, o)
    assert not np.any(f.matrix())


@given(arrays(np.float64, (3, 3), elements=st.floats(-10, 10, allow_nan=False)))
def test_tet_frame_is_symmetric(p):
    f = tet_inertia_frame(*(ga.point(*row) for row in p))
    assert f.asymmetry() == 0.0


def test_corner_tetra_against_monte_carlo(rng):
    v = [ga.point(1, 0, 0), ga.point(0, 1, 0), ga.point(0, 0, 1)]
    w = 6.0 * (1.0 / 6.0)  # o v F for the corner tetra
    got = tet_inertia_frame(*v).matrix() * w / 60.0
    x = rng.uniform(size=(2_000_000, 3))
    inside = x.sum(axis=1) <= 1.0
    xs, ys, zs = (x[:, k] * inside for k in range(3))
    mc = np.array([
        [np.mean(ys ** 2 + zs ** 2), -np.mean(xs * ys), -np.mean(xs * zs)],
        [-np.mean(xs * ys), np.mean(zs ** 2 + xs ** 2), -np.mean(ys * zs)],
        [-np.mean(xs * zs), -np.mean(ys * zs), np.mean(xs ** 2 + ys ** 2)],
    ])
    np.testing.assert_allclose(got, mc, atol=1e-3)
    # closed form: int x^2 = 1/60, int xy = 1/120 over the corner tetra
    np.testing.assert_allclose(got, [[1 / 30, -1 / 120, -1 / 120], [-1 / 120, 1 / 30, -1 / 120],
                                     [-1 / 120, -1 / 120, 1 / 30]], atol=1e-15)


def test_centered_cube():
    f = mesh_inertia(shapes.centered_cube())
    np.testing.assert_allclose(f.matrix(), np.eye(3) / 6.0, atol=1e-12)
    raw = mesh_inertia(shapes.centered_cube(2.0), per_unit_mass=False, density=3.0)
    np.testing.assert_allclose(raw.matrix(), np.eye(3) * 3.0 * 8.0 * (4 + 4) / 12.0, atol=1e-12)


def test_box_about_com_matches_analytic():
    a, b, c = 3.0, 2.0, 1.0
    m = shapes.box((a, b, c), (2, -1, 0.5))
    f = body_inertia(m)
    expect = np.diag([b * b + c * c, a * a + c * c, a * a + b * b]) / 12.0
    np.testing.assert_allclose(f.matrix(), expect, atol=1e-12)
    # parallel axis theorem for the inertia about the origin
    d = center_of_mass(m).position
    shift = (d @ d) * np.eye(3) - np.outer(d, d)
    np.testing.assert_allclose(mesh_inertia(m).matrix(), expect + shift, atol=1e-12)


def test_icosphere_converges_to_solid_ball():
    r = 1.7
    errs = []
    for level in range(5):
        f = mesh_inertia(shapes.icosphere(level, r))
        errs.append(abs(f.matrix()[0, 0] / (0.4 * r * r) - 1.0))
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[4] < 0.01


@pytest.mark.parametrize("seed", range(3))
def test_convex_solids_against_monte_carlo(seed):
    rng = np.random.default_rng(500 + seed)
    m, hull = random_convex(rng, 25, scale=rng.uniform(0.5, 1.5), offset=rng.normal(size=3))
    got = mesh_inertia(m, per_unit_mass=False).matrix()
    mean, err = raw_inertia_monte_carlo(hull, 400_000, rng)
    assert np.all(np.abs(got - mean) <= 3 * err + 1e-12)


def test_open_mesh_and_zero_volume():
    with pytest.warns(OpenMeshWarning):
        mesh_inertia(shapes.unit_cube().without_faces([0]), per_unit_mass=False)
    flat = shapes.box((1, 1, 0))
    with pytest.raises(ZeroVolumeError):
        mesh_inertia(flat)


def test_rotation_conjugates_frame(rng):
    m, _ = random_convex(rng, 25, offset=(1, 0, -1))
    f = mesh_inertia(m)
    for _ in range(5):
        r = ga.rotor(rng.normal(size=3), rng.uniform(-3, 3))
        g = mesh_inertia(m.transformed(r))
        np.testing.assert_allclose(g.matrix(), similarity(r, f).matrix(), atol=1e-8)


def random_frame(rng, scale=1.0):
    a = rng.normal(size=(3, 3)) * scale
    return InertiaFrame.from_matrix(a + a.T)


def test_similarity_identity_and_matrix_oracle(rng):
    f = random_frame(rng)
    assert np.array_equal(similarity(ga.Multivector.scalar(1.0), f).matrix(), f.matrix())
    for _ in range(20):
        r = ga.rotor(rng.normal(size=3), rng.uniform(-4, 4))
        q = ga.rotor_matrix(r)
        g = similarity(r, f)
        np.testing.assert_allclose(g.matrix(), q @ f.matrix() @ q.T, atol=1e-12)
        assert g.trace() == pytest.approx(f.trace(), abs=1e-12)
        assert g.det() == pytest.approx(f.det(), abs=1e-12)
        assert g.asymmetry() < 1e-12


def test_similarity_rejects_non_unit_rotor(rng):
    with pytest.raises(NonUnitRotorError):
        similarity(ga.Multivector.scalar(2.0), random_frame(rng))


def test_jacobi_diagonal_input():
    e = jacobi_diagonalize(InertiaFrame.from_matrix(np.diag([3.0, 2.0, 1.0])))
    assert e.sweeps == 0
    assert e.rotor == ga.Multivector.scalar(1.0)
    assert e.moments == (3.0, 2.0, 1.0)


def test_jacobi_repeated_eigenvalue():
    e = jacobi_diagonalize(InertiaFrame.from_matrix([[2, 1, 0], [1, 2, 0], [0, 0, 3]]))
    np.testing.assert_allclose(e.moments, [3, 3, 1], atol=1e-12)


def test_jacobi_sorts_and_keeps_invariant():
    f = InertiaFrame.from_matrix(np.diag([1.0, 3.0, 2.0]))
    e = jacobi_diagonalize(f)
    assert e.moments == pytest.approx((3.0, 2.0, 1.0), abs=1e-15)
    np.testing.assert_allclose(similarity(e.rotor, f).matrix(), np.diag(e.moments), atol=1e-15)


@pytest.mark.parametrize("scale", [1e-6, 1.0, 1e4])
def test_jacobi_random_frames(scale):
    rng = np.random.default_rng(int(scale * 10) + 7)
    for _ in range(60):
        f = random_frame(rng, scale)
        e = jacobi_diagonalize(f)
        a = f.matrix()
        tol = 1e-10 * max(1.0, np.abs(a).max())
        np.testing.assert_allclose(e.moments, np.sort(np.linalg.eigvalsh(a))[::-1], atol=tol)
        np.testing.assert_allclose(e.moments, symmetric_eigvals_closed_form(a), atol=tol)
        assert e.frame.off_diagonal() < tol
        rr = ga.geometric_product(e.rotor, ga.reverse(e.rotor))
        assert rr.isclose(1.0, atol=1e-12)
        for lam, v in zip(e.moments, e.eigenvectors()):
            np.testing.assert_allclose(a @ v, lam * v, atol=tol)
        assert list(e.moments) == sorted(e.moments, reverse=True)


def test_jacobi_errors(rng):
    bad = InertiaFrame.from_matrix([[1, 2, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(NonSymmetricFrameError):
        jacobi_diagonalize(bad)
    with pytest.raises(ConvergenceError) as info:
        jacobi_diagonalize(random_frame(rng), threshold=0.0, max_sweeps=1)
    assert info.value.partial is not None
    assert len(info.value.partial.moments) == 3


def test_givens_rotor_quarter_turn():
    r = givens_rotor(0, 2, math.pi / 2)
    np.testing.assert_allclose(ga.rotor_matrix(r) @ [1, 0, 0], [0, 0, 1], atol=1e-15)


def test_align_axis_aligned_box_is_permutation():
    m = shapes.box((3, 2, 1), (-1.5, -1, -0.5))
    e = jacobi_diagonalize(mesh_inertia(m))
    q = np.abs(ga.rotor_matrix(e.rotor))
    np.testing.assert_allclose(q, np.round(q), atol=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_align_recovers_rotated_box(seed):
    rng = np.random.default_rng(600 + seed)
    box = shapes.box((3, 2, 1), (-1.5, -1, -0.5))
    expect = np.sort(np.diag(mesh_inertia(box).matrix()))[::-1]
    r = ga.rotor(rng.normal(size=3), rng.uniform(-3, 3))
    turned = box.transformed(r)
    e = jacobi_diagonalize(mesh_inertia(turned))
    aligned = align_to_eigenframe(turned, e)
    f = mesh_inertia(aligned).matrix()
    np.testing.assert_allclose(f, np.diag(expect), atol=1e-8)
    assert mesh_volume(aligned) == pytest.approx(mesh_volume(turned), abs=1e-10)


def test_align_about_com_and_principal_axes(rng):
    m, _ = random_convex(rng, 30, offset=(4, -2, 3))
    pa = principal_axes(m, about_com=True)
    aligned = align_to_eigenframe(m, pa.eigen, about=pa.about)
    np.testing.assert_allclose(center_of_mass(aligned).position, 0.0, atol=1e-10)
    f = mesh_inertia(aligned)
    assert f.off_diagonal() < 1e-8
    np.testing.assert_allclose(np.diag(f.matrix()), pa.eigen.moments, atol=1e-10)
    dist = np.linalg.norm(center_of_mass(m).position)
    moved = align_to_eigenframe(m, pa.eigen)
    assert np.linalg.norm(center_of_mass(moved).position) == pytest.approx(dist, abs=1e-10)


def test_moments_are_non_negative(rng):
    for _ in range(5):
        m, _ = random_convex(rng, 20, offset=rng.normal(size=3) * 2)
        e = jacobi_diagonalize(body_inertia(m))
        assert min(e.moments) >= -1e-10

