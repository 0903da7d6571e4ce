import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import ConvexHull, QhullError

from conftest import random_convex
from pgamesh import algebra as ga
from pgamesh import shapes
from pgamesh.errors import DegeneratePlaneError, NoIntersectionError
from pgamesh.mesh import TriMesh, ZeroVolumeWarning, center_of_mass, mesh_volume, sum_face_carriers
from pgamesh.slicer import (
    SlicePlane,
    axis_point,
    clip_below,
    edge_plane_intersection,
    fill_curve,
    side_of_plane,
    sliced_com,
    sliced_volume,
    sliced_volume_d_shortcut,
    sliced_volume_two_term,
    sliced_volume_with_apex,
)


def clip_oracle(points, plane):
    """Volume and centroid of the convex hull of ``points`` on the side abcd . (x,1) <= 0.

    Rebuilds the clipped solid from its kept vertices and edge crossings and
    integrates tetrahedra from an interior point.
    """
    pts = np.asarray(points, float)
    n, d = np.asarray(plane[:3], float), float(plane[3])
    s = pts @ n + d
    kept = [p for p, v in zip(pts, s) if v <= 0]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if s[i] * s[j] < 0:
                t = s[i] / (s[i] - s[j])
                kept.append(pts[i] + t * (pts[j] - pts[i]))
    if len(kept) < 4:
        return 0.0, None
    kept = np.array(kept)
    try:
        hull = ConvexHull(kept)
    except QhullError:
        return 0.0, None
    c = kept[hull.vertices].mean(axis=0)
    tri = kept[hull.simplices] - c
    vol = np.abs(np.linalg.det(tri)) / 6.0
    cents = (tri.sum(axis=1) / 4.0) + c
    return hull.volume, (vol[:, None] * cents).sum(axis=0) / vol.sum()


def random_plane(rng, m):
    n = rng.normal(size=3)
    n /= np.linalg.norm(n)
    h = m.positions @ n
    off = rng.uniform(h.min(), h.max())
    scale = rng.uniform(0.2, 5.0)
    return SlicePlane.from_coefficients(*(scale * n), -scale * off)


def test_side_of_plane():
    p = SlicePlane.from_coefficients(0, 0, 1, -0.5)
    assert side_of_plane(p, ga.point(0, 0, 1)) == 0.5
    assert side_of_plane(p, ga.point(3, 4, 0.5)) == 0.0
    assert side_of_plane(p.flipped(), ga.point(0, 0, 1)) == -0.5


def test_degenerate_plane():
    with pytest.raises(DegeneratePlaneError):
        SlicePlane.from_coefficients(0, 0, 0, 1)
    with pytest.raises(DegeneratePlaneError):
        fill_curve(shapes.unit_cube(), axis=(0, 0, 0))


def test_o_prime_lies_on_plane():
    p = SlicePlane.from_coefficients(1, 2, -2, 3)
    assert side_of_plane(p, p.o_prime) == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(ga.point_coordinates(p.o_prime), -3 * np.array([1, 2, -2]) / 9)
    q = SlicePlane.from_point_normal((1, 1, 1), (0, 0, 2))
    assert q.coefficients() == (0.0, 0.0, 2.0, -2.0)


def test_edge_intersection():
    e = ga.join(ga.point(0, 0, 0), ga.point(0, 0, 1))
    x = edge_plane_intersection(e, SlicePlane.from_coefficients(0, 0, 1, -0.5))
    np.testing.assert_allclose(ga.point_coordinates(x), [0, 0, 0.5])
    flat = ga.join(ga.point(0, 0, 0.5), ga.point(1, 0, 0.5))
    with pytest.raises(NoIntersectionError, match="no finite intersection"):
        edge_plane_intersection(flat, SlicePlane.from_coefficients(0, 0, 1, -0.5))


@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=10, max_size=10))
def test_edge_intersection_is_incident(v):
    a, b, pl = np.array(v[:3]), np.array(v[3:6]), np.array(v[6:10])
    plane = ga.plane(*pl)
    sa, sb = a @ pl[:3] + pl[3], b @ pl[:3] + pl[3]
    if sa * sb >= 0 or abs(sa - sb) < 1e-3 or np.linalg.norm(pl[:3]) < 1e-3:
        return
    x = edge_plane_intersection(ga.join(ga.point(*a), ga.point(*b)), plane)
    t = sa / (sa - sb)
    np.testing.assert_allclose(ga.point_coordinates(x), a + t * (b - a), atol=1e-8)
    assert abs(side_of_plane(plane, x)) <= 1e-9 * (1 + np.abs(pl).max() * (1 + np.abs(v).max()))


def test_axis_point():
    p = SlicePlane.from_coefficients(1, 2, 4, -8)
    np.testing.assert_allclose(ga.point_coordinates(axis_point(p, 2)), [0, 0, 2])
    with pytest.raises(NoIntersectionError):
        axis_point(SlicePlane.from_coefficients(0, 0, 1, 0), 0)


@pytest.mark.parametrize("complement", [False, True])
def test_half_cube(complement):
    m = shapes.unit_cube()
    p = SlicePlane.from_coefficients(0, 0, 1, -0.5)
    r = clip_below(m, p, use_complement=complement)
    assert sliced_volume(r, p) == pytest.approx(0.5, abs=1e-12)
    com = sliced_com(r)
    np.testing.assert_allclose(com.position, [0.5, 0.5, 0.25], atol=1e-12)
    assert com.volume == pytest.approx(0.5, abs=1e-12)
    assert sliced_volume_two_term(r, p) == pytest.approx(0.5, abs=1e-12)
    assert sliced_volume_d_shortcut(m, p) == pytest.approx(0.5, abs=1e-12)


def test_end_states():
    m = shapes.unit_cube()
    below = SlicePlane.from_coefficients(0, 0, 1, 1)
    above = SlicePlane.from_coefficients(0, 0, 1, -2)
    r = clip_below(m, below)
    assert r.triangles_below == 0 and sliced_volume(r, below) == 0.0
    with pytest.warns(ZeroVolumeWarning):
        assert sliced_com(r).position is None
    assert sliced_volume(clip_below(m, above), above) == pytest.approx(1.0, abs=1e-12)
    assert sliced_volume(clip_below(m, above, use_complement=True), above) == pytest.approx(1.0, abs=1e-12)


def test_plane_through_vertices_and_faces():
    m = shapes.unit_cube()
    for p in (SlicePlane.from_coefficients(0, 0, 1, -1), SlicePlane.from_coefficients(0, 0, 1, 0)):
        r = clip_below(m, p)
        expect = 1.0 if p.coefficients()[3] == -1 else 0.0
        assert sliced_volume(r, p) == pytest.approx(expect, abs=1e-12)
    diag = SlicePlane.from_coefficients(1, 1, 0, -1)  # through two vertical edges
    r = clip_below(m, diag)
    assert sliced_volume(r, diag) == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(sliced_com(r).position, [1 / 3, 1 / 3, 0.5], atol=1e-12)
    corner = SlicePlane.from_coefficients(1, 1, 1, -1)  # through three vertices
    assert sliced_volume(clip_below(m, corner), corner) == pytest.approx(1 / 6, abs=1e-12)


def test_near_plane_vertices_snap():
    m = shapes.unit_cube()
    p = SlicePlane.from_coefficients(0, 0, 1, -(1.0 - 1e-13))
    r = clip_below(m, p)
    assert r.triangles_split == 0
    assert sliced_volume(r, p) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(12))
def test_random_slices_match_qhull_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    m, _ = random_convex(rng, 30, scale=rng.uniform(0.5, 2), offset=rng.normal(size=3))
    p = random_plane(rng, m)
    vol, cen = clip_oracle(m.positions, p.coefficients())
    for complement in (False, True):
        r = clip_below(m, p, use_complement=complement)
        assert sliced_volume(r, p) == pytest.approx(vol, rel=1e-9, abs=1e-12)
        if cen is not None:
            np.testing.assert_allclose(sliced_com(r).position, cen, atol=1e-9)


@pytest.mark.parametrize("seed", range(8))
def test_volume_routes_agree(seed):
    rng = np.random.default_rng(200 + seed)
    m, _ = random_convex(rng, 40, offset=rng.normal(size=3) * 3)
    p = random_plane(rng, m)
    r = clip_below(m, p)
    v = sliced_volume(r, p)
    assert sliced_volume_two_term(r, p) == pytest.approx(v, abs=1e-10)
    assert sliced_volume_two_term(r, p, apex=rng.normal(size=3) * 5) == pytest.approx(v, abs=1e-10)
    assert sliced_volume_d_shortcut(m, p) == pytest.approx(v, abs=1e-12)
    for axis in range(3):
        assert sliced_volume_with_apex(r, axis_point(p, axis)) == pytest.approx(v, abs=1e-10)
    assert sliced_com(r).volume == pytest.approx(v, abs=1e-10)


@pytest.mark.parametrize("seed", range(6))
def test_partition_and_additivity(seed):
    rng = np.random.default_rng(300 + seed)
    m, _ = random_convex(rng, 30)
    p = random_plane(rng, m)
    q = p.flipped()
    below, above = clip_below(m, p), clip_below(m, q, apex=p.o_prime)
    total = sum_face_carriers(m, with_com=True, apex=ga.point_coordinates(p.o_prime))
    # sub-carrier sums reproduce the whole-mesh sum
    assert (below.f_sum_below + above.f_sum_below).isclose(total.f_sum, atol=1e-12)
    assert sliced_volume(below, p) + sliced_volume(above, q) == pytest.approx(mesh_volume(m), abs=1e-10)
    hom = sliced_com(below).homogeneous + sliced_com(above).homogeneous
    assert hom.isclose(center_of_mass(m).homogeneous, atol=1e-10)


def test_split_triangle_conservation():
    tri = TriMesh([(0, 0, 0), (1, 0, 0), (0, 1, 1)], [(0, 1, 2)])
    p = SlicePlane.from_coefficients(0, 0, 1, -0.3)
    lower, upper = clip_below(tri, p), clip_below(tri, p.flipped())
    assert lower.triangles_split == 1 and upper.triangles_split == 1
    assert (lower.f_sum_below + upper.f_sum_below).isclose(tri.face_carrier(0), atol=1e-15)
    # the one-vertex-above part keeps the parent orientation
    assert float(lower.f_sum_below[ga.E3]) * float(tri.face_carrier(0)[ga.E3]) > 0


def test_fill_curve_cube():
    table = fill_curve(shapes.unit_cube(), n_levels=11)
    np.testing.assert_allclose([r.volume for r in table], np.linspace(0, 1, 11), atol=1e-12)
    assert table[0].centroid is None
    np.testing.assert_allclose(table[-1].centroid, [0.5, 0.5, 0.5], atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_fill_curve_monotone(seed):
    rng = np.random.default_rng(400 + seed)
    m, _ = random_convex(rng, 30)
    axis = rng.normal(size=3)
    vols = [r.volume for r in fill_curve(m, axis=axis, n_levels=17)]
    assert vols[0] == pytest.approx(0.0, abs=1e-12)
    assert all(b >= a - 1e-12 for a, b in zip(vols, vols[1:]))
    assert vols[-1] == pytest.approx(mesh_volume(m), abs=1e-10)
    direct = [r.volume for r in fill_curve(m, axis=axis, n_levels=17, use_complement=False)]
    np.testing.assert_allclose(vols, direct, atol=1e-10)


def test_fill_curve_levels():
    with pytest.raises(ValueError):
        fill_curve(shapes.unit_cube(), n_levels=0)
    assert len(fill_curve(shapes.unit_cube(), n_levels=1)) == 1


def test_motor_equivariance(rng):
    m = shapes.l_prism()
    p = SlicePlane.from_coefficients(0.3, -0.2, 1.0, -0.6)
    r0 = clip_below(m, p)
    v0, c0 = sliced_volume(r0, p), sliced_com(r0).position
    mot = ga.motor(rng.normal(size=3), 1.1, rng.normal(size=3) * 4)
    m1, p1 = m.transformed(mot), p.transformed(mot)
    r1 = clip_below(m1, p1)
    assert sliced_volume(r1, p1) == pytest.approx(v0, abs=1e-10)
    expect = ga.point_coordinates(ga.sandwich(mot, ga.point(*c0)))
    np.testing.assert_allclose(sliced_com(r1).position, expect, atol=1e-10)
