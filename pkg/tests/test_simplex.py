import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pgamesh import algebra as ga
from pgamesh.simplex import (
    Chain,
    Simplex,
    boundary,
    carrier,
    magnitude,
    magnitude_from_boundary,
    vertex_count,
)

coord = st.floats(-50, 50, allow_nan=False)
pt = st.tuples(coord, coord, coord)


def classical_magnitude(pos):
    pos = np.asarray(pos, float)
    k = len(pos) - 1
    if k == 1:
        return np.linalg.norm(pos[1] - pos[0])
    if k == 2:
        return 0.5 * np.linalg.norm(np.cross(pos[1] - pos[0], pos[2] - pos[0]))
    return abs(np.linalg.det(pos[1:] - pos[0])) / 6.0


@pytest.mark.parametrize("k", [1, 2, 3])
@given(data=st.data())
def test_magnitude_matches_vector_calculus(k, data):
    pos = data.draw(st.lists(pt, min_size=k + 1, max_size=k + 1))
    s = Simplex.from_positions(pos)
    expect = classical_magnitude(pos)
    assert magnitude(s) == pytest.approx(expect, rel=1e-10, abs=1e-9)


@pytest.mark.parametrize("k", [1, 2, 3])
@given(data=st.data())
def test_boundary_route_matches_direct(k, data):
    pos = data.draw(st.lists(pt, min_size=k + 1, max_size=k + 1))
    s = Simplex.from_positions(pos)
    assert magnitude_from_boundary(s) == pytest.approx(magnitude(s), rel=1e-9, abs=1e-7)


def test_corner_tetra_carrier_is_plus_one():
    s = Simplex.from_positions([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert float(carrier(s)[0]) == pytest.approx(1.0)
    assert magnitude(s) == pytest.approx(1 / 6)


def test_triangle_carrier_normal_follows_winding():
    s = Simplex.from_positions([(0, 0, 0), (1, 0, 0), (0, 1, 0)])
    c = carrier(s).coefficients
    assert c[ga.E3] == pytest.approx(1.0)


def test_point_carrier_and_degenerate():
    assert magnitude(Simplex.from_positions([(1, 2, 3)])) == 1.0
    assert magnitude(Simplex.from_positions([(0, 0, 0), (1, 1, 1), (2, 2, 2)])) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        magnitude_from_boundary(Simplex.from_positions([(0, 0, 0)]))


def test_simplex_vertex_limits():
    with pytest.raises(ValueError):
        Simplex(())
    with pytest.raises(ValueError):
        Simplex.from_positions(np.zeros((5, 3)))


@given(st.lists(pt, min_size=2, max_size=4, unique=True))
def test_boundary_of_boundary_vanishes(pos):
    s = Simplex.from_positions(pos)
    assert boundary(boundary(s)).is_zero()


@given(st.lists(pt, min_size=2, max_size=4, unique=True))
def test_boundary_carriers_cancel_in_euclidean_part(pos):
    # the boundary of a simplex is closed: its carriers sum to a purely ideal element
    s = Simplex.from_positions(pos)
    total = boundary(s).carrier_sum()
    assert ga.euclidean_norm(total) <= 1e-9 * (1 + magnitude(s) * math.factorial(s.k))


def test_boundary_of_edge():
    s = Simplex.from_positions([(0, 0, 0), (3, 0, 0)])
    terms = boundary(s).terms
    assert [c for c, _ in terms] == [1, -1]
    assert ga.point_coordinates(terms[0][1].vertices[0]).tolist() == [3, 0, 0]


def test_chain_rejects_mixed_dimensions():
    a = Simplex.from_positions([(0, 0, 0), (1, 0, 0)])
    b = Simplex.from_positions([(0, 0, 0), (1, 0, 0), (0, 1, 0)])
    with pytest.raises(ValueError):
        Chain([(1, a), (1, b)])


def test_chain_simplification_uses_permutation_parity():
    a = Simplex.from_positions([(0, 0, 0), (1, 0, 0), (0, 1, 0)])
    b = Simplex.from_positions([(1, 0, 0), (0, 0, 0), (0, 1, 0)])
    c = Simplex.from_positions([(0, 1, 0), (0, 0, 0), (1, 0, 0)])
    assert Chain([(1, a), (1, b)]).is_zero()
    assert len(Chain([(1, a), (1, c)]).simplified()) == 1


@given(st.lists(pt, min_size=1, max_size=30))
def test_vertex_count_is_exact(pos):
    assert vertex_count([ga.point(*p) for p in pos]) == len(pos)


def test_vertex_count_normalizes_weights():
    p = ga.point(1, 2, 3) * 4.0
    assert vertex_count([p, ga.point(0, 0, 0)]) == 2.0


def test_simplex_normalizes_vertices():
    s = Simplex((ga.point(1, 2, 3) * -2.0,))
    assert float(s.vertices[0][ga.E123]) == 1.0
    np.testing.assert_allclose(s.positions(), [[1, 2, 3]])
