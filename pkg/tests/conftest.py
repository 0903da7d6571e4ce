import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from scipy.spatial import ConvexHull

from pgamesh.mesh import TriMesh

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"


def convex_mesh(points):
    """Outward-oriented hull of ``points`` and the hull object (qhull oracle)."""
    pts = np.asarray(points, dtype=np.float64)
    hull = ConvexHull(pts)
    faces = hull.simplices.copy()
    tri = pts[faces]
    normal = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    flip = np.einsum("ij,ij->i", normal, hull.equations[:, :3]) < 0
    faces[flip] = faces[flip][:, ::-1]
    return TriMesh(pts, faces), hull


def random_convex(rng, n=30, scale=1.0, offset=None):
    pts = rng.normal(size=(n, 3)) * scale
    if offset is not None:
        pts = pts + np.asarray(offset)
    return convex_mesh(pts)


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.pytest_report_lines():
        terminalreporter.write_line(line)
