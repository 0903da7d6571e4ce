"""Backend selection for the per-face kernels, plus deterministic reduction.

The backend is chosen once at import from ``PGAMESH_BACKEND`` (``numba`` or
``numpy``; default ``numba``).  If numba cannot be imported the numpy path is
used.  ``use_backend`` switches at runtime (tests and the benchmark use it).
"""
import importlib
import logging
import math
import os

import numpy as np

log = logging.getLogger(__name__)

_BACKENDS = {"numba": "pgamesh._kernels_numba", "numpy": "pgamesh._kernels_numpy"}
_active = None
_active_name = None


def load_backend(name):
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choose from {sorted(_BACKENDS)}")
    return importlib.import_module(_BACKENDS[name])


def use_backend(name):
    global _active, _active_name
    try:
        _active = load_backend(name)
        _active_name = name
    except ImportError:
        if name != "numba":
            raise
        log.warning("numba unavailable, falling back to numpy kernels")
        _active = load_backend("numpy")
        _active_name = "numpy"
    return _active_name


def backend_name():
    return _active_name


def set_threads(n):
    if _active_name == "numba" and n:
        import numba
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


use_backend(os.environ.get("PGAMESH_BACKEND", "numba").strip().lower() or "numba")


def product_batch(a, b, kind):
    return _active.product_batch(a, b, kind)


def embed_points(pos):
    return _active.embed_points(pos)


def face_carriers(pos, faces):
    return _active.face_carriers(pos, faces)


def side_values(pos, plane):
    return _active.side_values(pos, plane)


def cone_terms(pos, faces, carriers, apex):
    return _active.cone_terms(pos, faces, carriers, apex)


def clip_terms(pos, faces, carriers, plane, apex, tol):
    return _active.clip_terms(pos, faces, carriers, plane, apex, tol)


def inertia_terms(pos, faces, weights, apex):
    return _active.inertia_terms(pos, faces, weights, apex)


def pairwise_sum(terms, compensated=False):
    """Sum along axis 0 in a fixed binary-tree order.

    Level by level, row ``2i`` is added to row ``2i+1``; an odd trailing row is
    carried up unchanged.  ``compensated=True`` uses ``math.fsum`` per column
    instead (correctly rounded, slower).
    """
    arr = np.asarray(terms, dtype=np.float64)
    if arr.shape[0] == 0:
        return np.zeros(arr.shape[1:])
    if compensated:
        flat = arr.reshape(arr.shape[0], -1)
        out = np.array([math.fsum(flat[:, k]) for k in range(flat.shape[1])])
        return out.reshape(arr.shape[1:])
    while arr.shape[0] > 1:
        n = arr.shape[0]
        paired = arr[0:n - 1:2] + arr[1:n:2]
        if n % 2:
            paired = np.concatenate([paired, arr[n - 1:]], axis=0)
        arr = paired
    return arr[0].copy()
