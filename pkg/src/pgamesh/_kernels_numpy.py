"""Pure-numpy implementations of the per-face kernels.

Every function here has a twin with the same signature in ``_kernels_numba``.
Both return per-face terms; reductions happen in ``kernels.pairwise_sum`` so
the summation order is identical regardless of backend.
"""
import numpy as np

from . import algebra as ga

_TENSORS = {"gp": ga.GP_TENSOR, "outer": ga.OUTER_TENSOR, "join": ga.JOIN_TENSOR}


def product_batch(a, b, kind):
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    n = max(a.shape[0], b.shape[0])
    a = np.broadcast_to(a, (n, 16))
    b = np.broadcast_to(b, (n, 16))
    outer = np.einsum("ni,nj->nij", a, b).reshape(n, 256)
    return outer @ _TENSORS[kind]


def embed_points(pos):
    pos = np.asarray(pos, dtype=np.float64)
    out = np.zeros((pos.shape[0], 16))
    out[:, ga.E032] = pos[:, 0]
    out[:, ga.E013] = pos[:, 1]
    out[:, ga.E021] = pos[:, 2]
    out[:, ga.E123] = 1.0
    return out


def face_carriers(pos, faces):
    pts = embed_points(pos)
    lines = product_batch(pts[faces[:, 0]], pts[faces[:, 1]], "join")
    return product_batch(lines, pts[faces[:, 2]], "join")


def side_values(pos, plane):
    """``p v v`` for every vertex (the value ``ax+by+cz+d``)."""
    pts = embed_points(pos)
    return product_batch(np.asarray(plane, dtype=np.float64), pts, "join")[:, 0]


def cone_terms(pos, faces, carriers, apex):
    """Signed cone weights ``apex v F`` and homogeneous centroid terms."""
    pts = embed_points(pos)
    a16 = embed_points(np.asarray(apex, dtype=np.float64)[None, :])[0]
    w = product_batch(a16, carriers, "join")[:, 0]
    psum = pts[faces[:, 0]] + pts[faces[:, 1]] + pts[faces[:, 2]] + a16
    return w, psum * w[:, None]


def _intersect(pa, pb, sa, sb, plane):
    line = product_batch(pa, pb, "join")
    x = product_batch(line, plane, "outer")
    w = x[:, ga.E123]
    safe = np.where(w == 0.0, 1.0, w)
    x = x / safe[:, None]
    x[:, :ga.E032] = 0.0
    x[:, ga.E0123] = 0.0
    x = np.where((sa == 0.0)[:, None], pa, x)
    x = np.where(((sb == 0.0) & (sa != 0.0))[:, None], pb, x)
    return x


def clip_terms(pos, faces, carriers, plane, apex, tol):
    """Per-face contributions of the part below ``plane`` (``p v v <= 0``).

    Returns ``(f_terms, com_terms, status)`` where status is 0 (discarded),
    1 (whole face), 2 (one vertex below, sub-triangle kept) or 3 (one vertex
    above, full carrier minus the above sub-triangle).
    """
    plane = np.asarray(plane, dtype=np.float64)
    pts = embed_points(pos)
    a16 = embed_points(np.asarray(apex, dtype=np.float64)[None, :])[0]
    s = side_values(pos, plane)
    s = np.where(np.abs(s) <= tol, 0.0, s)
    sf = s[faces]
    below = sf <= 0.0
    nb = below.sum(axis=1)
    nzero = (sf == 0.0).sum(axis=1)

    nf = faces.shape[0]
    f_terms = np.zeros((nf, 16))
    com_terms = np.zeros((nf, 16))
    status = np.zeros(nf, dtype=np.int8)

    w_full, com_full = cone_terms(pos, faces, carriers, apex)
    full = nb == 3
    f_terms[full] = carriers[full]
    com_terms[full] = com_full[full]
    status[full] = 1

    one_below = (nb == 1) & ~((nzero == 1) & (sf.min(axis=1) == 0.0))
    one_above = (nb == 2) & (nzero < 2)
    for mask, code, odd in ((one_below, 2, below), (one_above, 3, ~below)):
        rows = np.nonzero(mask)[0]
        if rows.size == 0:
            continue
        k = np.argmax(odd[rows], axis=1)
        tri = faces[rows]
        ia = tri[np.arange(rows.size), k]
        ib = tri[np.arange(rows.size), (k + 1) % 3]
        ic = tri[np.arange(rows.size), (k + 2) % 3]
        pa, pb, pc = pts[ia], pts[ib], pts[ic]
        x1 = _intersect(pa, pb, s[ia], s[ib], plane)
        x2 = _intersect(pa, pc, s[ia], s[ic], plane)
        sub = product_batch(product_batch(pa, x1, "join"), x2, "join")
        sub_w = product_batch(a16, sub, "join")[:, 0]
        sub_com = (pa + x1 + x2 + a16) * sub_w[:, None]
        if code == 2:
            f_terms[rows] = sub
            com_terms[rows] = sub_com
        else:
            f_terms[rows] = carriers[rows] - sub
            com_terms[rows] = com_full[rows] - sub_com
        status[rows] = code
    return f_terms, com_terms, status


def inertia_terms(pos, faces, weights, apex):
    """Per-face unscaled tetrahedron inertia frames times ``weights``.

    Row ``i`` of each 3x3 block holds the coefficients of frame vector ``I_i``.
    """
    rel = np.asarray(pos, dtype=np.float64) - np.asarray(apex, dtype=np.float64)
    tri = rel[faces]
    X, Y, Z = tri[:, :, 0], tri[:, :, 1], tri[:, :, 2]
    Xs, Ys, Zs = (np.roll(c, -1, axis=1) for c in (X, Y, Z))

    def dot(u, v):
        return np.einsum("ni,ni->n", u, v)

    ix = dot(X, X + Xs)
    iy = dot(Y, Y + Ys)
    iz = dot(Z, Z + Zs)
    ixy = -dot(X, Y) - 0.5 * (dot(X, Ys) + dot(Y, Xs))
    ixz = -dot(X, Z) - 0.5 * (dot(X, Zs) + dot(Z, Xs))
    iyz = -dot(Y, Z) - 0.5 * (dot(Y, Zs) + dot(Z, Ys))
    out = np.empty((faces.shape[0], 3, 3))
    out[:, 0, 0] = iy + iz
    out[:, 0, 1] = out[:, 1, 0] = ixy
    out[:, 0, 2] = out[:, 2, 0] = ixz
    out[:, 1, 1] = iz + ix
    out[:, 1, 2] = out[:, 2, 1] = iyz
    out[:, 2, 2] = ix + iy
    return out * np.asarray(weights)[:, None, None]
