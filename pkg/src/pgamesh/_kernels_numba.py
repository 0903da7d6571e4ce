"""Numba-compiled twins of ``_kernels_numpy``.

Same signatures, same per-face arithmetic; the face loops run under
``prange`` and write into preallocated per-face rows, so results do not
depend on the thread count.
"""
import os

import numba as nb
import numpy as np

from . import algebra as ga

if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ:
    # avoid probing an outdated TBB before the portable layers
    nb.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

_JIT = dict(cache=True)

_IDX = {"gp": ga.GP_IDX, "outer": ga.OUTER_IDX, "join": ga.JOIN_IDX}
_SGN = {"gp": ga.GP_SGN, "outer": ga.OUTER_SGN, "join": ga.JOIN_SGN}
J_IDX = np.ascontiguousarray(ga.JOIN_IDX)
J_SGN = np.ascontiguousarray(ga.JOIN_SGN)
O_IDX = np.ascontiguousarray(ga.OUTER_IDX)
O_SGN = np.ascontiguousarray(ga.OUTER_SGN)

E032, E013, E021, E123 = ga.E032, ga.E013, ga.E021, ga.E123


@nb.njit(**_JIT)
def _prod(a, b, idx, sgn, out):
    for k in range(16):
        out[k] = 0.0
    for i in range(16):
        ai = a[i]
        if ai == 0.0:
            continue
        for j in range(16):
            bj = b[j]
            if bj == 0.0:
                continue
            s = sgn[i, j]
            if s != 0.0:
                out[idx[i, j]] += s * ai * bj


@nb.njit(**_JIT)
def _point(p, out):
    for k in range(16):
        out[k] = 0.0
    out[E032] = p[0]
    out[E013] = p[1]
    out[E021] = p[2]
    out[E123] = 1.0


@nb.njit(parallel=True, **_JIT)
def _product_batch(a, b, idx, sgn):
    n = max(a.shape[0], b.shape[0])
    sa = 1 if a.shape[0] > 1 else 0
    sb = 1 if b.shape[0] > 1 else 0
    out = np.zeros((n, 16))
    for r in nb.prange(n):
        _prod(a[r * sa], b[r * sb], idx, sgn, out[r])
    return out


def product_batch(a, b, kind):
    a = np.ascontiguousarray(np.atleast_2d(np.asarray(a, dtype=np.float64)))
    b = np.ascontiguousarray(np.atleast_2d(np.asarray(b, dtype=np.float64)))
    return _product_batch(a, b, _IDX[kind], _SGN[kind])


def embed_points(pos):
    pos = np.asarray(pos, dtype=np.float64)
    out = np.zeros((pos.shape[0], 16))
    out[:, E032] = pos[:, 0]
    out[:, E013] = pos[:, 1]
    out[:, E021] = pos[:, 2]
    out[:, E123] = 1.0
    return out


@nb.njit(parallel=True, **_JIT)
def _face_carriers(pos, faces, jidx, jsgn):
    nf = faces.shape[0]
    out = np.zeros((nf, 16))
    for f in nb.prange(nf):
        p0 = np.empty(16)
        p1 = np.empty(16)
        p2 = np.empty(16)
        line = np.empty(16)
        _point(pos[faces[f, 0]], p0)
        _point(pos[faces[f, 1]], p1)
        _point(pos[faces[f, 2]], p2)
        _prod(p0, p1, jidx, jsgn, line)
        _prod(line, p2, jidx, jsgn, out[f])
    return out


def face_carriers(pos, faces):
    return _face_carriers(np.ascontiguousarray(pos, dtype=np.float64),
                          np.ascontiguousarray(faces, dtype=np.int64), J_IDX, J_SGN)


@nb.njit(parallel=True, **_JIT)
def _side_values(pos, plane, jidx, jsgn):
    nv = pos.shape[0]
    out = np.empty(nv)
    for v in nb.prange(nv):
        p = np.empty(16)
        tmp = np.empty(16)
        _point(pos[v], p)
        _prod(plane, p, jidx, jsgn, tmp)
        out[v] = tmp[0]
    return out


def side_values(pos, plane):
    return _side_values(np.ascontiguousarray(pos, dtype=np.float64),
                        np.ascontiguousarray(plane, dtype=np.float64), J_IDX, J_SGN)


@nb.njit(parallel=True, **_JIT)
def _cone_terms(pos, faces, carriers, apex, jidx, jsgn):
    nf = faces.shape[0]
    w = np.empty(nf)
    com = np.zeros((nf, 16))
    a16 = np.empty(16)
    _point(apex, a16)
    for f in nb.prange(nf):
        tmp = np.empty(16)
        p = np.empty(16)
        _prod(a16, carriers[f], jidx, jsgn, tmp)
        w[f] = tmp[0]
        for k in range(16):
            com[f, k] = a16[k]
        for c in range(3):
            _point(pos[faces[f, c]], p)
            for k in range(16):
                com[f, k] += p[k]
        for k in range(16):
            com[f, k] = com[f, k] * w[f]
    return w, com


def cone_terms(pos, faces, carriers, apex):
    return _cone_terms(np.ascontiguousarray(pos, dtype=np.float64),
                       np.ascontiguousarray(faces, dtype=np.int64),
                       np.ascontiguousarray(carriers, dtype=np.float64),
                       np.asarray(apex, dtype=np.float64), J_IDX, J_SGN)


@nb.njit(**_JIT)
def _intersect(pa, pb, sa, sb, plane, jidx, jsgn, oidx, osgn, out):
    if sa == 0.0:
        for k in range(16):
            out[k] = pa[k]
        return
    if sb == 0.0:
        for k in range(16):
            out[k] = pb[k]
        return
    line = np.empty(16)
    _prod(pa, pb, jidx, jsgn, line)
    _prod(line, plane, oidx, osgn, out)
    w = out[E123]
    for k in range(16):
        if k < E032 or k > E123:
            out[k] = 0.0
        else:
            out[k] = out[k] / w


@nb.njit(parallel=True, **_JIT)
def _clip_terms(pos, faces, carriers, plane, apex, tol, jidx, jsgn, oidx, osgn):
    nv = pos.shape[0]
    nf = faces.shape[0]
    s = np.empty(nv)
    for v in nb.prange(nv):
        p = np.empty(16)
        tmp = np.empty(16)
        _point(pos[v], p)
        _prod(plane, p, jidx, jsgn, tmp)
        s[v] = 0.0 if abs(tmp[0]) <= tol else tmp[0]

    a16 = np.empty(16)
    _point(apex, a16)
    f_terms = np.zeros((nf, 16))
    com_terms = np.zeros((nf, 16))
    status = np.zeros(nf, dtype=np.int8)
    for f in nb.prange(nf):
        nb_below = 0
        nzero = 0
        smin = np.inf
        for c in range(3):
            sc = s[faces[f, c]]
            if sc <= 0.0:
                nb_below += 1
            if sc == 0.0:
                nzero += 1
            smin = min(smin, sc)
        if nb_below == 0:
            continue
        tmp = np.empty(16)
        p = np.empty(16)
        full_com = np.empty(16)
        _prod(a16, carriers[f], jidx, jsgn, tmp)
        w = tmp[0]
        for k in range(16):
            full_com[k] = a16[k]
        for c in range(3):
            _point(pos[faces[f, c]], p)
            for k in range(16):
                full_com[k] += p[k]
        for k in range(16):
            full_com[k] *= w
        if nb_below == 3:
            for k in range(16):
                f_terms[f, k] = carriers[f, k]
                com_terms[f, k] = full_com[k]
            status[f] = 1
            continue
        if nb_below == 1 and nzero == 1 and smin == 0.0:
            continue
        if nb_below == 2 and nzero >= 2:
            continue
        # odd vertex: the single below (case 2) or single above (case 3)
        kodd = 0
        for c in range(3):
            sc = s[faces[f, c]]
            if (nb_below == 1 and sc <= 0.0) or (nb_below == 2 and sc > 0.0):
                kodd = c
                break
        ia = faces[f, kodd]
        ib = faces[f, (kodd + 1) % 3]
        ic = faces[f, (kodd + 2) % 3]
        pa = np.empty(16)
        pb = np.empty(16)
        pc = np.empty(16)
        x1 = np.empty(16)
        x2 = np.empty(16)
        line = np.empty(16)
        sub = np.empty(16)
        _point(pos[ia], pa)
        _point(pos[ib], pb)
        _point(pos[ic], pc)
        _intersect(pa, pb, s[ia], s[ib], plane, jidx, jsgn, oidx, osgn, x1)
        _intersect(pa, pc, s[ia], s[ic], plane, jidx, jsgn, oidx, osgn, x2)
        _prod(pa, x1, jidx, jsgn, line)
        _prod(line, x2, jidx, jsgn, sub)
        _prod(a16, sub, jidx, jsgn, tmp)
        sw = tmp[0]
        if nb_below == 1:
            for k in range(16):
                f_terms[f, k] = sub[k]
                com_terms[f, k] = (pa[k] + x1[k] + x2[k] + a16[k]) * sw
            status[f] = 2
        else:
            for k in range(16):
                f_terms[f, k] = carriers[f, k] - sub[k]
                com_terms[f, k] = full_com[k] - (pa[k] + x1[k] + x2[k] + a16[k]) * sw
            status[f] = 3
    return f_terms, com_terms, status


def clip_terms(pos, faces, carriers, plane, apex, tol):
    return _clip_terms(np.ascontiguousarray(pos, dtype=np.float64),
                       np.ascontiguousarray(faces, dtype=np.int64),
                       np.ascontiguousarray(carriers, dtype=np.float64),
                       np.ascontiguousarray(plane, dtype=np.float64),
                       np.asarray(apex, dtype=np.float64), float(tol),
                       J_IDX, J_SGN, O_IDX, O_SGN)


@nb.njit(parallel=True, **_JIT)
def _inertia_terms(pos, faces, weights, apex):
    nf = faces.shape[0]
    out = np.empty((nf, 3, 3))
    for f in nb.prange(nf):
        X = np.empty(3)
        Y = np.empty(3)
        Z = np.empty(3)
        for c in range(3):
            v = faces[f, c]
            X[c] = pos[v, 0] - apex[0]
            Y[c] = pos[v, 1] - apex[1]
            Z[c] = pos[v, 2] - apex[2]
        ix = 0.0
        iy = 0.0
        iz = 0.0
        xy = 0.0
        xz = 0.0
        yz = 0.0
        xys = 0.0
        xzs = 0.0
        yzs = 0.0
        for c in range(3):
            n = (c + 1) % 3
            ix += X[c] * (X[c] + X[n])
            iy += Y[c] * (Y[c] + Y[n])
            iz += Z[c] * (Z[c] + Z[n])
            xy += X[c] * Y[c]
            xz += X[c] * Z[c]
            yz += Y[c] * Z[c]
            xys += X[c] * Y[n] + Y[c] * X[n]
            xzs += X[c] * Z[n] + Z[c] * X[n]
            yzs += Y[c] * Z[n] + Z[c] * Y[n]
        ixy = -xy - 0.5 * xys
        ixz = -xz - 0.5 * xzs
        iyz = -yz - 0.5 * yzs
        w = weights[f]
        out[f, 0, 0] = (iy + iz) * w
        out[f, 0, 1] = ixy * w
        out[f, 0, 2] = ixz * w
        out[f, 1, 0] = ixy * w
        out[f, 1, 1] = (iz + ix) * w
        out[f, 1, 2] = iyz * w
        out[f, 2, 0] = ixz * w
        out[f, 2, 1] = iyz * w
        out[f, 2, 2] = (ix + iy) * w
    return out


def inertia_terms(pos, faces, weights, apex):
    return _inertia_terms(np.ascontiguousarray(pos, dtype=np.float64),
                          np.ascontiguousarray(faces, dtype=np.int64),
                          np.ascontiguousarray(weights, dtype=np.float64),
                          np.asarray(apex, dtype=np.float64))
