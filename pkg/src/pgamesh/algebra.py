"""Plane-based geometric algebra R(3,0,1).

Multivectors are stored as 16 float64 coefficients on the basis

    1, e1, e2, e3, e0, e01, e02, e03, e12, e31, e23, e032, e013, e021, e123, e0123

Vectors are planes ``a e1 + b e2 + c e3 + d e0`` (the plane ``ax+by+cz+d=0``),
trivectors are points ``x e032 + y e013 + z e021 + w e123``.  The product
tables are generated once at import time from the signature (e1²=e2²=e3²=1,
e0²=0) and stored as flat index/sign arrays so the batched kernels can run
branch-free.
"""
from __future__ import annotations

import itertools
import math
from typing import NamedTuple

import numpy as np

from .errors import DegenerateVersorError, IdealElementError, UnsupportedBivectorError

BASIS_NAMES = (
    "1", "e1", "e2", "e3", "e0",
    "e01", "e02", "e03", "e12", "e31", "e23",
    "e032", "e013", "e021", "e123",
    "e0123",
)
N_BLADES = 16
METRIC = {0: 0.0, 1: 1.0, 2: 1.0, 3: 1.0}


def _generators(name):
    return () if name == "1" else tuple(int(ch) for ch in name[1:])


def _permutation_sign(seq):
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                sign = -sign
    return sign


def _sorted_blade_product(a, b):
    """Product of two ascending-ordered blades given as bitmasks."""
    sign = 1.0
    for i in range(4):
        if a >> i & 1:
            for j in range(i):
                if b >> j & 1:
                    sign = -sign
    for i in range(4):
        if (a & b) >> i & 1:
            sign *= METRIC[i]
    return sign, a ^ b


BLADE_BITS = np.array([sum(1 << g for g in _generators(n)) for n in BASIS_NAMES], dtype=np.int64)
_ORDER_SIGN = [_permutation_sign(_generators(n)) for n in BASIS_NAMES]
_INDEX_OF_BITS = {int(b): i for i, b in enumerate(BLADE_BITS)}

GRADE = np.array([len(_generators(n)) for n in BASIS_NAMES], dtype=np.int64)
HAS_E0 = (BLADE_BITS & 1).astype(bool)
EUCLIDEAN_MASK = ~HAS_E0


def _build_tables():
    gp_idx = np.zeros((N_BLADES, N_BLADES), dtype=np.int64)
    gp_sgn = np.zeros((N_BLADES, N_BLADES))
    outer_sgn = np.zeros((N_BLADES, N_BLADES))
    for i, j in itertools.product(range(N_BLADES), repeat=2):
        s, bits = _sorted_blade_product(int(BLADE_BITS[i]), int(BLADE_BITS[j]))
        k = _INDEX_OF_BITS[bits]
        gp_idx[i, j] = k
        gp_sgn[i, j] = _ORDER_SIGN[i] * _ORDER_SIGN[j] * _ORDER_SIGN[k] * s
        if BLADE_BITS[i] & BLADE_BITS[j] == 0:
            outer_sgn[i, j] = gp_sgn[i, j]

    # right complement: e_J * dual(e_J) = e0123
    dual_idx = np.zeros(N_BLADES, dtype=np.int64)
    dual_sgn = np.zeros(N_BLADES)
    for i in range(N_BLADES):
        k = _INDEX_OF_BITS[15 ^ int(BLADE_BITS[i])]
        assert gp_idx[i, k] == 15
        dual_idx[i] = k
        dual_sgn[i] = gp_sgn[i, k]
    undual_idx = np.zeros(N_BLADES, dtype=np.int64)
    undual_sgn = np.zeros(N_BLADES)
    for i in range(N_BLADES):
        undual_idx[dual_idx[i]] = i
        undual_sgn[dual_idx[i]] = dual_sgn[i]

    # join(e_i, e_j) = undual(dual(e_i) ^ dual(e_j))
    join_idx = np.zeros((N_BLADES, N_BLADES), dtype=np.int64)
    join_sgn = np.zeros((N_BLADES, N_BLADES))
    for i, j in itertools.product(range(N_BLADES), repeat=2):
        di, dj = dual_idx[i], dual_idx[j]
        s = dual_sgn[i] * dual_sgn[j] * outer_sgn[di, dj]
        k = gp_idx[di, dj]
        join_idx[i, j] = undual_idx[k]
        join_sgn[i, j] = s * undual_sgn[k]
    return gp_idx, gp_sgn, outer_sgn, dual_idx, dual_sgn, undual_idx, undual_sgn, join_idx, join_sgn


(GP_IDX, GP_SGN, OUTER_SGN, DUAL_IDX, DUAL_SGN,
 UNDUAL_IDX, UNDUAL_SGN, JOIN_IDX, JOIN_SGN) = _build_tables()
OUTER_IDX = GP_IDX
REVERSE_SGN = np.where((GRADE // 2) % 2 == 1, -1.0, 1.0)
INVOLUTE_SGN = np.where(GRADE % 2 == 1, -1.0, 1.0)


def _dense(idx, sgn):
    t = np.zeros((N_BLADES * N_BLADES, N_BLADES))
    flat = np.arange(N_BLADES * N_BLADES)
    t[flat, idx.ravel()] = sgn.ravel()
    return t


GP_TENSOR = _dense(GP_IDX, GP_SGN)
OUTER_TENSOR = _dense(OUTER_IDX, OUTER_SGN)
JOIN_TENSOR = _dense(JOIN_IDX, JOIN_SGN)

# ideal factor: for an e0-blade e_k = s * e0 e_X, A_I[X] = s * A[k]
IDEAL_SRC = np.array([i for i in range(N_BLADES) if HAS_E0[i]], dtype=np.int64)
IDEAL_DST = np.array([_INDEX_OF_BITS[int(BLADE_BITS[i]) ^ 1] for i in IDEAL_SRC], dtype=np.int64)
IDEAL_SGN = np.array([GP_SGN[4, d] for d in IDEAL_DST])
assert all(GP_IDX[4, d] == s for s, d in zip(IDEAL_SRC, IDEAL_DST))

S, E1, E2, E3, E0 = 0, 1, 2, 3, 4
E01, E02, E03, E12, E31, E23 = 5, 6, 7, 8, 9, 10
E032, E013, E021, E123, E0123 = 11, 12, 13, 14, 15
POINT_SLICE = slice(11, 15)


class Multivector:
    """Immutable element of R(3,0,1).

    ``*`` is the geometric product, ``^`` the meet (outer product), ``&`` the
    join (regressive product), ``|`` the inner product and ``~`` reversion.
    """

    __slots__ = ("_c",)
    __array_priority__ = 100

    def __init__(self, coefficients=None):
        c = np.zeros(N_BLADES) if coefficients is None else np.array(coefficients, dtype=np.float64)
        if c.shape != (N_BLADES,):
            raise ValueError(f"expected 16 coefficients, got shape {c.shape}")
        c.setflags(write=False)
        self._c = c

    @classmethod
    def blade(cls, name, value=1.0):
        c = np.zeros(N_BLADES)
        c[BASIS_NAMES.index(name)] = value
        return cls(c)

    @classmethod
    def scalar(cls, value):
        return cls.blade("1", value)

    @property
    def coefficients(self):
        return self._c

    def __array__(self, dtype=None, copy=None):
        return self._c if dtype is None else self._c.astype(dtype)

    def __getitem__(self, key):
        if isinstance(key, str):
            return float(self._c[BASIS_NAMES.index(key)])
        return self._c[key]

    def grade(self, k):
        return grade_select(self, k)

    def __add__(self, other):
        return Multivector(self._c + _coerce(other)._c)

    __radd__ = __add__

    def __sub__(self, other):
        return Multivector(self._c - _coerce(other)._c)

    def __rsub__(self, other):
        return Multivector(_coerce(other)._c - self._c)

    def __neg__(self):
        return Multivector(-self._c)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self._c * float(other))
        return geometric_product(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self._c * float(other))
        return geometric_product(_coerce(other), self)

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self._c / float(other))
        return NotImplemented

    def __xor__(self, other):
        return wedge(self, other)

    def __and__(self, other):
        return join(self, other)

    def __or__(self, other):
        return inner(self, other)

    def __invert__(self):
        return reverse(self)

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            try:
                other = _coerce(other)
            except TypeError:
                return NotImplemented
        return bool(np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def isclose(self, other, atol=1e-9, rtol=0.0):
        return bool(np.allclose(self._c, _coerce(other)._c, atol=atol, rtol=rtol))

    def iszero(self, atol=1e-9):
        return bool(np.all(np.abs(self._c) <= atol))

    def __float__(self):
        return float(self._c[0])

    def __repr__(self):
        return f"Multivector({format_multivector(self)})"

    def __str__(self):
        return format_multivector(self)


def _coerce(x):
    if isinstance(x, Multivector):
        return x
    if isinstance(x, (int, float, np.floating, np.integer)):
        return Multivector.scalar(float(x))
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape == (N_BLADES,):
        return Multivector(arr)
    raise TypeError(f"cannot interpret {type(x).__name__} as a multivector")


def format_multivector(a, precision=6):
    """Render as a signed sum over the basis names, e.g. ``2 + 0.5e12 - e0123``."""
    c = _coerce(a)._c
    terms = []
    for value, name in zip(c, BASIS_NAMES):
        if value == 0.0:
            continue
        mag = f"{abs(value):.{precision}g}"
        if name != "1":
            mag = name if mag == "1" else f"{mag}{name}"
        terms.append(("-" if value < 0 else "+", mag))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, mag in terms[1:]:
        out += f" {sign} {mag}"
    return out


def _bilinear(a, b, tensor):
    a = _coerce(a)._c
    b = _coerce(b)._c
    return Multivector(np.outer(a, b).ravel() @ tensor)


def geometric_product(a, b):
    return _bilinear(a, b, GP_TENSOR)


def wedge(a, b):
    """Outer product; the meet of two blades."""
    return _bilinear(a, b, OUTER_TENSOR)


def join(a, b):
    """Regressive product ``undual(dual(a) ^ dual(b))``; spans blades."""
    return _bilinear(a, b, JOIN_TENSOR)


def join_all(*elements):
    out = elements[0]
    for e in elements[1:]:
        out = join(out, e)
    return out


def hodge_dual(a):
    c = _coerce(a)._c
    out = np.zeros(N_BLADES)
    out[DUAL_IDX] = DUAL_SGN * c
    return Multivector(out)


def hodge_undual(a):
    c = _coerce(a)._c
    out = np.zeros(N_BLADES)
    out[UNDUAL_IDX] = UNDUAL_SGN * c
    return Multivector(out)


def reverse(a):
    return Multivector(REVERSE_SGN * _coerce(a)._c)


def grade_involute(a):
    return Multivector(INVOLUTE_SGN * _coerce(a)._c)


def grade_select(a, k):
    if not 0 <= k <= 4:
        raise ValueError(f"grade must be in 0..4, got {k}")
    return Multivector(np.where(GRADE == k, _coerce(a)._c, 0.0))


def _inner_tensor():
    # keep basis products whose grade is |r - s|; each is a single blade
    keep = GRADE[GP_IDX] == np.abs(GRADE[:, None] - GRADE[None, :])
    return _dense(GP_IDX, np.where(keep, GP_SGN, 0.0))


INNER_TENSOR = _inner_tensor()


def inner(a, b):
    """Sum over grade pairs (r, s) of the grade-|r-s| part of a_r * b_s."""
    return _bilinear(a, b, INNER_TENSOR)


class SplitPair(NamedTuple):
    """``A = euclidean_part + e0 * ideal_factor`` with both parts e0-free."""

    euclidean_part: Multivector
    ideal_factor: Multivector


def euclidean_split(a):
    c = _coerce(a)._c
    euclid = np.where(EUCLIDEAN_MASK, c, 0.0)
    ideal = np.zeros(N_BLADES)
    ideal[IDEAL_DST] = IDEAL_SGN * c[IDEAL_SRC]
    return SplitPair(Multivector(euclid), Multivector(ideal))


def recombine(pair):
    e0 = Multivector.blade("e0")
    return pair.euclidean_part + geometric_product(e0, pair.ideal_factor)


def euclidean_norm(a):
    """``sqrt(<~A A>_0)``; only the e0-free coefficients contribute."""
    c = _coerce(a)._c
    return math.sqrt(float(np.dot(c[EUCLIDEAN_MASK], c[EUCLIDEAN_MASK])))


def ideal_norm(a, method="split"):
    """Norm of the ideal factor, via ``"split"``, ``"join"`` (A v o) or ``"dual"``."""
    if method == "split":
        return euclidean_norm(euclidean_split(a).ideal_factor)
    if method == "join":
        return euclidean_norm(join(a, origin()))
    if method == "dual":
        return euclidean_norm(hodge_dual(a))
    raise ValueError(f"unknown ideal norm method {method!r}")


def point(x, y, z):
    """Normalized point ``e123 + x e032 + y e013 + z e021``."""
    c = np.zeros(N_BLADES)
    c[E032], c[E013], c[E021], c[E123] = x, y, z, 1.0
    return Multivector(c)


def direction(x, y, z):
    """Ideal point (direction)."""
    c = np.zeros(N_BLADES)
    c[E032], c[E013], c[E021] = x, y, z
    return Multivector(c)


def plane(a, b, c, d):
    """The plane ``ax + by + cz + d = 0``."""
    out = np.zeros(N_BLADES)
    out[E1], out[E2], out[E3], out[E0] = a, b, c, d
    return Multivector(out)


def origin():
    return Multivector.blade("e123")


def point_coordinates(p):
    """Euclidean coordinates of a finite point (divides by the e123 weight)."""
    c = _coerce(p)._c
    w = c[E123]
    if abs(w) <= 1e-300:
        raise IdealElementError("ideal point has no finite coordinates")
    return np.array([c[E032], c[E013], c[E021]]) / w


def normalize(a, tol=1e-12):
    n = euclidean_norm(a)
    if n <= tol:
        raise IdealElementError("ideal element; use ideal normalization")
    return _coerce(a) / n


def normalize_point(p, tol=1e-12):
    """Scale a finite point to unit e123 weight (sign included)."""
    c = _coerce(p)._c
    w = c[E123]
    if abs(w) <= tol:
        raise IdealElementError("ideal element; use ideal normalization")
    return Multivector(np.where(GRADE == 3, c, 0.0) / w)


def versor_inverse(v, tol=1e-12):
    v = _coerce(v)
    norm_sq = float(geometric_product(v, reverse(v))._c[0])
    if abs(norm_sq) <= tol * tol:
        raise DegenerateVersorError("degenerate versor")
    return reverse(v) / norm_sq


def plane_inverse(p, tol=1e-12):
    p = _coerce(p)
    sq = float(geometric_product(p, p)._c[0])
    if abs(sq) <= tol * tol:
        raise DegenerateVersorError("degenerate versor")
    return p / sq


def sandwich(v, x):
    """Apply versor ``v`` to ``x``; odd versors flip the odd-grade part of ``x``."""
    v = _coerce(v)
    x = _coerce(x)
    vinv = versor_inverse(v)
    vc = v._c
    if not np.any(vc[GRADE % 2 == 0]):
        xc = x._c
        x_even = Multivector(np.where(GRADE % 2 == 0, xc, 0.0))
        x_odd = Multivector(np.where(GRADE % 2 == 1, xc, 0.0))
        return (geometric_product(geometric_product(v, x_even), vinv)
                + geometric_product(geometric_product(grade_involute(v), x_odd), vinv))
    return geometric_product(geometric_product(v, x), vinv)


def project(b, a):
    """Projection ``(b . a) a^-1`` of ``b`` onto the invertible blade ``a``."""
    return geometric_product(inner(b, a), versor_inverse(a))


def exp_euclidean_bivector(bivector, tol=1e-12):
    """Rotor ``cos(t) + sin(t) B^`` for a Euclidean bivector ``B = t B^``."""
    c = _coerce(bivector)._c
    allowed = np.zeros(N_BLADES, dtype=bool)
    allowed[[E12, E31, E23]] = True
    if np.any(np.abs(c[~allowed]) > tol):
        raise UnsupportedBivectorError("unsupported bivector")
    theta = euclidean_norm(bivector)
    out = np.zeros(N_BLADES)
    out[S] = math.cos(theta)
    if theta > 0.0:
        out[[E12, E31, E23]] = math.sin(theta) * c[[E12, E31, E23]] / theta
    return Multivector(out)


def rotor_matrix(r):
    """3x3 matrix of ``x -> R x ~R`` acting on Euclidean directions."""
    r = _coerce(r)
    basis = [Multivector.blade(n) for n in ("e1", "e2", "e3")]
    cols = []
    for e in basis:
        img = sandwich(r, e)._c
        cols.append(img[[E1, E2, E3]])
    return np.column_stack(cols)


def translator(x, y, z):
    """Motor moving points by ``(x, y, z)``: ``1 - (x e01 + y e02 + z e03) / 2``."""
    c = np.zeros(N_BLADES)
    c[S], c[E01], c[E02], c[E03] = 1.0, -0.5 * x, -0.5 * y, -0.5 * z
    return Multivector(c)


def rotor(axis, angle):
    """Rotation by ``angle`` (right-handed) about ``axis`` through the origin."""
    n = np.asarray(axis, dtype=np.float64)
    norm = float(np.linalg.norm(n))
    if norm == 0.0:
        raise ValueError("rotation axis must be non-zero")
    n = n / norm
    c = np.zeros(N_BLADES)
    c[E23], c[E31], c[E12] = n
    return exp_euclidean_bivector(Multivector(c * (-0.5 * angle)))


def motor(axis, angle, translation):
    """Rotation about the origin followed by a translation."""
    return geometric_product(translator(*translation), rotor(axis, angle))
