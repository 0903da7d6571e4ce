"""Simplices as ordered vertex tuples, their carriers, boundaries and magnitudes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import algebra as ga
from .algebra import Multivector


@dataclass(frozen=True)
class Simplex:
    """Ordered 1 to 4 finite points; orientation is given by the order.

    Vertices are normalized to unit e123 weight on construction.
    """

    vertices: tuple

    def __post_init__(self):
        verts = tuple(ga.normalize_point(v) for v in self.vertices)
        if not 1 <= len(verts) <= 4:
            raise ValueError(f"a simplex has 1 to 4 vertices in 3D, got {len(verts)}")
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def from_positions(cls, positions):
        return cls(tuple(ga.point(*map(float, p)) for p in positions))

    @property
    def k(self):
        return len(self.vertices) - 1

    def positions(self):
        return np.array([ga.point_coordinates(v) for v in self.vertices])

    def key(self):
        return tuple(tuple(float(c) for c in v.coefficients[ga.POINT_SLICE]) for v in self.vertices)


def carrier(s: Simplex) -> Multivector:
    """Join of the vertices: point, line, plane or scalar for k = 0..3."""
    return ga.join_all(*s.vertices)


def magnitude(s: Simplex) -> float:
    return ga.euclidean_norm(carrier(s)) / math.factorial(s.k)


@dataclass
class Chain:
    """Formal integer combination of simplices of equal dimension."""

    terms: list = field(default_factory=list)

    def __post_init__(self):
        ks = {s.k for _, s in self.terms}
        if len(ks) > 1:
            raise ValueError(f"chain mixes simplex dimensions {sorted(ks)}")

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __add__(self, other):
        return Chain(list(self.terms) + list(other.terms))

    def carrier_sum(self) -> Multivector:
        total = np.zeros(16)
        for coef, s in self.terms:
            total = total + coef * carrier(s).coefficients
        return Multivector(total)

    def simplified(self) -> "Chain":
        """Merge terms that are the same simplex up to vertex permutation."""
        acc = {}
        reps = {}
        for coef, s in self.terms:
            key = s.key()
            order = sorted(range(len(key)), key=lambda i: key[i])
            parity = _parity(order)
            canon = tuple(key[i] for i in order)
            acc[canon] = acc.get(canon, 0) + parity * coef
            if canon not in reps:
                reps[canon] = Simplex(tuple(s.vertices[i] for i in order))
        return Chain([(c, reps[k]) for k, c in acc.items() if c != 0])

    def is_zero(self):
        return len(self.simplified()) == 0


def _parity(order):
    sign = 1
    seen = list(order)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def boundary(s) -> Chain:
    """``sum_i (-1)^i [v0, .., v_i missing, .., vk]``; linear over chains."""
    if isinstance(s, Chain):
        out = Chain()
        for coef, simplex in s.terms:
            out = out + Chain([(coef * c, f) for c, f in boundary(simplex).terms])
        return out
    if s.k == 0:
        return Chain()
    terms = []
    for i in range(s.k + 1):
        face = s.vertices[:i] + s.vertices[i + 1:]
        terms.append(((-1) ** i, Simplex(face)))
    return Chain(terms)


def magnitude_from_boundary(s: Simplex) -> float:
    """k-magnitude from the ideal norm of the summed boundary carriers."""
    if s.k < 1:
        raise ValueError("boundary route needs k >= 1")
    return ga.ideal_norm(boundary(s).carrier_sum()) / math.factorial(s.k)


def vertex_count(points: Iterable[Multivector]) -> float:
    """Euclidean norm of a sum of normalized points: exactly the number of points."""
    total = np.zeros(16)
    for p in points:
        total = total + ga.normalize_point(p).coefficients
    return ga.euclidean_norm(total)
