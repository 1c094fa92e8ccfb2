"""Tropical series of a Q-polygon: its finite set of contributing monomials.

For a convex polygon every monomial that realizes the minimum of
``F(z) = inf_v (alpha_v + v.z)`` on an open set already does so next to the
boundary.  Near a corner ``P`` only directions of the corner's normal cone
matter, and ``v -> v.(z - P)`` is linear there, so the contributing
directions are the vertices of the convex hull of the nonzero lattice points
of that cone (its *sail*).  Edge normals are the two extreme sail vertices;
unimodular corners add nothing.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from ..lattice import LatticeVector, det, dot
from .polygon import QPolygon, as_point


class TropicalMonomial(NamedTuple):
    """The affine function ``z -> alpha + v.z`` with ``v`` primitive."""

    v: LatticeVector
    alpha: Fraction

    def __call__(self, z):
        return self.alpha + self.v[0] * z[0] + self.v[1] * z[1]


def _xgcd(a, b):
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def sail(u, w) -> list[LatticeVector]:
    """Vertices of the convex hull of ``(cone(u, w) cap Z^2) - {0}``.

    ``u`` and ``w`` are primitive with ``det(u, w) > 0``.  The result runs
    counterclockwise from ``u`` to ``w`` and includes both.
    """
    u, w = LatticeVector(*u), LatticeVector(*w)
    k = det(u, w)
    if k <= 0:
        raise ValueError("sail needs det(u, w) > 0")
    if k == 1:
        return [u, w]
    # M in SL(2,Z) with M u = (1, 0), then shear so that M w = (q, k), 0 <= q < k
    _, s, t = _xgcd(u.x, u.y)
    m = ((s, t), (-u.y, u.x))
    qw = m[0][0] * w.x + m[0][1] * w.y
    j = qw // k
    m = ((m[0][0] - j * m[1][0], m[0][1] - j * m[1][1]), m[1])
    q = qw - j * k
    cands = [(1, 0)] + [(-((-q * y) // k), y) for y in range(1, k)] + [(q, k)]
    # by angle; equal angles keep the shorter vector
    cands.sort(key=lambda p: (Fraction(p[1], p[0]) if p[0] else float("inf"), p[0]))
    chain = []
    for p in cands:
        if chain and det(chain[-1], p) == 0:
            continue
        while len(chain) >= 2:
            a, b = chain[-2], chain[-1]
            if det((b[0] - a[0], b[1] - a[1]), (p[0] - b[0], p[1] - b[1])) >= 0:
                chain.pop()
            else:
                break
        chain.append(p)
    # back to the original coordinates: M^-1 = [[d, -b], [-c, a]] for det 1
    (a, b), (c, d) = m
    return [LatticeVector(d * x - b * y, -c * x + a * y) for x, y in chain]


@lru_cache(maxsize=512)
def contributing_monomials(poly: QPolygon) -> tuple[TropicalMonomial, ...]:
    """All monomials of the tropical series of ``poly``, counterclockwise.

    Edge normals come first at each corner, followed by the interior sail
    directions of the corner at the end of that edge.  ``alpha_v`` makes the
    monomial vanish on the supporting line, so ``F >= 0`` on ``poly`` and
    ``F = 0`` on its boundary.
    """
    n = len(poly)
    out = []
    for i in range(n):
        u = poly.inward_normal(i)
        p = poly.vertices[i]
        out.append(TropicalMonomial(u, -dot(u, p)))
        corner = poly.vertices[(i + 1) % n]
        w = poly.inward_normal(i + 1)
        for v in sail(u, w)[1:-1]:
            out.append(TropicalMonomial(v, -dot(v, corner)))
    return tuple(out)


def eval_F(poly: QPolygon, z) -> Fraction:
    """Tropical series ``F`` of ``poly`` at ``z``.

    Inside the polygon the value is the lattice distance to the boundary.
    Outside it is negative, which doubles as the out-of-domain flag.
    """
    z = as_point(z)
    return min(mono(z) for mono in contributing_monomials(poly))


def active_monomials(poly: QPolygon, z) -> list[TropicalMonomial]:
    """Monomials attaining the minimum at ``z``."""
    z = as_point(z)
    monos = contributing_monomials(poly)
    values = [mono(z) for mono in monos]
    low = min(values)
    return [m for m, val in zip(monos, values) if val == low]


def brute_force_F(poly: QPolygon, z, radius: int) -> Fraction:
    """``min (alpha_v + v.z)`` over every nonzero ``v`` with ``|v| <= radius``.

    ``alpha_v`` comes straight from the vertices; an independent check on
    :func:`eval_F`.
    """
    z = as_point(z)
    best = None
    verts = poly.vertices
    r2 = radius * radius
    for x in range(-radius, radius + 1):
        for y in range(-radius, radius + 1):
            if (x == 0 and y == 0) or x * x + y * y > r2:
                continue
            alpha = max(-(x * p[0] + y * p[1]) for p in verts)
            val = alpha + x * z[0] + y * z[1]
            if best is None or val < best:
                best = val
    return best


def brute_force_F_grid(poly: QPolygon, points, radius: int) -> list[Fraction]:
    """:func:`brute_force_F` at many points, exactly, with integer numpy arithmetic.

    Everything is scaled by a common denominator so the minimum over all
    ``v`` is taken on int64 values; the result is converted back to Fractions.
    """
    pts = [as_point(p) for p in points]
    if not pts:
        return []
    verts = poly.vertices
    den = 1
    for x, y in list(verts) + pts:
        den = math.lcm(den, x.denominator, y.denominator)
    r = np.arange(-radius, radius + 1)
    X, Y = np.meshgrid(r, r, indexing="ij")
    keep = (X * X + Y * Y <= radius * radius) & ((X != 0) | (Y != 0))
    X, Y = X[keep].astype(np.int64), Y[keep].astype(np.int64)
    vx = np.array([int(p[0] * den) for p in verts], dtype=np.int64)
    vy = np.array([int(p[1] * den) for p in verts], dtype=np.int64)
    alpha = np.max(-(np.outer(X, vx) + np.outer(Y, vy)), axis=1)
    bound = (abs(int(alpha.max())) + 2 * radius * max(abs(int(p[0] * den)) + abs(int(p[1] * den)) for p in pts))
    if bound >= 1 << 62:
        raise OverflowError("coordinates too large for the integer brute force")
    out = []
    for x, y in pts:
        val = int(np.min(alpha + X * int(x * den) + Y * int(y * den)))
        out.append(Fraction(val, den))
    return out
