"""Delzant polygons: corner cuts, removable sides and blowdowns."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from ..errors import DomainError
from ..lattice import det
from .kinetic import velocity
from .polygon import QPolygon, add, as_fraction, scale, sub


def is_delzant(poly: QPolygon) -> bool:
    """Adjacent primitive edge directions form a basis of Z^2 at every corner."""
    n = len(poly)
    return all(abs(det(poly.edge_direction(i - 1), poly.edge_direction(i))) == 1
               for i in range(n))


def removable_sides(poly: QPolygon) -> list[int]:
    """Indices ``i`` of sides ``[v_i, v_(i+1)]`` that can be blown down.

    A side is removable when the particle leaving each of its ends moves
    parallel to the side adjacent at the other end.  For Delzant polygons
    this is the normal relation ``n_i = n_(i-1) + n_(i+1)``.
    """
    if not is_delzant(poly):
        raise DomainError("removable sides are defined for Delzant polygons")
    n = len(poly)
    if n == 3:
        return []
    out = []
    for i in range(n):
        prev, side, nxt = (poly.inward_normal(j) for j in (i - 1, i, i + 1))
        start = velocity(prev, side)
        end = velocity(side, nxt)
        if det(start, poly.edge_direction(i + 1)) == 0 and det(end, poly.edge_direction(i - 1)) == 0:
            out.append(i)
    return out


def side_index(poly: QPolygon, a, b) -> int:
    """Index of the side with endpoints ``a`` and ``b`` (either order)."""
    ends = {tuple(map(as_fraction, a)), tuple(map(as_fraction, b))}
    for i in range(len(poly)):
        if set(poly.edge(i)) == ends:
            return i
    raise DomainError(f"no side with endpoints {a}, {b}")


def blowdown(poly: QPolygon, side: int) -> QPolygon:
    """Remove a removable side by prolonging its two neighbours."""
    if side not in removable_sides(poly):
        raise DomainError(f"side {side} of {poly} is not removable")
    n = len(poly)
    p_prev, q_prev = poly.edge(side - 1)
    p_next, q_next = poly.edge(side + 1)
    d1, d2 = sub(q_prev, p_prev), sub(q_next, p_next)
    # p_prev + s d1 = p_next + u d2
    s = Fraction(det(sub(p_next, p_prev), d2), det(d1, d2)) if isinstance(det(d1, d2), int) \
        else det(sub(p_next, p_prev), d2) / det(d1, d2)
    apex = add(p_prev, scale(d1, s))
    verts = list(poly.vertices)
    a, b = side % n, (side + 1) % n
    verts[a] = apex
    del verts[b]
    return QPolygon(verts)


def corner_cut(poly: QPolygon, vertex: int, size) -> QPolygon:
    """Cut a Delzant triangle of lattice size ``size`` off a corner.

    ``size`` must be positive and smaller than both sides at the corner.
    """
    size = as_fraction(size)
    n = len(poly)
    k = vertex % n
    d_in, d_out = poly.edge_direction(k - 1), poly.edge_direction(k)
    if abs(det(d_in, d_out)) != 1:
        raise DomainError(f"corner {poly.vertices[k]} is not Delzant")
    if size <= 0 or size >= poly.edge_lattice_length(k - 1) or size >= poly.edge_lattice_length(k):
        raise DomainError(f"cut of size {size} does not fit at corner {poly.vertices[k]}")
    p = poly.vertices[k]
    a = sub(p, scale(d_in, size))
    b = add(p, scale(d_out, size))
    verts = list(poly.vertices)
    verts[k:k + 1] = [a, b]
    return QPolygon(verts)


def _random_sl2(rng: random.Random, steps: int):
    m = ((1, 0), (0, 1))
    for _ in range(steps):
        k = rng.choice((-1, 1))
        if rng.random() < 0.5:
            m = ((m[0][0] + k * m[1][0], m[0][1] + k * m[1][1]), m[1])
        else:
            m = (m[0], (m[1][0] + k * m[0][0], m[1][1] + k * m[0][1]))
    return m


def random_delzant_polygon(rng: Optional[random.Random] = None, max_cuts: int = 8,
                           shear_steps: int = 3) -> QPolygon:
    """A Delzant polygon from a random Delzant triangle and up to ``max_cuts`` corner cuts."""
    rng = rng or random.Random()
    size = rng.randint(2, 6)
    m = _random_sl2(rng, shear_steps)
    shift = (rng.randint(-3, 3), rng.randint(-3, 3))
    tri = []
    for x, y in ((0, 0), (size, 0), (0, size)):
        tri.append((m[0][0] * x + m[0][1] * y + shift[0], m[1][0] * x + m[1][1] * y + shift[1]))
    poly = QPolygon(tri)
    for _ in range(rng.randint(0, max_cuts)):
        k = rng.randrange(len(poly))
        room = min(poly.edge_lattice_length(k - 1), poly.edge_lattice_length(k))
        poly = corner_cut(poly, k, room * Fraction(rng.randint(1, 3), 4))
    return poly
