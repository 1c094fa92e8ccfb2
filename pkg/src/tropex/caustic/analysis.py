"""Decorations and identities of a computed caustic."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..errors import DomainError
from ..lattice import LatticeVector, det
from .kinetic import CurveVertex, TropicalCurve, compute_caustic
from .levels import level_set
from .polygon import (Locus, QPolygon, boundary_lattice_points, shoelace2)


def dual_polygon_from_star(star) -> list:
    """Lattice polygon dual to a balanced star of ``(weight, direction)`` pairs.

    Each edge ``w x (p, q)`` contributes the side ``w * (-q, p)``; chaining the
    sides in angular order closes up exactly when the star is balanced.
    Returns the vertex cycle starting at the origin.
    """
    sides = sorted(((w * -d[1], w * d[0]) for w, d in star),
                   key=lambda s: math.atan2(s[1], s[0]))
    pts = [(0, 0)]
    for s in sides:
        pts.append((pts[-1][0] + s[0], pts[-1][1] + s[1]))
    if pts[-1] != (0, 0):
        raise DomainError(f"star is not balanced: sides sum to {pts[-1]}")
    return pts[:-1]


def star_multiplicity(star) -> int:
    """Twice the area of the dual polygon of a balanced star."""
    return int(abs(shoelace2(dual_polygon_from_star(star))))


def balancing_defect(curve: TropicalCurve, vertex: CurveVertex) -> tuple:
    """Weighted sum of primitive outgoing directions; zero when balanced."""
    sx = sy = 0
    for w, d in curve.incident(vertex.id):
        sx += w * d[0]
        sy += w * d[1]
    return (sx, sy)


def is_balanced(curve: TropicalCurve) -> bool:
    return all(balancing_defect(curve, v) == (0, 0) for v in curve.interior_vertices())


def vertex_multiplicity(curve: TropicalCurve, vertex) -> int:
    """Twice the lattice area of the dual polygon at an interior vertex.

    The value from the active monomials is cross-checked against the polygon
    assembled from the weighted edge star.
    """
    if not isinstance(vertex, CurveVertex):
        vertex = curve.vertex_at(vertex)
    if vertex.boundary:
        raise DomainError(f"vertex {vertex.position} lies on the boundary")
    from_star = star_multiplicity(curve.incident(vertex.id))
    if from_star != vertex.multiplicity:
        raise AssertionError(
            f"multiplicity {vertex.multiplicity} disagrees with the edge star ({from_star})")
    return vertex.multiplicity


def edge_length_identity(curve: TropicalCurve) -> bool:
    """Lattice length of every non-maximal edge equals the jump of ``F``."""
    f = {v.id: v.f_value for v in curve.vertices}
    return all(e.lattice_length == abs(f[e.source] - f[e.target])
               for e in curve.edges if not e.maximal)


def conservation_residual(poly_or_curve) -> Fraction:
    """``Length(boundary) + Length(C) - 12 m - 4 Length(max locus)``, exactly.

    ``Length(C)`` counts every edge with its weight.
    """
    curve = poly_or_curve if isinstance(poly_or_curve, TropicalCurve) else compute_caustic(poly_or_curve)
    return (curve.polygon.lattice_perimeter + curve.lattice_length
            - 12 * curve.m - 4 * curve.max_locus.lattice_length)


@dataclass(frozen=True)
class Seed:
    """Dual polygons at the ends of the max locus and the outline of their union."""

    polygons: tuple
    outline: tuple

    @property
    def interior_lattice_points(self) -> list:
        return _interior_points(self.outline)


def seed(curve: TropicalCurve) -> Seed:
    ends = [curve.vertex_at(p) for p in curve.max_locus.points]
    polys = tuple(tuple(v.dual_polygon) for v in ends)
    if len(polys) == 1:
        return Seed(polys, polys[0])
    return Seed(polys, tuple(_union_outline(*polys)))


def _union_outline(p, q) -> list:
    """Boundary cycle of the union of two CCW polygons sharing one side."""
    directed = []
    for poly in (p, q):
        n = len(poly)
        directed += [(tuple(poly[i]), tuple(poly[(i + 1) % n])) for i in range(n)]
    edges = set(directed)
    shared = {(a, b) for a, b in edges if (b, a) in edges}
    if len(shared) != 2:
        raise AssertionError("seed polygons do not share exactly one side")
    nxt = {a: b for a, b in directed if (a, b) not in shared}
    start = min(nxt)
    cycle = [start]
    while nxt[cycle[-1]] != start:
        cycle.append(nxt[cycle[-1]])
    return [LatticeVector(*c) for c in cycle]


def _interior_points(cycle) -> list:
    """Interior lattice points of a simple lattice polygon (checked by Pick)."""
    xs = [c[0] for c in cycle]
    ys = [c[1] for c in cycle]
    n = len(cycle)
    found = []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            inside = True
            for i in range(n):
                a, b = cycle[i], cycle[(i + 1) % n]
                if det((b[0] - a[0], b[1] - a[1]), (x - a[0], y - a[1])) <= 0:
                    inside = False
                    break
            if inside:
                found.append(LatticeVector(x, y))
    if _is_convex(cycle):
        pick = (abs(shoelace2(cycle)) - boundary_lattice_points(cycle)) // 2 + 1
        if pick != len(found):
            raise AssertionError("lattice point count disagrees with Pick's theorem")
        return found
    # non-convex outline: count by Pick directly and locate points by ray casting
    return _interior_points_general(cycle)


def _is_convex(cycle) -> bool:
    n = len(cycle)
    return all(det((cycle[i][0] - cycle[i - 1][0], cycle[i][1] - cycle[i - 1][1]),
                   (cycle[(i + 1) % n][0] - cycle[i][0], cycle[(i + 1) % n][1] - cycle[i][1])) >= 0
               for i in range(n))


def _interior_points_general(cycle) -> list:
    n = len(cycle)
    xs = [c[0] for c in cycle]
    ys = [c[1] for c in cycle]

    def on_boundary(x, y):
        for i in range(n):
            a, b = cycle[i], cycle[(i + 1) % n]
            if det((b[0] - a[0], b[1] - a[1]), (x - a[0], y - a[1])) == 0 and \
                    min(a[0], b[0]) <= x <= max(a[0], b[0]) and min(a[1], b[1]) <= y <= max(a[1], b[1]):
                return True
        return False

    def winding(x, y):
        # crossing number with a ray of irrational slope avoids vertices
        inside = False
        for i in range(n):
            (x1, y1), (x2, y2) = cycle[i], cycle[(i + 1) % n]
            if (y1 > y) != (y2 > y):
                xc = x1 + Fraction(y - y1, y2 - y1) * (x2 - x1)
                if xc > x:
                    inside = not inside
        return inside

    found = [LatticeVector(x, y) for x in range(min(xs), max(xs) + 1)
             for y in range(min(ys), max(ys) + 1)
             if not on_boundary(x, y) and winding(x, y)]
    pick = (abs(shoelace2(cycle)) - boundary_lattice_points(cycle)) // 2 + 1
    if pick != len(found):
        raise AssertionError("lattice point count disagrees with Pick's theorem")
    return found


def integral_F(poly: QPolygon) -> Fraction:
    """Exact integral of ``F`` over ``poly``.

    Uses ``int F = int_0^m Area(F >= t) dt``.  Between consecutive event
    times the area is a quadratic polynomial in ``t``, so Simpson's rule is
    exact on each piece.
    """
    curve = compute_caustic(poly)
    times = sorted({Fraction(0), curve.m} | {v.f_value for v in curve.vertices})

    def area(t):
        s = level_set(poly, t)
        return Fraction(0) if isinstance(s, Locus) else s.area

    total = Fraction(0)
    for a, b in zip(times, times[1:]):
        total += (b - a) * (area(a) + 4 * area((a + b) / 2) + area(b)) / 6
    return total
