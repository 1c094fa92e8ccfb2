"""Exact rational polygons and the half-plane arithmetic used on them."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from ..errors import DomainError
from ..lattice import LatticeVector, det, dot, primitive_decompose

Point = tuple  # (Fraction, Fraction)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def as_point(p) -> Point:
    return (as_fraction(p[0]), as_fraction(p[1]))


def sub(p, q) -> Point:
    return (p[0] - q[0], p[1] - q[1])


def add(p, q) -> Point:
    return (p[0] + q[0], p[1] + q[1])


def scale(p, k) -> Point:
    return (p[0] * k, p[1] * k)


def rational_decompose(d) -> tuple[Fraction, LatticeVector]:
    """Split a nonzero rational vector as ``length * u`` with ``u`` primitive.

    ``length`` is the lattice length of the segment spanned by ``d``.
    """
    dx, dy = as_fraction(d[0]), as_fraction(d[1])
    den = math.lcm(dx.denominator, dy.denominator)
    g, u = primitive_decompose((int(dx * den), int(dy * den)))
    return Fraction(g, den), u


def lattice_length(p, q) -> Fraction:
    """Lattice length of the segment ``[p, q]`` (rational slope assumed)."""
    if p[0] == q[0] and p[1] == q[1]:
        return Fraction(0)
    return rational_decompose(sub(q, p))[0]


def shoelace2(points: Sequence[Point]):
    """Twice the signed area."""
    n = len(points)
    return sum(det(points[i], points[(i + 1) % n]) for i in range(n))


def normalize_convex(points: Sequence[Point]) -> list[Point]:
    """Drop repeated vertices and vertices interior to a side of a convex cycle.

    A degenerate cycle collapses to its extreme points (one or two of them);
    a cycle that doubles back on itself raises :class:`DomainError`.
    """
    pts = []
    for p in points:
        if not pts or pts[-1] != p:
            pts.append(p)
    while len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    if len(pts) <= 2:
        return pts
    if shoelace2(pts) == 0:
        lo = min(pts)
        hi = max(pts)
        return [lo] if lo == hi else [lo, hi]
    changed = True
    while changed and len(pts) > 2:
        changed = False
        for i in range(len(pts)):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % len(pts)]
            if det(sub(b, a), sub(c, b)) == 0:
                if dot(sub(b, a), sub(c, b)) < 0:
                    raise DomainError(f"polygon boundary doubles back at ({fmt(b[0])}, {fmt(b[1])})")
                del pts[i]
                changed = True
                break
    return pts


def clip_halfplane(points: Sequence[Point], v, k) -> list[Point]:
    """Intersect a convex cycle with ``{z : v.z >= k}``."""
    out = []
    n = len(points)
    if n == 1:
        return list(points) if dot(v, points[0]) >= k else []
    for i in range(n):
        p, q = points[i], points[(i + 1) % n]
        fp, fq = dot(v, p) - k, dot(v, q) - k
        if fp >= 0:
            out.append(p)
        if (fp > 0 > fq) or (fp < 0 < fq):
            t = fp / (fp - fq)
            out.append(add(p, scale(sub(q, p), t)))
    return normalize_convex(out)


class Locus(NamedTuple):
    """A degenerate convex set: a point or a segment."""

    points: tuple

    @property
    def kind(self) -> str:
        return "point" if len(self.points) == 1 else "segment"

    @property
    def lattice_length(self) -> Fraction:
        if len(self.points) == 1:
            return Fraction(0)
        return lattice_length(*self.points)

    @property
    def midpoint(self) -> Point:
        if len(self.points) == 1:
            return self.points[0]
        p, q = self.points
        return ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)


class QPolygon:
    """A compact convex polygon with rational vertices, stored counterclockwise.

    Clockwise input is reoriented; repeated and collinear vertices are dropped.
    Equality ignores the choice of starting vertex.
    """

    __slots__ = ("vertices", "_key")

    def __init__(self, vertices: Iterable):
        pts = [as_point(p) for p in vertices]
        pts = normalize_convex(pts) if len(pts) >= 3 else pts
        if len(pts) < 3:
            raise DomainError("a polygon needs at least three non-collinear vertices")
        if shoelace2(pts) < 0:
            pts.reverse()
        n = len(pts)
        for i in range(n):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
            if det(sub(b, a), sub(c, b)) <= 0:
                raise DomainError(f"polygon is not convex at vertex ({fmt(b[0])}, {fmt(b[1])})")
        start = min(range(n), key=lambda i: (pts[i][1], pts[i][0]))
        self.vertices = tuple(pts[start:] + pts[:start])
        self._key = self.vertices

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        return isinstance(other, QPolygon) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        inner = ", ".join(f"({fmt(x)}, {fmt(y)})" for x, y in self.vertices)
        return f"QPolygon([{inner}])"

    def edge(self, i) -> tuple[Point, Point]:
        n = len(self.vertices)
        return self.vertices[i % n], self.vertices[(i + 1) % n]

    def edges(self):
        return [self.edge(i) for i in range(len(self.vertices))]

    def edge_direction(self, i) -> LatticeVector:
        p, q = self.edge(i)
        return rational_decompose(sub(q, p))[1]

    def inward_normal(self, i) -> LatticeVector:
        d = self.edge_direction(i)
        return LatticeVector(-d.y, d.x)

    def edge_lattice_length(self, i) -> Fraction:
        return lattice_length(*self.edge(i))

    @property
    def lattice_perimeter(self) -> Fraction:
        return sum((self.edge_lattice_length(i) for i in range(len(self))), Fraction(0))

    @property
    def area(self) -> Fraction:
        return shoelace2(self.vertices) / 2

    @property
    def euclidean_perimeter(self) -> float:
        return sum(math.dist(map(float, p), map(float, q)) for p, q in self.edges())

    def contains(self, z) -> bool:
        z = as_point(z)
        return all(det(sub(q, p), sub(z, p)) >= 0 for p, q in self.edges())

    def is_lattice(self) -> bool:
        return all(x.denominator == 1 and y.denominator == 1 for x, y in self.vertices)

    def translated(self, d) -> "QPolygon":
        return QPolygon([add(p, as_point(d)) for p in self.vertices])

    def scaled(self, k) -> "QPolygon":
        k = as_fraction(k)
        return QPolygon([scale(p, k) for p in self.vertices])


def fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def convex_hull(points: Iterable) -> list:
    """Counterclockwise hull (Andrew's monotone chain); collinear points dropped."""
    pts = sorted(set(tuple(p) for p in points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2 and det(sub(chain[-1], chain[-2]), sub(p, chain[-1])) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]


def boundary_lattice_points(cycle: Sequence) -> int:
    """Number of lattice points on the boundary of a lattice polygon."""
    n = len(cycle)
    return sum(math.gcd(int(cycle[(i + 1) % n][0] - cycle[i][0]),
                        int(cycle[(i + 1) % n][1] - cycle[i][1])) for i in range(n))


def interior_lattice_points(cycle: Sequence) -> int:
    """Pick's theorem for a simple lattice polygon given as a cycle."""
    twice_area = abs(shoelace2(cycle))
    b = boundary_lattice_points(cycle)
    # I = A - B/2 + 1
    return int((twice_area - b) // 2 + 1)
