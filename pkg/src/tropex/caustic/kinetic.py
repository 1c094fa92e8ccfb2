"""The particle process that traces the tropical caustic of a Q-polygon.

Every vertex of the shrinking level set ``{F >= t}`` is a particle moving
linearly in ``t``; sides keep their normals and move inward at unit lattice
speed.  When sides shrink to zero length (possibly several at once, at one
or several points) the particles at their ends merge into one particle
between the surviving neighbours.  The process stops when the level set has
no interior; this happens at ``t = m``, the maximum of ``F``.

All times and positions are exact rationals.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..lattice import LatticeVector, det, dot
from .levels import max_locus
from .monomials import TropicalMonomial, active_monomials, contributing_monomials
from .polygon import (Locus, Point, QPolygon, add, convex_hull,
                      rational_decompose, scale, shoelace2, sub)


@dataclass(frozen=True)
class CurveVertex:
    id: int
    position: Point
    f_value: Fraction
    boundary: bool
    multiplicity: Optional[int] = None
    dual_polygon: Optional[tuple] = None


@dataclass(frozen=True)
class CurveEdge:
    source: int
    target: int
    direction: LatticeVector  # primitive, pointing from source to target
    weight: int
    lattice_length: Fraction
    maximal: bool = False


@dataclass(frozen=True)
class TropicalCurve:
    polygon: QPolygon
    vertices: tuple
    edges: tuple
    m: Fraction
    max_locus: Locus
    terminal_point: Point

    def vertex_at(self, position) -> CurveVertex:
        for v in self.vertices:
            if v.position == tuple(position):
                return v
        raise KeyError(position)

    def incident(self, vid: int) -> list:
        """``(weight, primitive outgoing direction)`` for edges at a vertex."""
        star = []
        for e in self.edges:
            if e.source == vid:
                star.append((e.weight, e.direction))
            elif e.target == vid:
                star.append((e.weight, -e.direction))
        return star

    def interior_vertices(self):
        return [v for v in self.vertices if not v.boundary]

    @property
    def lattice_length(self) -> Fraction:
        """Weighted lattice length of the whole curve."""
        return sum((e.weight * e.lattice_length for e in self.edges), Fraction(0))


class _Particle:
    __slots__ = ("node", "t0", "p0", "vel", "left", "right")

    def __init__(self, node, t0, p0, left, right):
        self.node, self.t0, self.p0 = node, t0, p0
        self.left, self.right = left, right
        self.vel = velocity(left.v, right.v)

    def at(self, t) -> Point:
        return add(self.p0, scale(self.vel, t - self.t0))


def velocity(a, b) -> Point:
    """Velocity of the corner between sides with inward normals ``a``, ``b``.

    Solves ``a.z' = b.z' = 1``; requires ``det(a, b) > 0``.
    """
    d = det(a, b)
    if d <= 0:
        raise AssertionError(f"corner normals {a}, {b} are not in convex position")
    return (Fraction(b[1] - a[1], d), Fraction(a[0] - b[0], d))


def _corner(a: TropicalMonomial, b: TropicalMonomial, t) -> Point:
    # a.v . z = t - a.alpha and b.v . z = t - b.alpha
    d = det(a.v, b.v)
    ra, rb = t - a.alpha, t - b.alpha
    return (Fraction(ra * b.v[1] - rb * a.v[1]) / d, Fraction(a.v[0] * rb - b.v[0] * ra) / d)


class _Graph:
    def __init__(self):
        self.nodes: dict = {}
        self.info: list = []
        self.edges: list = []

    def node(self, pos, t, boundary=False) -> int:
        if pos in self.nodes:
            return self.nodes[pos]
        nid = len(self.info)
        self.nodes[pos] = nid
        self.info.append((pos, t, boundary))
        return nid

    def trajectory(self, particle: _Particle, end_node: int):
        start = self.info[particle.node][0]
        end = self.info[end_node][0]
        if start == end:
            return
        weight, _ = rational_decompose(sub(particle.right.v, particle.left.v))
        length, direction = rational_decompose(sub(end, start))
        self.edges.append(CurveEdge(particle.node, end_node, direction, int(weight), length))


def compute_caustic(poly: QPolygon) -> TropicalCurve:
    """Run the particle process on ``poly`` and return the decorated curve."""
    graph = _Graph()
    active = list(contributing_monomials(poly))
    k = len(active)
    particles = []
    for j in range(k):
        a, b = active[j], active[(j + 1) % k]
        pos = _corner(a, b, Fraction(0))
        particles.append(_Particle(graph.node(pos, Fraction(0), True), Fraction(0), pos, a, b))

    t = Fraction(0)
    while True:
        k = len(active)
        lengths, rates = [], []
        for j in range(k):
            v = active[j].v
            d = (v[1], -v[0])
            n2 = dot(d, d)
            p, q = particles[j - 1], particles[j]
            lengths.append(Fraction(dot(d, sub(q.at(t), p.at(t))), n2))
            rates.append(Fraction(dot(d, sub(q.vel, p.vel)), n2))
        shrinking = [t - lengths[j] / rates[j] for j in range(k) if rates[j] < 0]
        if not shrinking:
            raise AssertionError("no side is shrinking; the level set would be unbounded")
        big_t = min(shrinking)
        gone = {j for j in range(k)
                if rates[j] <= 0 and lengths[j] + rates[j] * (big_t - t) == 0}

        runs = _runs(gone, k)
        meet = {}
        for run in runs:
            dying = list(dict.fromkeys([(run[0] - 1) % k] + list(run)))
            spots = {particles[i].at(big_t) for i in dying}
            if len(spots) != 1:
                raise AssertionError(f"collapsing side does not shrink to a point: {spots}")
            pos = spots.pop()
            nid = graph.node(pos, big_t)
            for i in dying:
                graph.trajectory(particles[i], nid)
            meet[run[0]] = (pos, nid)

        keep = [j for j in range(k) if j not in gone]
        t = big_t
        if len(keep) <= 2 or _flat(keep, active, particles, meet, t):
            return _finish(poly, graph, [active[j] for j in keep], meet, t, particles, gone)

        new_active, new_particles = [], []
        for idx, j in enumerate(keep):
            nxt = keep[(idx + 1) % len(keep)]
            new_active.append(active[j])
            if (j + 1) % k == nxt:
                new_particles.append(particles[j])
            else:
                pos, nid = meet[(j + 1) % k]
                new_particles.append(_Particle(nid, t, pos, active[j], active[nxt]))
        active, particles = new_active, new_particles


def _runs(gone: set, k: int) -> list:
    """Maximal cyclic runs of consecutive indices in ``gone``."""
    if len(gone) == k:
        return [list(range(k))]
    runs = []
    for j in sorted(gone):
        if (j - 1) % k in gone:
            continue
        run = [j]
        while (run[-1] + 1) % k in gone:
            run.append((run[-1] + 1) % k)
        runs.append(run)
    return runs


def _flat(keep, active, particles, meet, t) -> bool:
    """True when the surviving sides enclose no area at time ``t``."""
    k = len(active)
    pts = []
    for idx, j in enumerate(keep):
        nxt = keep[(idx + 1) % len(keep)]
        if (j + 1) % k == nxt:
            pts.append(particles[j].at(t))
        else:
            pts.append(meet[(j + 1) % k][0])
    return shoelace2(pts) == 0


def _finish(poly, graph, survivors, meet, t, particles, gone) -> TropicalCurve:
    # every particle has died in a run at this point (see _runs/_flat)
    spots = sorted({pos for pos, _ in meet.values()})
    if len(spots) == 1:
        locus = Locus((spots[0],))
    elif len(spots) == 2 and len(survivors) == 2:
        locus = Locus(tuple(spots))
        a, b = survivors
        weight, _ = rational_decompose(sub(b.v, a.v))
        s, e = graph.nodes[spots[0]], graph.nodes[spots[1]]
        length, direction = rational_decompose(sub(spots[1], spots[0]))
        graph.edges.append(CurveEdge(s, e, direction, int(weight), length, maximal=True))
    else:
        raise AssertionError(f"unexpected terminal configuration: {spots}")

    m, lp_locus = max_locus(poly)
    if m != t or set(lp_locus.points) != set(locus.points):
        raise AssertionError(f"kinetic maximum {t} disagrees with the linear program {m}")

    vertices = []
    for nid, (pos, f_value, boundary) in enumerate(graph.info):
        if boundary:
            vertices.append(CurveVertex(nid, pos, f_value, True))
            continue
        dual = tuple(convex_hull(mono.v for mono in active_monomials(poly, pos)))
        mult = abs(shoelace2(dual))
        vertices.append(CurveVertex(nid, pos, f_value, False, int(mult),
                                    tuple(LatticeVector(*p) for p in dual)))
    return TropicalCurve(poly, tuple(vertices), tuple(graph.edges), t, locus, locus.midpoint)
