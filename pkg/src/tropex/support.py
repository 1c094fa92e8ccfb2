"""Support data ``v -> alpha_v`` of convex domains and the defects of unimodular pairs.

Convention: ``alpha_v = -min_{z in Omega} z.v`` so that ``alpha_v + v.z >= 0``
on ``Omega`` with equality at the tangent point.  The defect of a pair is
``alpha_1 + alpha_2 - alpha_12``; it equals the value of the tropical series
at the caustic vertex of the pair and is nonnegative for convex domains.

Disk and L^mu values are computed in a private mpmath context (128 bits by
default, ``TROPEX_PRECISION`` overrides).  Polygon data is exact; the
parabola is exact whenever ``sqrt(mu)`` is rational.
"""
from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from .errors import DomainError, OutsideConeError
from .lattice import UnimodularPair, det, dot

DEFAULT_PRECISION = 128


def default_precision() -> int:
    bits = int(os.environ.get("TROPEX_PRECISION", DEFAULT_PRECISION))
    if bits < 64:
        raise DomainError(f"precision {bits} bits is below the 64-bit minimum")
    return bits


def make_context(prec: Optional[int] = None) -> mpmath.ctx_mp.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = prec or default_precision()
    return ctx


def to_mpf(ctx, x):
    """``x`` as an mpf of ``ctx``; Fractions are divided at working precision."""
    if isinstance(x, Fraction):
        return ctx.mpf(x.numerator) / x.denominator
    return ctx.mpf(x)


QUADRANTS = (
    UnimodularPair.of((1, 0), (0, 1)),
    UnimodularPair.of((0, 1), (-1, 0)),
    UnimodularPair.of((-1, 0), (0, -1)),
    UnimodularPair.of((0, -1), (1, 0)),
)


class SupportFunction:
    """Tangency data of a convex domain on a cone of directions.

    Subclasses provide ``alpha``.  Optional capabilities:

    * ``tangent_point(v)`` and ``segment_area(v1, v2)`` (area between the
      chord joining two tangent points and the boundary arc) enable exact
      tails of the defect sums;
    * ``minimal_model`` and ``branch_bases`` describe the polygon whose
      caustic branches host the whole tree of the domain;
    * ``kernel`` names the compiled defect formula, if any; with
      ``kernel_inexact`` its values are good only to about ``|v| * 2**-52``
      in absolute terms, because the formula subtracts norms.
    """

    name = "support"
    basis: UnimodularPair = QUADRANTS[0]
    branch_bases: tuple = (QUADRANTS[0],)
    minimal_model = None
    kernel: Optional[tuple] = None
    has_tail_oracle = False
    euclidean_defect_is_defect = False
    kernel_inexact = False   # float kernel loses digits to cancellation; refine before exact totals

    def alpha(self, v):
        raise NotImplementedError

    def in_cone(self, v) -> bool:
        return v[0] != 0 or v[1] != 0

    def check_cone(self, v):
        if not self.in_cone(v):
            raise OutsideConeError(f"direction {tuple(v)} lies outside the cone of {self.name}")

    def defect_value(self, v1, v2):
        return self.alpha(v1) + self.alpha(v2) - self.alpha((v1[0] + v2[0], v1[1] + v2[1]))

    def tangent_point(self, v):
        raise NotImplementedError(f"{self.name} has no tangent point oracle")

    def segment_area(self, v1, v2):
        raise NotImplementedError(f"{self.name} has no segment area oracle")

    def arc_lattice_length(self, v1, v2):
        return 0

    def vector(self, m):
        """``(v1, v2)`` for a coefficient quadruple ``m`` relative to ``basis``."""
        a, b, c, d = m
        (p, q), (r, s) = self.basis.v1, self.basis.v2
        return (a * p + b * r, a * q + b * s), (c * p + d * r, c * q + d * s)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class Disk(SupportFunction):
    """The unit disk; ``alpha_v = |v|``."""

    branch_bases = QUADRANTS
    has_tail_oracle = True
    euclidean_defect_is_defect = True

    def __init__(self, prec: Optional[int] = None):
        from .caustic.polygon import QPolygon

        self.ctx = make_context(prec)
        self.name = "disk"
        self.minimal_model = QPolygon([(-1, -1), (1, -1), (1, 1), (-1, 1)])
        self.kernel = ("disk", 2.0)

    def alpha(self, v):
        self.check_cone(v)
        return self.ctx.sqrt(self.ctx.mpf(v[0]) ** 2 + self.ctx.mpf(v[1]) ** 2)

    def defect_value(self, v1, v2):
        # 2 det^2 / ((A + C + E)(AC + v1.v2)): no cancellation
        ctx = self.ctx
        a, c = self.alpha(v1), self.alpha(v2)
        e = self.alpha((v1[0] + v2[0], v1[1] + v2[1]))
        return 2 * ctx.mpf(det(v1, v2)) ** 2 / ((a + c + e) * (a * c + dot(v1, v2)))

    def tangent_point(self, v):
        n = self.alpha(v)
        return (-v[0] / n, -v[1] / n)

    def segment_area(self, v1, v2):
        ctx = self.ctx
        theta = ctx.atan2(det(v1, v2), dot(v1, v2))
        return (theta - ctx.sin(theta)) / 2

    def tail_terms(self, v1, v2):
        """``(a, b)``: the values of each tangent form at the other tangent point."""
        ctx = self.ctx
        n1, n2 = self.alpha(v1), self.alpha(v2)
        d2 = ctx.mpf(det(v1, v2)) ** 2
        k = n1 * n2 + dot(v1, v2)
        return d2 / (n1 * k), d2 / (n2 * k)


class LmuBall(SupportFunction):
    """Unit ball of the L^mu norm, ``mu > 1``; ``alpha_v = |v|_nu`` with ``1/mu + 1/nu = 1``."""

    branch_bases = QUADRANTS
    has_tail_oracle = True
    kernel_inexact = True

    def __init__(self, mu, prec: Optional[int] = None):
        from .caustic.polygon import QPolygon

        self.ctx = make_context(prec)
        mu = to_mpf(self.ctx, mu)
        if not mu > 1:
            raise DomainError(f"L^mu ball needs mu > 1, got {mu}")
        self.mu = mu
        self.nu = mu / (mu - 1)
        self.name = f"lmu:{mpmath.nstr(mu, 15)}"
        self.minimal_model = QPolygon([(-1, -1), (1, -1), (1, 1), (-1, 1)])
        self.kernel = ("lmu", float(self.nu))

    def alpha(self, v):
        self.check_cone(v)
        return alpha_lmu(v, self.nu, ctx=self.ctx)

    def tangent_point(self, v):
        ctx, nu = self.ctx, self.nu
        n = self.alpha(v)
        return tuple(-ctx.sign(x) * abs(ctx.mpf(x)) ** (nu - 1) / n ** (nu - 1) for x in v)

    def segment_area(self, v1, v2):
        ctx, mu = self.ctx, self.mu
        t1, t2 = self.tangent_point(v1), self.tangent_point(v2)
        p1, p2 = ctx.atan2(t1[1], t1[0]), ctx.atan2(t2[1], t2[0])
        if p2 < p1:
            p2 += 2 * ctx.pi

        def r2(phi):
            return (abs(ctx.cos(phi)) ** mu + abs(ctx.sin(phi)) ** mu) ** (-2 / mu)

        # split at the axes, where the radius is not smooth
        cuts = [p1] + [k * ctx.pi / 2 for k in range(-4, 9) if p1 < k * ctx.pi / 2 < p2] + [p2]
        sector = ctx.quad(r2, cuts) / 2
        return sector - abs(det(t1, t2)) / 2

    def tail_terms(self, v1, v2):
        t1, t2 = self.tangent_point(v1), self.tangent_point(v2)
        return self.alpha(v2) + dot(v2, t1), self.alpha(v1) + dot(v1, t2)


class Parabola(SupportFunction):
    """The region ``y >= mu x^2 - 1`` on the cone ``q > 0`` of directions ``(p, q)``.

    It is the point reflection of ``y <= 1 - mu x^2``, so the defects agree.
    The starting basis ``((2 sqrt(mu), 1), (0, 1))`` has determinant
    ``2 sqrt(mu)``; with it the defects do not depend on ``mu``.
    """

    has_tail_oracle = True

    def __init__(self, mu, prec: Optional[int] = None):
        self.ctx = make_context(prec)
        self.mu, self.sqrt_mu = _parse_positive_with_sqrt(mu, self.ctx)
        self.name = f"parabola:{mu}"
        self.basis = UnimodularPair((2 * self.sqrt_mu, 1), (0, 1))
        self.branch_bases = (self.basis,)
        self.kernel = ("parabola", float(self.mu))

    def in_cone(self, v) -> bool:
        return v[1] > 0

    def alpha(self, v):
        self.check_cone(v)
        p, q = v
        return (4 * q * q * self.mu + p * p) / (4 * q * self.mu)

    def defect_value(self, v1, v2):
        for v in (v1, v2):
            self.check_cone(v)
        q1, q2 = v1[1], v2[1]
        return det(v1, v2) ** 2 / (4 * self.mu * q1 * q2 * (q1 + q2))

    def tangent_point(self, v):
        self.check_cone(v)
        p, q = v
        return (-p / (2 * q * self.mu), p * p / (4 * q * q * self.mu) - 1)

    def segment_area(self, v1, v2):
        dx = self.tangent_point(v1)[0] - self.tangent_point(v2)[0]
        return self.mu * abs(dx) ** 3 / 6

    def tail_terms(self, v1, v2):
        t1, t2 = self.tangent_point(v1), self.tangent_point(v2)
        return self.alpha(v2) + dot(v2, t1), self.alpha(v1) + dot(v1, t2)


class PolygonSupport(SupportFunction):
    """Exact support data of a convex polygon."""

    branch_bases = QUADRANTS

    def __init__(self, vertices):
        from .caustic.polygon import QPolygon

        self.polygon = vertices if isinstance(vertices, QPolygon) else QPolygon(vertices)
        self.name = "polygon"
        self.minimal_model = None

    def alpha(self, v):
        self.check_cone(v)
        return alpha_polygon(v, self.polygon.vertices)

    def tangent_point(self, v):
        return min(self.polygon.vertices, key=lambda z: dot(z, v))


def _parse_positive_with_sqrt(mu, ctx):
    """``(mu, sqrt(mu))``, both exact Fractions when the root is rational."""
    try:
        frac = Fraction(str(mu)) if not isinstance(mu, Fraction) else mu
    except (ValueError, TypeError):
        frac = None
    if frac is not None:
        if frac <= 0:
            raise DomainError(f"mu must be positive, got {mu}")
        rn, rd = math.isqrt(frac.numerator), math.isqrt(frac.denominator)
        if rn * rn == frac.numerator and rd * rd == frac.denominator:
            return frac, Fraction(rn, rd)
        return ctx.mpf(frac.numerator) / frac.denominator, ctx.sqrt(ctx.mpf(frac.numerator) / frac.denominator)
    m = ctx.mpf(mu)
    if m <= 0:
        raise DomainError(f"mu must be positive, got {mu}")
    return m, ctx.sqrt(m)


# closed forms --------------------------------------------------------------

def alpha_disk(v, ctx=None):
    if v[0] == 0 and v[1] == 0:
        raise DomainError("zero direction")
    ctx = ctx or make_context()
    return ctx.sqrt(ctx.mpf(v[0]) ** 2 + ctx.mpf(v[1]) ** 2)


def alpha_parabola(v, mu):
    p, q = v
    if q <= 0:
        raise OutsideConeError(f"direction {tuple(v)} is outside the cone q > 0")
    mu = Fraction(mu) if isinstance(mu, (int, Fraction, str)) else mu
    if mu <= 0:
        raise DomainError("mu must be positive")
    return (4 * q * q * mu + p * p) / (4 * q * mu)


def alpha_lmu(v, nu, ctx=None):
    if v[0] == 0 and v[1] == 0:
        raise DomainError("zero direction")
    ctx = ctx or make_context()
    nu = ctx.mpf(nu)
    if nu < 1:
        raise DomainError("nu must be at least 1")
    return (abs(ctx.mpf(v[0])) ** nu + abs(ctx.mpf(v[1])) ** nu) ** (1 / nu)


def alpha_polygon(v, vertices):
    vertices = list(vertices)
    if not vertices:
        raise DomainError("empty vertex list")
    return max(-(z[0] * v[0] + z[1] * v[1]) for z in vertices)


@dataclass(frozen=True)
class Defect:
    pair: UnimodularPair
    value: object
    vertex: Optional[tuple] = None


def defect(sf: SupportFunction, p: UnimodularPair, with_vertex: bool = False) -> Defect:
    for v in (p.v1, p.v2, p.mediant):
        sf.check_cone(v)
    value = sf.defect_value(p.v1, p.v2)
    return Defect(p, value, caustic_vertex(sf, p) if with_vertex else None)


def caustic_vertex(sf: SupportFunction, p: UnimodularPair):
    """The point where the three tangent forms of ``p`` take a common value.

    That value is the defect: ``v_i . z = f - alpha_i``.
    """
    v1, v2 = p.v1, p.v2
    d = det(v1, v2)
    if d == 0:
        raise DomainError("singular pair: det(v1, v2) = 0")
    f = sf.defect_value(v1, v2)
    r1, r2 = f - sf.alpha(v1), f - sf.alpha(v2)
    if isinstance(d, int) and all(isinstance(x, (int, Fraction)) for x in (r1, r2)):
        d = Fraction(d)
    return ((r1 * v2[1] - r2 * v1[1]) / d, (v1[0] * r2 - v2[0] * r1) / d)


# domain grammar -----------------------------------------------------------

_NUM = r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?(?:/\d+)?"


def parse_domain(spec: str, prec: Optional[int] = None) -> SupportFunction:
    """``disk | lmu:<mu> | parabola:<mu> | polygon:x1,y1;x2,y2;...``"""
    from .caustic.polygon import QPolygon

    text = spec.strip()
    if text == "disk":
        return Disk(prec)
    kind, sep, rest = text.partition(":")
    if not sep:
        raise DomainError(f"unknown domain {spec!r} (column 1)")
    if kind in ("lmu", "parabola"):
        if not re.fullmatch(_NUM, rest):
            raise DomainError(f"malformed number {rest!r} at column {len(kind) + 2}")
        return LmuBall(_num(rest), prec) if kind == "lmu" else Parabola(_num(rest), prec)
    if kind == "polygon":
        return PolygonSupport(QPolygon(parse_points(rest, offset=len(kind) + 1)))
    raise DomainError(f"unknown domain kind {kind!r} (column 1)")


def _num(s: str) -> Fraction:
    return Fraction(s)


def parse_points(text: str, offset: int = 0) -> list:
    """Parse ``x1,y1;x2,y2;...`` into exact rational points."""
    pts = []
    col = offset
    for chunk in text.split(";"):
        parts = chunk.split(",")
        if len(parts) != 2 or not all(re.fullmatch(_NUM, p.strip()) for p in parts):
            raise DomainError(f"malformed point {chunk!r} at column {col + 1}")
        pts.append((_num(parts[0].strip()), _num(parts[1].strip())))
        col += len(chunk) + 1
    if len(pts) < 3:
        raise DomainError(f"a polygon needs at least three points, got {len(pts)}")
    return pts
