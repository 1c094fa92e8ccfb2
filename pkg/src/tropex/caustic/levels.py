"""Level sets ``{F >= t}`` and the maximum of the tropical series."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from ..errors import DomainError
from .monomials import contributing_monomials
from .polygon import Locus, QPolygon, as_fraction, clip_halfplane, shoelace2


def _clip_to_level(poly: QPolygon, t: Fraction) -> list:
    pts = list(poly.vertices)
    for mono in contributing_monomials(poly):
        # alpha + v.z >= t
        pts = clip_halfplane(pts, mono.v, t - mono.alpha)
        if not pts:
            break
    return pts


@lru_cache(maxsize=512)
def max_locus(poly: QPolygon) -> tuple[Fraction, Locus]:
    """Maximum ``m`` of ``F`` and the set where it is attained.

    ``m`` solves the linear program ``max t`` subject to
    ``alpha_v + v.z >= t`` for every monomial; it is found exactly by
    enumerating the basic solutions (three tight constraints).
    """
    monos = contributing_monomials(poly)
    best = None
    for a, b, c in combinations(monos, 3):
        sol = _solve3(a, b, c)
        if sol is None:
            continue
        x, y, t = sol
        if best is not None and t <= best:
            continue
        if all(m.alpha + m.v[0] * x + m.v[1] * y >= t for m in monos):
            best = t
    if best is None:
        raise DomainError("linear program for the maximum has no basic solution")
    pts = _clip_to_level(poly, best)
    if not pts or len(pts) > 2 or (len(pts) >= 3 and shoelace2(pts) != 0):
        raise AssertionError(f"maximum level set is not a point or a segment: {pts}")
    return best, Locus(tuple(pts))


def _solve3(a, b, c):
    # rows (v_x, v_y, -1) . (x, y, t) = -alpha
    rows = [(m.v[0], m.v[1], -1, -m.alpha) for m in (a, b, c)]
    d = _det3([r[:3] for r in rows])
    if d == 0:
        return None
    sol = []
    for col in range(3):
        mat = [list(r[:3]) for r in rows]
        for i in range(3):
            mat[i][col] = rows[i][3]
        sol.append(Fraction(_det3(mat)) / d)
    return sol


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def level_set(poly: QPolygon, t):
    """The set ``{z : F(z) >= t}``.

    Returns ``poly`` itself at ``t = 0``, a :class:`QPolygon` for
    ``0 < t < m`` and a :class:`Locus` (point or segment) at ``t = m``.
    """
    t = as_fraction(t)
    if t < 0:
        raise DomainError(f"level {t} is negative")
    if t == 0:
        return poly
    m, locus = max_locus(poly)
    if t > m:
        raise DomainError(f"level {t} exceeds the maximum {m}")
    if t == m:
        return locus
    return QPolygon(_clip_to_level(poly, t))
