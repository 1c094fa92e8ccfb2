import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from tropex.caustic import QPolygon
from tropex.errors import DomainError, OutsideConeError
from tropex.lattice import IDENTITY, UnimodularPair, children
from tropex.support import (Disk, LmuBall, Parabola, PolygonSupport, alpha_lmu, alpha_parabola,
                            alpha_polygon, caustic_vertex, defect, make_context, parse_domain)

# frozen oracle values
DISK_ROOT_DEFECT = 2 - math.sqrt(2)
L3_ROOT_DEFECT = 2 - 2 ** (2 / 3)          # nu = 3/2 for mu = 3
PARABOLA_ROOT_DEFECT = Fraction(1, 2)       # basis ((1, 1), (0, 1)) at mu = 1/4

primitive_dirs = st.tuples(st.integers(-30, 30), st.integers(-30, 30)).filter(
    lambda v: math.gcd(*v) == 1)
words = st.lists(st.integers(0, 1), max_size=14)


def follow(word, start=IDENTITY):
    node = start
    for step in word:
        node = children(node)[step]
    return node


def test_root_defects():
    assert float(Disk().defect_value((1, 0), (0, 1))) == pytest.approx(DISK_ROOT_DEFECT, abs=1e-15)
    assert float(LmuBall(3).defect_value((1, 0), (0, 1))) == pytest.approx(L3_ROOT_DEFECT, abs=1e-15)
    sf = Parabola(Fraction(1, 4))
    assert (sf.basis.v1, sf.basis.v2) == ((1, 1), (0, 1))
    assert sf.defect_value(sf.basis.v1, sf.basis.v2) == PARABOLA_ROOT_DEFECT


def test_lmu_two_is_the_disk():
    d, l2 = Disk(), LmuBall(2)
    for v1, v2 in [((1, 0), (0, 1)), ((2, 1), (1, 1)), ((3, 5), (1, 2))]:
        assert float(l2.defect_value(v1, v2)) == pytest.approx(float(d.defect_value(v1, v2)), rel=1e-25)


def test_precision_is_configurable():
    assert Disk(prec=200).ctx.prec == 200
    assert make_context(64).prec == 64


def test_disk_caustic_vertex_on_root():
    # the three forms |v| + v.z agree at the vertex and take the value f there
    sf = Disk()
    z = caustic_vertex(sf, IDENTITY)
    f = sf.defect_value((1, 0), (0, 1))
    for v in ((1, 0), (0, 1), (1, 1)):
        assert abs(sf.alpha(v) + v[0] * z[0] + v[1] * z[1] - f) < mpmath.mpf(10) ** -35


@given(primitive_dirs, st.integers(1, 50))
def test_alpha_is_positively_homogeneous(v, k):
    kv = (k * v[0], k * v[1])
    for sf in (Disk(), LmuBall(3)):
        assert abs(sf.alpha(kv) - k * sf.alpha(v)) <= mpmath.mpf(10) ** -30 * k * sf.alpha(v)
    if v[1] > 0:
        sf = Parabola(Fraction(9, 4))
        assert sf.alpha(kv) == k * sf.alpha(v)


@given(words, st.integers(1, 7))
def test_scaling_the_domain_scales_defects(word, k):
    poly = QPolygon([(0, 0), (5, 1), (3, 4), (-1, 2)])
    node = follow(word)
    a = PolygonSupport(poly).defect_value(node.v1, node.v2)
    b = PolygonSupport(poly.scaled(k)).defect_value(node.v1, node.v2)
    assert b == k * a


@given(words)
def test_parabola_defects_do_not_depend_on_mu(word):
    node = follow(word)
    m = node.quadruple()
    values = set()
    for mu in (Fraction(1, 4), Fraction(1), Fraction(9, 4), Fraction(4), Fraction(25, 9)):
        sf = Parabola(mu)
        values.add(sf.defect_value(*sf.vector(m)))
    assert len(values) == 1


def test_parabola_irrational_sqrt_uses_floats():
    a, b = Parabola(2), Parabola(Fraction(1, 4))
    m = (2, 3, 1, 2)
    assert float(a.defect_value(*a.vector(m))) == pytest.approx(float(b.defect_value(*b.vector(m))), rel=1e-30)


@given(words)
def test_defects_are_nonnegative_and_shrink_down_the_tree(word):
    node = follow(word)
    for sf in (Disk(), LmuBall(Fraction(5, 2))):
        f = sf.defect_value(node.v1, node.v2)
        kids = [sf.defect_value(c.v1, c.v2) for c in children(node)]
        assert f > 0 and all(0 < g < f for g in kids)


def _disk_boundary(n):
    t = [2 * math.pi * i / n for i in range(n)]
    return [(math.cos(s), math.sin(s)) for s in t]


def _lmu_boundary(n, mu):
    out = []
    for i in range(n):
        s = 2 * math.pi * i / n
        c, d = math.cos(s), math.sin(s)
        r = (abs(c) ** mu + abs(d) ** mu) ** (-1 / mu)
        out.append((r * c, r * d))
    return out


@pytest.mark.parametrize("sf, boundary", [
    (Disk(), _disk_boundary(10**4)),
    (LmuBall(3), _lmu_boundary(10**4, 3)),
    (Parabola(Fraction(1, 4)), [(x, x * x / 4 - 1) for x in (i / 100 for i in range(-5000, 5001))]),
])
def test_alpha_matches_sampled_boundary(sf, boundary):
    """alpha_v = -min over the boundary of z.v, checked on 10^4 samples."""
    dirs = [(1, 0), (0, 1), (1, 1), (2, 3), (-3, 5), (5, 2), (-1, 4)]
    for v in dirs:
        if not sf.in_cone(v):
            continue
        sampled = max(-(x * v[0] + y * v[1]) for x, y in boundary)
        exact = float(sf.alpha(v))
        assert sampled <= exact + 1e-12
        assert exact - sampled < 1e-3 * math.hypot(*v)
        t = sf.tangent_point(v)
        assert float(-(t[0] * v[0] + t[1] * v[1])) == pytest.approx(exact, rel=1e-14)


def test_polygon_alpha_is_exact():
    verts = [(0, 0), (Fraction(7, 2), 0), (1, 3)]
    sf = PolygonSupport(verts)
    assert sf.alpha((1, 1)) == 0
    assert sf.alpha((-1, 0)) == Fraction(7, 2)
    assert alpha_polygon((0, -1), verts) == 3


def test_cone_and_domain_errors():
    with pytest.raises(OutsideConeError):
        Parabola(1).alpha((1, 0))
    with pytest.raises(OutsideConeError):
        alpha_parabola((1, -1), 1)
    with pytest.raises(OutsideConeError):
        defect(Parabola(1), UnimodularPair.of((1, 0), (0, 1)))
    with pytest.raises(DomainError):
        LmuBall(1)
    with pytest.raises(DomainError):
        alpha_lmu((0, 0), 2)
    with pytest.raises(DomainError):
        caustic_vertex(Disk(), UnimodularPair.of((1, 1), (2, 2)))


@pytest.mark.parametrize("spec, kind", [
    ("disk", Disk), ("lmu:3", LmuBall), ("lmu:2.5", LmuBall), ("parabola:1/4", Parabola),
    ("polygon:0,0;1,0;0,1", PolygonSupport), ("polygon: 0,0; 1/2,0; 0,1e-1", PolygonSupport),
])
def test_parse_domain(spec, kind):
    assert isinstance(parse_domain(spec), kind)


@pytest.mark.parametrize("spec, fragment", [
    ("ellipse", "column 1"),
    ("cube:3", "column 1"),
    ("lmu:x", "column 5"),
    ("polygon:0,0;1;0,1", "column 13"),
    ("polygon:0,0;1,0", "three points"),
    ("polygon:0,0;1,0;2,0", "three non-collinear"),
    ("polygon:0,0;2,0;1,1;2,2;0,2", "not convex"),
])
def test_parse_domain_errors_carry_position(spec, fragment):
    with pytest.raises(DomainError, match=fragment):
        parse_domain(spec)
