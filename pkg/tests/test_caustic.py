import json
import random
import xml.etree.ElementTree as ET
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from tropex.caustic import (Locus, QPolygon, active_monomials, blowdown, brute_force_F, brute_force_F_grid,
                            compute_caustic, conservation_residual, contributing_monomials, corner_cut,
                            curve_from_dict, curve_to_dict, dual_polygon_from_star, dumps, edge_length_identity,
                            eval_F, integral_F, is_balanced, is_delzant, lattice_length, level_set, loads,
                            max_locus, random_delzant_polygon, removable_sides, render_svg, sail, seed,
                            side_index, star_multiplicity, vertex_multiplicity)
from tropex.errors import DomainError

SQUARE = QPolygon([(0, 0), (1, 0), (1, 1), (0, 1)])
TRIANGLE3 = QPolygon([(0, 0), (3, 0), (0, 3)])
CUT_TRIANGLE = QPolygon([(0, 0), (4, 0), (1, 3), (0, 3)])
TRAPEZOID = QPolygon([(0, 0), (4, 0), (2, 2), (0, 2)])
THIN = QPolygon([(0, 0), (2, 0), (0, 1)])          # not Delzant at (0, 1)


def positions(curve):
    return {v.id: v.position for v in curve.vertices}


def edge_set(curve):
    pos = positions(curve)
    return {(frozenset((pos[e.source], pos[e.target])), e.weight) for e in curve.edges}


# polygons --------------------------------------------------------------------------

def test_polygon_normalization():
    p = QPolygon([(0, 1), (1, 1), (1, 0), (F(1, 2), 0), (0, 0), (0, 0)])   # clockwise, repeats, side point
    assert p == SQUARE
    assert len(p) == 4
    assert p.area == 1
    assert p.lattice_perimeter == 4
    assert p.euclidean_perimeter == 4


@pytest.mark.parametrize("pts", [[(0, 0), (1, 0)], [(0, 0), (1, 1), (2, 2)],
                                 [(0, 1), (1, 1), (1, 0), (0, 0), (F(1, 2), 0)],
                                 [(0, 0), (2, 0), (1, 1), (2, 2), (0, 2)]])
def test_polygon_rejects_bad_input(pts):
    with pytest.raises(DomainError):
        QPolygon(pts)


def test_lattice_length():
    assert lattice_length((0, 0), (4, 2)) == 2
    assert lattice_length((0, 0), (F(1, 2), F(3, 2))) == F(1, 2)


# tropical series ---------------------------------------------------------------------

def test_sail_of_unimodular_and_singular_corners():
    assert sail((1, 0), (0, 1)) == [(1, 0), (0, 1)]
    assert sail((1, 0), (-1, 3)) == [(1, 0), (0, 1), (-1, 3)]
    # det 2, but (0, -1) is the midpoint of the chord, so no extra direction
    assert sail((-1, -2), (1, 0)) == [(-1, -2), (1, 0)]


def test_eval_F_values():
    assert eval_F(SQUARE, (F(1, 2), F(1, 2))) == F(1, 2)
    assert eval_F(SQUARE, (F(1, 4), F(1, 2))) == F(1, 4)
    assert eval_F(SQUARE, (1, F(1, 3))) == 0
    assert eval_F(SQUARE, (2, 2)) < 0
    assert eval_F(TRIANGLE3, (1, 1)) == 1


def test_thin_triangle_has_only_edge_monomials():
    assert {m.v for m in contributing_monomials(THIN)} == {(0, 1), (1, 0), (-1, -2)}


def test_singular_corner_adds_sail_monomial():
    poly = QPolygon([(0, 0), (3, 0), (0, 1)])     # corner (0, 1) has det 3
    assert {m.v for m in contributing_monomials(poly)} == {(0, 1), (-1, -3), (0, -1), (1, 0)}


def test_active_monomials_at_vertex():
    act = active_monomials(TRIANGLE3, (1, 1))
    assert {m.v for m in act} == {(1, 0), (0, 1), (-1, -1)}


def _random_poly(rng):
    while True:
        pts = [(F(rng.randint(0, 12), rng.choice((1, 2, 3))), F(rng.randint(0, 12), rng.choice((1, 2))))
               for _ in range(rng.randint(3, 7))]
        try:
            return QPolygon(pts)
        except DomainError:
            continue


@given(st.integers(0, 10**6))
@settings(max_examples=25)
def test_eval_F_matches_brute_force(seed_):
    rng = random.Random(seed_)
    poly = _random_poly(rng)
    from tropex.caustic.polygon import convex_hull
    poly = QPolygon(convex_hull(poly.vertices))
    radius = int(max(abs(c) for m in contributing_monomials(poly) for c in m.v)) * 2 + 1
    pts = [(F(rng.randint(0, 24), 2), F(rng.randint(0, 24), 2)) for _ in range(20)]
    pts = [z for z in pts if poly.contains(z)]
    assert brute_force_F_grid(poly, pts, radius) == [eval_F(poly, z) for z in pts]
    for z in pts[:3]:
        assert brute_force_F(poly, z, radius) == eval_F(poly, z)


# level sets ------------------------------------------------------------------------------

def test_max_locus_point_and_segment():
    m, locus = max_locus(SQUARE)
    assert m == F(1, 2) and locus == Locus(((F(1, 2), F(1, 2)),))
    m, locus = max_locus(TRAPEZOID)
    assert m == 1 and locus.kind == "segment"
    assert set(locus.points) == {(1, 1), (2, 1)}
    assert locus.lattice_length == 1 and locus.midpoint == (F(3, 2), 1)


def test_level_set():
    assert level_set(SQUARE, 0) == SQUARE
    assert level_set(SQUARE, F(1, 4)) == QPolygon([(F(1, 4), F(1, 4)), (F(3, 4), F(1, 4)),
                                                    (F(3, 4), F(3, 4)), (F(1, 4), F(3, 4))])
    assert level_set(SQUARE, F(1, 2)).kind == "point"
    with pytest.raises(DomainError):
        level_set(SQUARE, 1)
    with pytest.raises(DomainError):
        level_set(SQUARE, -1)


def test_integral_F_pyramids():
    assert integral_F(SQUARE) == F(1, 6)
    assert integral_F(TRIANGLE3) == F(3, 2)


# caustics -------------------------------------------------------------------------------------

def test_square_caustic():
    c = compute_caustic(SQUARE)
    centre = (F(1, 2), F(1, 2))
    assert edge_set(c) == {(frozenset({corner, centre}), 1) for corner in SQUARE.vertices}
    assert c.m == F(1, 2) and c.terminal_point == centre
    assert vertex_multiplicity(c, c.vertex_at(centre)) == 4


def test_trapezoid_caustic_has_weight_two_maximal_edge():
    c = compute_caustic(TRAPEZOID)
    heavy = [e for e in c.edges if e.weight == 2]
    assert len(heavy) == 1 and heavy[0].maximal
    pos = positions(c)
    assert {pos[heavy[0].source], pos[heavy[0].target]} == {(1, 1), (2, 1)}
    assert c.terminal_point == (F(3, 2), 1)
    assert [vertex_multiplicity(c, v) for v in c.interior_vertices()] == [2, 2]


def test_cut_triangle_caustic():
    c = compute_caustic(CUT_TRIANGLE)
    got = {v.position: (v.f_value, vertex_multiplicity(c, v)) for v in c.interior_vertices()}
    assert got == {(1, 2): (1, 1), (F(4, 3), F(4, 3)): (F(4, 3), 3)}


def test_non_delzant_triangle_caustic():
    c = compute_caustic(THIN)
    assert edge_set(c) == {
        (frozenset({(0, 0), (F(1, 2), F(1, 2))}), 1),
        (frozenset({(2, 0), (F(1, 2), F(1, 2))}), 1),
        (frozenset({(0, 1), (F(1, 2), F(1, 2))}), 2),
    }
    v = c.vertex_at((F(1, 2), F(1, 2)))
    assert vertex_multiplicity(c, v) == 4
    assert conservation_residual(c) == 0


def test_vertex_multiplicity_rejects_boundary():
    c = compute_caustic(SQUARE)
    with pytest.raises(DomainError):
        vertex_multiplicity(c, c.vertex_at((0, 0)))


def test_dual_polygon_and_star_multiplicity():
    star = [(1, (1, 0)), (1, (0, 1)), (1, (-1, -1))]
    assert star_multiplicity(star) == 1
    assert len(dual_polygon_from_star(star)) == 3
    assert star_multiplicity([(2, (1, 0)), (2, (-1, 0)), (1, (0, 1)), (1, (0, -1))]) == 4


def test_seed_of_triangle():
    assert seed(compute_caustic(TRIANGLE3)).interior_lattice_points == [(0, 0)]


@given(st.integers(0, 10**6))
@settings(max_examples=40)
def test_random_delzant_identities(seed_):
    poly = random_delzant_polygon(random.Random(seed_))
    assert is_delzant(poly)
    c = compute_caustic(poly)
    assert conservation_residual(c) == 0
    assert is_balanced(c)
    assert edge_length_identity(c)
    assert seed(c).interior_lattice_points == [(0, 0)]
    for k in (1, 2, 3):
        lvl = level_set(poly, c.m * F(k, 4))
        assert is_delzant(lvl)


@given(st.integers(0, 10**6))
@settings(max_examples=40)
def test_random_rational_polygon_identities(seed_):
    from tropex.verify import random_q_polygon
    poly = random_q_polygon(random.Random(seed_))
    c = compute_caustic(poly)
    assert is_balanced(c)
    assert edge_length_identity(c)
    assert conservation_residual(c) == 0
    for v in c.interior_vertices():
        assert v.multiplicity == vertex_multiplicity(c, v)


# surgery ------------------------------------------------------------------------------------------

def test_removable_sides():
    assert removable_sides(TRIANGLE3) == []
    cut = QPolygon([(0, 0), (3, 0), (3, 1), (1, 3), (0, 3)])
    assert 2 in removable_sides(cut)
    with pytest.raises(DomainError):
        removable_sides(THIN)


@given(st.integers(0, 10**6), st.integers(0, 20), st.integers(1, 3))
@settings(max_examples=60)
def test_corner_cut_then_blowdown_is_identity(seed_, corner, quarter):
    poly = random_delzant_polygon(random.Random(seed_), max_cuts=4)
    k = corner % len(poly)
    room = min(poly.edge_lattice_length(k - 1), poly.edge_lattice_length(k))
    size = room * F(quarter, 4)
    cut = corner_cut(poly, k, size)
    assert is_delzant(cut)
    p = poly.vertices[k]
    a = (p[0] - size * poly.edge_direction(k - 1)[0], p[1] - size * poly.edge_direction(k - 1)[1])
    b = (p[0] + size * poly.edge_direction(k)[0], p[1] + size * poly.edge_direction(k)[1])
    assert blowdown(cut, side_index(cut, a, b)) == poly


def test_corner_cut_rejects_oversize():
    with pytest.raises(DomainError):
        corner_cut(TRIANGLE3, 0, 3)
    with pytest.raises(DomainError):
        corner_cut(THIN, 2, F(1, 4))


def test_blowdown_rejects_fixed_side():
    with pytest.raises(DomainError):
        blowdown(SQUARE, 0)


# serialization ----------------------------------------------------------------------------------------

@pytest.mark.parametrize("poly", [SQUARE, TRAPEZOID, CUT_TRIANGLE, THIN])
def test_json_round_trip(poly):
    c = compute_caustic(poly)
    text = dumps(c)
    data = json.loads(text)
    assert data["schema"] == "tropical-curve/1"
    assert all(set(p) == {"num", "den"} for v in data["vertices"] for p in v["position"])
    assert loads(text) == c
    assert curve_from_dict(curve_to_dict(c)) == c


def test_svg_is_valid_xml_with_weights():
    svg = render_svg(compute_caustic(TRAPEZOID))
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    weights = [el.get("data-weight") for el in root.iter() if el.get("data-weight")]
    assert "2" in weights
    assert any(el.get("id") == "terminal" for el in root.iter())
