"""JSON serialization of tropical curves (schema ``tropical-curve/1``).

Rationals are written as ``{"num": "<int>", "den": "<int>"}`` so nothing is
lost in transit; parsing a serialized curve gives back an equal object.
"""
from __future__ import annotations

import json
from fractions import Fraction

from ..lattice import LatticeVector
from .analysis import seed
from .kinetic import CurveEdge, CurveVertex, TropicalCurve
from .polygon import Locus, QPolygon

SCHEMA = "tropical-curve/1"


def rational(x) -> dict:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def parse_rational(d) -> Fraction:
    if isinstance(d, dict):
        return Fraction(int(d["num"]), int(d["den"]))
    return Fraction(d)


def point(p) -> list:
    return [rational(p[0]), rational(p[1])]


def parse_point(p) -> tuple:
    return (parse_rational(p[0]), parse_rational(p[1]))


def curve_to_dict(curve: TropicalCurve) -> dict:
    sd = seed(curve)
    return {
        "schema": SCHEMA,
        "polygon": [point(p) for p in curve.polygon.vertices],
        "m": rational(curve.m),
        "max_locus": [point(p) for p in curve.max_locus.points],
        "terminal_point": point(curve.terminal_point),
        "vertices": [
            {
                "id": v.id,
                "position": point(v.position),
                "f_value": rational(v.f_value),
                "boundary": v.boundary,
                "multiplicity": v.multiplicity,
                "dual_polygon": None if v.dual_polygon is None else [list(q) for q in v.dual_polygon],
            }
            for v in curve.vertices
        ],
        "edges": [
            {
                "source": e.source,
                "target": e.target,
                "direction": list(e.direction),
                "weight": e.weight,
                "lattice_length": rational(e.lattice_length),
                "maximal": e.maximal,
            }
            for e in curve.edges
        ],
        "seed": {
            "polygons": [[list(q) for q in poly] for poly in sd.polygons],
            "outline": [list(q) for q in sd.outline],
        },
    }


def curve_from_dict(data: dict) -> TropicalCurve:
    if data.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema {data.get('schema')!r}")
    vertices = tuple(
        CurveVertex(
            v["id"], parse_point(v["position"]), parse_rational(v["f_value"]), v["boundary"],
            v["multiplicity"],
            None if v["dual_polygon"] is None else tuple(LatticeVector(*q) for q in v["dual_polygon"]),
        )
        for v in data["vertices"]
    )
    edges = tuple(
        CurveEdge(e["source"], e["target"], LatticeVector(*e["direction"]), e["weight"],
                  parse_rational(e["lattice_length"]), e["maximal"])
        for e in data["edges"]
    )
    return TropicalCurve(
        QPolygon(parse_point(p) for p in data["polygon"]),
        vertices,
        edges,
        parse_rational(data["m"]),
        Locus(tuple(parse_point(p) for p in data["max_locus"])),
        parse_point(data["terminal_point"]),
    )


def dumps(curve: TropicalCurve, indent=2) -> str:
    return json.dumps(curve_to_dict(curve), indent=indent, sort_keys=True)


def loads(text: str) -> TropicalCurve:
    return curve_from_dict(json.loads(text))
