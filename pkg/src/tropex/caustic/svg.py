"""SVG drawing of a polygon with its caustic."""
from __future__ import annotations

import xml.etree.ElementTree as ET

from .kinetic import TropicalCurve

SVG_NS = "http://www.w3.org/2000/svg"


def render_svg(curve: TropicalCurve, size: int = 400, margin: int = 20, grid: bool = True) -> str:
    """Polygon outline, caustic edges (stroke width grows with weight), the max
    locus in red and the terminal point as a dot."""
    verts = [(float(x), float(y)) for x, y in curve.polygon.vertices]
    xs, ys = [p[0] for p in verts], [p[1] for p in verts]
    x0, y0 = min(xs), min(ys)
    span = max(max(xs) - x0, max(ys) - y0) or 1.0
    k = (size - 2 * margin) / span

    def tx(p):
        return (margin + (float(p[0]) - x0) * k, size - margin - (float(p[1]) - y0) * k)

    def pts(seq):
        return " ".join(f"{a:.3f},{b:.3f}" for a, b in map(tx, seq))

    ET.register_namespace("", SVG_NS)
    root = ET.Element(f"{{{SVG_NS}}}svg", width=str(size), height=str(size),
                      viewBox=f"0 0 {size} {size}")
    if grid:
        g = ET.SubElement(root, f"{{{SVG_NS}}}g", stroke="#ccc", attrib={"stroke-dasharray": "2,3"})
        for x in range(int(x0), int(max(xs)) + 1):
            (a, b), (c, d) = tx((x, y0)), tx((x, max(ys)))
            ET.SubElement(g, f"{{{SVG_NS}}}line", x1=f"{a:.3f}", y1=f"{b:.3f}", x2=f"{c:.3f}", y2=f"{d:.3f}")
        for y in range(int(y0), int(max(ys)) + 1):
            (a, b), (c, d) = tx((x0, y)), tx((max(xs), y))
            ET.SubElement(g, f"{{{SVG_NS}}}line", x1=f"{a:.3f}", y1=f"{b:.3f}", x2=f"{c:.3f}", y2=f"{d:.3f}")
    ET.SubElement(root, f"{{{SVG_NS}}}polygon", points=pts(curve.polygon.vertices),
                  fill="#eef", stroke="black", attrib={"stroke-width": "1.5"})
    pos = {v.id: v.position for v in curve.vertices}
    edges = ET.SubElement(root, f"{{{SVG_NS}}}g", id="caustic", fill="none")
    for e in curve.edges:
        (a, b), (c, d) = tx(pos[e.source]), tx(pos[e.target])
        ET.SubElement(edges, f"{{{SVG_NS}}}line", x1=f"{a:.3f}", y1=f"{b:.3f}", x2=f"{c:.3f}", y2=f"{d:.3f}",
                      stroke="red" if e.maximal else "blue",
                      attrib={"stroke-width": str(1.5 * e.weight), "data-weight": str(e.weight)})
        if e.weight > 1:
            lbl = ET.SubElement(edges, f"{{{SVG_NS}}}text", x=f"{(a + c) / 2:.3f}", y=f"{(b + d) / 2 - 6:.3f}",
                                attrib={"font-size": "12", "fill": "black"})
            lbl.text = str(e.weight)
    px, py = tx(curve.terminal_point)
    ET.SubElement(root, f"{{{SVG_NS}}}circle", cx=f"{px:.3f}", cy=f"{py:.3f}", r="4", fill="black",
                  id="terminal")
    return ET.tostring(root, encoding="unicode")
