"""The identity suite: one check per acceptance criterion.

Every check returns :class:`CheckResult` lines; a criterion may produce
several lines (e.g. a value check and a timing check).  ``fast=True``
shrinks the budgets for a quick smoke run; tolerances never change.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import kernels
from .caustic import (QPolygon, brute_force_F_grid, compute_caustic, conservation_residual, contributing_monomials,
                      convex_hull, edge_length_identity, eval_F, is_balanced, is_delzant, level_set,
                      random_delzant_polygon, seed, vertex_multiplicity)
from .cfrac import verify_identities
from .exhaust import (bounds_check, defect_closed_form, defect_radical, disk_F_integral, fseries,
                      lmu_identity, random_unimodular, sum_powers, universal_quantities)
from .support import Disk, Parabola, make_context

PI = math.pi


@dataclass
class CheckResult:
    criterion: str
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.criterion:>3} {self.name}: {self.detail}"


def _timed(fn, *args, **kwargs):
    t = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t


def check_disk_f1(fast=False):
    res, dt = _timed(sum_powers, Disk(), 1, 1e-6)
    err = float(abs(res.total - 2))
    return [CheckResult("1", "disk F(1) = 2", err < 1e-10,
                        f"partial {res.partial:.15f} + tail {float(res.tail_exact):.3e} -> |err| {err:.2e} "
                        f"(tol 1e-10), {res.node_count} nodes"),
            CheckResult("1", "disk F(1) runtime", dt < 5.0, f"{dt:.2f} s (limit 5 s, {kernels.BACKEND})", dt)]


def check_disk_f2(fast=False):
    res, dt = _timed(sum_powers, Disk(), 2, 1e-6)
    target = 2 - PI / 2
    err = float(abs(res.total - target))
    naive = 2 * (1 - PI / 2)
    return [CheckResult("2", "disk F(2) = 2 - pi/2", err < 1e-10,
                        f"total {float(res.total):.15f}, |err| {err:.2e} (tol 1e-10); "
                        f"the value 2(1 - pi/2) = {naive:.6f} is off by {float(abs(res.total - naive)):.3f}", dt)]


def parabola_quadruple_sum(threshold: float = 1e-8):
    """``sum 1/((a+c)^2 (b+d)^2 (a+b+c+d)^2)`` over SL+(2,Z) with its exact tail.

    The term of the quadruple is the squared parabola defect of the
    transposed matrix, so the parabola tail oracle applies to the frontier.
    """
    from .lattice import IDENTITY, enumerate_tree
    from .exhaust import tail

    vals = []

    def term(p):
        (a, b), (c, d) = p.v1, p.v2
        # the transpose has rows (a, c), (b, d)
        return 1.0 / ((a + c) ** 2 * (b + d) ** 2 * (a + b + c + d) ** 2)

    def admit(p):
        t = term(p)
        if t >= threshold:
            vals.append(t)
            return True
        return False

    walk = enumerate_tree(IDENTITY, admit)
    for _ in walk:
        pass
    sf = Parabola(Fraction(1, 4))
    # basis ((1,1),(0,1)): the pair of the transpose is (t11 (1,1), ...)
    pairs = []
    for p in walk.frontier:
        (a, b), (c, d) = p.v1, p.v2
        a, b, c, d = a, c, b, d
        pairs.append(((a, a + b), (c, c + d)))
    t = tail(sf, pairs, (2,))[2]
    return math.fsum(vals), float(t), len(vals)


def check_parabola(fast=False):
    res, dt = _timed(sum_powers, Parabola(Fraction(1, 4)), 2, 1e-6)
    err = abs(res.total - Fraction(1, 3))
    partial, t, n = parabola_quadruple_sum(1e-12 if not fast else 1e-10)
    err_q = abs(partial + t - 1 / 3)
    return [CheckResult("3", "parabola sum f^2 = 1/3", err < 1e-6,
                        f"total {float(res.total):.15f}, |err| {float(err):.2e} (tol 1e-6)", dt),
            CheckResult("3", "quadruple form = 1/3", err_q < 1e-6,
                        f"partial {partial:.12f} over {n} quadruples + tail {t:.3e} -> |err| {err_q:.2e}; "
                        f"as sum 1/(4 q1^2 q2^2 (q1+q2)^2) -> {(partial + t) / 4:.12f} vs 1/12")]


def check_universal(fast=False):
    uq, dt = _timed(universal_quantities, Disk(), 1e-6)
    quad = disk_F_integral()
    out = [
        CheckResult("4", "disk area = pi", abs(uq.area.value - PI) < 1e-8,
                    f"{uq.area.value:.15f}, |err| {abs(uq.area.value - PI):.2e} (tol 1e-8)", dt),
        CheckResult("4", "disk perimeter = 2 pi", abs(uq.euclidean_perimeter.value - 2 * PI) < 1e-8,
                    f"{uq.euclidean_perimeter.value:.15f}, |err| {abs(uq.euclidean_perimeter.value - 2 * PI):.2e} (tol 1e-8)"),
        CheckResult("4", "disk lattice perimeter = 0", abs(uq.lattice_perimeter.value) < 1e-10,
                    f"{uq.lattice_perimeter.value:.2e} (tol 1e-10; 8 minus four exact branch totals of 2)"),
        CheckResult("4", "int F: f^3 formula vs quadrature", abs(uq.f_integral.value - quad) < 1e-5,
                    f"{uq.f_integral.value:.12f} (+-{uq.f_integral.error:.1e}) vs {quad:.12f}, "
                    f"|diff| {abs(uq.f_integral.value - quad):.2e} (tol 1e-5)"),
    ]
    return out


def check_closed_form(fast=False):
    rng = random.Random(20240501)
    n = 10**4 if fast else 10**5
    ctx = make_context(128)
    wide = make_context(320)
    worst = 0.0
    quads = []
    t = time.perf_counter()
    for _ in range(n):
        q = random_unimodular(rng, 10**6, ordered=False)
        quads.append(q)
        cf = defect_closed_form(*q, ctx=ctx)
        rad = defect_radical(*q, ctx=wide)
        worst = max(worst, float(abs(cf - rad) / rad))
    dt = time.perf_counter() - t
    sym = all(defect_closed_form(*q, ctx=ctx) == defect_closed_form(q[3], q[2], q[1], q[0], ctx=ctx)
              for q in quads[:1000])
    rep = bounds_check([q if q[0] ** 2 + q[1] ** 2 > q[2] ** 2 + q[3] ** 2 else (q[3], q[2], q[1], q[0])
                        for q in quads], ctx)
    wit = rep.lower_violations[0] if rep.lower_violations else None
    return [
        CheckResult("5", "closed form = radical defect", worst < 1e-12 and sym,
                    f"{n} quadruples, max rel diff {worst:.2e} (tol 1e-12); symmetry f(a,b,c,d)=f(d,c,b,a): {sym}", dt),
        CheckResult("5", "bounds |a,b|^-3 <= f <= |a,b|^-2", rep.literal_holds,
                    f"{rep.samples} samples, {len(rep.lower_violations)} lower / {len(rep.upper_violations)} upper "
                    f"violations; witness {wit}; weaker lower bound 1/(4|a,b|^3) "
                    f"{'holds' if rep.corrected_holds else 'fails'}"),
    ]


def check_fseries(fast=False):
    budget = 10**5 if fast else 10**6
    out = []
    for s, want in ((0.5, "diverge"), (0.6, "diverge"), (0.8, "converge"), (1.0, "converge")):
        r, dt = _timed(fseries, s, budget)
        ok = r.verdict == want
        if want == "diverge":
            sums = [p for n, p in r.checkpoints if n in (10**4, 10**5, 10**6)]
            ok = ok and all(b > a for a, b in zip(sums, sums[1:]))
        out.append(CheckResult("6", f"F({s}) {want}s", ok,
                               f"fitted exponent {r.exponent:.3f} -> {r.verdict} at budget {budget}; "
                               f"partial {r.partial:.6f}", dt))
    return out


FIGURES = {
    "unit square": [(0, 0), (1, 0), (1, 1), (0, 1)],
    "[0,2]^2": [(0, 0), (2, 0), (2, 2), (0, 2)],
    "3-triangle": [(0, 0), (3, 0), (0, 3)],
    "cut triangle": [(0, 0), (4, 0), (1, 3), (0, 3)],
    "trapezoid": [(0, 0), (4, 0), (2, 2), (0, 2)],
}


def _expected_figures():
    F = Fraction
    return {
        # interior vertices: position -> (f value, multiplicity); weight-2 edge; terminal point
        "unit square": ({(F(1, 2), F(1, 2)): (F(1, 2), 4)}, None, (F(1, 2), F(1, 2))),
        "[0,2]^2": ({(F(1), F(1)): (F(1), 4)}, None, (F(1), F(1))),
        "3-triangle": ({(F(1), F(1)): (F(1), 3)}, None, (F(1), F(1))),
        "cut triangle": ({(F(1), F(2)): (F(1), 1), (F(4, 3), F(4, 3)): (F(4, 3), 3)}, None,
                         (F(4, 3), F(4, 3))),
        "trapezoid": ({(F(1), F(1)): (F(1), 2), (F(2), F(1)): (F(1), 2)},
                      {(F(1), F(1)), (F(2), F(1))}, (F(3, 2), F(1))),
    }


def check_figures(fast=False):
    out = []
    expected = _expected_figures()
    for name, verts in FIGURES.items():
        poly = QPolygon(verts)
        curve, dt = _timed(compute_caustic, poly)
        want_vertices, want_double, want_terminal = expected[name]
        got = {v.position: (v.f_value, vertex_multiplicity(curve, v)) for v in curve.interior_vertices()}
        doubles = [e for e in curve.edges if e.weight > 1]
        got_double = None
        if doubles:
            pos = {v.id: v.position for v in curve.vertices}
            got_double = {pos[doubles[0].source], pos[doubles[0].target]} if len(doubles) == 1 else "many"
        ok = got == want_vertices and got_double == want_double and curve.terminal_point == want_terminal
        out.append(CheckResult("7", f"caustic of {name}", ok and dt < 0.1,
                               f"vertices {_fmt_vertices(got)}; weight-2 edge {_fmt_set(got_double)}; "
                               f"terminal {_fmt_pt(curve.terminal_point)}; {dt * 1000:.1f} ms (limit 100 ms)", dt))
    return out


def _fmt_pt(p):
    return "(" + ", ".join(str(x) for x in p) + ")"


def _fmt_set(s):
    if s is None or isinstance(s, str):
        return str(s)
    return "-".join(_fmt_pt(p) for p in sorted(s))


def _fmt_vertices(d):
    return ", ".join(f"{_fmt_pt(p)} f={f} mult={m}" for p, (f, m) in sorted(d.items()))


def check_random_delzant(fast=False):
    rng = random.Random(8)
    n = 20 if fast else 100
    t = time.perf_counter()
    fails = {"conservation": 0, "balancing": 0, "edge length": 0, "Delzant levels": 0, "seed": 0}
    for _ in range(n):
        poly = random_delzant_polygon(rng, max_cuts=8)
        curve = compute_caustic(poly)
        fails["conservation"] += conservation_residual(curve) != 0
        fails["balancing"] += not is_balanced(curve)
        fails["edge length"] += not edge_length_identity(curve)
        for k in range(1, 21):
            lvl = level_set(poly, curve.m * Fraction(k, 21))
            if not is_delzant(lvl):
                fails["Delzant levels"] += 1
                break
        fails["seed"] += seed(curve).interior_lattice_points != [(0, 0)]
    dt = time.perf_counter() - t
    out = [CheckResult("8", f"{name} on {n} random Delzant polygons", count == 0, f"{count} failures")
           for name, count in fails.items()]
    out.append(CheckResult("8", "random Delzant runtime", dt < 60, f"{dt:.1f} s (limit 60 s)", dt))
    return out


def check_lmu(fast=False):
    budget = 10**5 if fast else 10**6
    out = []
    for mu in (3, 4):
        r, dt = _timed(lmu_identity, mu, budget)
        out.append(CheckResult("9", f"L^mu identity mu={mu}", r.residual < 1e-4,
                               f"lhs {r.lhs:.12f}, rhs {r.rhs:.12f}, residual {r.residual:.2e} (tol 1e-4); "
                               f"heuristic tail {r.heuristic_tail:.1e} (exponent {r.exponent:.2f})", dt))
    return out


def check_cfrac(fast=False):
    out = []
    for alpha in ("phi", "sqrt(2)"):
        r, dt = _timed(verify_identities, alpha, 30)
        out.append(CheckResult("10", f"quadratic identity {alpha}", r.residual_quadratic < 1e-8,
                               f"residual {r.residual_quadratic:.2e} (tol 1e-8, variant '{r.quadratic_variant}'; "
                               f"with r_k instead: {r.residuals['quadratic r_k']:.2e})", dt))
        out.append(CheckResult("10", f"linear identity {alpha}", r.residual_linear < 1e-6,
                               f"converging variant '{r.linear_variant}' residual {r.residual_linear:.2e} "
                               f"(tol 1e-6); signed variants: {r.residuals['linear signed r_k']:.3f}, "
                               f"{r.residuals['linear signed r_k+1']:.3f}", dt))
    return out


def random_q_polygon(rng: random.Random, max_norm: float | None = None) -> QPolygon:
    """A random convex Q-polygon.

    With ``max_norm`` the polygon is redrawn until every contributing
    monomial direction has Euclidean norm at most ``max_norm``, which is
    exactly when a brute force over ``|v| <= max_norm`` can see all of ``F``.
    """
    while True:
        pts = [(Fraction(rng.randint(0, 24), rng.choice((1, 2, 3, 4))),
                Fraction(rng.randint(0, 24), rng.choice((1, 2, 4)))) for _ in range(rng.randint(3, 8))]
        hull = convex_hull(pts)
        if len(hull) < 3:
            continue
        poly = QPolygon(hull)
        if max_norm is None or _sail_radius(poly) <= max_norm:
            return poly


def _sail_radius(poly: QPolygon) -> float:
    return max(math.hypot(*m.v) for m in contributing_monomials(poly))


def _grid(poly: QPolygon, n: int = 50):
    xs = [v[0] for v in poly.vertices]
    ys = [v[1] for v in poly.vertices]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    grid = [(x0 + (x1 - x0) * Fraction(i, n - 1), y0 + (y1 - y0) * Fraction(j, n - 1))
            for i in range(n) for j in range(n)]
    return [z for z in grid if poly.contains(z)]


def _compare(polys, radius_of):
    total, mismatches = 0, 0
    for poly in polys:
        grid = _grid(poly)
        brute = brute_force_F_grid(poly, grid, radius_of(poly))
        total += len(grid)
        mismatches += sum(a != eval_F(poly, z) for a, z in zip(brute, grid))
    return total, mismatches


def check_brute_force(fast=False):
    rng = random.Random(11)
    polys, t0 = _timed(lambda: [random_q_polygon(rng, max_norm=50) for _ in range(10)])
    (total, bad), dt = _timed(_compare, polys, lambda p: 50)
    free = [random_q_polygon(rng) for _ in range(3 if fast else 10)]
    (total2, bad2), dt2 = _timed(_compare, free, lambda p: math.ceil(_sail_radius(p)))
    widest = max(_sail_radius(p) for p in free)
    return [CheckResult("11", "eval_F = brute force over |v| <= 50", bad == 0,
                        f"{total} grid points in 10 random Q-polygons with all monomials inside the radius, "
                        f"{bad} mismatches", dt + t0),
            CheckResult("11", "eval_F = brute force, radius covering the sail", bad2 == 0,
                        f"{total2} grid points in {len(free)} unrestricted Q-polygons "
                        f"(largest monomial norm {widest:.1f}), {bad2} mismatches", dt2)]


CHECKS: list[Callable] = [
    check_disk_f1, check_disk_f2, check_parabola, check_universal, check_closed_form, check_fseries,
    check_figures, check_random_delzant, check_lmu, check_cfrac, check_brute_force,
]


def run_suite(fast: bool = False, only=None) -> list[CheckResult]:
    results = []
    for i, check in enumerate(CHECKS, start=1):
        if only and i not in only:
            continue
        results.extend(check(fast))
    return results
