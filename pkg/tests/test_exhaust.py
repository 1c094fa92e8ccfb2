import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tropex import kernels
from tropex.caustic import QPolygon
from tropex.errors import DomainError, NotConcaveError
from tropex.exhaust import (UNAVAILABLE, bounds_check, defect_closed_form, defect_radical, fit_exponent,
                            fseries, generation_defects, lmu_identity, random_unimodular, sum_powers,
                            tail, universal_quantities, verdict_for)
from tropex.lattice import IDENTITY, children, enumerate_tree
from tropex.support import Disk, LmuBall, Parabola, PolygonSupport, SupportFunction, make_context

S_DISK = 1 - math.pi / 4      # area between the quadrant arc and the chord pair


def test_disk_s1_total_is_two():
    r = sum_powers(Disk(), 1, 1e-4)
    assert abs(r.total - 2) < 1e-14
    assert r.frontier_size == r.node_count + 1     # full binary tree
    assert not r.truncated


def test_disk_s2_total():
    r = sum_powers(Disk(), 2, 1e-4)
    assert abs(r.total - 2 * S_DISK) < 1e-14


def test_parabola_exact_sqrt_gives_one_third():
    r = sum_powers(Parabola(Fraction(1, 4)), 2, 1e-4)
    assert isinstance(r.tail_exact, Fraction)
    assert abs(r.total - Fraction(1, 3)) < 1e-15


@pytest.mark.parametrize("mu", [2, Fraction(9, 1), Fraction(1, 9)])
def test_parabola_total_does_not_depend_on_mu(mu):
    r = sum_powers(Parabola(mu), 2, 1e-4)
    assert abs(float(r.total) - 1 / 3) < 1e-13


@given(st.floats(1e-5, 1e-2))
@settings(max_examples=15)
def test_total_is_threshold_invariant(threshold):
    r = sum_powers(Disk(), 1, threshold)
    assert abs(r.total - 2) < 1e-13
    r2 = sum_powers(Disk(), 2, threshold)
    assert abs(r2.total - (2 - math.pi / 2)) < 1e-13


def test_lmu_total_with_refinement():
    r = sum_powers(LmuBall(Fraction(5, 2)), 1, 1e-4)
    assert type(r.partial).__name__ == "mpf"   # private-context mpf class
    assert abs(r.total - 2) < mpmath.mpf(10) ** -25
    coarse = sum_powers(LmuBall(Fraction(5, 2)), 1, 1e-4, refine=False)
    assert isinstance(coarse.partial, float)
    assert abs(coarse.total - 2) < 1e-10


def test_threads_do_not_change_the_sum():
    one = sum_powers(Disk(), 1, 1e-5, threads=1)
    four = sum_powers(Disk(), 1, 1e-5, threads=4)
    assert one.partial == four.partial
    assert one.node_count == four.node_count
    assert one.frontier_size == four.frontier_size


def test_complex_exponent():
    r = sum_powers(Disk(), 1 + 2j, 1e-3)
    assert isinstance(r.partial, complex)
    assert r.tail_exact is UNAVAILABLE and r.total is None
    assert r.partial.real != 0 and r.partial.imag != 0


def test_max_nodes_truncates_and_keeps_pending():
    r = sum_powers(Disk(), 1, 1e-6, max_nodes=100)
    assert r.truncated
    assert r.node_count == 100
    # the pending subtrees still carry exact tails, so the total is unchanged
    assert abs(r.total - 2) < 1e-14


def _brute_polygon_sum(sf, s):
    out = Fraction(0)
    stack = [IDENTITY]
    while stack:
        node = stack.pop()
        f = sf.defect_value(node.v1, node.v2)
        if f == 0:
            continue
        out += f ** s
        stack.extend(children(node))
    return out


@pytest.mark.parametrize("verts", [
    [(0, 0), (3, 0), (0, 3)],
    [(0, 0), (2, 0), (0, 1)],
    [(0, 0), (5, 1), (3, 4), (-1, 2)],
    [(0, 0), (Fraction(7, 2), 0), (1, Fraction(5, 3))],
])
def test_polygon_sums_are_exact(verts):
    sf = PolygonSupport(verts)
    for s in (1, 2):
        r = sum_powers(sf, s, 1e-9)
        assert isinstance(r.total, Fraction)
        assert r.total == _brute_polygon_sum(sf, s)


def test_polygon_tail_unavailable_when_threshold_cuts_live_nodes():
    sf = PolygonSupport([(0, 0), (5, 1), (3, 4), (-1, 2)])
    r = sum_powers(sf, 1, 10)
    assert r.tail_exact is UNAVAILABLE


class _Concave(SupportFunction):
    name = "not-convex"

    def alpha(self, v):
        return -math.hypot(*v)


def test_negative_defect_raises():
    with pytest.raises(NotConcaveError):
        sum_powers(_Concave(), 1, 1e-3)


def test_threshold_must_be_positive():
    with pytest.raises(DomainError):
        sum_powers(Disk(), 1, 0)


def test_tail_over_the_root_is_the_whole_sum():
    sf = Disk()
    t = tail(sf, [((1, 0), (0, 1))])
    assert abs(t[1] - 2) < mpmath.mpf(10) ** -35
    assert abs(t[2] - (2 - sf.ctx.pi / 2)) < mpmath.mpf(10) ** -35
    assert tail(sf, [((1, 0), (0, 1))], (1,)).keys() == {1}


# closed form --------------------------------------------------------------------

def test_closed_form_matches_radical_oracle():
    ctx = make_context(256)
    assert defect_closed_form(1, 0, 0, 1, ctx) == pytest.approx(2 - math.sqrt(2), rel=1e-15)
    assert abs(defect_closed_form(1, 0, 0, 1, ctx) - defect_radical(1, 0, 0, 1, ctx)) < mpmath.mpf(10) ** -70


quads = st.builds(lambda seed: random_unimodular(random.Random(seed), 10**4, ordered=False),
                  st.integers(0, 2**32))


@given(quads)
def test_closed_form_symmetry(q):
    a, b, c, d = q
    ctx = make_context(128)
    assert defect_closed_form(a, b, c, d, ctx) == defect_closed_form(d, c, b, a, ctx)


@given(quads)
def test_closed_form_equals_radical(q):
    ctx = make_context(192)
    f, g = defect_closed_form(*q, ctx=ctx), defect_radical(*q, ctx=ctx)
    assert abs(f - g) <= mpmath.mpf(10) ** -40 * g


def test_closed_form_requires_unimodular():
    with pytest.raises(DomainError):
        defect_closed_form(2, 1, 1, 2)


def test_random_unimodular_ordered():
    rng = random.Random(3)
    for _ in range(200):
        a, b, c, d = random_unimodular(rng, 1000)
        assert a * d - b * c == 1 and min(a, b, c, d) >= 0
        assert a * a + b * b > c * c + d * d


def test_literal_lower_bound_fails_on_small_witness():
    rep = bounds_check([(2, 1, 1, 1), (13, 8, 8, 5), (1, 1, 0, 1)])
    assert rep.samples == 3
    assert {(2, 1, 1, 1), (13, 8, 8, 5)} <= {w[0] for w in rep.lower_violations}
    assert not rep.literal_holds
    assert rep.corrected_holds
    assert not rep.upper_violations


def test_bounds_skip_unordered_rows():
    assert bounds_check([(1, 1, 1, 2)]).samples == 0


# series diagnostics ---------------------------------------------------------------

def test_fit_exponent_recovers_power_law():
    n = np.arange(1, 10**5 + 1, dtype=float)
    assert fit_exponent(3.0 * n ** -1.7) == pytest.approx(1.7, abs=1e-9)


def test_verdict_margin():
    assert verdict_for(1.2) == "converge"
    assert verdict_for(0.8) == "diverge"
    assert verdict_for(1.01) == "inconclusive"


@pytest.mark.parametrize("s, verdict", [(0.5, "diverge"), (1.0, "converge"), (1.5, "converge")])
def test_fseries_small_budget(s, verdict):
    r = fseries(s, 10**5)
    assert r.verdict == verdict
    ns = [n for n, _ in r.checkpoints]
    assert ns == sorted(ns) and ns[-1] == 10**5
    sums = [p for _, p in r.checkpoints]
    assert all(b >= a for a, b in zip(sums, sums[1:]))


def test_fseries_exact_total_for_s1():
    r = fseries(1, 2000, exact_tail=True)
    assert r.exact_total == pytest.approx(2, abs=1e-12)


def test_fseries_complex_s_partial_sums():
    r = fseries(0.5 + 3j, 1000)
    assert isinstance(r.partial, complex)
    assert r.s == 0.5 + 3j


def test_generation_order_matches_tree_levels():
    vals = generation_defects(Disk(), 7)
    expected = []
    level = [IDENTITY]
    while len(expected) < 7:
        expected += [float(Disk().defect_value(p.v1, p.v2)) for p in level]
        level = [c for p in level for c in children(p)]
    assert np.allclose(vals, expected[:7], rtol=1e-15)


def test_fseries_rejects_unknown_order():
    with pytest.raises(DomainError):
        fseries(1, 100, order="random")


def test_lmu_identity_mu2_small_budget():
    r = lmu_identity(2, 10**5)
    assert r.residual < 1e-6
    assert r.lhs == pytest.approx(math.gamma(1.5) ** 2 / math.gamma(2), rel=1e-15)


def test_lmu_identity_rejects_mu_le_1():
    with pytest.raises(DomainError):
        lmu_identity(1)


def test_universal_quantities_disk_coarse():
    uq = universal_quantities(Disk(), 1e-4)
    assert uq.area.value == pytest.approx(math.pi, abs=1e-12)
    assert uq.euclidean_perimeter.value == pytest.approx(2 * math.pi, abs=1e-12)
    assert abs(uq.lattice_perimeter.value) < 1e-12
    assert uq.area.rigorous and uq.f_integral.rigorous
    assert uq.f_integral.error < 1e-5
