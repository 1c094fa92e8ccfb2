"""Defect power sums over the SL+(2,Z) tree, their exact tails and the
universal formulas built from them.

For a convex arc between two tangent lines, the defects of the subtree rooted
at a pair ``(v1, v2)`` satisfy

* ``sum f   = a + b - (lattice length of the arc)``,
* ``sum f^2 = a b - 2 D (area between chord and arc)``,

where ``a = alpha_2 + v2.T1`` and ``b = alpha_1 + v1.T2`` are the values of
each tangent form at the other tangent point and ``D = det(v1, v2)``.
Summing these over the frontier of a truncated enumeration gives exact
tails for ``s = 1`` and ``s = 2``.
"""
from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import DomainError, NotConcaveError
from .lattice import UnimodularPair, det, enumerate_tree
from .support import Disk, SupportFunction, defect, make_context, to_mpf

UNAVAILABLE = "unavailable"


@dataclass
class SumResult:
    s: complex
    partial: object
    tail_exact: object = UNAVAILABLE
    frontier_size: int = 0
    node_count: int = 0
    truncated: bool = False
    threshold: float = 0.0
    backend: str = kernels.BACKEND
    exponent: Optional[float] = None   # fitted decay exponent of the sorted terms, None below 50 terms

    @property
    def total(self):
        if self.tail_exact is UNAVAILABLE:
            return None
        return self.partial + self.tail_exact


@dataclass(frozen=True)
class Estimate:
    """A value with an error bound; ``rigorous`` is False for heuristic bounds."""

    value: float
    error: float
    rigorous: bool


@dataclass
class UniversalQuantities:
    lattice_perimeter: Estimate
    euclidean_perimeter: Estimate
    area: Estimate
    f_integral: Estimate
    node_count: int = 0


# enumeration --------------------------------------------------------------

def _float_basis(basis) -> tuple:
    (p, q), (r, s) = basis[0], basis[1]
    return (float(p), float(q), float(r), float(s))


def _kernel_run(sf, basis, threshold, max_nodes, threads):
    kind = kernels.KINDS[sf.kernel[0]]
    param = sf.kernel[1]
    fb = _float_basis(basis)
    try:
        if threads <= 1:
            nodes, vals, front, pend, trunc = kernels.threshold_dfs(fb, kind, param, threshold, max_nodes)
            return [nodes], [vals], [front], [pend], trunc
        # split at a fixed depth; the top of the tree is walked here, subtrees in workers
        tnodes, tvals, tfront = [], [], []
        level = [(1, 0, 0, 1)]
        while level and len(level) < 4 * threads:
            nxt = []
            for node in level:
                f = kernels.defects_np(kind, param, fb, np.asarray([node], dtype=np.int64))[0]
                if f < 0:
                    raise ArithmeticError(f"negative defect at {node}")
                if f < threshold:
                    tfront.append(node)
                    continue
                tnodes.append(node)
                tvals.append(f)
                a, b, c, d = node
                nxt += [(a, b, a + c, b + d), (a + c, b + d, c, d)]
            level = nxt
        roots = level
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(
                lambda r: kernels.threshold_dfs(fb, kind, param, threshold, max_nodes, r), roots))
        nodes = [np.asarray(tnodes, dtype=np.int64).reshape(-1, 4)] + [p[0] for p in parts]
        vals = [np.asarray(tvals, dtype=np.float64)] + [p[1] for p in parts]
        front = [np.asarray(tfront, dtype=np.int64).reshape(-1, 4)] + [p[2] for p in parts]
        pend = [p[3] for p in parts]
        return nodes, vals, front, pend, any(p[4] for p in parts)
    except ArithmeticError as exc:
        if isinstance(exc, OverflowError):
            raise
        raise NotConcaveError(str(exc)) from exc


def _power_sum(values, s, ctx=None):
    """Sum of ``values**s``: exact for rationals, exactly rounded (``math.fsum``) for floats.

    A list of mpf values (from refinement) is summed in ``ctx`` for
    ``s`` in {1, 2}.  Complex ``s`` uses the principal branch.
    """
    if isinstance(values, list):
        integral = isinstance(s, int) or (not isinstance(s, complex) and float(s).is_integer()) \
            or (isinstance(s, complex) and s.imag == 0 and s.real.is_integer())
        k = int(s.real) if isinstance(s, complex) else s
        if integral and all(isinstance(v, (int, Fraction)) for v in values):
            return sum((v ** int(k) for v in values), Fraction(0))
        if integral and ctx is not None and int(k) in (1, 2):
            return ctx.fsum(v ** int(k) for v in values)
        values = np.asarray([float(v) for v in values])
    if isinstance(s, complex) and s.imag != 0:
        terms = np.exp(s * np.log(values))
        return complex(math.fsum(terms.real), math.fsum(terms.imag))
    s = s.real if isinstance(s, complex) else s
    if s == 1:
        return math.fsum(values)
    return math.fsum(values ** s)


def sum_powers(sf: SupportFunction, s=1, threshold: float = 1e-6, max_nodes: int = 10**7,
               basis: Optional[UnimodularPair] = None, with_tail: bool = True,
               threads: int = 1, refine: Optional[bool] = None) -> SumResult:
    """``sum f^s`` over the nodes with ``f >= threshold``, plus exact tails for ``s`` in {1, 2}.

    Negative defects raise :class:`NotConcaveError`; hitting ``max_nodes``
    sets ``truncated`` and the unexamined subtrees join the frontier.  The
    partial sum is exactly rounded, so it does not depend on ``threads``.
    ``refine`` recomputes the admitted defects at working precision; it
    defaults to on when an exact tail is added and the float kernel of the
    domain cancels digits (``sf.kernel_inexact``).
    """
    if not threshold > 0:
        raise DomainError("threshold must be positive")
    basis = basis or sf.basis
    exact_power = with_tail and s in (1, 2)
    if refine is None:
        refine = exact_power and sf.kernel_inexact
    if sf.kernel is not None:
        nodes, vals, front, pend, trunc = _kernel_run(sf, basis, threshold, max_nodes, threads)
        values = np.concatenate(vals)
        frontier = np.concatenate(front + pend)
        count = len(values)
        pairs = _pairs(sf, basis, frontier)
        if refine:
            values = [sf.defect_value(v1, v2) for v1, v2 in _pairs(sf, basis, np.concatenate(nodes))]
    else:
        values, pairs, count, trunc = _exact_run(sf, basis, threshold, max_nodes)
    partial = _power_sum(values, s, getattr(sf, "ctx", None))
    result = SumResult(s, partial, UNAVAILABLE, len(pairs), count, trunc, threshold)
    if count >= 50:
        result.exponent = fit_exponent(np.asarray([float(v) for v in values]) ** complex(s).real)
    if exact_power:
        k = int(s.real) if isinstance(s, complex) else int(s)
        result.tail_exact = tail(sf, pairs, (k,))[k]
    return result


def _exact_run(sf, basis, threshold, max_nodes):
    values = []

    def admit(pair):
        f = defect(sf, pair).value
        if f < 0:
            raise NotConcaveError(f"negative defect {f} at {pair}")
        if f >= threshold:
            values.append(f)
            return True
        return False

    walk = enumerate_tree(basis, admit, max_nodes=max_nodes)
    for _ in walk:
        pass
    pairs = [(p.v1, p.v2) for p in walk.frontier + walk.pending]
    return values, pairs, walk.node_count, walk.truncated


def _pairs(sf, basis, nodes: np.ndarray) -> list:
    out = []
    (p, q), (r, s) = basis[0], basis[1]
    for a, b, c, d in nodes.tolist():
        out.append(((a * p + b * r, a * q + b * s), (c * p + d * r, c * q + d * s)))
    return out


def tail(sf: SupportFunction, frontier: Sequence, powers: Sequence[int] = (1, 2)) -> dict:
    """Exact sums of ``f`` and ``f^2`` over the subtrees rooted at ``frontier``.

    ``frontier`` holds pairs ``(v1, v2)``.  Returns ``{s: ...}`` for ``s`` in
    ``powers``; a value is ``"unavailable"`` when the domain has no oracle
    for it.  Only the ``f^2`` tail needs segment areas, which cost a
    quadrature per pair on some domains.
    """
    frontier = list(frontier)
    if not sf.has_tail_oracle:
        # subtrees below a zero defect vanish identically
        if all(sf.defect_value(v1, v2) == 0 for v1, v2 in frontier):
            return {s: Fraction(0) for s in powers}
        return {s: UNAVAILABLE for s in powers}
    ctx = getattr(sf, "ctx", None) or make_context()
    terms = {s: [] for s in powers}
    for v1, v2 in frontier:
        a, b = sf.tail_terms(v1, v2)
        if 1 in terms:
            terms[1].append(a + b - sf.arc_lattice_length(v1, v2))
        if 2 in terms:
            terms[2].append(a * b - 2 * abs(det(v1, v2)) * sf.segment_area(v1, v2))
    return {s: _exact_or_mp_sum(t, ctx) for s, t in terms.items()}


def _exact_or_mp_sum(terms, ctx):
    if all(isinstance(t, (int, Fraction)) for t in terms):
        return sum(terms, Fraction(0))
    return ctx.fsum(terms)


# closed form and bounds -----------------------------------------------------

def _check_quadruple(a, b, c, d):
    if any(int(x) != x for x in (a, b, c, d)):
        raise DomainError("entries must be integers")
    if a * d - b * c != 1:
        raise DomainError(f"ad - bc = {a * d - b * c}, expected 1")


def defect_closed_form(a, b, c, d, ctx=None):
    """``2 / ((|a,b| + |c,d| + |a+c,b+d|)(|a,b| |c,d| + ac + bd))``, free of cancellation."""
    _check_quadruple(a, b, c, d)
    ctx = ctx or make_context()
    n1 = ctx.sqrt(ctx.mpf(a * a + b * b))
    n2 = ctx.sqrt(ctx.mpf(c * c + d * d))
    n12 = ctx.sqrt(ctx.mpf((a + c) ** 2 + (b + d) ** 2))
    return 2 / ((n1 + n2 + n12) * (n1 * n2 + a * c + b * d))


def defect_radical(a, b, c, d, ctx=None):
    """``|a,b| + |c,d| - |a+c,b+d|`` evaluated directly (cancels badly; use high precision)."""
    ctx = ctx or make_context()
    return (ctx.sqrt(ctx.mpf(a * a + b * b)) + ctx.sqrt(ctx.mpf(c * c + d * d))
            - ctx.sqrt(ctx.mpf((a + c) ** 2 + (b + d) ** 2)))


def random_unimodular(rng: random.Random, bound: int, ordered: bool = True) -> tuple:
    """A random ``(a, b, c, d)`` with nonnegative entries and ``ad - bc = 1``.

    With ``ordered`` the result has ``|a,b| > |c,d|``; otherwise the two rows
    are swapped (as ``(d, c, b, a)``) half of the time.
    """
    while True:
        a, b = rng.randint(1, bound), rng.randint(1, bound)
        if math.gcd(a, b) != 1:
            continue
        if b == 1:
            d, c = 1, a - 1
        else:
            d = pow(a, -1, b)
            c = (a * d - 1) // b
        if ordered and a * a + b * b <= c * c + d * d:
            continue
        if not ordered and rng.random() < 0.5:
            a, b, c, d = d, c, b, a
        return a, b, c, d


@dataclass
class BoundsReport:
    samples: int
    lower_violations: list = field(default_factory=list)
    upper_violations: list = field(default_factory=list)
    corrected_lower_violations: list = field(default_factory=list)

    @property
    def literal_holds(self) -> bool:
        return not self.lower_violations and not self.upper_violations

    @property
    def corrected_holds(self) -> bool:
        return not self.corrected_lower_violations and not self.upper_violations


def bounds_check(quadruples, ctx=None) -> BoundsReport:
    """Test ``1/|a,b|^3 <= f <= 1/|a,b|^2`` on quadruples with ``|a,b| > |c,d|``.

    The lower bound is also tested in the weaker form ``1/(4 |a,b|^3)``, which
    follows from the closed form since ``|c,d| < |a,b|`` and ``|a+c,b+d| < 2|a,b|``.
    Violations are recorded with witnesses ``(quadruple, f, bound)``.
    """
    ctx = ctx or make_context()
    rep = BoundsReport(0)
    for q in quadruples:
        a, b, c, d = q
        if a * a + b * b <= c * c + d * d:
            continue
        rep.samples += 1
        f = defect_closed_form(a, b, c, d, ctx)
        n = ctx.sqrt(ctx.mpf(a * a + b * b))
        lo, hi = 1 / n ** 3, 1 / n ** 2
        if f < lo:
            rep.lower_violations.append((tuple(q), float(f), float(lo)))
        if f > hi:
            rep.upper_violations.append((tuple(q), float(f), float(hi)))
        if f < lo / 4:
            rep.corrected_lower_violations.append((tuple(q), float(f), float(lo / 4)))
    return rep


# series diagnostics ---------------------------------------------------------

@dataclass
class FSeriesResult:
    s: complex
    order: str
    budget: int
    checkpoints: list          # (N, partial sum)
    exponent: float            # fitted decay exponent of the sorted terms |f^s|
    verdict: str               # "converge", "diverge" or "inconclusive"
    heuristic_tail: Optional[float]
    exact_total: Optional[float] = None

    @property
    def partial(self):
        return self.checkpoints[-1][1]


def generation_defects(sf: SupportFunction, budget: int, basis=None) -> np.ndarray:
    """Defects of the first ``budget`` nodes in breadth-first (generation) order."""
    basis = basis or sf.basis
    kind, param = kernels.KINDS[sf.kernel[0]], sf.kernel[1]
    fb = _float_basis(basis)
    level = np.asarray([[1, 0, 0, 1]], dtype=np.int64)
    out, n = [], 0
    while n < budget:
        vals = kernels.defects_np(kind, param, fb, level)
        out.append(vals[: budget - n])
        n += len(out[-1])
        a, b, c, d = level.T
        left = np.stack([a, b, a + c, b + d], axis=1)
        right = np.stack([a + c, b + d, c, d], axis=1)
        level = np.empty((2 * len(level), 4), dtype=np.int64)
        level[0::2], level[1::2] = left, right
    return np.concatenate(out)


def fit_exponent(terms: np.ndarray, lo_frac: float = 0.1) -> float:
    """Decay exponent ``beta`` of sorted terms ``t_N ~ C N^-beta`` over ``N`` in ``[lo_frac n, n]``."""
    t = np.sort(np.abs(terms))[::-1]
    n = len(t)
    lo = max(1, int(lo_frac * n))
    idx = np.unique(np.geomspace(lo, n, 200).astype(np.int64))
    idx = idx[(idx >= 1) & (idx <= n)]
    y = np.log(t[idx - 1])
    x = np.log(idx.astype(np.float64))
    slope = np.polyfit(x, y, 1)[0]
    return float(-slope)


def verdict_for(beta: float, margin: float = 0.05) -> str:
    if beta > 1 + margin:
        return "converge"
    if beta < 1 - margin:
        return "diverge"
    return "inconclusive"


def fseries(s, budget: int = 10**6, order: str = "defect", sf: Optional[SupportFunction] = None,
            checkpoints: Optional[Sequence[int]] = None, exact_tail: bool = False) -> FSeriesResult:
    """Partial sums of ``F(s) = sum f^s`` with a power-law fit of the tail.

    ``order`` is ``"defect"`` (descending defects) or ``"generation"``.  The
    verdict compares the fitted exponent of the sorted terms with 1.  The
    heuristic tail ``t_N N / (beta - 1)`` is not rigorous.  With
    ``exact_tail`` and ``s`` in {1, 2} the exact total is added from a
    threshold run at the smallest defect reached (costly for large budgets).
    """
    sf = sf or Disk()
    s = complex(s)
    if order in ("defect", "by-defect-descending"):
        order = "defect"
        kind, param = kernels.KINDS[sf.kernel[0]], sf.kernel[1]
        values = kernels.best_first(_float_basis(sf.basis), kind, param, budget)
    elif order in ("generation", "by-generation"):
        order = "generation"
        values = generation_defects(sf, budget)
    else:
        raise DomainError(f"unknown order {order!r}")
    if checkpoints is None:
        checkpoints = sorted({10 ** k for k in range(1, 20) if 10 ** k <= budget}
                             | {3 * 10 ** k for k in range(1, 20) if 3 * 10 ** k <= budget} | {budget})
    sreal = s.real if s.imag == 0 else s
    terms = np.exp(s * np.log(values)) if s.imag else values ** s.real
    pts = []
    for n in checkpoints:
        part = terms[:n]
        if s.imag:
            pts.append((n, complex(math.fsum(part.real), math.fsum(part.imag))))
        else:
            pts.append((n, math.fsum(part)))
    beta = fit_exponent(np.abs(terms))
    sorted_terms = np.sort(np.abs(terms))
    heuristic = float(sorted_terms[0] * len(terms) / (beta - 1)) if beta > 1 else None
    result = FSeriesResult(sreal, order, budget, pts, beta, verdict_for(beta), heuristic)
    if exact_tail and s in (1, 2) and sf.has_tail_oracle:
        res = sum_powers(sf, int(s.real), threshold=float(np.min(values)), max_nodes=4 * budget)
        result.exact_total = float(res.total)
    return result


def heuristic_tail(values: np.ndarray, s: float) -> tuple:
    """``(tail, beta)`` for the terms ``values**s`` sorted in descending order."""
    terms = np.sort(values ** s)[::-1]
    beta = fit_exponent(terms)
    if beta <= 1:
        return math.inf, beta
    return float(terms[-1] * len(terms) / (beta - 1)), beta


# universal formulas -----------------------------------------------------------

def universal_quantities(sf: SupportFunction, threshold: float = 1e-6,
                         max_nodes: int = 10**7) -> UniversalQuantities:
    """Lattice perimeter, perimeter, area and ``int F`` of the domain from its minimal model.

    Every branch tree of the model's caustic contributes; cutting the
    triangle of a pair with defect ``f`` changes the four quantities by
    ``f``, ``f e`` (``e`` the Euclidean defect), ``f^2 / 2`` and ``f^3 / 6``.
    """
    from .caustic import integral_F

    model = sf.minimal_model
    if model is None:
        raise DomainError(f"{sf.name} has no minimal model")
    s1 = s2 = s3 = se = 0.0
    t1 = t2 = 0.0
    rigorous_t = True
    count = 0
    ratio = 0.0
    parts1, parts2, parts3, partse = [], [], [], []
    for basis in sf.branch_bases:
        fb = _float_basis(basis)
        nodes, vals, front, pend, trunc = _kernel_run(sf, basis, threshold, max_nodes, 1)
        nodes, vals = np.concatenate(nodes), np.concatenate(vals)
        e = kernels.defects_np(0, 2.0, fb, nodes) if not sf.euclidean_defect_is_defect else vals
        parts1.append(math.fsum(vals))
        parts2.append(math.fsum(vals ** 2))
        parts3.append(math.fsum(vals ** 3))
        partse.append(math.fsum(vals * e))
        if len(vals):
            ratio = max(ratio, float(np.max(e / vals)))
        count += len(vals)
        tl = tail(sf, _pairs(sf, basis, np.concatenate(front + pend)))
        t1 += float(tl[1])
        t2 += float(tl[2])
        rigorous_t = rigorous_t and not trunc
    s1, s2, s3, se = (math.fsum(p) for p in (parts1, parts2, parts3, partse))
    lat = Estimate(float(model.lattice_perimeter) - s1 - t1, 1e-12, rigorous_t)
    if sf.euclidean_defect_is_defect:
        eu = Estimate(model.euclidean_perimeter - se - t2, 1e-12, rigorous_t)
    else:
        # f e <= ratio f^2 on the admitted part; assumed below the threshold too
        tail_e = ratio * t2
        eu = Estimate(model.euclidean_perimeter - se - tail_e, tail_e, False)
    area = Estimate(float(model.area) - (s2 + t2) / 2, 1e-12, rigorous_t)
    # f^3 <= threshold f^2 on every frontier subtree
    fi = Estimate(float(integral_F(model)) - s3 / 6, threshold * t2 / 6, rigorous_t)
    return UniversalQuantities(lat, eu, area, fi, count)


def disk_F_integral(epsabs: float = 1e-11) -> float:
    """``int F`` over the unit disk by adaptive quadrature of the evaluator.

    Polar coordinates on the sector ``0 <= phi <= pi/4`` (one eighth by
    symmetry).  Kinks of ``F`` accumulate at the circle, hence the breakpoints.
    """
    from scipy import integrate

    breaks = [0.5, 0.9, 0.99, 0.999, 0.9999]

    def inner(phi):
        c, s = math.cos(phi), math.sin(phi)
        val, _ = integrate.quad(lambda r: r * kernels.disk_F(r * c, r * s), 0.0, 1.0,
                                epsabs=epsabs / 10, limit=2000, points=breaks)
        return val

    outer, _ = integrate.quad(inner, 0.0, math.pi / 4, epsabs=epsabs, limit=500)
    return 8 * outer


# L^mu identity -----------------------------------------------------------------

@dataclass
class LmuIdentity:
    mu: float
    lhs: float
    rhs: float
    residual: float
    partial: float
    heuristic_tail: float
    exponent: float
    budget: int


def lmu_identity(mu, budget: int = 10**6) -> LmuIdentity:
    """``Gamma^2(2 - 1/nu) / Gamma(3 - 2/nu)`` against ``1 - sum f^2 / 2`` on the positive quadrant."""
    ctx = make_context()
    mu = to_mpf(ctx, mu)
    if not mu > 1:
        raise DomainError("mu must exceed 1")
    nu = mu / (mu - 1)
    lhs = ctx.gamma(2 - 1 / nu) ** 2 / ctx.gamma(3 - 2 / nu)
    kind, param = kernels.KINDS["lmu"], float(nu)
    values = kernels.best_first((1.0, 0.0, 0.0, 1.0), kind, param, budget)
    partial = math.fsum(values ** 2)
    htail, beta = heuristic_tail(values, 2.0)
    rhs = 1 - (partial + htail) / 2
    return LmuIdentity(float(mu), float(lhs), rhs, abs(float(lhs) - rhs), partial, htail, beta, budget)
