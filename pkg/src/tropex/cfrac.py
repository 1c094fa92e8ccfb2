"""Continued fractions and the convergent identities of an irrational slope.

With terms ``r_k`` and convergents ``p_k / q_k`` of ``alpha``:

* ``alpha - floor(alpha) = sum_k (p_k - alpha q_k)^2 r_(k+1)``;
* ``alpha + 1 - floor(alpha) = sum_k |p_k - alpha q_k| r_(k+1)`` (irrational ``alpha``).

Both pair the error of the k-th convergent with the next term.  The
verification computes every pairing (``r_k`` or ``r_(k+1)``, signed or
absolute) and reports which one converges.

Quadratic irrationals are expanded exactly in ``Q(sqrt d)``; other reals use
interval arithmetic and stop with :class:`PrecisionError` once a floor is
no longer certain.
"""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import DomainError, PrecisionError


def _squarefree_split(n: int) -> tuple[int, int]:
    """``n = k^2 m`` with ``m`` squarefree; returns ``(k, m)``."""
    k, m, p = 1, n, 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            k *= p
        p += 1
    return k, m


class QuadSurd:
    """The number ``a + b sqrt(d)`` with rational ``a, b`` and squarefree ``d > 1`` (or ``b = 0``)."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d=1):
        a, b = Fraction(a), Fraction(b)
        if b == 0 or d == 1:
            a, b, d = a + b, Fraction(0), 1
        if d < 1:
            raise DomainError("only real quadratic fields are supported")
        self.a, self.b, self.d = a, b, d

    @classmethod
    def sqrt(cls, x: "QuadSurd") -> "QuadSurd":
        if x.b != 0:
            raise DomainError("square roots of quadratic irrationals have degree four")
        if x.a < 0:
            raise DomainError("square root of a negative number")
        num, den = x.a.numerator, x.a.denominator
        # sqrt(n/m) = sqrt(n m) / m
        k, m = _squarefree_split(num * den)
        return cls(0, Fraction(k, den), m) if m > 1 else cls(Fraction(k, den))

    def _coerce(self, other):
        if isinstance(other, QuadSurd):
            if self.b and other.b and self.d != other.d:
                raise DomainError(f"cannot combine sqrt({self.d}) and sqrt({other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadSurd(other)
        return NotImplemented

    def _field(self, other):
        return self.d if self.b else other.d

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadSurd(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = self._field(o)
        return QuadSurd(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def conjugate(self):
        return QuadSurd(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero")
        c = self * o.conjugate()
        return QuadSurd(c.a / n, c.b / n, c.d)

    def __rtruediv__(self, other):
        return QuadSurd(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return QuadSurd(1) / (self ** -k)
        out = QuadSurd(1)
        for _ in range(k):
            out = out * self
        return out

    def sign(self) -> int:
        """Exact sign of ``a + b sqrt(d)``."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0 or sa == sb:
            return sa if sa else sb
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with b^2 d
        diff = self.a * self.a - self.b * self.b * self.d
        return sa if diff > 0 else sb

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, QuadSurd) else other
        if o is NotImplemented:
            return False
        return self.a == o.a and self.b == o.b and (self.b == 0 or self.d == o.d)

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __floor__(self) -> int:
        if self.b == 0:
            return math.floor(self.a)
        # sqrt via integer arithmetic: floor(b sqrt d) bracketed exactly
        guess = math.floor(self.a + _isqrt_frac(self.b * self.b * self.d) * (1 if self.b > 0 else -1))
        k = guess - 2
        while self >= k + 1:
            k += 1
        while self < k:
            k -= 1
        return k

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def to_mpf(self, ctx=mpmath.mp):
        return ctx.mpf(self.a.numerator) / self.a.denominator + \
            ctx.mpf(self.b.numerator) / self.b.denominator * ctx.sqrt(self.d)

    def __float__(self):
        return float(self.to_mpf())

    def __repr__(self):
        if self.b == 0:
            return f"QuadSurd({self.a})"
        return f"QuadSurd({self.a} + {self.b}*sqrt({self.d}))"


def _isqrt_frac(x: Fraction) -> int:
    return math.isqrt(x.numerator // x.denominator)


# expression parsing ---------------------------------------------------------

_CONSTANTS = {"phi", "pi", "e"}


def _interval_context(prec: int):
    """A private interval context, so the global ``mpmath.iv`` precision is left alone."""
    ctx = mpmath.ctx_iv.MPIntervalContext()
    ctx.prec = prec
    return ctx


def parse_alpha(text: str, prec: int = 256):
    """Parse a real expression.

    Integers, decimals, ``+ - * / **`` (integer powers), ``sqrt(...)``
    and the constants ``phi``, ``pi``, ``e``.  Returns a :class:`QuadSurd`
    when the value lies in a real quadratic field, else an mpmath interval.
    """
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise DomainError(f"cannot parse {text!r}: {exc.msg} at column {exc.offset}") from None
    ivctx = _interval_context(prec)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            return QuadSurd(Fraction(str(node.value)))
        if isinstance(node, ast.Name):
            if node.id == "phi":
                return QuadSurd(Fraction(1, 2), Fraction(1, 2), 5)
            if node.id == "pi":
                return ivctx.pi
            if node.id == "e":
                return ivctx.e
            raise DomainError(f"unknown name {node.id!r} at column {node.col_offset + 1}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            left, right = ev(node.left), ev(node.right)
            op = type(node.op)
            if op is ast.Pow:
                if not (isinstance(right, QuadSurd) and right.is_rational and right.a.denominator == 1):
                    raise DomainError(f"only integer powers are supported (column {node.col_offset + 1})")
                k = int(right.a)
                return left ** k if isinstance(left, QuadSurd) else left ** k
            try:
                if isinstance(left, QuadSurd) and isinstance(right, QuadSurd):
                    return {ast.Add: left.__add__, ast.Sub: left.__sub__,
                            ast.Mult: left.__mul__, ast.Div: left.__truediv__}[op](right)
            except KeyError:
                raise DomainError(f"unsupported operator at column {node.col_offset + 1}") from None
            except DomainError:
                pass
            left, right = _iv(left, ivctx), _iv(right, ivctx)
            table = {ast.Add: lambda: left + right, ast.Sub: lambda: left - right,
                     ast.Mult: lambda: left * right, ast.Div: lambda: left / right}
            if op not in table:
                raise DomainError(f"unsupported operator at column {node.col_offset + 1}")
            return table[op]()
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt" \
                and len(node.args) == 1:
            arg = ev(node.args[0])
            if isinstance(arg, QuadSurd):
                try:
                    return QuadSurd.sqrt(arg)
                except DomainError:
                    if arg < 0:
                        raise
            return ivctx.sqrt(_iv(arg, ivctx))
        raise DomainError(f"unsupported syntax at column {getattr(node, 'col_offset', 0) + 1}")

    return ev(tree)


def _iv(x, ivctx):
    if isinstance(x, QuadSurd):
        a = ivctx.mpf(x.a.numerator) / x.a.denominator
        if x.b == 0:
            return a
        return a + ivctx.mpf(x.b.numerator) / x.b.denominator * ivctx.sqrt(x.d)
    return x


# expansion ------------------------------------------------------------------

@dataclass
class CFExpansion:
    alpha: object
    terms: list
    convergents: list
    exact: bool
    terminated: bool = False

    @property
    def n(self) -> int:
        return len(self.terms) - 1


def _as_alpha(alpha, prec):
    if isinstance(alpha, str):
        return parse_alpha(alpha, prec)
    if isinstance(alpha, (int, Fraction)):
        return QuadSurd(alpha)
    if isinstance(alpha, float):
        return QuadSurd(Fraction(alpha))
    return alpha


def expand(alpha, n: int, prec: int = 256) -> CFExpansion:
    """Terms ``r_0..r_n`` and convergents of ``alpha > 0``.

    Rational input terminates early.  For interval input a
    :class:`PrecisionError` names the last term that is certain.
    """
    if n < 0:
        raise DomainError("n must be nonnegative")
    x = _as_alpha(alpha, prec)
    exact = isinstance(x, QuadSurd)
    if exact:
        if x <= 0:
            raise DomainError("alpha must be positive")
    else:
        x = _interval_context(prec).mpf(x) if not isinstance(x, mpmath.ctx_iv.ivmpf) else x
        if not x.a > 0:
            raise DomainError("alpha must be positive")
    orig = x
    terms = []
    terminated = False
    for k in range(n + 1):
        if exact:
            r = math.floor(x)
        else:
            lo, hi = math.floor(x.a), math.floor(x.b)
            if lo != hi:
                raise PrecisionError(
                    f"precision exhausted at term {k}; terms up to {k - 1} are certain",
                    last_trusted=k - 1)
            r = int(lo)
        terms.append(r)
        frac = x - r
        if (exact and frac == 0) or (not exact and frac.a == 0 and frac.b == 0):
            terminated = True
            break
        if not exact and frac.a <= 0:
            raise PrecisionError(
                f"precision exhausted at term {k + 1}; terms up to {k} are certain",
                last_trusted=k)
        x = 1 / frac
    return CFExpansion(orig, terms, convergents(terms), exact, terminated)


def convergents(terms) -> list:
    out = []
    p0, q0, p1, q1 = 1, 0, terms[0], 1
    out.append((p1, q1))
    for r in terms[1:]:
        p0, q0, p1, q1 = p1, q1, r * p1 + p0, r * q1 + q0
        out.append((p1, q1))
    return out


# identities -----------------------------------------------------------------

# shifted pairings first, so ties (e.g. all terms equal) resolve to them
VARIANTS = ("quadratic r_k+1", "quadratic r_k", "linear abs r_k+1", "linear signed r_k+1",
            "linear abs r_k", "linear signed r_k")


@dataclass
class IdentityReport:
    alpha: object
    n: int
    residual_quadratic: float
    residual_linear: float
    linear_variant: str
    quadratic_variant: str
    partial_sums: dict = field(default_factory=dict)   # variant -> list of partial sums
    residuals: dict = field(default_factory=dict)      # variant -> final residual
    targets: dict = field(default_factory=dict)


def verify_identities(alpha, n: int, prec: int = 256) -> IdentityReport:
    """Residuals of both identities after ``n + 1`` terms, for every variant.

    ``residual_quadratic`` and ``residual_linear`` come from the variants
    with the smallest final residual; ``partial_sums`` keeps them all.
    """
    exp = expand(alpha, n + 1, prec)
    x = exp.alpha
    exact = exp.exact
    ctx = mpmath.MPContext()
    ctx.prec = prec
    if exact:
        fl = math.floor(x)
        errs = [p - x * q for p, q in exp.convergents]
    else:
        xm = ctx.mpf(x.mid)
        fl = exp.terms[0]
        errs = [p - xm * q for p, q in exp.convergents]
        x = xm
    terms = exp.terms
    m = min(n + 1, len(terms))
    sums = {v: [] for v in VARIANTS}
    acc = {v: 0 for v in VARIANTS}
    for k in range(m):
        e = errs[k]
        cur = terms[k]
        nxt = terms[k + 1] if k + 1 < len(terms) else 0
        contrib = {
            "quadratic r_k": e * e * cur,
            "quadratic r_k+1": e * e * nxt,
            "linear signed r_k": e * cur,
            "linear signed r_k+1": e * nxt,
            "linear abs r_k": abs(e) * cur,
            "linear abs r_k+1": abs(e) * nxt,
        }
        for v in VARIANTS:
            acc[v] = acc[v] + contrib[v]
            sums[v].append(acc[v])
    tq = x - fl
    tl = x + 1 - fl
    targets = {"quadratic": tq, "linear": tl}
    residuals = {}
    for v in VARIANTS:
        t = tq if v.startswith("quadratic") else tl
        r = t - acc[v]
        residuals[v] = float(abs(r.to_mpf(ctx)) if isinstance(r, QuadSurd) else abs(r))
    qv = min((v for v in VARIANTS if v.startswith("quadratic")), key=residuals.get)
    lv = min((v for v in VARIANTS if v.startswith("linear")), key=residuals.get)
    return IdentityReport(exp.alpha, n, residuals[qv], residuals[lv], lv, qv,
                          {v: [_to_float(s, ctx) for s in sums[v]] for v in VARIANTS},
                          residuals, {k: _to_float(t, ctx) for k, t in targets.items()})


def _to_float(v, ctx):
    if isinstance(v, QuadSurd):
        return float(v.to_mpf(ctx))
    return float(v)
