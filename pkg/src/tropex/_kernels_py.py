"""Pure-Python tree kernels; the reference for the compiled versions in ``_speedups``.

Nodes are coefficient quadruples ``(a, b, c, d)``: the pair is
``(a B1 + b B2, c B1 + d B2)`` for the starting basis ``B``.  Defect kinds:

* ``disk``: cancellation-free closed form;
* ``lmu``: ``|v1|_nu + |v2|_nu - |v1 + v2|_nu``;
* ``parabola``: ``det^2 / (4 mu q1 q2 (q1 + q2))`` with ``param = mu``.
"""
from __future__ import annotations

import heapq
import math

import numpy as np

KINDS = {"disk": 0, "lmu": 1, "parabola": 2}
_LIMIT = 1 << 62


def defect(kind: int, param: float, x1, y1, x2, y2) -> float:
    if kind == 0:
        # sqrt of an exact sum of squares is correctly rounded, so all backends agree bitwise
        a, c = math.sqrt(x1 * x1 + y1 * y1), math.sqrt(x2 * x2 + y2 * y2)
        e = math.sqrt((x1 + x2) * (x1 + x2) + (y1 + y2) * (y1 + y2))
        d = x1 * y2 - x2 * y1
        return 2.0 * d * d / ((a + c + e) * (a * c + x1 * x2 + y1 * y2))
    if kind == 1:
        nu = param
        n1 = (abs(x1) ** nu + abs(y1) ** nu) ** (1.0 / nu)
        n2 = (abs(x2) ** nu + abs(y2) ** nu) ** (1.0 / nu)
        n12 = (abs(x1 + x2) ** nu + abs(y1 + y2) ** nu) ** (1.0 / nu)
        return n1 + n2 - n12
    d = x1 * y2 - x2 * y1
    return d * d / (4.0 * param * y1 * y2 * (y1 + y2))


def _node_defect(kind, param, basis, node):
    p, q, r, s = basis
    a, b, c, d = node
    return defect(kind, param, a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s)


def _check(node):
    if max(abs(x) for x in node) >= _LIMIT:
        raise OverflowError("tree coefficients exceed the 64-bit guard")


def threshold_dfs(basis, kind: int, param: float, threshold: float, max_nodes: int,
                  root=(1, 0, 0, 1)):
    """Admit nodes with ``defect >= threshold`` depth-first from ``root``.

    Returns ``(nodes, defects, frontier, pending, truncated)`` as numpy arrays
    (``nodes``/``frontier``/``pending`` with shape ``(n, 4)``).
    """
    nodes, values, frontier = [], [], []
    stack = [tuple(root)]
    truncated = False
    while stack:
        if len(nodes) >= max_nodes:
            truncated = True
            break
        node = stack.pop()
        f = _node_defect(kind, param, basis, node)
        if f < 0:
            raise ArithmeticError(f"negative defect {f} at {node}")
        if f < threshold:
            frontier.append(node)
            continue
        nodes.append(node)
        values.append(f)
        a, b, c, d = node
        m = (a + c, b + d)
        _check(m)
        stack.append((m[0], m[1], c, d))
        stack.append((a, b, m[0], m[1]))
    return (_arr(nodes), np.asarray(values, dtype=np.float64), _arr(frontier),
            _arr(stack if truncated else []), truncated)


def best_first(basis, kind: int, param: float, budget: int):
    """The ``budget`` largest defects of the tree, in descending order.

    Valid because defects decrease from a node to its children.
    """
    out = np.empty(budget, dtype=np.float64)
    root = (1, 0, 0, 1)
    heap = [(-_node_defect(kind, param, basis, root), root)]
    n = 0
    while n < budget and heap:
        negf, node = heapq.heappop(heap)
        if negf > 0:
            raise ArithmeticError(f"negative defect {-negf} at {node}")
        out[n] = -negf
        n += 1
        a, b, c, d = node
        m0, m1 = a + c, b + d
        for child in ((a, b, m0, m1), (m0, m1, c, d)):
            _check(child)
            heapq.heappush(heap, (-_node_defect(kind, param, basis, child), child))
    return out[:n]


def disk_F(x: float, y: float, max_nodes: int = 1_000_000) -> float:
    """``min_v (|v| + v.z)`` over primitive ``v``: lattice distance to the unit circle.

    Branch and bound over the four quadrant trees.  For ``v`` strictly inside
    the cone of ``(v1, v2)`` we have ``v = m v1 + n v2`` with ``m, n >= 1``
    and ``|v| >= v.e`` for any unit ``e``, so ``v1.(e + z) + v2.(e + z)``
    bounds the subtree from below once both terms are nonnegative.
    """
    best = min(1 + x, 1 - x, 1 + y, 1 - y)
    stack = [((1, 0), (0, 1)), ((0, 1), (-1, 0)), ((-1, 0), (0, -1)), ((0, -1), (1, 0))]
    r = math.hypot(x, y)
    ux, uy = (-x / r, -y / r) if r > 0 else (0.0, 0.0)
    count = 0
    while stack:
        (ax, ay), (bx, by) = stack.pop()
        na, nb = math.hypot(ax, ay), math.hypot(bx, by)
        ex, ey = ax / na + bx / nb, ay / na + by / nb
        ne = math.hypot(ex, ey)
        ex, ey = ex / ne, ey / ne
        lb = -math.inf
        for e0, e1 in ((ex, ey), (ux, uy)):
            if e0 == 0 and e1 == 0:
                continue
            s1 = ax * (e0 + x) + ay * (e1 + y)
            s2 = bx * (e0 + x) + by * (e1 + y)
            if s1 >= 0 and s2 >= 0:
                lb = max(lb, s1 + s2)
        if lb >= best:
            continue
        mx, my = ax + bx, ay + by
        val = math.hypot(mx, my) + mx * x + my * y
        if val < best:
            best = val
        count += 1
        if count > max_nodes:
            raise ArithmeticError(f"disk_F did not converge at ({x}, {y})")
        stack.append(((ax, ay), (mx, my)))
        stack.append(((mx, my), (bx, by)))
    return best


def _arr(rows):
    if not rows:
        return np.empty((0, 4), dtype=np.int64)
    return np.asarray(rows, dtype=np.int64)


def defects_np(kind: int, param: float, basis, nodes: np.ndarray) -> np.ndarray:
    """Vectorized defects for an ``(n, 4)`` array of nodes."""
    p, q, r, s = basis
    a, b, c, d = (nodes[:, i].astype(np.float64) for i in range(4))
    x1, y1 = a * p + b * r, a * q + b * s
    x2, y2 = c * p + d * r, c * q + d * s
    if kind == 0:
        na, nc = np.sqrt(x1 * x1 + y1 * y1), np.sqrt(x2 * x2 + y2 * y2)
        ne = np.sqrt((x1 + x2) * (x1 + x2) + (y1 + y2) * (y1 + y2))
        dd = x1 * y2 - x2 * y1
        return 2.0 * dd * dd / ((na + nc + ne) * (na * nc + x1 * x2 + y1 * y2))
    if kind == 1:
        def norm(x, y):
            return (np.abs(x) ** param + np.abs(y) ** param) ** (1.0 / param)
        return norm(x1, y1) + norm(x2, y2) - norm(x1 + x2, y1 + y2)
    dd = x1 * y2 - x2 * y1
    return dd * dd / (4.0 * param * y1 * y2 * (y1 + y2))
