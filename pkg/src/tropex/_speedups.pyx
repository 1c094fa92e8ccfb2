# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tree kernels; same API and results as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport hypot, sqrt, fabs, pow, INFINITY
from libc.stdint cimport int64_t
from libcpp.vector cimport vector
from libcpp.queue cimport priority_queue
from libcpp.utility cimport pair

cnp.import_array()

cdef int64_t LIMIT = (<int64_t>1) << 62

cdef struct Node:
    int64_t a, b, c, d

cdef struct Vec2:
    double x, y


cdef inline double _defect(int kind, double param, double x1, double y1, double x2, double y2) noexcept nogil:
    cdef double a, c, e, d, n1, n2, n12
    if kind == 0:
        # sqrt of an exact sum of squares is correctly rounded, so all backends agree bitwise
        a = sqrt(x1 * x1 + y1 * y1)
        c = sqrt(x2 * x2 + y2 * y2)
        e = sqrt((x1 + x2) * (x1 + x2) + (y1 + y2) * (y1 + y2))
        d = x1 * y2 - x2 * y1
        return 2.0 * d * d / ((a + c + e) * (a * c + x1 * x2 + y1 * y2))
    if kind == 1:
        n1 = pow(pow(fabs(x1), param) + pow(fabs(y1), param), 1.0 / param)
        n2 = pow(pow(fabs(x2), param) + pow(fabs(y2), param), 1.0 / param)
        n12 = pow(pow(fabs(x1 + x2), param) + pow(fabs(y1 + y2), param), 1.0 / param)
        return n1 + n2 - n12
    d = x1 * y2 - x2 * y1
    return d * d / (4.0 * param * y1 * y2 * (y1 + y2))


cdef inline double _node_defect(int kind, double param, double* B, Node n) noexcept nogil:
    return _defect(kind, param,
                   n.a * B[0] + n.b * B[2], n.a * B[1] + n.b * B[3],
                   n.c * B[0] + n.d * B[2], n.c * B[1] + n.d * B[3])


cdef inline bint _too_big(Node n) noexcept nogil:
    return (n.a >= LIMIT or n.a <= -LIMIT or n.b >= LIMIT or n.b <= -LIMIT
            or n.c >= LIMIT or n.c <= -LIMIT or n.d >= LIMIT or n.d <= -LIMIT)


cdef object _to_array(vector[Node]& v):
    cdef Py_ssize_t i, n = v.size()
    out = np.empty((n, 4), dtype=np.int64)
    cdef int64_t[:, ::1] o = out
    for i in range(n):
        o[i, 0] = v[i].a
        o[i, 1] = v[i].b
        o[i, 2] = v[i].c
        o[i, 3] = v[i].d
    return out


cdef int _dfs_core(double* B, int kind, double param, double threshold, Py_ssize_t max_nodes,
                   vector[Node]& stack, vector[Node]& nodes, vector[Node]& frontier,
                   vector[double]& values, bint* truncated) noexcept nogil:
    cdef Node node, left, right
    cdef double f
    while stack.size() > 0:
        if <Py_ssize_t>nodes.size() >= max_nodes:
            truncated[0] = True
            return 0
        node = stack.back()
        stack.pop_back()
        f = _node_defect(kind, param, B, node)
        if f < 0:
            stack.push_back(node)
            return 1
        if f < threshold:
            frontier.push_back(node)
            continue
        nodes.push_back(node)
        values.push_back(f)
        right.a, right.b, right.c, right.d = node.a + node.c, node.b + node.d, node.c, node.d
        left.a, left.b, left.c, left.d = node.a, node.b, right.a, right.b
        if _too_big(right):
            return 2
        stack.push_back(right)
        stack.push_back(left)
    return 0


def threshold_dfs(basis, int kind, double param, double threshold, Py_ssize_t max_nodes,
                  root=(1, 0, 0, 1)):
    cdef double B[4]
    B[0], B[1], B[2], B[3] = basis
    cdef vector[Node] stack, nodes, frontier
    cdef vector[double] values
    cdef Node node
    cdef bint truncated = False
    cdef int status
    node.a, node.b, node.c, node.d = root
    stack.push_back(node)
    with nogil:
        status = _dfs_core(B, kind, param, threshold, max_nodes, stack, nodes, frontier,
                           values, &truncated)
    if status == 1:
        node = stack.back()
        raise ArithmeticError(f"negative defect at {(node.a, node.b, node.c, node.d)}")
    if status == 2:
        raise OverflowError("tree coefficients exceed the 64-bit guard")
    cdef Py_ssize_t i, nv = values.size()
    vals = np.empty(nv, dtype=np.float64)
    cdef double[::1] vv = vals
    for i in range(nv):
        vv[i] = values[i]
    if not truncated:
        stack.clear()
    return _to_array(nodes), vals, _to_array(frontier), _to_array(stack), truncated


def best_first(basis, int kind, double param, Py_ssize_t budget):
    cdef double B[4]
    B[0], B[1], B[2], B[3] = basis
    cdef vector[Node] store
    cdef priority_queue[pair[double, size_t]] heap
    cdef pair[double, size_t] top
    cdef Node node, child
    cdef Py_ssize_t n = 0
    cdef int side
    out = np.empty(budget, dtype=np.float64)
    cdef double[::1] o = out
    node.a, node.b, node.c, node.d = 1, 0, 0, 1
    store.push_back(node)
    heap.push(pair[double, size_t](_node_defect(kind, param, B, node), 0))
    while n < budget and not heap.empty():
        top = heap.top()
        heap.pop()
        if top.first < 0:
            raise ArithmeticError(f"negative defect {top.first}")
        o[n] = top.first
        n += 1
        node = store[top.second]
        for side in range(2):
            if side == 0:
                child.a, child.b, child.c, child.d = node.a, node.b, node.a + node.c, node.b + node.d
            else:
                child.a, child.b, child.c, child.d = node.a + node.c, node.b + node.d, node.c, node.d
            if _too_big(child):
                raise OverflowError("tree coefficients exceed the 64-bit guard")
            store.push_back(child)
            heap.push(pair[double, size_t](_node_defect(kind, param, B, child), store.size() - 1))
    return out[:n]


cdef struct Cone:
    double ax, ay, bx, by


def disk_F(double x, double y, Py_ssize_t max_nodes=1000000):
    cdef double best = min(min(1 + x, 1 - x), min(1 + y, 1 - y))
    cdef vector[Cone] stack
    cdef Cone cone, c2
    cdef double r = hypot(x, y), ux = 0, uy = 0
    cdef double na, nb, ex, ey, ne, lb, s1, s2, mx, my, val
    cdef Py_ssize_t count = 0
    if r > 0:
        ux, uy = -x / r, -y / r
    cone.ax, cone.ay, cone.bx, cone.by = 1, 0, 0, 1
    stack.push_back(cone)
    cone.ax, cone.ay, cone.bx, cone.by = 0, 1, -1, 0
    stack.push_back(cone)
    cone.ax, cone.ay, cone.bx, cone.by = -1, 0, 0, -1
    stack.push_back(cone)
    cone.ax, cone.ay, cone.bx, cone.by = 0, -1, 1, 0
    stack.push_back(cone)
    while stack.size() > 0:
        cone = stack.back()
        stack.pop_back()
        na = hypot(cone.ax, cone.ay)
        nb = hypot(cone.bx, cone.by)
        ex = cone.ax / na + cone.bx / nb
        ey = cone.ay / na + cone.by / nb
        ne = hypot(ex, ey)
        ex /= ne
        ey /= ne
        lb = -INFINITY
        s1 = cone.ax * (ex + x) + cone.ay * (ey + y)
        s2 = cone.bx * (ex + x) + cone.by * (ey + y)
        if s1 >= 0 and s2 >= 0 and s1 + s2 > lb:
            lb = s1 + s2
        if r > 0:
            s1 = cone.ax * (ux + x) + cone.ay * (uy + y)
            s2 = cone.bx * (ux + x) + cone.by * (uy + y)
            if s1 >= 0 and s2 >= 0 and s1 + s2 > lb:
                lb = s1 + s2
        if lb >= best:
            continue
        mx = cone.ax + cone.bx
        my = cone.ay + cone.by
        val = hypot(mx, my) + mx * x + my * y
        if val < best:
            best = val
        count += 1
        if count > max_nodes:
            raise ArithmeticError(f"disk_F did not converge at ({x}, {y})")
        c2.ax, c2.ay, c2.bx, c2.by = mx, my, cone.bx, cone.by
        stack.push_back(c2)
        c2.ax, c2.ay, c2.bx, c2.by = cone.ax, cone.ay, mx, my
        stack.push_back(c2)
    return best
