"""Lattice vectors and the binary tree of unimodular pairs.

Every element of the monoid generated by ``[[1,1],[0,1]]`` and ``[[1,0],[1,1]]``
appears exactly once as a node of the tree rooted at the identity, where a node
``(v1, v2)`` has the two children ``(v1, v1+v2)`` and ``(v1+v2, v2)``.  Starting
from an arbitrary basis ``B`` the tree enumerates ``SL+(2,Z) . B``.

Entries are Python integers (or any exact/real numbers for non-lattice
starting bases) so no overflow is possible; they grow like Fibonacci numbers
along the extreme paths.
"""
from __future__ import annotations

import heapq
import math
from collections import deque
from fractions import Fraction
from typing import Callable, Iterator, NamedTuple, Optional

from .errors import DomainError


class LatticeVector(NamedTuple):
    x: int
    y: int

    def __add__(self, other):
        return LatticeVector(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return LatticeVector(self.x - other[0], self.y - other[1])

    def __neg__(self):
        return LatticeVector(-self.x, -self.y)

    def __mul__(self, k):
        return LatticeVector(k * self.x, k * self.y)

    __rmul__ = __mul__

    def dot(self, other):
        return self.x * other[0] + self.y * other[1]

    def det(self, other):
        return self.x * other[1] - self.y * other[0]


def det(u, v):
    return u[0] * v[1] - u[1] * v[0]


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def primitive_decompose(v) -> tuple[int, LatticeVector]:
    """Split an integer vector as ``g * u`` with ``u`` primitive and ``g > 0``.

    ``g`` is the lattice length of the segment from the origin to ``v``.

    >>> primitive_decompose((2, 4))
    (2, LatticeVector(x=1, y=2))
    """
    x, y = int(v[0]), int(v[1])
    if x != v[0] or y != v[1]:
        raise DomainError(f"not an integer vector: {v!r}")
    g = math.gcd(x, y)
    if g == 0:
        raise DomainError("the zero vector has no primitive direction")
    return g, LatticeVector(x // g, y // g)


def primitive(v) -> LatticeVector:
    return primitive_decompose(v)[1]


class UnimodularPair(NamedTuple):
    """A node of the tree: an ordered pair of vectors and its generation."""

    v1: LatticeVector
    v2: LatticeVector
    depth: int = 0

    @classmethod
    def of(cls, v1, v2, depth: int = 0) -> "UnimodularPair":
        return cls(LatticeVector(*v1), LatticeVector(*v2), depth)

    @property
    def det(self):
        return det(self.v1, self.v2)

    @property
    def mediant(self) -> LatticeVector:
        return self.v1 + self.v2

    def children(self) -> tuple["UnimodularPair", "UnimodularPair"]:
        return children(self)

    def quadruple(self) -> tuple:
        """The entries ``(a, b, c, d)`` of the matrix with rows ``v1``, ``v2``."""
        return (self.v1.x, self.v1.y, self.v2.x, self.v2.y)


IDENTITY = UnimodularPair.of((1, 0), (0, 1))


def children(p: UnimodularPair) -> tuple[UnimodularPair, UnimodularPair]:
    m = p.v1 + p.v2
    return (UnimodularPair(p.v1, m, p.depth + 1), UnimodularPair(m, p.v2, p.depth + 1))


class TreeWalk:
    """Iterator over the admitted nodes of the tree rooted at ``basis``.

    ``admit`` must be monotone along the tree: a child is admitted only if
    its parent is.  This is not checked.  It holds for defect thresholds on
    convex domains, since the defect decreases from a node to its children
    (the child's tangent triangle sits inside the parent's).

    After iteration:

    * ``frontier`` holds the rejected children of admitted nodes (and the
      root if it was rejected);
    * ``pending`` holds nodes never examined because ``max_nodes`` was hit;
    * ``truncated`` tells whether that happened.

    The admitted nodes together with the subtrees of ``frontier`` and
    ``pending`` partition the whole tree.

    ``order`` is ``"dfs"`` (default), ``"bfs"`` or ``"priority"``; the last one
    pops the node with the largest ``key(node)`` first.
    """

    def __init__(
        self,
        basis: UnimodularPair,
        admit: Callable[[UnimodularPair], bool],
        max_nodes: Optional[int] = None,
        order: str = "dfs",
        key: Optional[Callable[[UnimodularPair], float]] = None,
    ):
        if order not in ("dfs", "bfs", "priority"):
            raise DomainError(f"unknown enumeration order {order!r}")
        if order == "priority" and key is None:
            raise DomainError("priority order needs a key")
        self.basis = basis
        self.admit = admit
        self.max_nodes = max_nodes
        self.order = order
        self.key = key
        self.frontier: list[UnimodularPair] = []
        self.pending: list[UnimodularPair] = []
        self.truncated = False
        self.node_count = 0
        self._started = False

    def __iter__(self) -> Iterator[UnimodularPair]:
        if self._started:
            raise RuntimeError("a TreeWalk can be consumed only once")
        self._started = True
        if self.order == "priority":
            yield from self._walk_priority()
        else:
            yield from self._walk_linear()

    def _walk_linear(self):
        work = deque([self.basis])
        take = work.pop if self.order == "dfs" else work.popleft
        while work:
            if self.max_nodes is not None and self.node_count >= self.max_nodes:
                self.truncated = True
                self.pending.extend(work)
                return
            node = take()
            if not self.admit(node):
                self.frontier.append(node)
                continue
            self.node_count += 1
            yield node
            left, right = children(node)
            if self.order == "dfs":
                work.append(right)
                work.append(left)
            else:
                work.append(left)
                work.append(right)

    def _walk_priority(self):
        counter = 0
        heap = [(-self.key(self.basis), counter, self.basis)]
        while heap:
            if self.max_nodes is not None and self.node_count >= self.max_nodes:
                self.truncated = True
                self.pending.extend(item[2] for item in heap)
                return
            _, _, node = heapq.heappop(heap)
            if not self.admit(node):
                self.frontier.append(node)
                continue
            self.node_count += 1
            yield node
            for child in children(node):
                counter += 1
                heapq.heappush(heap, (-self.key(child), counter, child))

    def collect(self) -> list[UnimodularPair]:
        return list(self)


def enumerate_tree(basis, admit, max_nodes=None, order="dfs", key=None) -> TreeWalk:
    """Return a :class:`TreeWalk`; iterate it to stream the admitted nodes."""
    if not isinstance(basis, UnimodularPair):
        basis = UnimodularPair.of(*basis)
    return TreeWalk(basis, admit, max_nodes=max_nodes, order=order, key=key)


def coefficient_matrix(pair: UnimodularPair, basis: UnimodularPair):
    """The integer matrix ``M`` with ``pair = M . basis`` (rows are vectors)."""
    d = basis.det
    (p, q), (r, s) = basis.v1, basis.v2
    # inverse of [[p, q], [r, s]] is [[s, -q], [-r, p]] / d
    rows = []
    for v in (pair.v1, pair.v2):
        rows.append((_div(v[0] * s - v[1] * r, d), _div(-v[0] * q + v[1] * p, d)))
    return tuple(rows)


def _div(a, b):
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b) if a % b else a // b
    return a / b
