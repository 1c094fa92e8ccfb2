import itertools
from collections import deque

import pytest
from hypothesis import given, strategies as st

from tropex.errors import DomainError
from tropex.lattice import (IDENTITY, LatticeVector, UnimodularPair, children, coefficient_matrix,
                            enumerate_tree, primitive, primitive_decompose)

U = ((1, 1), (0, 1))   # (v1, v2) -> (v1, v1 + v2)
L = ((1, 0), (1, 1))   # (v1, v2) -> (v1 + v2, v2)


def matmul(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)) for i in range(2))


def follow(word, start=IDENTITY):
    node = start
    for step in word:
        node = children(node)[step]
    return node


def test_primitive_decompose():
    assert primitive_decompose((2, 4)) == (2, LatticeVector(1, 2))
    assert primitive_decompose((-3, 0)) == (3, LatticeVector(-1, 0))
    assert primitive((6, -9)) == (2, -3)


@pytest.mark.parametrize("bad", [(0, 0), (1.5, 2)])
def test_primitive_decompose_rejects(bad):
    with pytest.raises(DomainError):
        primitive_decompose(bad)


def test_children_of_identity():
    left, right = children(IDENTITY)
    assert (left.v1, left.v2) == ((1, 0), (1, 1))
    assert (right.v1, right.v2) == ((1, 1), (0, 1))
    assert left.depth == right.depth == 1


def test_lattice_vector_arithmetic():
    v = LatticeVector(2, 3)
    assert v + (1, 1) == (3, 4)
    assert v - (1, 1) == (1, 2)
    assert -v == (-2, -3)
    assert 2 * v == v * 2 == (4, 6)
    assert v.det((1, 0)) == -3
    assert v.dot((1, 1)) == 5


@pytest.mark.parametrize("k", range(11))
def test_tree_level_is_the_set_of_words_of_length_k(k):
    level = [IDENTITY]
    for _ in range(k):
        level = [c for node in level for c in children(node)]
    nodes = {node.quadruple() for node in level}
    words = set()
    for word in itertools.product((L, U), repeat=k):
        m = ((1, 0), (0, 1))
        for g in word:
            m = matmul(g, m)
        words.add((m[0][0], m[0][1], m[1][0], m[1][1]))
    assert len(nodes) == len(level) == 2 ** k
    assert nodes == words
    assert all(a * d - b * c == 1 and min(a, b, c, d) >= 0 for a, b, c, d in nodes)


@given(st.lists(st.integers(0, 1), max_size=10), st.lists(st.integers(0, 1), max_size=10))
def test_tree_paths_are_injective(w1, w2):
    if w1 != w2:
        assert follow(w1).quadruple() != follow(w2).quadruple()


@given(st.lists(st.integers(0, 1), max_size=12),
       st.tuples(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5)))
def test_coefficient_matrix_recovers_the_word(word, b):
    p, q, r, s = b
    if p * s - q * r == 0:
        return
    basis = UnimodularPair.of((p, q), (r, s))
    node = follow(word, basis)
    plain = follow(word)
    m = coefficient_matrix(node, basis)
    assert m == (tuple(plain.v1), tuple(plain.v2))


def _paths_to_depth(depth):
    out = {(): IDENTITY}
    queue = deque([()])
    while queue:
        w = queue.popleft()
        if len(w) == depth:
            continue
        for i, c in enumerate(children(out[w])):
            out[w + (i,)] = c
            queue.append(w + (i,))
    return out


@given(st.integers(2, 40), st.one_of(st.none(), st.integers(0, 60)), st.sampled_from(["dfs", "bfs", "priority"]))
def test_frontier_partition(bound, max_nodes, order):
    """Admitted nodes and the subtrees of frontier and pending nodes partition the tree."""
    admit = lambda p: sum(p.quadruple()) <= bound  # monotone: children have larger entries
    walk = enumerate_tree(IDENTITY, admit, max_nodes=max_nodes, order=order,
                          key=(lambda p: -sum(p.quadruple())) if order == "priority" else None)
    admitted = {p.quadruple() for p in walk}
    roots = [p.quadruple() for p in walk.frontier + walk.pending]
    assert len(roots) == len(set(roots))
    assert walk.truncated == bool(walk.pending)
    root_set = set(roots)
    for w, node in _paths_to_depth(7).items():
        ancestors = [_prefix_node(w[:i]) for i in range(len(w) + 1)]
        hits = sum(a in root_set for a in ancestors)
        if node.quadruple() in admitted:
            assert hits == 0
        else:
            assert hits == 1


def _prefix_node(w):
    return follow(w).quadruple()


def test_walk_can_run_once():
    walk = enumerate_tree(IDENTITY, lambda p: p.depth < 2)
    assert len(walk.collect()) == 3
    with pytest.raises(RuntimeError):
        list(walk)


def test_walk_rejects_unknown_order():
    with pytest.raises(DomainError):
        enumerate_tree(IDENTITY, lambda p: True, order="sideways")
    with pytest.raises(DomainError):
        enumerate_tree(IDENTITY, lambda p: True, order="priority")
