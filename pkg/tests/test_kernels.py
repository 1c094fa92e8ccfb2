import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tropex import _kernels_py, kernels

try:
    from tropex import _speedups
except ImportError:   # extension not built: parity tests are skipped
    _speedups = None

needs_ext = pytest.mark.skipif(_speedups is None, reason="compiled extension not built")
BACKENDS = [_kernels_py] + ([_speedups] if _speedups is not None else [])
DISK, LMU, PARABOLA = (_kernels_py.KINDS[k] for k in ("disk", "lmu", "parabola"))
I = (1.0, 0.0, 0.0, 1.0)
P = (1.0, 1.0, 0.0, 1.0)     # parabola basis at mu = 1/4
CASES = [(I, DISK, 2.0), (I, LMU, 1.5), (I, LMU, 3.0), (P, PARABOLA, 0.25)]


@needs_ext
@pytest.mark.parametrize("basis, kind, param", CASES)
@pytest.mark.parametrize("threshold", [1e-3, 1e-5])
def test_threshold_dfs_backends_agree_bitwise(basis, kind, param, threshold):
    a = _kernels_py.threshold_dfs(basis, kind, param, threshold, 10**7)
    b = _speedups.threshold_dfs(basis, kind, param, threshold, 10**7)
    for x, y in zip(a[:4], b[:4]):
        assert np.array_equal(x, y)
    assert a[4] == b[4]


@needs_ext
@pytest.mark.parametrize("basis, kind, param", CASES)
def test_best_first_backends_agree_bitwise(basis, kind, param):
    assert np.array_equal(_kernels_py.best_first(basis, kind, param, 5000),
                          _speedups.best_first(basis, kind, param, 5000))


@needs_ext
@given(st.floats(-0.99, 0.99), st.floats(-0.99, 0.99))
@settings(max_examples=50)
def test_disk_F_backends_agree(x, y):
    if x * x + y * y >= 0.98:
        return
    assert _speedups.disk_F(x, y, 10**6) == pytest.approx(_kernels_py.disk_F(x, y, 10**6), abs=1e-15)


@pytest.mark.parametrize("mod", BACKENDS)
def test_truncation_and_pending(mod):
    nodes, vals, front, pend, trunc = mod.threshold_dfs(I, DISK, 2.0, 1e-6, 100)
    assert trunc and len(nodes) == 100 and len(pend) > 0
    assert np.all(np.diff(np.sort(vals)) >= 0)


@pytest.mark.parametrize("mod", BACKENDS)
def test_root_argument_walks_a_subtree(mod):
    full = mod.threshold_dfs(I, DISK, 2.0, 1e-4, 10**7)
    left = mod.threshold_dfs(I, DISK, 2.0, 1e-4, 10**7, (1, 0, 1, 1))
    right = mod.threshold_dfs(I, DISK, 2.0, 1e-4, 10**7, (1, 1, 0, 1))
    assert len(full[0]) == 1 + len(left[0]) + len(right[0])
    assert math.fsum(full[1]) == pytest.approx(full[1][0] + math.fsum(left[1]) + math.fsum(right[1]), rel=1e-15)


@pytest.mark.parametrize("mod", BACKENDS)
def test_overflow_guard(mod):
    big = 2**61
    with pytest.raises(OverflowError):
        mod.threshold_dfs(I, DISK, 2.0, 0.0, 10, (big, 1, big - 1, 1))


@pytest.mark.parametrize("mod", BACKENDS)
def test_negative_defect_is_an_arithmetic_error(mod):
    with pytest.raises(ArithmeticError):
        mod.threshold_dfs((0.0, -1.0, 1.0, 2.0), PARABOLA, 1.0, 1e-3, 100)
    with pytest.raises(ArithmeticError):
        mod.best_first((0.0, -1.0, 1.0, 2.0), PARABOLA, 1.0, 10)


def _node(word):
    a, b, c, d = 1, 0, 0, 1
    for step in word:
        if step:
            a, b = a + c, b + d
        else:
            c, d = a + c, b + d
    return (a, b, c, d)


@given(st.lists(st.lists(st.integers(0, 1), max_size=25), min_size=1, max_size=20))
def test_vectorized_defects_match_scalar(words):
    nodes = [_node(w) for w in words]
    arr = np.asarray(nodes, dtype=np.int64)
    for basis, kind, param in CASES:
        vec = kernels.defects_np(kind, param, basis, arr)
        for node, v in zip(nodes, vec):
            s = _kernels_py._node_defect(kind, param, basis, node)
            if kind == LMU:   # a difference of norms: absolute error ~ |v| eps
                assert abs(v - s) <= 8 * np.finfo(float).eps * max(node)
            else:
                assert v == s


@pytest.mark.parametrize("mod", BACKENDS)
def test_disk_F_oracle_values(mod):
    assert mod.disk_F(0.0, 0.0, 10**6) == 1.0
    assert mod.disk_F(0.5, 0.0, 10**6) == pytest.approx(0.5, abs=1e-15)
    # brute force over |v| <= 40 is exact away from the circle
    for x, y in [(0.3, 0.2), (-0.6, 0.5), (0.1, -0.85)]:
        brute = min(math.hypot(p, q) + p * x + q * y
                    for p in range(-40, 41) for q in range(-40, 41)
                    if (p, q) != (0, 0) and math.gcd(p, q) == 1)
        assert mod.disk_F(x, y, 10**6) == pytest.approx(brute, abs=1e-14)


def test_pure_python_can_be_forced():
    env = dict(os.environ, TROPEX_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from tropex import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_ext
def test_extension_is_the_default():
    env = {k: v for k, v in os.environ.items() if k != "TROPEX_PURE_PYTHON"}
    out = subprocess.run([sys.executable, "-c", "from tropex import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "cython"
