"""Backend selection for the tree kernels.

The compiled module is used when it imports; ``TROPEX_PURE_PYTHON=1``
forces the pure-Python fallback.  ``BACKEND`` names the active one.
"""
import os

from . import _kernels_py
from ._kernels_py import KINDS, defects_np

if os.environ.get("TROPEX_PURE_PYTHON") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _speedups as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"

threshold_dfs = _impl.threshold_dfs
best_first = _impl.best_first
disk_F = _impl.disk_F

__all__ = ["BACKEND", "KINDS", "defects_np", "threshold_dfs", "best_first", "disk_F"]
