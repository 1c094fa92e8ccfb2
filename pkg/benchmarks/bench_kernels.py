"""Compare the compiled tree kernels with the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--quick]

Both backends are imported directly, so the choice made by
``tropex.kernels`` at import time does not matter.  Each row reports the
best of ``--repeat`` runs and checks that both backends return the same
result (bitwise for the sums, since both use ``math.fsum``).
"""
import argparse
import math
import sys
import time

import numpy as np

from tropex import _kernels_py

try:
    from tropex import _speedups
except ImportError:
    _speedups = None

DISK = (1.0, 0.0, 0.0, 1.0)
KIND_DISK, KIND_PARABOLA = _kernels_py.KINDS["disk"], _kernels_py.KINDS["parabola"]
PARABOLA_BASIS = (1.0, 1.0, 0.0, 1.0)


def best_of(fn, repeat):
    best, out = math.inf, None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases(quick):
    thr = (1e-3, 1e-4) if quick else (1e-4, 1e-5, 1e-6)
    budgets = (10**4,) if quick else (10**5, 10**6)
    for t in thr:
        yield (f"threshold_dfs disk thr={t:g}",
               lambda m, t=t: m.threshold_dfs(DISK, KIND_DISK, 2.0, t, 10**8),
               lambda r: math.fsum(r[1]))
    for t in thr[:2]:
        yield (f"threshold_dfs parabola(1/4) thr={t:g}",
               lambda m, t=t: m.threshold_dfs(PARABOLA_BASIS, KIND_PARABOLA, 0.25, t, 10**8),
               lambda r: math.fsum(r[1]))
    for b in budgets:
        yield (f"best_first disk budget={b}",
               lambda m, b=b: m.best_first(DISK, KIND_DISK, 2.0, b),
               lambda r: math.fsum(r))
    pts = [(0.1, 0.2), (0.5, -0.3), (0.9, 0.05), (-0.7, 0.69)]
    yield ("disk_F at 4 points",
           lambda m: [m.disk_F(x, y, 10**6) for x, y in pts],
           lambda r: math.fsum(r))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="skip the largest cases")
    args = ap.parse_args(argv)
    if _speedups is None:
        print("compiled extension tropex._speedups is not built; nothing to compare", file=sys.stderr)
        return 1
    print(f"{'case':<38} {'cython ms':>10} {'python ms':>10} {'speedup':>8}  agree")
    ok = True
    for name, run, digest in cases(args.quick):
        tc, rc = best_of(lambda: run(_speedups), args.repeat)
        tp, rp = best_of(lambda: run(_kernels_py), max(1, args.repeat // 3))
        same = digest(rc) == digest(rp)
        if isinstance(rc, tuple):
            same = same and all(np.array_equal(a, b) for a, b in zip(rc[:4], rp[:4]))
        ok &= same
        print(f"{name:<38} {tc * 1e3:>10.2f} {tp * 1e3:>10.2f} {tp / tc:>7.0f}x  {'yes' if same else 'NO'}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
