"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from rdepth import _kernels_py
from rdepth.depth import direction_grid

try:
    from rdepth import _kernels as compiled
except ImportError:
    compiled = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if compiled is None:
        print("compiled extension not built; only the numpy kernels are available")
    rng = np.random.default_rng(0)
    dirs = direction_grid(2, 1000)
    z = np.zeros(2)
    print(f"{'kernel':<22}{'n':>7}{'delta':>8}{'numpy ms':>12}{'cython ms':>12}{'speedup':>9}")
    for n in (50, 500, 5000):
        pts = rng.standard_normal((n, 2))
        cases = [("closed_counts", None), ("sup_values", 0.0), ("sup_values", 0.1), ("inf_values", 0.1)]
        for name, delta in cases:
            extra = () if delta is None else (delta,)
            t_py = best_of(lambda: getattr(_kernels_py, name)(pts, z, dirs, *extra), args.repeat)
            row = f"{name:<22}{n:>7}{'' if delta is None else delta:>8}{1e3 * t_py:>12.3f}"
            if compiled is not None:
                t_c = best_of(lambda: getattr(compiled, name)(pts, z, dirs, *extra), args.repeat)
                row += f"{1e3 * t_c:>12.3f}{t_py / t_c:>8.1f}x"
            print(row)
        theta = np.sort(np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * np.pi))
        vs = np.column_stack([np.cos(theta), np.sin(theta)]) * np.abs(rng.standard_normal((n, 1)))
        t_py = best_of(lambda: _kernels_py.max_window_norm(theta, vs), args.repeat)
        row = f"{'max_window_norm':<22}{n:>7}{'':>8}{1e3 * t_py:>12.3f}"
        if compiled is not None:
            t_c = best_of(lambda: compiled.max_window_norm(theta, vs), args.repeat)
            row += f"{1e3 * t_c:>12.3f}{t_py / t_c:>8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
