"""Time the compiled KDE kernels against the NumPy fallback.

    python benchmarks/bench_kde.py              # default sizes
    python benchmarks/bench_kde.py --sizes 1000 20640 --repeat 5

Prints one row per (kernel, size): best-of-N wall time for each backend, the
speedup, and the largest relative disagreement between the two.
"""
import argparse
import sys
import time

import numpy as np

from cwbal import _kernels_py
from cwbal.density import scotts_bandwidth

try:
    from cwbal import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[500, 2000, 8000, 20640])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if _kernels is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`",
              file=sys.stderr)
        return 1

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<17}{'n':>7}{'python s':>11}{'compiled s':>12}{'speedup':>9}{'max rel diff':>14}")
    for n in args.sizes:
        # skewed, housing-like trait: evaluate the KDE at its own samples
        xs = np.clip(rng.gamma(2.5, 0.8, size=n), 0.15, 5.0)
        inv_h = 1.0 / scotts_bandwidth(n)
        for name in ("gauss_kernel_sum", "gauss_cdf_sum"):
            slow = getattr(_kernels_py, name)
            fast = getattr(_kernels, name)
            t_py, ref = best_of(lambda: slow(xs, xs, inv_h), args.repeat)
            t_c, got = best_of(lambda: np.asarray(fast(xs, xs, inv_h)), args.repeat)
            rel = float(np.max(np.abs(got - ref) / np.maximum(np.abs(ref), 1e-300)))
            print(f"{name:<17}{n:>7}{t_py:>11.4f}{t_c:>12.4f}{t_py / t_c:>8.1f}x{rel:>14.1e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
