"""Timings for the compiled kernels against their numpy fallbacks.

Run:  python3 benchmarks/bench_kernels.py [size]

Each kernel pair is checked for agreement before timing; the compiled
path is warmed once so JIT cost is not billed to the measurement.
"""

import sys
import time

import numpy as np

from dixlab import kernels
from dixlab._accel import HAVE_NUMBA


def _time(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 4_000_000
    rng = np.random.Generator(np.random.Philox(0))
    values = np.sort(rng.random(n))[::-1].copy()
    ks = 2 ** np.arange(1, int(np.log2(n)) + 1, dtype=np.int64)
    other = np.sort(rng.random(n))[::-1].copy()

    cases = [
        ("comp_sum", kernels._comp_sum_nb, kernels._comp_sum_np, (values,)),
        ("power_sum", kernels._power_sum_nb, kernels._power_sum_np,
         (values, 1.25)),
        ("heat_sum", kernels._heat_sum_nb, kernels._heat_sum_np,
         (values, 50.0, 1.0)),
        ("prefix_log_average", kernels._prefix_log_average_nb,
         kernels._prefix_log_average_np, (values, ks)),
        ("max_log_average", kernels._max_log_average_nb,
         kernels._max_log_average_np, (values,)),
        ("prefix_dominates", kernels._prefix_dominates_nb,
         kernels._prefix_dominates_np, (values, other)),
        ("lattice_w", kernels._lattice_w_nb, kernels._lattice_w_np,
         (2, max(64, int(np.sqrt(n))))),
    ]

    if not HAVE_NUMBA:
        print("numba unavailable or disabled; timing the numpy path only")
    print("%-20s %12s %12s %8s" % ("kernel", "numba [ms]", "numpy [ms]",
                                   "speedup"))
    for name, nb, np_fn, args in cases:
        ref = np.asarray(np_fn(*args), dtype=np.float64)
        if HAVE_NUMBA:
            nb(*args)  # warm the JIT
            got = np.asarray(nb(*args), dtype=np.float64)
            if name == "lattice_w":
                agree = np.array_equal(np.sort(got), np.sort(ref))
            else:
                scale = max(1.0, float(np.max(np.abs(ref))))
                agree = np.allclose(got, ref, rtol=1e-12, atol=1e-12 * scale)
            if not agree:
                raise SystemExit("%s: compiled and numpy paths disagree"
                                 % name)
            t_nb = _time(nb, *args)
        else:
            t_nb = float("nan")
        t_np = _time(np_fn, *args)
        ratio = t_np / t_nb if t_nb == t_nb and t_nb > 0 else float("nan")
        print("%-20s %12.2f %12.2f %8.2f" % (name, t_nb * 1e3, t_np * 1e3,
                                             ratio))


if __name__ == "__main__":
    main()
