"""Compare the compiled and pure-Python Jacobi kernels.

    python benchmarks/bench_svd.py [--sizes 2 4 8 16] [--repeats 20]

Prints one line per (kernel, n) with the median wall time of a full ``svd``
call and the speedup of the compiled kernel over the fallback.
"""

import argparse
import statistics
import time

import numpy as np

from tingley._backend import available_kernels
from tingley.matrix import svd


def time_kernel(kernel, mats):
    times = []
    for a in mats:
        t0 = time.perf_counter()
        svd(a, kernel=kernel)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[2, 4, 8, 16])
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    kernels = available_kernels()
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':>8} {'n':>4} {'median':>12}")
    for n in args.sizes:
        mats = [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                for _ in range(args.repeats)]
        medians = {}
        for name, kernel in sorted(kernels.items()):
            medians[name] = time_kernel(kernel, mats)
            print(f"{name:>8} {n:>4} {medians[name] * 1e3:>10.3f}ms")
        if "cython" in medians:
            print(f"{'speedup':>8} {n:>4} {medians['python'] / medians['cython']:>11.1f}x")


if __name__ == "__main__":
    main()
